//! Small dense square matrices in row-major order.
//!
//! State spaces in this crate are tiny (a handful of states), so a flat
//! `Vec<f64>` beats pulling in a linear-algebra dependency.

/// A `dim x dim` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add_to(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] += value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    /// `self * other`, allocating the result.
    pub fn matmul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = SquareMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    /// Multiply a row vector in place: `row <- row * self`.
    pub fn apply_left(&self, row: &mut [f64], scratch: &mut [f64]) {
        let d = self.dim;
        assert_eq!(row.len(), d);
        assert_eq!(scratch.len(), d);
        scratch.fill(0.0);
        for (k, &r) in row.iter().enumerate() {
            if r == 0.0 {
                continue;
            }
            for (acc, &m) in scratch.iter_mut().zip(&self.data[k * d..(k + 1) * d]) {
                *acc += r * m;
            }
        }
        row.copy_from_slice(scratch);
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let mut a = SquareMatrix::zeros(3);
        a.set(0, 1, 2.0);
        a.set(1, 2, -0.5);
        a.set(2, 0, 1.5);
        let id = SquareMatrix::identity(3);
        assert_eq!(a.matmul(&id), a);
        assert_eq!(id.matmul(&a), a);
    }

    #[test]
    fn apply_left_matches_matmul() {
        let mut a = SquareMatrix::identity(3);
        a.set(0, 0, 0.5);
        a.set(0, 1, 0.5);
        a.set(1, 2, 0.25);
        let mut row = [0.2, 0.3, 0.5];
        let mut scratch = [0.0; 3];
        a.apply_left(&mut row, &mut scratch);
        assert!((row[0] - 0.1).abs() < 1e-15);
        assert!((row[1] - 0.4).abs() < 1e-15);
        assert!((row[2] - 0.575).abs() < 1e-15);
    }
}
