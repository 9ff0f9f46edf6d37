//! Long-format delimited text, the crate's single persistent data
//! interchange.
//!
//! Comma-separated with header `id,from,to,entry,exit`. States are
//! nonnegative integers, times decimal literals, censoring is encoded as
//! `to = cens`.

use std::io::{Read, Write};

use crate::data::{validate_subject, DataError, Dataset, ObservationRecord, Outcome, StateSpace, Subject};

pub const CENSORED_MARKER: &str = "cens";

/// Read a long-format dataset, inferring the state space from the rows:
/// states are those mentioned, transitions are the pairs observed, and
/// states never observed as `from` are treated as absorbing.
pub fn read_long_format<R: Read>(reader: R) -> Result<Dataset, DataError> {
    let rows = parse_rows(reader)?;
    let space = infer_state_space(&rows)?;
    assemble(space, rows)
}

/// Read a long-format dataset and validate it against a known state space.
pub fn read_long_format_with<R: Read>(
    reader: R,
    space: StateSpace,
) -> Result<Dataset, DataError> {
    let rows = parse_rows(reader)?;
    assemble(space, rows)
}

/// Write a dataset in long format.
pub fn write_long_format<W: Write>(data: &Dataset, mut writer: W) -> std::io::Result<()> {
    writeln!(writer, "id,from,to,entry,exit")?;
    for subject in data.subjects() {
        for record in &subject.records {
            let to = match record.outcome {
                Outcome::Transition(to) => to.to_string(),
                Outcome::Censored => CENSORED_MARKER.to_string(),
            };
            writeln!(
                writer,
                "{},{},{},{},{}",
                subject.id, record.from_state, to, record.entry, record.exit
            )?;
        }
    }
    Ok(())
}

struct RawRow {
    row: usize,
    id: String,
    from: usize,
    to: Option<usize>,
    entry: f64,
    exit: f64,
}

fn parse_rows<R: Read>(reader: R) -> Result<Vec<RawRow>, DataError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = csv
            .headers()
            .map_err(|e| DataError::MalformedRow {
                row: 1,
                msg: e.to_string(),
            })?
            .clone();
        let expected = ["id", "from", "to", "entry", "exit"];
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(DataError::MalformedRow {
                row: 1,
                msg: format!("expected header id,from,to,entry,exit, got {}", got.join(",")),
            });
        }
    }
    let mut rows = Vec::new();
    for (i, result) in csv.records().enumerate() {
        let row = i + 2; // 1-based, after the header
        let record = result.map_err(|e| DataError::MalformedRow {
            row,
            msg: e.to_string(),
        })?;
        if record.len() != 5 {
            return Err(DataError::MalformedRow {
                row,
                msg: format!("expected 5 fields, got {}", record.len()),
            });
        }
        let field = |k: usize| record.get(k).unwrap_or("");
        let id = field(0).to_string();
        if id.is_empty() {
            return Err(DataError::MalformedRow {
                row,
                msg: "empty id".into(),
            });
        }
        let from: usize = field(1).parse().map_err(|_| DataError::MalformedRow {
            row,
            msg: format!("invalid from-state {:?}", field(1)),
        })?;
        let to = if field(2) == CENSORED_MARKER {
            None
        } else {
            Some(field(2).parse().map_err(|_| DataError::MalformedRow {
                row,
                msg: format!("invalid to-state {:?}", field(2)),
            })?)
        };
        let entry: f64 = field(3).parse().map_err(|_| DataError::MalformedRow {
            row,
            msg: format!("invalid entry time {:?}", field(3)),
        })?;
        let exit: f64 = field(4).parse().map_err(|_| DataError::MalformedRow {
            row,
            msg: format!("invalid exit time {:?}", field(4)),
        })?;
        rows.push(RawRow {
            row,
            id,
            from,
            to,
            entry,
            exit,
        });
    }
    Ok(rows)
}

fn infer_state_space(rows: &[RawRow]) -> Result<StateSpace, DataError> {
    let mut max_state = 0usize;
    let mut seen_as_from = std::collections::BTreeSet::new();
    let mut transitions = std::collections::BTreeSet::new();
    for row in rows {
        max_state = max_state.max(row.from);
        seen_as_from.insert(row.from);
        if let Some(to) = row.to {
            max_state = max_state.max(to);
            transitions.insert((row.from, to));
        }
    }
    let num_states = max_state + 1;
    let absorbing: Vec<usize> = (0..num_states)
        .filter(|s| !seen_as_from.contains(s))
        .collect();
    StateSpace::new(num_states, absorbing, transitions)
}

fn assemble(space: StateSpace, rows: Vec<RawRow>) -> Result<Dataset, DataError> {
    // Group rows by subject in order of first appearance, sorting each
    // subject's rows by entry time.
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, Vec<RawRow>> =
        std::collections::HashMap::new();
    for row in rows {
        let group = groups.entry(row.id.clone()).or_insert_with(|| {
            order.push(row.id.clone());
            Vec::new()
        });
        group.push(row);
    }
    let mut subjects = Vec::with_capacity(order.len());
    for id in order {
        let mut group = groups.remove(&id).unwrap();
        group.sort_by(|a, b| a.entry.total_cmp(&b.entry));
        let first_row = group[0].row;
        let records: Vec<ObservationRecord> = group
            .iter()
            .map(|r| ObservationRecord {
                entry: r.entry,
                exit: r.exit,
                from_state: r.from,
                outcome: match r.to {
                    Some(to) => Outcome::Transition(to),
                    None => Outcome::Censored,
                },
            })
            .collect();
        let subject = Subject::new(id, records);
        validate_subject(&space, &subject, Some(first_row))?;
        subjects.push(subject);
    }
    Dataset::new(space, subjects)
}

#[cfg(test)]
mod tests {
    use super::*;

    const D1: &str = "id,from,to,entry,exit\nA,0,1,0,1\nA,1,2,1,4\nB,0,2,0,2\nC,0,cens,0,3\n";

    #[test]
    fn reads_d1() {
        let data = read_long_format(D1.as_bytes()).unwrap();
        assert_eq!(data.n(), 3);
        assert_eq!(data.state_space().num_states(), 3);
        assert!(data.state_space().is_absorbing(2));
        assert!(data.state_space().allows(0, 1));
        let a = &data.subjects()[0];
        assert_eq!(a.records.len(), 2);
        assert_eq!(a.records[1].outcome, Outcome::Transition(2));
        let c = &data.subjects()[2];
        assert_eq!(c.records[0].outcome, Outcome::Censored);
    }

    #[test]
    fn chain_violation_reports_row() {
        let text = "id,from,to,entry,exit\nA,0,1,0,1\nA,0,2,1,4\n";
        let err = read_long_format(text.as_bytes()).unwrap_err();
        match err {
            DataError::ChainViolation { row: Some(row), found, expected, .. } => {
                assert_eq!(row, 3);
                assert_eq!((found, expected), (0, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn entry_not_before_exit_reports_row() {
        let text = "id,from,to,entry,exit\nA,0,1,2,2\n";
        let err = read_long_format(text.as_bytes()).unwrap_err();
        assert!(matches!(err, DataError::BadInterval { row: Some(2), .. }));
    }

    #[test]
    fn bad_number_reports_row() {
        let text = "id,from,to,entry,exit\nA,0,1,zero,1\n";
        let err = read_long_format(text.as_bytes()).unwrap_err();
        assert!(matches!(err, DataError::MalformedRow { row: 2, .. }));
    }

    #[test]
    fn disallowed_transition_against_given_space() {
        let text = "id,from,to,entry,exit\nA,0,2,0,1\n";
        let space = StateSpace::new(3, [2], [(0, 1), (1, 2)]).unwrap();
        let err = read_long_format_with(text.as_bytes(), space).unwrap_err();
        assert!(matches!(
            err,
            DataError::DisallowedTransition { from: 0, to: 2, .. }
        ));
    }

    #[test]
    fn roundtrips() {
        let data = read_long_format(D1.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_long_format(&data, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), D1);
    }

    #[test]
    fn rows_are_sorted_per_subject() {
        let text = "id,from,to,entry,exit\nA,1,2,1,4\nA,0,1,0,1\n";
        let data = read_long_format(text.as_bytes()).unwrap();
        assert_eq!(data.subjects()[0].records[0].from_state, 0);
    }
}
