//! State occupation probabilities and cumulative hazards on a small
//! hand-checkable dataset.
//!
//! Three subjects in an illness-death model: A falls ill at t=1 and dies at
//! t=4, B dies directly at t=2, C is censored in the initial state at t=3.

use multistate::estimate::{state_occupation, InitialPolicy};
use multistate::hazard::nelson_aalen;
use multistate::io::read_long_format;

const DATA: &str = "\
id,from,to,entry,exit
A,0,1,0,1
A,1,2,1,4
B,0,2,0,2
C,0,cens,0,3
";

fn main() {
    let data = read_long_format(DATA.as_bytes()).unwrap();
    println!("{} subjects, {} states", data.n(), data.state_space().num_states());

    let haz = nelson_aalen(&data.event_table());
    println!("\nNelson-Aalen cumulative hazards:");
    for (from, to) in data.state_space().transitions() {
        let curve = haz.cumulative(from, to);
        if curve.is_empty() {
            continue;
        }
        for (t, value) in curve.iter() {
            println!("  A_{from}{to}({t}) = {value:.4}");
        }
    }

    let curve = state_occupation(&data, &InitialPolicy::Multinomial).unwrap();
    println!("\nState occupation probabilities (multinomial start):");
    print!("  t=0   ");
    for p in curve.initial() {
        print!(" {p:.4}");
    }
    println!();
    for (j, t) in curve.times().iter().enumerate() {
        print!("  t={t:<4}");
        for p in &curve.rows()[j] {
            print!(" {p:.4}");
        }
        println!();
    }
    println!("\nAt t=4 the occupation vector is (1/3, 0, 2/3): one of three");
    println!("subjects is still at risk in the initial state, two thirds of the");
    println!("mass has been absorbed.");
}
