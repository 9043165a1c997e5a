//! Compiles every constraint template and derives from the automaton
//! whether it restricts execution, termination, or both.

use dpm_core::model::Alphabet;
use dpm_core::{compile_constraint, ConstraintInstance, Template};

fn main() {
    let alphabet = Alphabet::new(["A", "B", "C"]);
    println!("{:<22} {:>6} {:>9} {:>11}", "constraint", "states", "execution", "termination");
    for t in Template::ALL {
        let c = match (t.is_counting(), t.arity()) {
            (true, _) => ConstraintInstance::counting(t, 1, "A"),
            (false, 1) => ConstraintInstance::unary(t, "A"),
            _ => ConstraintInstance::binary(t, "A", "B"),
        };
        let a = compile_constraint(&c, &alphabet).expect("well-formed");
        let k = a.classify();
        println!(
            "{:<22} {:>6} {:>9} {:>11}",
            c.to_string(),
            a.state_count(),
            k.execution_restricting,
            k.termination_restricting
        );
    }
}
