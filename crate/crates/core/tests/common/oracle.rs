//! Direct predicates over finite completion sequences, written independently
//! of the automaton construction.

use dpm_core::{ConstraintInstance, Template};

fn count(trace: &[&str], a: &str) -> usize {
    trace.iter().filter(|&&x| x == a).count()
}

fn positions<'a>(trace: &'a [&str], a: &'a str) -> impl Iterator<Item = usize> + 'a {
    trace.iter().enumerate().filter(move |(_, &x)| x == a).map(|(i, _)| i)
}

/// Whether `trace` satisfies `c`. An empty trace satisfies init.
pub fn holds(c: &ConstraintInstance, trace: &[&str]) -> bool {
    let a = c.operands[0].as_str();
    let b = c.operands.get(1).map(String::as_str).unwrap_or("");
    let n = c.cardinality.unwrap_or(0) as usize;
    match c.template {
        Template::Existence => count(trace, a) >= n,
        Template::Absence => count(trace, a) <= n,
        Template::Exactly => count(trace, a) == n,
        Template::Init => trace.first().is_none_or(|&x| x == a),
        Template::RespondedExistence => count(trace, a) == 0 || count(trace, b) > 0,
        Template::Response => positions(trace, a).all(|i| trace[i + 1..].contains(&b)),
        Template::Precedence => positions(trace, b).all(|i| trace[..i].contains(&a)),
        Template::Succession => {
            positions(trace, a).all(|i| trace[i + 1..].contains(&b))
                && positions(trace, b).all(|i| trace[..i].contains(&a))
        }
        Template::ChainResponse => positions(trace, a).all(|i| trace.get(i + 1) == Some(&b)),
        Template::ChainPrecedence => positions(trace, b).all(|i| i > 0 && trace[i - 1] == a),
        Template::NegResponse => match positions(trace, a).next() {
            Some(first) => !trace[first + 1..].contains(&b),
            None => true,
        },
    }
}

/// All sequences over `alphabet` of length exactly `len`.
pub fn words<'a>(alphabet: &[&'a str], len: usize) -> Vec<Vec<&'a str>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&x| {
                    let mut next = w.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    out
}

/// All sequences over `alphabet` of length at most `max`, shortest first.
pub fn words_up_to<'a>(alphabet: &[&'a str], max: usize) -> Vec<Vec<&'a str>> {
    (0..=max).flat_map(|len| words(alphabet, len)).collect()
}

/// Whether some extension of `prefix` of length at most `max_ext` satisfies `c`.
pub fn satisfiable_from(c: &ConstraintInstance, prefix: &[&str], alphabet: &[&str], max_ext: usize) -> bool {
    let mut trace = prefix.to_vec();
    extend(c, &mut trace, alphabet, max_ext)
}

fn extend<'a>(c: &ConstraintInstance, trace: &mut Vec<&'a str>, alphabet: &[&'a str], left: usize) -> bool {
    if holds(c, trace) {
        return true;
    }
    if left == 0 {
        return false;
    }
    for &x in alphabet {
        trace.push(x);
        let ok = extend(c, trace, alphabet, left - 1);
        trace.pop();
        if ok {
            return true;
        }
    }
    false
}

/// One instance of every template over `A`, `B` with cardinalities 0..=2.
pub fn catalogue() -> Vec<ConstraintInstance> {
    let mut out = Vec::new();
    for t in Template::ALL {
        if t.is_counting() {
            for n in 0..=2 {
                out.push(ConstraintInstance::counting(t, n, "A"));
            }
        } else if t.arity() == 1 {
            out.push(ConstraintInstance::unary(t, "A"));
        } else {
            out.push(ConstraintInstance::binary(t, "A", "B"));
        }
    }
    out
}

/// (execution_restricting, termination_restricting) per template.
pub fn classification_table(t: Template) -> (bool, bool) {
    match t {
        Template::Existence | Template::RespondedExistence | Template::Response => (false, true),
        Template::Absence
        | Template::Precedence
        | Template::ChainPrecedence
        | Template::NegResponse
        | Template::Init => (true, false),
        Template::Exactly | Template::Succession | Template::ChainResponse => (true, true),
    }
}
