//! Plain-text state files.
//!
//! ```text
//! <N> <twoJ_1,twoJ_2,...,twoJ_N> <pure|mixed>
//! <re> <im>
//! ...
//! ```
//!
//! The header is followed by one `re im` pair per line: the amplitudes of a
//! pure state, or the density matrix entries in row-major order. Numbers are
//! written with 17 significant digits, which round-trips every `f64` exactly.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::spin::{SiteList, SpinQuantum};
use crate::states::QuantumState;

pub fn write_state<W: Write>(state: &QuantumState, mut out: W) -> Result<()> {
    let sites = state.sites();
    let two_js: Vec<String> = sites.sites().iter().map(|s| s.two_j().to_string()).collect();
    let kind = if state.is_pure() { "pure" } else { "mixed" };
    writeln!(out, "{} {} {}", sites.len(), two_js.join(","), kind)?;
    let entries: &[C64] = match state {
        QuantumState::Pure { amplitudes, .. } => amplitudes,
        QuantumState::Mixed { rho, .. } => rho.as_slice(),
    };
    for z in entries {
        writeln!(out, "{:.16e} {:.16e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn state_to_string(state: &QuantumState) -> String {
    let mut buf = Vec::new();
    write_state(state, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn read_state<R: BufRead>(input: R) -> Result<QuantumState> {
    let mut lines = input.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(ln, "header must be `<N> <twoJ list> <pure|mixed>`"));
    }
    let n: usize = fields[0].parse().map_err(|_| parse_err(ln, "bad site count"))?;
    let spins: Vec<SpinQuantum> = fields[1]
        .split(',')
        .map(|t| t.parse::<u32>().map(SpinQuantum::from_two_j))
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(ln, "bad twoJ list"))?;
    if spins.len() != n {
        return Err(parse_err(ln, format!("expected {n} spins, found {}", spins.len())));
    }
    let sites = SiteList::new(spins);
    let pure = match fields[2] {
        "pure" => true,
        "mixed" => false,
        other => return Err(parse_err(ln, format!("unknown kind `{other}`"))),
    };
    let d = sites.total_dim();
    let expected = if pure { d } else { d * d };
    let mut entries = Vec::with_capacity(expected);
    for (ln, line) in lines {
        let line = line?;
        let mut parts = line.split_whitespace();
        let mut next = || -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| parse_err(ln, "expected `re im`"))?
                .parse()
                .map_err(|_| parse_err(ln, "bad number"))
        };
        let (re, im) = (next()?, next()?);
        if parts.next().is_some() {
            return Err(parse_err(ln, "trailing fields"));
        }
        entries.push(C64::new(re, im));
    }
    if entries.len() != expected {
        return Err(Error::DimensionMismatch { expected, actual: entries.len() });
    }
    if pure {
        QuantumState::pure(sites, entries)
    } else {
        QuantumState::mixed(sites, ComplexMatrix::from_row_major(entries)?)
    }
}

pub fn state_from_str(text: &str) -> Result<QuantumState> {
    read_state(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{dur_state, random_pure};
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let s = state_to_string(&dur_state(3).unwrap());
        assert!(s.starts_with("3 1,1,1 mixed\n"));
        assert_eq!(s.lines().count(), 1 + 64);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(state_from_str("").is_err());
        assert!(state_from_str("1 1 pure\n1 0\n").is_err());
        assert!(state_from_str("1 1 weird\n1 0\n0 0\n").is_err());
        assert!(state_from_str("2 1 pure\n1 0\n0 0\n").is_err());
        assert!(state_from_str("1 1 pure\n1 0 0\n0 0\n").is_err());
        assert!(state_from_str("1 1 pure\n1 0\n0 0\n").is_ok());
    }

    proptest! {
        #[test]
        fn exact_round_trip(seed in any::<u64>(), two_j in 1u32..4, n in 1usize..4, mixed in any::<bool>()) {
            let sites = SiteList::uniform(n, SpinQuantum::from_two_j(two_j));
            let mut state = random_pure(&sites, seed);
            if mixed {
                state = state.to_mixed();
            }
            let back = state_from_str(&state_to_string(&state)).unwrap();
            prop_assert_eq!(back, state);
        }
    }
}
