//! Text format for group definitions:
//!
//! ```text
//! # comment
//! group <name>
//! alphabet <d>
//! state <name> perm <i0> ... <i(d-1)> -> <t0> ... <t(d-1)>
//! ```

use super::{is_identifier, AutomatonGroup, StateSpec, MAX_ALPHABET};
use crate::error::{Error, Result};

/// Splits a line into tokens with their 1-based columns, dropping `#` comments.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_group(text: &str) -> Result<AutomatonGroup> {
    let mut name: Option<String> = None;
    let mut d: Option<usize> = None;
    let mut specs: Vec<(usize, StateSpec)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = tokens(line);
        let Some(&(col, directive)) = toks.first() else {
            continue;
        };
        match directive {
            "group" => {
                if toks.len() != 2 || !is_identifier(toks[1].1) {
                    return Err(Error::parse(lineno, col, "expected `group <name>`"));
                }
                if name.is_some() {
                    return Err(Error::parse(lineno, col, "duplicate `group` directive"));
                }
                name = Some(toks[1].1.to_string());
            }
            "alphabet" => {
                if toks.len() != 2 {
                    return Err(Error::parse(lineno, col, "expected `alphabet <d>`"));
                }
                let (c, tok) = toks[1];
                let v: usize = tok.parse().map_err(|_| {
                    Error::parse(lineno, c, format!("invalid alphabet size `{tok}`"))
                })?;
                if !(2..=MAX_ALPHABET).contains(&v) {
                    return Err(Error::parse(
                        lineno,
                        c,
                        format!("alphabet size must be in 2..={MAX_ALPHABET}"),
                    ));
                }
                if d.is_some() {
                    return Err(Error::parse(lineno, col, "duplicate `alphabet` directive"));
                }
                d = Some(v);
            }
            "state" => {
                let d =
                    d.ok_or_else(|| Error::parse(lineno, col, "`alphabet` must precede `state`"))?;
                specs.push((lineno, parse_state(lineno, &toks, d)?));
            }
            other => {
                return Err(Error::parse(
                    lineno,
                    col,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }
    let name = name.ok_or_else(|| Error::parse(1, 1, "missing `group` directive"))?;
    let d = d.ok_or_else(|| Error::parse(1, 1, "missing `alphabet` directive"))?;
    let known: Vec<&str> = specs.iter().map(|(_, s)| s.name.as_str()).collect();
    for (lineno, spec) in &specs {
        if known.iter().filter(|&&n| n == spec.name).count() > 1 {
            return Err(Error::parse(
                *lineno,
                7,
                format!("duplicate state `{}`", spec.name),
            ));
        }
        for t in &spec.trans {
            if t != "id" && !known.contains(&t.as_str()) {
                return Err(Error::parse(*lineno, 1, format!("unknown state `{t}`")));
            }
        }
    }
    AutomatonGroup::new(name, d, specs.into_iter().map(|(_, s)| s).collect())
        .map_err(|e| Error::parse(1, 1, e.to_string()))
}

fn parse_state(lineno: usize, toks: &[(usize, &str)], d: usize) -> Result<StateSpec> {
    let expected = 2 * d + 4;
    let col = toks[0].0;
    if toks.len() != expected {
        return Err(Error::parse(
            lineno,
            col,
            format!("expected `state <name> perm` with {d} images, `->`, and {d} targets"),
        ));
    }
    let (name_col, name) = toks[1];
    if name == "id" || !is_identifier(name) {
        return Err(Error::parse(
            lineno,
            name_col,
            format!("invalid state name `{name}`"),
        ));
    }
    if toks[2].1 != "perm" {
        return Err(Error::parse(lineno, toks[2].0, "expected `perm`"));
    }
    let arrow = 3 + d;
    if toks[arrow].1 != "->" {
        return Err(Error::parse(lineno, toks[arrow].0, "expected `->`"));
    }
    let mut perm = Vec::with_capacity(d);
    let mut seen = vec![false; d];
    for &(c, tok) in &toks[3..arrow] {
        let v: u8 = tok
            .parse()
            .ok()
            .filter(|&v: &u8| (v as usize) < d)
            .ok_or_else(|| Error::parse(lineno, c, format!("invalid permutation entry `{tok}`")))?;
        if std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::parse(lineno, c, "permutation is not a bijection"));
        }
        perm.push(v);
    }
    let mut trans = Vec::with_capacity(d);
    for &(c, tok) in &toks[arrow + 1..] {
        if tok != "id" && !is_identifier(tok) {
            return Err(Error::parse(
                lineno,
                c,
                format!("invalid state name `{tok}`"),
            ));
        }
        trans.push(tok.to_string());
    }
    Ok(StateSpec {
        name: name.to_string(),
        perm,
        trans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn round_trip_builtins() {
        for g in builtin::all() {
            let text = g.to_string();
            assert_eq!(parse_group(&text).unwrap(), g);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let g =
            parse_group("# odometer\n\ngroup odo  # name\nalphabet 2\nstate a perm 1 0 -> id a\n")
                .unwrap();
        assert_eq!(g.degree(), 2);
        assert_eq!(g.num_states(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_group("group g\nalphabet 2\nstate a perm 1 1 -> id id\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 16,
                message: "permutation is not a bijection".into()
            }
        );
        let err = parse_group("group g\nalphabet 2\nstate a perm 1 0 -> id b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_group("group g\nfoo\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 2,
                column: 1,
                ..
            }
        ));
        let err = parse_group("group g\nstate a perm 1 0 -> id id\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_group("group g\nalphabet 2\nstate a perm 1 0 => id id\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 3,
                column: 18,
                ..
            }
        ));
    }
}
