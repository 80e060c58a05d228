//! The line-oriented RILP v1 text format.
//!
//! ```text
//! RILP 1
//! NAME ex1
//! VARS 2
//! CONS 1
//! OBJ
//! 1 1 3
//! 2 2 2
//! ROW 1 LE -1
//! 1 -1
//! 2 -1
//! END
//! ```
//!
//! `#` starts a comment. Variable indices are 1-based. Numbers are plain
//! decimals; exponent notation is rejected.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{IntervalIlpInstance, LinearConstraint, Sense};

const SIGNIFICANT_DIGITS: i32 = 12;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as `(line number, tokens)`.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_tokens().ok_or_else(|| Error::Parse {
            line: self.last + 1,
            reason: format!("unexpected end of input, expected {what}"),
        })
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn number(line: usize, tok: &str) -> Result<f64> {
    let body = tok.strip_prefix(['-', '+']).unwrap_or(tok);
    let mut parts = body.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    let digits_ok = int.chars().all(|c| c.is_ascii_digit())
        && frac.is_none_or(|f| f.chars().all(|c| c.is_ascii_digit()));
    let has_digit = !int.is_empty() || frac.is_some_and(|f| !f.is_empty());
    if !digits_ok || !has_digit {
        return Err(parse_err(line, format!("`{tok}` is not a decimal number")));
    }
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a decimal number")))
}

fn count(line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a non-negative integer")))
}

fn keyword<'a>(line: usize, tokens: &[&'a str], key: &str, arity: usize) -> Result<Vec<&'a str>> {
    if tokens[0] != key {
        return Err(parse_err(line, format!("expected `{key}`, found `{}`", tokens[0])));
    }
    if tokens.len() != arity + 1 {
        return Err(parse_err(
            line,
            format!("`{key}` takes {arity} argument(s), found {}", tokens.len() - 1),
        ));
    }
    Ok(tokens[1..].to_vec())
}

fn variable_index(line: usize, tok: &str, n: usize) -> Result<usize> {
    let idx = count(line, tok)?;
    if idx == 0 || idx > n {
        return Err(Error::MalformedInstance(format!(
            "line {line}: variable index {idx} outside 1..={n}"
        )));
    }
    Ok(idx - 1)
}

/// Parses, validates and normalizes an instance.
pub fn parse_rilp(text: &str) -> Result<IntervalIlpInstance> {
    let mut lines = Lines::new(text);

    let (ln, t) = lines.expect("`RILP 1`")?;
    let version = keyword(ln, &t, "RILP", 1)?;
    if version[0] != "1" {
        return Err(parse_err(ln, format!("unsupported version `{}`", version[0])));
    }
    let (ln, t) = lines.expect("`NAME`")?;
    let name = keyword(ln, &t, "NAME", 1)?[0].to_string();
    let (ln, t) = lines.expect("`VARS`")?;
    let n = count(ln, keyword(ln, &t, "VARS", 1)?[0])?;
    let (ln, t) = lines.expect("`CONS`")?;
    let m = count(ln, keyword(ln, &t, "CONS", 1)?[0])?;
    let (ln, t) = lines.expect("`OBJ`")?;
    keyword(ln, &t, "OBJ", 0)?;

    let mut lower = vec![f64::NAN; n];
    let mut upper = vec![f64::NAN; n];
    for _ in 0..n {
        let (ln, t) = lines.expect("an objective interval line")?;
        if t.len() != 3 {
            return Err(parse_err(ln, "objective line must read `index lower upper`"));
        }
        let i = variable_index(ln, t[0], n)?;
        if !lower[i].is_nan() {
            return Err(Error::MalformedInstance(format!(
                "line {ln}: interval of variable {} given twice",
                i + 1
            )));
        }
        lower[i] = number(ln, t[1])?;
        upper[i] = number(ln, t[2])?;
    }

    let mut constraints = Vec::with_capacity(m);
    let mut pending = lines.expect("`ROW` or `END`")?;
    loop {
        let (ln, t) = pending;
        match t[0] {
            "END" => {
                if t.len() != 1 {
                    return Err(parse_err(ln, "`END` takes no arguments"));
                }
                if constraints.len() != m {
                    return Err(parse_err(
                        ln,
                        format!("CONS declares {m} rows but {} were given", constraints.len()),
                    ));
                }
                break;
            }
            "ROW" => {
                let args = keyword(ln, &t, "ROW", 3)?;
                count(ln, args[0])?;
                let sense: Sense = args[1].parse().map_err(|e: String| parse_err(ln, e))?;
                let rhs = number(ln, args[2])?;
                let mut terms = Vec::new();
                pending = loop {
                    let (tl, tt) = lines.expect("a term line, `ROW` or `END`")?;
                    if tt[0] == "ROW" || tt[0] == "END" {
                        break (tl, tt);
                    }
                    if tt.len() != 2 {
                        return Err(parse_err(tl, "term line must read `index coefficient`"));
                    }
                    terms.push((variable_index(tl, tt[0], n)?, number(tl, tt[1])?));
                };
                constraints.push(LinearConstraint::new(terms, sense, rhs));
                continue;
            }
            other => return Err(parse_err(ln, format!("expected `ROW` or `END`, found `{other}`"))),
        }
    }
    if let Some((ln, t)) = lines.next_tokens() {
        return Err(parse_err(ln, format!("content after `END`: `{}`", t.join(" "))));
    }

    IntervalIlpInstance::new(name, lower, upper, constraints)?.normalize()
}

/// Decimal rendering with at most 12 significant digits and no exponent.
pub(crate) fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Canonical text of `normalize(instance)`.
pub fn write_rilp(instance: &IntervalIlpInstance) -> String {
    let rows = instance.le_rows();
    let name: String = instance
        .name
        .chars()
        .map(|c| if c.is_whitespace() || c == '#' { '_' } else { c })
        .collect();
    let name = if name.is_empty() { "unnamed".into() } else { name };

    let mut out = String::new();
    let _ = writeln!(out, "RILP 1");
    let _ = writeln!(out, "NAME {name}");
    let _ = writeln!(out, "VARS {}", instance.n());
    let _ = writeln!(out, "CONS {}", rows.len());
    let _ = writeln!(out, "OBJ");
    for (i, (&l, &u)) in instance.lower.iter().zip(&instance.upper).enumerate() {
        let _ = writeln!(out, "{} {} {}", i + 1, format_number(l), format_number(u));
    }
    for (r, row) in rows.iter().enumerate() {
        let _ = writeln!(out, "ROW {} LE {}", r + 1, format_number(row.rhs));
        for &(j, a) in &row.terms {
            let _ = writeln!(out, "{} {}", j + 1, format_number(a));
        }
    }
    let _ = writeln!(out, "END");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::ex1;

    const EX1: &str = include_str!("../../tests/fixtures/ex1.rilp");

    #[test]
    fn parses_fixture() {
        assert_eq!(parse_rilp(EX1).unwrap(), ex1());
    }

    #[test]
    fn writes_fixture_byte_for_byte() {
        assert_eq!(write_rilp(&ex1()), EX1);
    }

    #[test]
    fn missing_end() {
        let text = EX1.replace("END\n", "");
        assert!(matches!(parse_rilp(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn trailing_content() {
        let text = format!("{EX1}ROW 2 LE 0\n");
        assert!(matches!(parse_rilp(&text), Err(Error::Parse { line: 12, .. })));
        // Comments and blank lines after END are fine.
        assert!(parse_rilp(&format!("{EX1}\n# done\n")).is_ok());
    }

    #[test]
    fn inverted_interval_is_malformed() {
        let text = EX1.replace("1 1 3", "1 3 1");
        assert!(matches!(parse_rilp(&text), Err(Error::MalformedInstance(_))));
    }

    #[test]
    fn bad_index_is_malformed() {
        let text = EX1.replace("2 -1\nEND", "3 -1\nEND");
        assert!(matches!(parse_rilp(&text), Err(Error::MalformedInstance(_))));
    }

    #[test]
    fn exponents_rejected() {
        let text = EX1.replace("1 1 3", "1 1 3e0");
        assert!(matches!(parse_rilp(&text), Err(Error::Parse { line: 6, .. })));
    }

    #[test]
    fn comments_and_ge_rows() {
        let text = "RILP 1 # header\nNAME g\nVARS 2\nCONS 1\nOBJ\n2 0.5 1.25\n1 0 1\n\
                    ROW 7 GE 1\n2 1\n1 1\nEND\n";
        let inst = parse_rilp(text).unwrap();
        assert_eq!(inst.lower, vec![0.0, 0.5]);
        assert_eq!(
            inst.constraints,
            vec![LinearConstraint::le(vec![(0, -1.0), (1, -1.0)], -1.0)]
        );
    }

    #[test]
    fn equality_rows_written_as_le_pair() {
        let inst = IntervalIlpInstance::new(
            "eq",
            vec![0.0],
            vec![1.0],
            vec![LinearConstraint::new(vec![(0, 1.0)], Sense::Eq, 1.0)],
        )
        .unwrap();
        let text = write_rilp(&inst);
        assert!(text.contains("CONS 2\n"));
        assert!(text.contains("ROW 1 LE 1\n1 1\nROW 2 LE -1\n1 -1\n"));
        assert_eq!(parse_rilp(&text).unwrap(), inst.normalize().unwrap());
    }

    #[test]
    fn row_count_mismatch() {
        let text = EX1.replace("CONS 1", "CONS 2");
        assert!(matches!(parse_rilp(&text), Err(Error::Parse { line: 11, .. })));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(-1.0), "-1");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(123.456789), "123.456789");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.5e-7), "0.00000025");
    }
}
