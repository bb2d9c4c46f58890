//! Sequence files: one record per line, either `value` or `value,width`.

use std::path::Path;

use crate::error::CliError;
use crate::number::{is_integral, CliNum};
use crate::problem::{read_input, Mode};

#[derive(Clone, Debug, PartialEq)]
pub enum Sequence<T> {
    Plain(Vec<T>),
    Weighted(Vec<(T, T)>),
}

impl<T> Sequence<T> {
    pub fn len(&self) -> usize {
        match self {
            Sequence::Plain(v) => v.len(),
            Sequence::Weighted(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Raw text fields per non-blank line, with 1-based line numbers. Lines
/// starting with `#` are comments.
fn records(text: &str) -> Result<Vec<(usize, Vec<&str>)>, CliError> {
    let mut out: Vec<(usize, Vec<&str>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() > 2 {
            return Err(CliError::Schema(format!("line {}: expected `value` or `value,width`", i + 1)));
        }
        if let Some((first, prev)) = out.first() {
            if prev.len() != fields.len() {
                return Err(CliError::Schema(format!(
                    "line {}: {} field(s), but line {first} has {}",
                    i + 1,
                    fields.len(),
                    prev.len()
                )));
            }
        }
        out.push((i + 1, fields));
    }
    if out.is_empty() {
        return Err(CliError::Schema("sequence is empty".into()));
    }
    Ok(out)
}

/// Integer mode when every field is an integer.
pub fn detect_mode(text: &str) -> Mode {
    let all_int = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .flat_map(|l| l.split(','))
        .all(|f| is_integral(&serde_json::Value::String(f.trim().to_string())));
    if all_int {
        Mode::Int
    } else {
        Mode::Float
    }
}

pub fn parse_sequence<T: CliNum>(text: &str) -> Result<Sequence<T>, CliError> {
    let recs = records(text)?;
    let num = |line: usize, f: &str| {
        T::parse_text(f).ok_or_else(|| CliError::Schema(format!("line {line}: `{f}` is not a {} number", T::MODE)))
    };
    if recs[0].1.len() == 1 {
        return recs.iter().map(|(line, f)| num(*line, f[0])).collect::<Result<_, _>>().map(Sequence::Plain);
    }
    recs.iter()
        .map(|(line, f)| {
            let (s, w) = (num(*line, f[0])?, num(*line, f[1])?);
            if w <= T::ZERO {
                return Err(CliError::Schema(format!("line {line}: width must be positive, got {}", f[1])));
            }
            Ok((s, w))
        })
        .collect::<Result<_, _>>()
        .map(Sequence::Weighted)
}

pub fn read_sequence_text(path: &Path) -> Result<String, CliError> {
    read_input(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_weighted() {
        assert_eq!(parse_sequence::<i128>("3\n-1\n2\n").unwrap(), Sequence::Plain(vec![3, -1, 2]));
        assert_eq!(
            parse_sequence::<i128>("2,1\n-1,1\n3,1\n").unwrap(),
            Sequence::Weighted(vec![(2, 1), (-1, 1), (3, 1)])
        );
        assert_eq!(parse_sequence::<f64>("# s\n\n0.5\n").unwrap(), Sequence::Plain(vec![0.5]));
    }

    #[test]
    fn rejections_name_the_line() {
        let e = parse_sequence::<i128>("2,1\n-1,0\n").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("positive"), "{e}");
        let e = parse_sequence::<i128>("2,1\n3\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = parse_sequence::<i128>("1\nx\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(parse_sequence::<i128>("\n").is_err());
        assert!(parse_sequence::<i128>("1,2,3\n").is_err());
    }

    #[test]
    fn modes() {
        assert_eq!(detect_mode("1\n-2\n"), Mode::Int);
        assert_eq!(detect_mode("1\n2.5\n"), Mode::Float);
    }
}
