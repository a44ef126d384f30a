//! The `.alg` structure-constant format.
//!
//! ```text
//! # comment
//! name: heisenberg3
//! dim: 3
//! weights: 1, 1, 2
//! kind: grading
//! [1,2] = e3
//! ```
//!
//! Header keys are `name`, `dim`, `labels`, `weights` and `kind`
//! (`grading` or `filtration`, default `filtration`). Bracket lines give
//! `[i,j] = c1 x1 + c2 x2 ...` where the `x` are `e<k>` or declared labels and
//! the coefficients are integers or `p/q`; `[i,j] = 0` is allowed. Indices in
//! brackets are 1-based or labels. Whitespace is insignificant.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lie::{default_labels, LieAlgebra, LieError, WeightKind, WeightStructure};
use crate::linalg::SparseVec;
use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("missing header key `{0}`")]
    MissingKey(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid algebra: {0}")]
    Algebra(#[from] LieError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub algebra: LieAlgebra,
    pub weights: Option<WeightStructure>,
}

pub fn parse_spec_file(path: &Path) -> Result<AlgebraSpec, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_spec(&text)
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> SpecError {
    SpecError::Syntax { line, column, message: message.into() }
}

struct RawBracket {
    line: usize,
    left: (String, usize),
    right: (String, usize),
    terms: Vec<(Rational, String, usize)>,
}

pub fn parse_spec(text: &str) -> Result<AlgebraSpec, SpecError> {
    let mut name = None;
    let mut dim: Option<usize> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut weights: Option<(Vec<u32>, usize)> = None;
    let mut kind: Option<WeightKind> = None;
    let mut brackets = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') {
            brackets.push(parse_bracket_line(content, line_no)?);
            continue;
        }
        let Some(colon) = content.find(':') else {
            return Err(syntax(line_no, indent + 1, "expected `key: value` or a bracket line"));
        };
        let key = content[..colon].trim();
        let value = content[colon + 1..].trim();
        let value_col = colon + 2 + (content[colon + 1..].len() - content[colon + 1..].trim_start().len());
        let dup = |set: bool| if set { Err(syntax(line_no, indent + 1, format!("duplicate key `{key}`"))) } else { Ok(()) };
        match key {
            "name" => {
                dup(name.is_some())?;
                if value.is_empty() {
                    return Err(syntax(line_no, value_col, "empty name"));
                }
                name = Some(value.to_string());
            }
            "dim" => {
                dup(dim.is_some())?;
                let n: usize = value
                    .parse()
                    .map_err(|_| syntax(line_no, value_col, format!("dimension `{value}` is not a positive integer")))?;
                if n == 0 {
                    return Err(syntax(line_no, value_col, "dimension must be positive"));
                }
                dim = Some(n);
            }
            "labels" => {
                dup(labels.is_some())?;
                let ls: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                for l in &ls {
                    if l.is_empty() || !l.chars().all(|c| c.is_alphanumeric() || c == '_') || l.starts_with(|c: char| c.is_ascii_digit()) {
                        return Err(syntax(line_no, value_col, format!("invalid label `{l}`")));
                    }
                }
                labels = Some(ls);
            }
            "weights" => {
                dup(weights.is_some())?;
                weights = Some((parse_weight_list(value).map_err(|m| syntax(line_no, value_col, m))?, line_no));
            }
            "kind" => {
                dup(kind.is_some())?;
                kind = Some(match value {
                    "grading" => WeightKind::Grading,
                    "filtration" => WeightKind::Filtration,
                    other => return Err(syntax(line_no, value_col, format!("unknown weight kind `{other}`"))),
                });
            }
            other => return Err(syntax(line_no, indent + 1, format!("unknown key `{other}`"))),
        }
    }

    let dim = dim.ok_or(SpecError::MissingKey("dim"))?;
    let labels = match labels {
        Some(l) if l.len() != dim => {
            return Err(SpecError::DimensionMismatch(format!("{} labels for dimension {dim}", l.len())))
        }
        Some(l) => l,
        None => default_labels(dim),
    };
    let resolve = |token: &str, line: usize, column: usize| -> Result<usize, SpecError> {
        if let Some(p) = labels.iter().position(|l| l == token) {
            return Ok(p);
        }
        let index = token
            .strip_prefix('e')
            .unwrap_or(token)
            .parse::<usize>()
            .map_err(|_| syntax(line, column, format!("unknown basis element `{token}`")))?;
        if index == 0 || index > dim {
            return Err(SpecError::DimensionMismatch(format!(
                "line {line}, column {column}: basis index {index} outside 1..={dim}"
            )));
        }
        Ok(index - 1)
    };
    let mut parsed = Vec::with_capacity(brackets.len());
    for b in brackets {
        let i = resolve(&b.left.0, b.line, b.left.1)?;
        let j = resolve(&b.right.0, b.line, b.right.1)?;
        let mut terms: SparseVec = Vec::new();
        for (c, token, column) in b.terms {
            let k = resolve(&token, b.line, column)?;
            terms.push((k, c));
        }
        parsed.push((i, j, terms));
    }
    let weights = match weights {
        Some((w, line)) if w.len() != dim => {
            return Err(SpecError::DimensionMismatch(format!("line {line}: {} weights for dimension {dim}", w.len())))
        }
        Some((w, _)) => Some(WeightStructure { kind: kind.unwrap_or(WeightKind::Filtration), weights: w }),
        None => None,
    };
    let name = name.unwrap_or_else(|| "unnamed".to_string());
    let algebra = LieAlgebra::new(name, labels, parsed)?;
    Ok(AlgebraSpec { algebra, weights })
}

/// Comma-separated positive integers.
pub fn parse_weight_list(value: &str) -> Result<Vec<u32>, String> {
    value
        .split(',')
        .map(|s| {
            let s = s.trim();
            match s.parse::<u32>() {
                Ok(w) if w > 0 => Ok(w),
                _ => Err(format!("weight `{s}` is not a positive integer")),
            }
        })
        .collect()
}

struct Cursor {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Self {
        Cursor { chars: text.chars().enumerate().collect(), pos: 0, line }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.chars.len() + 1, |&(i, _)| i + 1)
    }

    fn error(&self, message: impl Into<String>) -> SpecError {
        syntax(self.line, self.column(), message)
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(match self.peek() {
                Some(found) => format!("expected `{c}`, found `{found}`"),
                None => format!("expected `{c}` before end of line"),
            }))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().map(|&(_, c)| c).collect()
    }

    fn ident(&mut self) -> Result<(String, usize), SpecError> {
        self.skip_ws();
        let column = self.column();
        let s = self.take_while(|c| c.is_alphanumeric() || c == '_');
        if s.is_empty() {
            return Err(self.error("expected a basis element"));
        }
        Ok((s, column))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }
}

fn parse_bracket_line(text: &str, line: usize) -> Result<RawBracket, SpecError> {
    let mut cur = Cursor::new(text, line);
    cur.skip_ws();
    let open_col = cur.column();
    cur.expect('[')?;
    let left = cur.ident()?;
    cur.expect(',')?;
    let right = cur.ident()?;
    cur.skip_ws();
    if cur.peek() != Some(']') {
        return Err(syntax(line, open_col, "unclosed `[`"));
    }
    cur.pos += 1;
    cur.expect('=')?;
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        if cur.at_end() {
            if first {
                return Err(cur.error("missing right-hand side"));
            }
            break;
        }
        let mut sign = 1i64;
        match cur.peek() {
            Some('+') if !first => cur.pos += 1,
            Some('-') => {
                sign = -1;
                cur.pos += 1;
            }
            Some(c) if !first => return Err(cur.error(format!("expected `+` or `-`, found `{c}`"))),
            _ => {}
        }
        cur.skip_ws();
        let coeff_col = cur.column();
        let coefficient = if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = cur.take_while(|c| c.is_ascii_digit());
            let mut value = Rational::from_integer(num.parse::<BigInt>().expect("digits parse"));
            cur.skip_ws();
            if cur.peek() == Some('/') {
                cur.pos += 1;
                cur.skip_ws();
                let den = cur.take_while(|c| c.is_ascii_digit());
                let den: BigInt = den.parse().map_err(|_| cur.error("expected a denominator after `/`"))?;
                if den.is_zero() {
                    return Err(syntax(line, coeff_col, "zero denominator"));
                }
                value /= Rational::from_integer(den);
            }
            Some(value)
        } else {
            None
        };
        cur.skip_ws();
        if cur.peek() == Some('*') {
            cur.pos += 1;
        }
        if cur.at_end() || matches!(cur.peek(), Some('+') | Some('-')) {
            // a bare coefficient is only meaningful as the zero right-hand side
            match coefficient {
                Some(c) if c.is_zero() && first && cur.at_end() => break,
                Some(_) => return Err(syntax(line, coeff_col, "coefficient without a basis element")),
                None => return Err(cur.error("expected a term")),
            }
        }
        if cur.peek().is_some_and(|c| !(c.is_alphanumeric() || c == '_')) {
            return Err(cur.error(format!("expected a basis element, found `{}`", cur.peek().unwrap_or(' '))));
        }
        let (token, column) = cur.ident()?;
        let mut c = coefficient.unwrap_or_else(|| Rational::from_integer(1.into()));
        if sign < 0 {
            c = -c;
        }
        if !c.is_zero() {
            terms.push((c, token, column));
        }
        first = false;
    }
    Ok(RawBracket { line, left, right, terms })
}

/// Canonical text form: header plus one line per nonzero bracket.
pub fn to_spec_text(spec: &AlgebraSpec) -> String {
    let a = &spec.algebra;
    let mut out = format!("name: {}\ndim: {}\n", a.name(), a.dim());
    if a.labels() != default_labels(a.dim()).as_slice() {
        out.push_str(&format!("labels: {}\n", a.labels().join(", ")));
    }
    if let Some(w) = &spec.weights {
        let ws: Vec<String> = w.weights.iter().map(u32::to_string).collect();
        out.push_str(&format!("weights: {}\n", ws.join(", ")));
        out.push_str(match w.kind {
            WeightKind::Grading => "kind: grading\n",
            WeightKind::Filtration => "kind: filtration\n",
        });
    }
    let n = a.dim();
    for i in 0..n {
        for j in i + 1..n {
            let terms = a.bracket(i, j);
            if terms.is_empty() {
                continue;
            }
            let mut rhs = String::new();
            for (pos, (k, c)) in terms.iter().enumerate() {
                let sign = if c.is_negative() { "-" } else { "+" };
                let mag = c.abs();
                if pos == 0 {
                    if c.is_negative() {
                        rhs.push('-');
                    }
                } else {
                    rhs.push_str(&format!(" {sign} "));
                }
                if mag != Rational::from_integer(1.into()) {
                    rhs.push_str(&format!("{mag} "));
                }
                rhs.push_str(&format!("e{}", k + 1));
            }
            out.push_str(&format!("[{},{}] = {rhs}\n", i + 1, j + 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    #[test]
    fn parses_header_and_brackets() {
        let s = parse_spec("name: t\ndim: 3\nweights: 1,1,2\nkind: grading\n[1,2] = e3 # comment\n").unwrap();
        assert_eq!(s.algebra.dim(), 3);
        assert_eq!(s.algebra.constant(0, 1, 2), &rat(1));
        assert_eq!(s.weights, Some(WeightStructure::grading(vec![1, 1, 2])));
    }

    #[test]
    fn coefficients_and_labels() {
        let s = parse_spec("dim: 3\nlabels: h, e, f\n[h,e] = 2e\n[ h , f ] = -2 * f\n[e,f] = 1/2 h - 3/4 e\n").unwrap();
        let a = &s.algebra;
        // `2e` reads as coefficient 2 on label e
        assert_eq!(a.constant(0, 1, 1), &rat(2));
        assert_eq!(a.constant(0, 2, 2), &rat(-2));
        assert_eq!(a.constant(1, 2, 0), &ratio(1, 2));
        assert_eq!(a.constant(1, 2, 1), &ratio(-3, 4));
        assert!(s.weights.is_none());
    }

    #[test]
    fn zero_rhs() {
        let s = parse_spec("dim: 2\n[1,2] = 0\n").unwrap();
        assert!(s.algebra.is_abelian());
    }

    #[test]
    fn unclosed_bracket_points_at_open() {
        let e = parse_spec("dim: 3\n  [1,2 = e3\n").unwrap_err();
        assert_eq!(e, syntax(2, 3, "unclosed `[`"));
    }

    #[test]
    fn rejections() {
        assert!(matches!(parse_spec("dim: 2\ncolour: red\n"), Err(SpecError::Syntax { line: 2, column: 1, .. })));
        assert!(matches!(parse_spec("dim: 2\n[1,3] = e1\n"), Err(SpecError::DimensionMismatch(_))));
        assert!(matches!(parse_spec("dim: 2\nweights: 1,1,1\n"), Err(SpecError::DimensionMismatch(_))));
        assert!(matches!(parse_spec("dim: 2\n[1,2] = 1.5 e1\n"), Err(SpecError::Syntax { line: 2, .. })));
        assert!(matches!(parse_spec("dim: 2\n[1,2] = 1/0 e1\n"), Err(SpecError::Syntax { .. })));
        assert!(matches!(parse_spec("dim: 2\n[1,2] = 3\n"), Err(SpecError::Syntax { .. })));
        assert!(matches!(parse_spec("[1,2] = e1\n"), Err(SpecError::MissingKey("dim"))));
        assert!(matches!(parse_spec("dim: 2\n[1,1] = e1\n"), Err(SpecError::Algebra(LieError::SelfBracket(0, 0)))));
    }

    #[test]
    fn round_trip() {
        let text = "name: x\ndim: 4\nweights: 1, 1, 2, 3\nkind: filtration\n[1,2] = e3\n[1,3] = -1/2 e4 + 2 e4\n";
        let s = parse_spec(text).unwrap();
        let again = parse_spec(&to_spec_text(&s)).unwrap();
        assert_eq!(s, again);
    }
}
