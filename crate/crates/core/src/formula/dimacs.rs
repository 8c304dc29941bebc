use thiserror::Error;

use super::{Clause, CnfFormula, FormulaError, Lit};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: clause data before the header")]
    DataBeforeHeader { line: usize },
    #[error("line {line}: invalid literal `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {lit} out of range (header declares {var_count} variables)")]
    LiteralOutOfRange { line: usize, lit: i64, var_count: u32 },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Parses standard DIMACS CNF. Clauses may span lines; `c` lines and a
/// trailing `%` section are ignored.
pub fn parse_dimacs(input: &[u8]) -> Result<CnfFormula, DimacsError> {
    let text = std::str::from_utf8(input).map_err(|_| DimacsError::Encoding)?;
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut open = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            match (parsed, header) {
                (Some(h), None) => header = Some(h),
                _ => return Err(DimacsError::MalformedHeader { line: line_no, text: line.to_string() }),
            }
            continue;
        }
        let (var_count, _) = header.ok_or(DimacsError::DataBeforeHeader { line: line_no })?;
        for token in line.split_whitespace() {
            let value: i64 =
                token.parse().map_err(|_| DimacsError::InvalidToken { line: line_no, token: token.to_string() })?;
            if value == 0 {
                clauses.push(Clause::new(current.drain(..)));
                open = false;
                continue;
            }
            if value.unsigned_abs() > u64::from(var_count) {
                return Err(DimacsError::LiteralOutOfRange { line: line_no, lit: value, var_count });
            }
            current.push(Lit::from_dimacs(value).expect("nonzero and in range"));
            open = true;
        }
    }
    let (var_count, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if open {
        return Err(DimacsError::UnterminatedClause);
    }
    if declared != clauses.len() {
        return Err(DimacsError::ClauseCountMismatch { declared, found: clauses.len() });
    }
    Ok(CnfFormula::new(var_count, clauses)?)
}

/// Renders a formula as DIMACS with one clause per line.
pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.var_count(), formula.len());
    for c in formula.clauses() {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_smallest_contradiction() {
        let f = parse_dimacs(b"p cnf 1 2\n1 0\n-1 0").unwrap();
        assert_eq!(f.var_count(), 1);
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])]);
    }

    #[test]
    fn parses_direct_transcription() {
        let f = parse_dimacs(b"p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1, -2])]);
    }

    #[test]
    fn rejects_tautology() {
        let err = parse_dimacs(b"p cnf 1 1\n1 -1 0").unwrap_err();
        assert!(matches!(err, DimacsError::Formula(FormulaError::Tautology { .. })));
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(matches!(parse_dimacs(b"p dnf 1 1\n1 0"), Err(DimacsError::MalformedHeader { .. })));
        assert!(matches!(parse_dimacs(b"1 0"), Err(DimacsError::DataBeforeHeader { .. })));
        assert!(matches!(parse_dimacs(b"p cnf 1 1\n2 0"), Err(DimacsError::LiteralOutOfRange { lit: 2, .. })));
        assert!(matches!(parse_dimacs(b"p cnf 1 1\n1"), Err(DimacsError::UnterminatedClause)));
        assert!(matches!(parse_dimacs(b"p cnf 1 2\n1 0"), Err(DimacsError::ClauseCountMismatch { .. })));
        assert!(matches!(parse_dimacs(b"c only comments"), Err(DimacsError::MissingHeader)));
    }

    #[test]
    fn empty_clause_and_multiline_clauses() {
        let f = parse_dimacs(b"c hi\np cnf 3 2\n0\n1 2\n 3 0\n").unwrap();
        assert_eq!(f.clauses(), &[Clause::empty(), Clause::from_dimacs(&[1, 2, 3])]);
    }

    #[test]
    fn write_then_parse_is_identity() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[1, -3], &[], &[2]]).unwrap();
        assert_eq!(parse_dimacs(write_dimacs(&f).as_bytes()).unwrap(), f);
    }
}
