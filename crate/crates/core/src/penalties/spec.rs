//! Text format for penalty models: `family(name=value,...)`.
//!
//! ```text
//! weibull(k=0.5,sigma=1)
//! exp(sigma=1)
//! scad(lam=1, gamma=3.7)
//! cauchy
//! ```
//!
//! Families without parameters may omit the parentheses. Values accept
//! scientific notation.

use std::fmt;
use std::str::FromStr;

use super::family::Family;
use super::model::PenaltyModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecParseError {
    /// Byte offset into the input where parsing failed.
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SpecParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at position {}: expected {}, found {}",
            self.position,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for SpecParseError {}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        }
    }

    fn error<S: Into<String>>(&self, expected: impl IntoIterator<Item = S>) -> SpecParseError {
        SpecParseError {
            position: self.pos,
            expected: expected.into_iter().map(Into::into).collect(),
            found: self.found(),
        }
    }

    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| (start, &self.src[start..self.pos]))
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64, SpecParseError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '+' | '-') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>().map_err(|_| SpecParseError {
            position: start,
            expected: vec!["a number".to_string()],
            found: if text.is_empty() {
                self.found()
            } else {
                format!("'{text}'")
            },
        })
    }
}

/// Parses a family name and its `name=value` list without validating ranges.
pub(crate) fn parse_raw(
    src: &str,
) -> Result<(Family, Vec<(String, usize, f64)>, usize), SpecParseError> {
    let mut cur = Cursor { src, pos: 0 };
    let Some((name_pos, name)) = cur.ident() else {
        return Err(cur.error(["a family name"]));
    };
    let family = Family::from_name(name).ok_or_else(|| SpecParseError {
        position: name_pos,
        expected: Family::ALL
            .iter()
            .map(|f| format!("'{}'", f.name()))
            .collect(),
        found: format!("'{name}'"),
    })?;
    let mut args = Vec::new();
    if cur.eat('(') {
        if !cur.eat(')') {
            loop {
                let Some((pos, key)) = cur.ident() else {
                    return Err(cur.error(["a parameter name"]));
                };
                if !cur.eat('=') {
                    return Err(cur.error(["'='"]));
                }
                let value = cur.number()?;
                args.push((key.to_string(), pos, value));
                if cur.eat(')') {
                    break;
                }
                if !cur.eat(',') {
                    return Err(cur.error(["','", "')'"]));
                }
            }
        }
    }
    cur.skip_ws();
    if cur.pos != src.len() {
        return Err(cur.error(["end of input"]));
    }
    Ok((family, args, name_pos))
}

/// Error from [`parse_model`]: either a syntax error or an invalid parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecError {
    Syntax(SpecParseError),
    Model(super::PenaltyError),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Syntax(e) => write!(f, "penalty spec syntax error {e}"),
            SpecError::Model(e) => write!(f, "invalid penalty: {e}"),
        }
    }
}

impl std::error::Error for SpecError {}

impl From<SpecParseError> for SpecError {
    fn from(e: SpecParseError) -> Self {
        SpecError::Syntax(e)
    }
}

/// Parses a full model specification, requiring every family parameter.
pub fn parse_model(src: &str) -> Result<PenaltyModel, SpecError> {
    let (family, args, _) = parse_raw(src)?;
    let partial = resolve_params(src, family, &args, false)?;
    let params: Vec<f64> = partial.into_iter().map(|v| v.unwrap()).collect();
    PenaltyModel::new(family, &params).map_err(SpecError::Model)
}

/// Matches parsed arguments to the family's parameter slots. When
/// `allow_missing` is set, absent parameters come back as `None`.
pub(crate) fn resolve_params(
    src: &str,
    family: Family,
    args: &[(String, usize, f64)],
    allow_missing: bool,
) -> Result<Vec<Option<f64>>, SpecParseError> {
    let names = family.param_names();
    let mut slots: Vec<Option<f64>> = vec![None; names.len()];
    let quoted = || names.iter().map(|n| format!("'{n}'")).collect::<Vec<_>>();
    for (key, pos, value) in args {
        let idx = names
            .iter()
            .position(|n| n == key)
            .ok_or_else(|| SpecParseError {
                position: *pos,
                expected: if names.is_empty() {
                    vec!["no parameters".to_string()]
                } else {
                    quoted()
                },
                found: format!("'{key}'"),
            })?;
        if slots[idx].is_some() {
            return Err(SpecParseError {
                position: *pos,
                expected: vec![format!("a single value for '{key}'")],
                found: format!("duplicate '{key}'"),
            });
        }
        slots[idx] = Some(*value);
    }
    if !allow_missing {
        let missing: Vec<String> = names
            .iter()
            .zip(&slots)
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| format!("'{n}'"))
            .collect();
        if !missing.is_empty() {
            return Err(SpecParseError {
                position: src.len(),
                expected: missing,
                found: "end of parameter list".to_string(),
            });
        }
    }
    Ok(slots)
}

impl FromStr for PenaltyModel {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_model(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let w: PenaltyModel = "weibull(k=0.5,sigma=1)".parse().unwrap();
        assert_eq!(w, PenaltyModel::weibull(0.5, 1.0).unwrap());
        let e: PenaltyModel = "exp(sigma=1)".parse().unwrap();
        assert_eq!(e, PenaltyModel::exponential(1.0).unwrap());
        let s: PenaltyModel = " scad( lam = 1 , gamma=3.7 ) ".parse().unwrap();
        assert_eq!(s, PenaltyModel::scad(1.0, 3.7).unwrap());
        let c: PenaltyModel = "cauchy".parse().unwrap();
        assert_eq!(c, PenaltyModel::folded_cauchy());
        let sci: PenaltyModel = "weibull(sigma=1e-2,k=5E-1)".parse().unwrap();
        assert_eq!(sci, PenaltyModel::weibull(0.5, 0.01).unwrap());
    }

    #[test]
    fn display_parses_back() {
        for spec in [
            "gbp(p=1,q=0.5,alpha=1,beta=2)",
            "gengamma(a=1,d=2,p=2)",
            "dirac()",
        ] {
            let m: PenaltyModel = spec.parse().unwrap();
            let again: PenaltyModel = m.to_string().parse().unwrap();
            assert_eq!(m, again);
        }
    }

    #[test]
    fn reports_position_and_expected() {
        let err = parse_model("weibull(k=0.5 sigma=1)").unwrap_err();
        let SpecError::Syntax(e) = err else { panic!() };
        assert_eq!(e.position, 14);
        assert_eq!(e.expected, vec!["','", "')'"]);

        let SpecError::Syntax(e) = parse_model("weibul(k=1)").unwrap_err() else {
            panic!()
        };
        assert_eq!(e.position, 0);
        assert!(e.expected.contains(&"'weibull'".to_string()));

        let SpecError::Syntax(e) = parse_model("weibull(k=1,shape=2)").unwrap_err() else {
            panic!()
        };
        assert_eq!(e.position, 12);
        assert_eq!(e.expected, vec!["'k'", "'sigma'"]);

        let SpecError::Syntax(e) = parse_model("weibull(k=abc)").unwrap_err() else {
            panic!()
        };
        assert_eq!(e.position, 10);

        let SpecError::Syntax(e) = parse_model("weibull(k=1)").unwrap_err() else {
            panic!()
        };
        assert_eq!(e.expected, vec!["'sigma'"]);
    }

    #[test]
    fn range_violations_are_model_errors() {
        assert!(matches!(
            parse_model("weibull(k=-1,sigma=1)"),
            Err(SpecError::Model(_))
        ));
    }
}
