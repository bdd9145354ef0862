//! Text model files.
//!
//! ```toml
//! alphabet = ["0", "1", "2"]
//! types = ["h", "d"]
//!
//! [prior]
//! "h" = "1/3"
//! "d" = "2/3"
//!
//! [utility]
//! # utility.<type>[reported][true]
//! "h" = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
//! ```
//!
//! Rationals are strings `"p/q"` or integer strings; bare TOML integers are
//! also accepted. [`serialize_model`] emits the canonical form that
//! [`model_digest`] hashes.

use std::fmt::Write;
use std::path::Path;

use screening_core::{Model, Rational};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

/// Name of the built-in two-type fixture.
pub const EXAMPLE1: &str = "example1";

/// Errors from reading a model file.
#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    /// The document is not valid TOML.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        /// 1-based line.
        line: usize,
        /// 1-based column.
        column: usize,
        /// Parser message.
        message: String,
    },
    /// A required top-level field is absent.
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    /// A field has the wrong TOML type.
    #[error("field `{field}` must be {expected}")]
    WrongType {
        /// Dotted field path.
        field: String,
        /// Expected shape.
        expected: &'static str,
    },
    /// A rational literal could not be parsed.
    #[error("field `{field}`: invalid rational `{value}`")]
    Rational {
        /// Dotted field path.
        field: String,
        /// Offending text.
        value: String,
    },
    /// A prior or utility entry names a type not in `types`.
    #[error("`{section}` names undeclared type `{label}`")]
    UndeclaredType {
        /// `prior` or `utility`.
        section: &'static str,
        /// Offending label.
        label: String,
    },
    /// A type has no prior entry.
    #[error("missing prior for type `{0}`")]
    MissingPrior(String),
    /// The model itself is invalid.
    #[error(transparent)]
    Model(#[from] screening_core::Error),
    /// The file could not be read.
    #[error("cannot read {path}: {source}")]
    Io {
        /// Path given.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn string_list(table: &Table, field: &'static str) -> Result<Vec<String>, ModelFileError> {
    let wrong = || ModelFileError::WrongType {
        field: field.to_string(),
        expected: "an array of strings",
    };
    table
        .get(field)
        .ok_or(ModelFileError::MissingField(field))?
        .as_array()
        .ok_or_else(wrong)?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(wrong))
        .collect()
}

fn rational(value: &Value, field: String) -> Result<Rational, ModelFileError> {
    match value {
        Value::String(s) => s.parse().map_err(|_| ModelFileError::Rational {
            field,
            value: s.clone(),
        }),
        Value::Integer(i) => Ok(Rational::from(*i)),
        other => Err(ModelFileError::Rational {
            field,
            value: other.to_string(),
        }),
    }
}

fn section<'a>(table: &'a Table, field: &'static str) -> Result<&'a Table, ModelFileError> {
    table
        .get(field)
        .ok_or(ModelFileError::MissingField(field))?
        .as_table()
        .ok_or_else(|| ModelFileError::WrongType {
            field: field.to_string(),
            expected: "a table keyed by type label",
        })
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<Model, ModelFileError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e
            .span()
            .map_or((1, 1), |span| line_column(text, span.start));
        ModelFileError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;

    let alphabet = string_list(&table, "alphabet")?;
    let types = string_list(&table, "types")?;

    let prior_table = section(&table, "prior")?;
    if let Some(label) = prior_table.keys().find(|k| !types.contains(k)) {
        return Err(ModelFileError::UndeclaredType {
            section: "prior",
            label: label.clone(),
        });
    }
    let prior = types
        .iter()
        .map(|t| {
            let v = prior_table
                .get(t)
                .ok_or_else(|| ModelFileError::MissingPrior(t.clone()))?;
            rational(v, format!("prior.{t}"))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let utility_table = section(&table, "utility")?;
    if let Some(label) = utility_table.keys().find(|k| !types.contains(k)) {
        return Err(ModelFileError::UndeclaredType {
            section: "utility",
            label: label.clone(),
        });
    }
    let mut utility = Vec::with_capacity(types.len());
    for t in &types {
        let Some(rows) = utility_table.get(t) else {
            return Err(screening_core::Error::MissingUtility {
                type_label: t.clone(),
                detail: "no table".to_string(),
            }
            .into());
        };
        let matrix_err = || ModelFileError::WrongType {
            field: format!("utility.{t}"),
            expected: "an array of arrays of rationals",
        };
        let rows = rows.as_array().ok_or_else(matrix_err)?;
        let mut table = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(matrix_err)?;
            table.push(
                row.iter()
                    .enumerate()
                    .map(|(j, v)| rational(v, format!("utility.{t}[{i}][{j}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        utility.push(table);
    }

    Ok(Model::new(alphabet, types, prior, utility)?)
}

/// TOML basic string; valid as both key and value.
fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical model file text. `parse_model(serialize_model(m)) == m`.
pub fn serialize_model(model: &Model) -> String {
    let list = |labels: &[String]| {
        labels
            .iter()
            .map(|l| quoted(l))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "alphabet = [{}]", list(model.alphabet()));
    let _ = writeln!(out, "types = [{}]", list(model.type_labels()));
    out.push_str("\n[prior]\n");
    for t in model.types() {
        let _ = writeln!(
            out,
            "{} = \"{}\"",
            quoted(model.type_label(t)),
            model.prior(t)
        );
    }
    out.push_str("\n[utility]\n# utility.<type>[reported][true]\n");
    let k = model.alphabet_size() as u16;
    for t in model.types() {
        let _ = writeln!(out, "{} = [", quoted(model.type_label(t)));
        for report in 0..k {
            let row: Vec<String> = (0..k)
                .map(|truth| format!("\"{}\"", model.utility(t, report, truth)))
                .collect();
            let _ = writeln!(out, "  [{}],", row.join(", "));
        }
        out.push_str("]\n");
    }
    out
}

/// SHA-256 of the canonical serialization, hex encoded.
pub fn model_digest(model: &Model) -> String {
    hex::encode(Sha256::digest(serialize_model(model).as_bytes()))
}

/// Loads `example1` or a model file path.
pub fn load_model(source: &str) -> Result<Model, ModelFileError> {
    if source == EXAMPLE1 {
        return Ok(Model::example1());
    }
    let text = std::fs::read_to_string(Path::new(source)).map_err(|e| ModelFileError::Io {
        path: source.to_string(),
        source: e,
    })?;
    parse_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use screening_core::SenderTypeId;

    const EXAMPLE1_TEXT: &str = r#"
alphabet = ["0", "1", "2"]
types = ["h", "d"]

[prior]
h = "1/3"
d = "2/3"

[utility]
h = [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
d = [[1, 2, 1], [2, 1, 1], [0, 0, 0]]
"#;

    #[test]
    fn parses_example1() {
        let m = parse_model(EXAMPLE1_TEXT).unwrap();
        assert_eq!(m, Model::example1());
        assert_eq!(m.alphabet_size(), 3);
        assert_eq!(m.type_count(), 2);
        assert_eq!(m.prior(SenderTypeId(0)), Rational::new(1, 3).unwrap());
    }

    #[test]
    fn single_type_model() {
        let m = parse_model(
            "alphabet=[\"a\",\"b\"]\ntypes=[\"l0\"]\n[prior]\nl0=\"1/1\"\n[utility]\nl0=[[\"0\",\"1\"],[\"1\",\"0\"]]\n",
        )
        .unwrap();
        assert_eq!(m.type_count(), 1);
    }

    #[test]
    fn rejects_unnormalized_prior() {
        let text = EXAMPLE1_TEXT.replace("d = \"2/3\"", "d = \"1/3\"");
        assert!(matches!(
            parse_model(&text),
            Err(ModelFileError::Model(
                screening_core::Error::PriorNotNormalized(_)
            ))
        ));
    }

    #[test]
    fn reports_syntax_position() {
        let err = parse_model("alphabet = [\"0\"\ntypes = ").unwrap_err();
        match err {
            ModelFileError::Syntax { line, .. } => assert!(line >= 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_utility_and_duplicates() {
        let text = EXAMPLE1_TEXT.replace("d = [[1, 2, 1], [2, 1, 1], [0, 0, 0]]", "");
        assert!(matches!(
            parse_model(&text),
            Err(ModelFileError::Model(
                screening_core::Error::MissingUtility { .. }
            ))
        ));
        let text = EXAMPLE1_TEXT.replace("[0, 0, 0]]", "[0, 0]]");
        assert!(matches!(
            parse_model(&text),
            Err(ModelFileError::Model(
                screening_core::Error::MissingUtility { .. }
            ))
        ));
        let text = EXAMPLE1_TEXT.replace(r#"["0", "1", "2"]"#, r#"["0", "1", "1"]"#);
        assert!(matches!(
            parse_model(&text),
            Err(ModelFileError::Model(
                screening_core::Error::DuplicateLabel(_)
            ))
        ));
        let text = EXAMPLE1_TEXT.replace("d = \"2/3\"", "d = \"2/x\"");
        assert!(matches!(
            parse_model(&text),
            Err(ModelFileError::Rational { .. })
        ));
    }

    #[test]
    fn canonical_text_round_trips() {
        let m = Model::example1();
        let text = serialize_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), text);
        assert_eq!(model_digest(&m).len(), 64);
    }

    #[test]
    fn labels_needing_quotes_round_trip() {
        let m = Model::new(
            vec!["home \"base\"".into(), "hot\tspot\u{1}".into()],
            vec!["type.a".into()],
            vec![Rational::ONE],
            vec![vec![
                vec![Rational::new(-1, 2).unwrap(), Rational::ZERO],
                vec![Rational::from(3i64), Rational::ONE],
            ]],
        )
        .unwrap();
        assert_eq!(parse_model(&serialize_model(&m)).unwrap(), m);
    }
}
