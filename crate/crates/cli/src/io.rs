//! Reading databases and case files, and formatting numbers for display.

use std::fs;
use std::path::{Path, PathBuf};

use dipstr_core::{parse_allele, AlleleDatabase, CaseInput, Genotype, Observation};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// Parses a database listing: one allele label per line. Text after `#` is
/// a comment; blank lines are skipped. `source` names the input in errors.
pub fn parse_database(text: &str, source: &str) -> Result<AlleleDatabase, CliError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let allele = parse_allele(line)
            .map_err(|e| CliError::Input(format!("{source}:{}: {e}", idx + 1)))?;
        entries.push(allele);
    }
    Ok(AlleleDatabase::new(entries, source))
}

/// Canonical text form: one label per line, in database order.
pub fn format_database(db: &AlleleDatabase) -> String {
    db.entries.iter().map(|a| format!("{a}\n")).collect()
}

pub fn read_database(path: &Path) -> Result<AlleleDatabase, CliError> {
    let text = read(path)?;
    parse_database(&text, &path.display().to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseRecord {
    locus: String,
    victim: [String; 2],
    suspect: [String; 2],
    #[serde(default)]
    observed: Vec<String>,
}

impl CaseRecord {
    fn into_case(self) -> dipstr_core::Result<CaseInput> {
        let victim = Genotype::parse(&self.victim[0], &self.victim[1])?;
        let suspect = Genotype::parse(&self.suspect[0], &self.suspect[1])?;
        let observed = self
            .observed
            .iter()
            .map(|l| parse_allele(l))
            .collect::<dipstr_core::Result<Vec<_>>>()?;
        CaseInput::new(
            self.locus,
            victim,
            suspect,
            Observation::from_alleles(observed)?,
        )
    }
}

/// Parses a case file holding either one case object or an array of them,
/// one per locus.
pub fn parse_cases(text: &str, source: &str) -> Result<Vec<CaseInput>, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("{source}:{}: {e}", e.line())))?;
    let (records, multi) = match value {
        Value::Array(items) => (items, true),
        obj @ Value::Object(_) => (vec![obj], false),
        _ => {
            return Err(CliError::Input(format!(
                "{source}: expected a case object or an array of case objects"
            )))
        }
    };
    if records.is_empty() {
        return Err(CliError::Input(format!("{source}: no cases")));
    }
    let mut cases = Vec::with_capacity(records.len());
    for (idx, record) in records.into_iter().enumerate() {
        let at = if multi {
            format!("{source}: case {}", idx + 1)
        } else {
            source.to_string()
        };
        let record: CaseRecord =
            serde_json::from_value(record).map_err(|e| CliError::Input(format!("{at}: {e}")))?;
        let case = record
            .into_case()
            .map_err(|e| CliError::Input(format!("{at}: {e}")))?;
        if cases.iter().any(|c: &CaseInput| c.locus == case.locus) {
            return Err(CliError::Input(format!(
                "{at}: locus '{}' appears more than once",
                case.locus
            )));
        }
        cases.push(case);
    }
    Ok(cases)
}

pub fn read_cases(path: &Path) -> Result<Vec<CaseInput>, CliError> {
    let text = read(path)?;
    parse_cases(&text, &path.display().to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A `--db` argument: `PATH`, or `LOCUS=PATH` to tie the file to one locus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbSpec {
    pub locus: Option<String>,
    pub path: PathBuf,
}

impl std::str::FromStr for DbSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once('=') {
            Some((locus, path)) if !locus.is_empty() && !locus.contains('/') => {
                if path.is_empty() {
                    return Err(format!("missing path after '{locus}='"));
                }
                Ok(DbSpec {
                    locus: Some(locus.to_string()),
                    path: PathBuf::from(path),
                })
            }
            _ if s.is_empty() => Err("empty database path".to_string()),
            _ => Ok(DbSpec {
                locus: None,
                path: PathBuf::from(s),
            }),
        }
    }
}

/// Loaded databases, looked up by locus with an optional fallback.
#[derive(Debug, Default)]
pub struct DatabaseSet {
    by_locus: Vec<(String, AlleleDatabase)>,
    fallback: Option<AlleleDatabase>,
}

impl DatabaseSet {
    pub fn load(specs: &[DbSpec]) -> Result<Self, CliError> {
        let mut set = DatabaseSet::default();
        for spec in specs {
            let db = read_database(&spec.path)?;
            match &spec.locus {
                Some(locus) => {
                    if set.by_locus.iter().any(|(l, _)| l == locus) {
                        return Err(CliError::Input(format!(
                            "more than one database given for locus '{locus}'"
                        )));
                    }
                    set.by_locus.push((locus.clone(), db));
                }
                None if set.fallback.is_some() => {
                    return Err(CliError::Input(
                        "more than one database without a locus; use LOCUS=PATH".to_string(),
                    ))
                }
                None => set.fallback = Some(db),
            }
        }
        Ok(set)
    }

    pub fn for_locus(&self, locus: &str) -> Result<&AlleleDatabase, CliError> {
        self.by_locus
            .iter()
            .find(|(l, _)| l == locus)
            .map(|(_, db)| db)
            .or(self.fallback.as_ref())
            .ok_or_else(|| CliError::Input(format!("no database given for locus '{locus}'")))
    }
}

/// Rounds to six significant digits and prints the shortest form.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let db = parse_database("# header\n\nL2\n  S11  # trailing\n\nL2\n", "t").unwrap();
        assert_eq!(format_database(&db), "L2\nS11\nL2\n");
    }

    #[test]
    fn bad_label_names_the_line() {
        let err = parse_database("L1\n# c\nQ9\n", "db.txt").unwrap_err();
        let CliError::Input(msg) = err else {
            panic!("wrong error kind")
        };
        assert!(msg.starts_with("db.txt:3:"), "{msg}");
        assert!(msg.contains("Q9"), "{msg}");
    }

    #[test]
    fn case_object_and_array() {
        let one =
            r#"{"locus":"A","victim":["S1","S1"],"suspect":["L1","L2"],"observed":["L2","L1"]}"#;
        assert_eq!(parse_cases(one, "c").unwrap().len(), 1);
        let two = format!(
            r#"[{one}, {{"locus":"B","victim":["L1","S1"],"suspect":["L1","L1"],"observed":[]}}]"#
        );
        let cases = parse_cases(&two, "c").unwrap();
        assert_eq!(cases[1].locus, "B");
    }

    #[test]
    fn case_errors() {
        for bad in [
            "{",
            "3",
            "[]",
            r#"{"locus":"A","victim":["S1"],"suspect":["L1","L2"],"observed":[]}"#,
            r#"{"locus":"A","victim":["S1","S1"],"suspect":["L1","L2"],"observed":["S2"]}"#,
            r#"{"locus":"A","victim":["S1","S1"],"suspect":["L1","L2"],"observed":[],"x":1}"#,
            r#"[{"locus":"A","victim":["S1","S1"],"suspect":["L1","L2"]},
                {"locus":"A","victim":["S1","S1"],"suspect":["L1","L2"]}]"#,
        ] {
            assert!(
                matches!(parse_cases(bad, "c"), Err(CliError::Input(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn db_spec_forms() {
        let plain: DbSpec = "data/db.txt".parse().unwrap();
        assert_eq!(plain.locus, None);
        let tied: DbSpec = "D20=data/db.txt".parse().unwrap();
        assert_eq!(tied.locus.as_deref(), Some("D20"));
        assert_eq!(tied.path, PathBuf::from("data/db.txt"));
        assert!("D20=".parse::<DbSpec>().is_err());
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0013216136000087164), "0.00132161");
        assert_eq!(sig6(2.878895500911746), "2.8789");
        assert_eq!(sig6(756.6527), "756.653");
        assert_eq!(sig6(f64::NEG_INFINITY), "-inf");
        assert_eq!(sig6(1.0), "1");
    }
}
