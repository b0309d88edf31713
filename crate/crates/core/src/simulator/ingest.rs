//! Loading labeled score sequences from CSV with a `score,label` header.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::{Label, LabeledScore};

fn parse_error(line: u64, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

/// Parses CSV rows in file order. Line numbers in errors are 1-based and
/// count the header.
pub fn parse_scores<R: Read>(reader: R) -> Result<Vec<LabeledScore>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(si), Some(li)) = (col("score"), col("label")) else {
        return Err(parse_error(1, "header must contain `score` and `label` columns"));
    };
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let score: f64 = field(si)
            .parse()
            .map_err(|_| parse_error(line, format!("invalid score `{}`", field(si))))?;
        if !score.is_finite() {
            return Err(parse_error(line, "score must be finite"));
        }
        let label = match field(li) {
            "0" => Label::Zero,
            "1" => Label::One,
            other => return Err(parse_error(line, format!("label must be 0 or 1, got `{other}`"))),
        };
        rows.push(LabeledScore { score, label });
    }
    Ok(rows)
}

pub fn ingest_scores(path: impl AsRef<Path>) -> Result<Vec<LabeledScore>> {
    parse_scores(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_in_order() {
        let rows = parse_scores("score,label\n1.5,1\n-2,0\n 3e1 , 1\n".as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].label, Label::One);
        assert_eq!(rows[1].score, -2.0);
        assert_eq!(rows[2].score, 30.0);
        let swapped = parse_scores("label,score\n0,4\n".as_bytes()).unwrap();
        assert_eq!(swapped[0].score, 4.0);
    }

    #[test]
    fn rejects_bad_rows_with_line() {
        match parse_scores("score,label\n1,1\n2,2\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_scores("score,label\nabc,1\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_scores("score,label\nnan,1\n".as_bytes()).is_err());
        assert!(parse_scores("x,y\n1,1\n".as_bytes()).is_err());
        assert!(parse_scores("score,label\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn reads_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, "score,label\n0.25,0\n").unwrap();
        assert_eq!(ingest_scores(&path).unwrap().len(), 1);
        assert!(matches!(ingest_scores(dir.path().join("missing.csv")), Err(Error::Io(_))));
    }
}
