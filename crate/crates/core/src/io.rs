//! File formats: the probability-vector input format, deterministic CSV
//! emission (17 significant digits, schema-versioned), and JSON mirrors.

use std::io::{BufRead, Write};

use crate::bernoulli::BernoulliVector;
use crate::bounds::BoundCheckResult;
use crate::error::{Error, Result};
use crate::harness::SweepRecord;

/// CSV schema version stamped as a leading comment line.
pub const CSV_SCHEMA: &str = "# schema=1";

/// Parse the probability-vector format: one decimal per line, `#` starts a
/// comment, blank lines ignored. Errors carry 1-based line numbers.
pub fn parse_probability_lines(reader: impl BufRead) -> Result<Vec<f64>> {
    let mut probs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("expected a decimal probability, got {trimmed:?}"),
        })?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("probability {value} outside [0, 1]"),
            });
        }
        probs.push(value);
    }
    Ok(probs)
}

pub fn read_probability_file(path: &std::path::Path) -> Result<BernoulliVector<f64>> {
    let file = std::fs::File::open(path)?;
    let probs = parse_probability_lines(std::io::BufReader::new(file))?;
    BernoulliVector::new(probs)
}

/// Round-trip f64 formatting: 17 significant digits.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Minimal CSV escaping: fields we emit never contain quotes, but family
/// descriptors may contain commas.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per sweep record. The column set is fixed by the α grid, so a
/// given configuration always produces byte-identical output; no timestamps
/// or other run metadata belong in here.
pub fn write_sweep_csv(
    out: &mut impl Write,
    records: &[SweepRecord],
    alphas: &[f64],
) -> Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    let mut columns = vec![
        "index".to_string(),
        "family".into(),
        "seed".into(),
        "rng".into(),
        "n".into(),
        "lambda".into(),
        "lambda2".into(),
        "lambda3".into(),
        "big_f".into(),
        "q".into(),
        "q0".into(),
        "max_p".into(),
        "precision".into(),
        "escalated".into(),
        "tv".into(),
        "kl".into(),
        "chi2".into(),
    ];
    for &a in alphas {
        columns.push(format!("renyi_a{a}"));
    }
    for &a in alphas {
        columns.push(format!("tsallis_a{a}"));
    }
    for &a in alphas.iter().filter(|&&a| a >= 1.0) {
        columns.push(format!("vajda_a{a}"));
    }
    columns.extend(
        [
            "h_w",
            "h_z",
            "h2_z",
            "entropy_diff",
            "kl_negative_part",
            "kl_quadratic_lower",
            "tail_budget",
            "checks_applicable",
            "checks_failed",
            "failed_names",
            "error",
        ]
        .map(String::from),
    );
    writeln!(out, "{}", columns.join(","))?;

    for rec in records {
        let mut row: Vec<String> = vec![
            rec.index.to_string(),
            csv_field(&rec.family),
            rec.seed.map(|s| s.to_string()).unwrap_or_default(),
            crate::harness::RNG_NAME.into(),
            rec.summary.n.to_string(),
            fmt_g17(rec.summary.lambda),
            fmt_g17(rec.summary.lambda2),
            fmt_g17(rec.summary.lambda3),
            fmt_g17(rec.summary.big_f),
            fmt_g17(rec.summary.q),
            fmt_g17(rec.summary.q0),
            fmt_g17(rec.summary.max_p),
        ];
        if let Some(rep) = &rec.report {
            row.push(rep.precision.to_string());
            row.push(rep.escalated.to_string());
            row.push(fmt_g17(rep.tv));
            row.push(fmt_g17(rep.kl));
            row.push(fmt_g17(rep.chi2));
            for &a in alphas {
                row.push(fmt_g17(rep.renyi_at(a).unwrap_or(f64::NAN)));
            }
            for &a in alphas {
                row.push(fmt_g17(rep.tsallis_at(a).unwrap_or(f64::NAN)));
            }
            for &a in alphas.iter().filter(|&&a| a >= 1.0) {
                row.push(fmt_g17(rep.vajda_at(a).unwrap_or(f64::NAN)));
            }
            row.push(fmt_g17(rep.h_w));
            row.push(fmt_g17(rep.h_z));
            row.push(fmt_g17(rep.h2_z));
            row.push(fmt_g17(rep.entropy_diff));
            row.push(fmt_g17(rep.kl_negative_part));
            row.push(fmt_g17(rep.kl_quadratic_lower));
            row.push(fmt_g17(rep.truncation_tail_budget));
        }
        // Pad to the fixed width; evaluation failures leave value columns
        // empty rather than dropping the row.
        while row.len() < columns.len() - 4 {
            row.push(String::new());
        }
        let applicable = rec.checks.iter().filter(|c| c.applicable).count();
        let failed: Vec<&str> = rec
            .checks
            .iter()
            .filter(|c| c.applicable && !c.holds)
            .map(|c| c.name.as_str())
            .collect();
        row.push(applicable.to_string());
        row.push(failed.len().to_string());
        row.push(csv_field(&failed.join(";")));
        row.push(csv_field(rec.error.as_deref().unwrap_or("")));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_bound_table(out: &mut impl Write, checks: &[BoundCheckResult]) -> Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    writeln!(out, "name,applicable,lhs,rhs,margin,holds,precision")?;
    for c in checks {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&c.name),
            c.applicable,
            fmt_g17(c.lhs),
            fmt_g17(c.rhs),
            fmt_g17(c.margin),
            c.holds,
            c.precision
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn parses_with_comments_and_blanks() {
        let text = "# header\n0.5\n\n  0.25 \n# trailing\n1.0\n";
        let probs = parse_probability_lines(Cursor::new(text)).unwrap();
        assert_eq!(probs, vec![0.5, 0.25, 1.0]);
    }

    #[test]
    fn error_carries_line_number() {
        let text = "0.5\n1.2\n";
        match parse_probability_lines(Cursor::new(text)) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "0.5\n\nnot-a-number\n";
        match parse_probability_lines(Cursor::new(text)) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.5e-300, 1.7976931348623157e308, -0.0] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_g17(f64::NAN), "nan");
    }

    #[test]
    fn csv_field_quotes_commas() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
