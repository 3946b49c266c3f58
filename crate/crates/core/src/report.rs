//! CSV, JSON and SVG output for classification scans, ratio statistics, the
//! (c, n) table, full-matrix rank records and benchmark timings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::analysis::{ClassificationRecord, RatioRow};
use crate::error::{Error, Result};
use crate::fullmatrix::FullRankRecord;

fn fmt_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header).map_err(fmt_err)?;
    for r in rows {
        w.serialize(r).map_err(fmt_err)?;
    }
    String::from_utf8(w.into_inner().map_err(fmt_err)?).map_err(fmt_err)
}

fn from_csv<T: DeserializeOwned>(text: &str, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let found: Vec<String> = r
        .headers()
        .map_err(fmt_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header {
        return Err(Error::Format(format!(
            "expected header {}, found {}",
            header.join(","),
            found.join(",")
        )));
    }
    r.deserialize().map(|row| row.map_err(fmt_err)).collect()
}

/// Round half up to `places` decimals; exact for non-negative rationals.
pub fn format_decimal(q: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled =
        q * BigRational::from_integer(scale.clone()) + BigRational::new(1.into(), 2.into());
    let v = scaled.floor().to_integer();
    let (int, frac) = v.div_rem(&scale);
    format!(
        "{int}.{:0>width$}",
        frac.to_string(),
        width = places as usize
    )
}

pub const CLASSIFICATION_HEADER: [&str; 8] = [
    "n",
    "c",
    "o_c",
    "log_c",
    "predicted",
    "codim",
    "hypertree",
    "witness_k",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRow {
    pub n: u64,
    pub c: u64,
    pub o_c: u64,
    pub log_c: u64,
    pub predicted: u8,
    pub codim: usize,
    pub hypertree: u8,
    pub witness_k: Option<usize>,
}

impl From<&ClassificationRecord> for ClassificationRow {
    fn from(r: &ClassificationRecord) -> Self {
        Self {
            n: r.n,
            c: r.c,
            o_c: r.o_c,
            log_c: r.log_c,
            predicted: r.predicted_nonacyclic as u8,
            codim: r.codim,
            hypertree: r.is_hypertree as u8,
            witness_k: r.witness_k,
        }
    }
}

impl From<&ClassificationRow> for ClassificationRecord {
    fn from(r: &ClassificationRow) -> Self {
        Self {
            n: r.n,
            c: r.c,
            o_c: r.o_c,
            log_c: r.log_c,
            predicted_nonacyclic: r.predicted == 1,
            fast_singular: r.codim > 0,
            witness_k: r.witness_k,
            codim: r.codim,
            is_hypertree: r.hypertree == 1,
        }
    }
}

pub fn classification_csv(records: &[ClassificationRecord]) -> Result<String> {
    let rows: Vec<ClassificationRow> = records.iter().map(Into::into).collect();
    to_csv(&rows, &CLASSIFICATION_HEADER)
}

pub fn parse_classification_csv(text: &str) -> Result<Vec<ClassificationRecord>> {
    let rows: Vec<ClassificationRow> = from_csv(text, &CLASSIFICATION_HEADER)?;
    Ok(rows.iter().map(Into::into).collect())
}

pub fn records_json(records: &[ClassificationRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(fmt_err)
}

pub fn parse_records_json(text: &str) -> Result<Vec<ClassificationRecord>> {
    serde_json::from_str(text).map_err(fmt_err)
}

pub const RATIO_HEADER: [&str; 7] = [
    "n",
    "A_n",
    "N_n",
    "E_n",
    "acyclic_ratio",
    "nonacyclic_ratio",
    "bound",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioCsvRow {
    pub n: u64,
    #[serde(rename = "A_n")]
    pub a_n: u64,
    #[serde(rename = "N_n")]
    pub n_n: u64,
    #[serde(rename = "E_n")]
    pub e_n: u64,
    pub acyclic_ratio: String,
    /// Empty when E_n = 0.
    pub nonacyclic_ratio: String,
    pub bound: String,
}

impl From<&RatioRow> for RatioCsvRow {
    fn from(r: &RatioRow) -> Self {
        Self {
            n: r.n,
            a_n: r.a_n,
            n_n: r.n_n,
            e_n: r.e_n,
            acyclic_ratio: format_decimal(&r.acyclic_ratio(), 6),
            nonacyclic_ratio: r
                .nonacyclic_ratio()
                .map(|q| format_decimal(&q, 6))
                .unwrap_or_default(),
            bound: format_decimal(&r.bound(), 6),
        }
    }
}

pub fn ratio_csv(rows: &[RatioRow]) -> Result<String> {
    let rows: Vec<RatioCsvRow> = rows.iter().map(Into::into).collect();
    to_csv(&rows, &RATIO_HEADER)
}

pub fn parse_ratio_csv(text: &str) -> Result<Vec<RatioCsvRow>> {
    from_csv(text, &RATIO_HEADER)
}

pub const CONDITIONAL_HEADER: [&str; 4] = ["n", "A_n", "E_n", "conditional_acyclic_ratio"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalCsvRow {
    pub n: u64,
    #[serde(rename = "A_n")]
    pub a_n: u64,
    #[serde(rename = "E_n")]
    pub e_n: u64,
    pub conditional_acyclic_ratio: String,
}

pub fn conditional_ratio_csv(rows: &[RatioRow]) -> Result<String> {
    let rows: Vec<ConditionalCsvRow> = rows
        .iter()
        .map(|r| ConditionalCsvRow {
            n: r.n,
            a_n: r.a_n,
            e_n: r.e_n,
            conditional_acyclic_ratio: r
                .conditional_acyclic_ratio()
                .map(|q| format_decimal(&q, 6))
                .unwrap_or_default(),
        })
        .collect();
    to_csv(&rows, &CONDITIONAL_HEADER)
}

pub fn parse_conditional_ratio_csv(text: &str) -> Result<Vec<ConditionalCsvRow>> {
    from_csv(text, &CONDITIONAL_HEADER)
}

pub const FULL_RANK_HEADER: [&str; 6] =
    ["n", "c", "rank_F", "full", "hypertree", "implication_holds"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullRankCsvRow {
    pub n: u64,
    pub c: u64,
    #[serde(rename = "rank_F")]
    pub rank_f: usize,
    pub full: u8,
    pub hypertree: u8,
    pub implication_holds: u8,
}

pub fn full_rank_csv(records: &[FullRankRecord]) -> Result<String> {
    let rows: Vec<FullRankCsvRow> = records
        .iter()
        .map(|r| FullRankCsvRow {
            n: r.n,
            c: r.c,
            rank_f: r.rank_f,
            full: r.full as u8,
            hypertree: r.hypertree as u8,
            implication_holds: r.implication_holds as u8,
        })
        .collect();
    to_csv(&rows, &FULL_RANK_HEADER)
}

pub fn parse_full_rank_csv(text: &str) -> Result<Vec<FullRankCsvRow>> {
    from_csv(text, &FULL_RANK_HEADER)
}

pub const BENCH_HEADER: [&str; 3] = ["n", "method", "median_ms"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: u64,
    pub method: String,
    pub median_ms: f64,
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    to_csv(rows, &BENCH_HEADER)
}

pub fn parse_bench_csv(text: &str) -> Result<Vec<BenchRow>> {
    from_csv(text, &BENCH_HEADER)
}

/// Matrix layout: one row per c, one column per n; 0 for a hypertree, the
/// codimension otherwise, X where c is ineligible (c >= n - 2).
pub fn table_csv(records: &[ClassificationRecord]) -> Result<String> {
    let mut primes: Vec<u64> = records.iter().map(|r| r.n).collect();
    primes.dedup();
    let cells: BTreeMap<(u64, u64), usize> =
        records.iter().map(|r| ((r.c, r.n), r.codim)).collect();
    let max_c = primes.iter().max().map_or(2, |&n| n - 3);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["c".to_string()];
    header.extend(primes.iter().map(u64::to_string));
    w.write_record(&header).map_err(fmt_err)?;
    for c in 2..=max_c {
        let mut row = vec![c.to_string()];
        for &n in &primes {
            row.push(if c + 2 >= n {
                "X".to_string()
            } else {
                cells
                    .get(&(c, n))
                    .map(usize::to_string)
                    .ok_or_else(|| Error::Format(format!("no record for n={n} c={c}")))?
            });
        }
        w.write_record(&row).map_err(fmt_err)?;
    }
    String::from_utf8(w.into_inner().map_err(fmt_err)?).map_err(fmt_err)
}

/// Codimensions keyed by (n, c) read back from a table CSV.
pub fn parse_table_csv(text: &str) -> Result<BTreeMap<(u64, u64), usize>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let primes: Vec<u64> = r
        .headers()
        .map_err(fmt_err)?
        .iter()
        .skip(1)
        .map(|h| h.parse().map_err(fmt_err))
        .collect::<Result<_>>()?;
    let mut out = BTreeMap::new();
    for row in r.records() {
        let row = row.map_err(fmt_err)?;
        let c: u64 = row
            .get(0)
            .ok_or_else(|| Error::Format("empty row".into()))?
            .parse()
            .map_err(fmt_err)?;
        for (cell, &n) in row.iter().skip(1).zip(&primes) {
            if cell != "X" {
                out.insert((n, c), cell.parse().map_err(fmt_err)?);
            }
        }
    }
    Ok(out)
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Scatter of the acyclic ratio against n, with the bound drawn as a polyline.
pub fn ratio_svg(rows: &[RatioRow]) -> String {
    let (w, h, m) = (720.0, 420.0, 50.0);
    let n_min = rows.iter().map(|r| r.n).min().unwrap_or(0) as f64;
    let n_max = rows.iter().map(|r| r.n).max().unwrap_or(1) as f64;
    let span = (n_max - n_min).max(1.0);
    let x = |n: u64| m + (n as f64 - n_min) / span * (w - 2.0 * m);
    let y = |v: f64| h - m - v * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{0}" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">n</text>"#,
        w / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="5" y="{}" font-size="12">1</text><text x="5" y="{}" font-size="12">0</text>"#,
        y(1.0),
        y(0.0)
    );
    let bound: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", x(r.n), y(to_f64(&r.bound()))))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="red" points="{}"/>"#,
        bound.join(" ")
    );
    for r in rows {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="steelblue"/>"#,
            x(r.n),
            y(to_f64(&r.acyclic_ratio()))
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{classify, ratio_rows_from_records, scan, Method};
    use crate::fullmatrix::check_full_rank_implication;
    use crate::numtheory::primes_in;

    #[test]
    fn decimal_rounding() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(format_decimal(&q(1, 3), 6), "0.333333");
        assert_eq!(format_decimal(&q(2, 3), 6), "0.666667");
        assert_eq!(format_decimal(&q(1, 1), 6), "1.000000");
        assert_eq!(format_decimal(&q(1, 16), 3), "0.063");
    }

    #[test]
    fn classification_round_trip() {
        let records = scan(&primes_in(11, 19), Method::Fast, 1).unwrap();
        let text = classification_csv(&records).unwrap();
        assert!(text.starts_with("n,c,o_c,log_c,predicted,codim,hypertree,witness_k\n"));
        assert!(text.contains("\n13,5,4,9,1,3,0,1\n"));
        let back = parse_classification_csv(&text).unwrap();
        assert_eq!(back, records);
        assert_eq!(classification_csv(&back).unwrap(), text);
        let json = records_json(&records).unwrap();
        assert_eq!(parse_records_json(&json).unwrap(), records);
    }

    #[test]
    fn ratio_round_trip() {
        let records = scan(&primes_in(11, 23), Method::Fast, 1).unwrap();
        let rows = ratio_rows_from_records(&records);
        let text = ratio_csv(&rows).unwrap();
        let back = parse_ratio_csv(&text).unwrap();
        assert_eq!(back.len(), rows.len());
        assert_eq!(to_csv(&back, &RATIO_HEADER).unwrap(), text);
        for r in &back {
            let h = (r.n - 1) / 2;
            let bound = BigRational::new(crate::numtheory::euler_phi(h).into(), h.into());
            assert_eq!(r.bound, format_decimal(&bound, 6));
            assert_eq!(r.nonacyclic_ratio.is_empty(), r.e_n == 0);
        }
        let cond = conditional_ratio_csv(&rows).unwrap();
        assert_eq!(
            to_csv(
                &parse_conditional_ratio_csv(&cond).unwrap(),
                &CONDITIONAL_HEADER
            )
            .unwrap(),
            cond
        );
        assert!(ratio_svg(&rows).contains("<polyline"));
    }

    #[test]
    fn table_layout() {
        let records = scan(&primes_in(11, 17), Method::Fast, 1).unwrap();
        let text = table_csv(&records).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("c,11,13,17"));
        assert_eq!(
            lines.next(),
            Some(&*format!(
                "2,{},{},{}",
                records[0].codim, records[7].codim, records[16].codim
            ))
        );
        assert!(text.contains("\n9,X,"));
        assert!(text.contains("\n11,X,X,"));
        let cells = parse_table_csv(&text).unwrap();
        assert_eq!(cells.len(), records.len());
        assert!(cells[&(13, 5)] > 0);
        assert_eq!(
            table_csv(
                &parse_table_csv(&text)
                    .unwrap()
                    .iter()
                    .map(|(&(n, c), &codim)| {
                        let mut r = classify(n, c, Method::Fast).unwrap();
                        r.codim = codim;
                        r
                    })
                    .collect::<Vec<_>>()
            )
            .unwrap(),
            text
        );
    }

    #[test]
    fn full_rank_and_bench_round_trip() {
        let recs = vec![
            check_full_rank_implication(11, 2).unwrap(),
            check_full_rank_implication(13, 5).unwrap(),
        ];
        let text = full_rank_csv(&recs).unwrap();
        assert!(text.starts_with("n,c,rank_F,full,hypertree,implication_holds\n"));
        assert_eq!(
            to_csv(&parse_full_rank_csv(&text).unwrap(), &FULL_RANK_HEADER).unwrap(),
            text
        );
        let bench = vec![BenchRow {
            n: 13,
            method: "fast".into(),
            median_ms: 0.25,
        }];
        let text = bench_csv(&bench).unwrap();
        assert_eq!(parse_bench_csv(&text).unwrap(), bench);
    }
}
