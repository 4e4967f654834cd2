//! Reference curves, exponent fitting, and table output.
//!
//! All logarithms are natural.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::ChainReport;
use crate::error::{Error, Result};
use crate::lemma1::TdCount;

pub const THEOREM1_EXPONENT: f64 = 23.0 / 24.0;

/// `2 sqrt(p) ln p + 2 sqrt(p) + 1`.
pub fn mordell_rhs(p: u64) -> f64 {
    let (s, l) = ((p as f64).sqrt(), (p as f64).ln());
    2.0 * s * l + 2.0 * s + 1.0
}

/// `max_abs / (sqrt(p) ln p)`.
pub fn stoneham_ratio(p: u64, max_abs: f64) -> f64 {
    max_abs / ((p as f64).sqrt() * (p as f64).ln())
}

/// `p^(23/24)`.
pub fn theorem1_reference(p: u64) -> f64 {
    (p as f64).powf(THEOREM1_EXPONENT)
}

/// `phi(p-1) ln ln p / p`.
pub fn phi_estimate_report(p: u64) -> Result<f64> {
    if p < 5 {
        return Err(Error::OutOfRange {
            n: p,
            range: "p >= 5",
        });
    }
    let phi = crate::numtheory::euler_phi(p - 1) as f64;
    Ok(phi * (p as f64).ln().ln() / p as f64)
}

/// Least-squares line through `(ln p, ln max_abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub n_points: usize,
}

pub fn fit_exponent(points: &[(u64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Invalid(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(p, v)) = points
        .iter()
        .find(|&&(p, v)| v.is_nan() || v <= 0.0 || p == 0)
    {
        return Err(Error::Invalid(format!(
            "exponent fit needs positive data, got ({p}, {v})"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|&(p, _)| (p as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid(
            "exponent fit needs at least two distinct p".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
        n_points: points.len(),
    })
}

/// One row of a prime scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub p: u64,
    pub quantity: String,
    pub max_abs: f64,
    pub mordell_rhs: f64,
    pub theorem1_ref: f64,
    pub ratio: f64,
    pub samples: u64,
    pub seed: u64,
}

impl ScanRecord {
    pub fn new(p: u64, quantity: impl Into<String>, max_abs: f64, samples: u64, seed: u64) -> Self {
        let theorem1_ref = theorem1_reference(p);
        Self {
            p,
            quantity: quantity.into(),
            max_abs,
            mordell_rhs: mordell_rhs(p),
            theorem1_ref,
            ratio: max_abs / theorem1_ref,
            samples,
            seed,
        }
    }
}

/// Formats `x` with 12 significant digits: fixed notation for magnitudes in
/// `[1e-4, 1e12)`, scientific otherwise. Never prints `-0`.
pub fn fmt_sig(x: f64) -> String {
    const SIG: i32 = 12;
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let s = if (-4..12).contains(&mag) {
        let decimals = (SIG - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    };
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Rows that can be written as CSV with a fixed header.
pub trait TableRow: Serialize {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl TableRow for ScanRecord {
    fn header() -> &'static [&'static str] {
        &[
            "p",
            "quantity",
            "max_abs",
            "mordell_rhs",
            "theorem1_ref",
            "ratio",
            "samples",
            "seed",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.quantity.clone(),
            fmt_sig(self.max_abs),
            fmt_sig(self.mordell_rhs),
            fmt_sig(self.theorem1_ref),
            fmt_sig(self.ratio),
            self.samples.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// One step of a chain report, flattened for output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub context: String,
    pub label: String,
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl ChainRow {
    pub fn from_report(report: &ChainReport) -> Vec<Self> {
        report
            .steps
            .iter()
            .map(|s| Self {
                context: report.context.clone(),
                label: s.label.clone(),
                relation: s.relation.as_str().to_string(),
                lhs: s.lhs,
                rhs: s.rhs,
                slack: s.relative_slack(),
            })
            .collect()
    }
}

impl TableRow for ChainRow {
    fn header() -> &'static [&'static str] {
        &["context", "label", "relation", "lhs", "rhs", "slack"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.context.clone(),
            self.label.clone(),
            self.relation.clone(),
            fmt_sig(self.lhs),
            fmt_sig(self.rhs),
            fmt_sig(self.slack),
        ]
    }
}

/// `T_d` with its bracket and the `t_d^(14/3) / p` ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdRow {
    pub p: u64,
    pub lambda: u64,
    pub d: u64,
    pub t_d: u64,
    pub count: u64,
    pub lower: u64,
    pub upper: u64,
    pub ratio: f64,
}

impl From<&TdCount> for TdRow {
    fn from(c: &TdCount) -> Self {
        Self {
            p: c.ctx.p,
            lambda: c.ctx.lambda,
            d: c.ctx.d,
            t_d: c.ctx.t_d,
            count: c.count,
            lower: c.diagonal_lower_bound(),
            upper: c.trivial_upper_bound(),
            ratio: crate::lemma1::ratio_of(c),
        }
    }
}

impl TableRow for TdRow {
    fn header() -> &'static [&'static str] {
        &[
            "p", "lambda", "d", "t_d", "count", "lower", "upper", "ratio",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.lambda.to_string(),
            self.d.to_string(),
            self.t_d.to_string(),
            self.count.to_string(),
            self.lower.to_string(),
            self.upper.to_string(),
            fmt_sig(self.ratio),
        ]
    }
}

/// One completion experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRow {
    pub spec: String,
    pub interval: String,
    pub direct_re: f64,
    pub direct_im: f64,
    pub completed_re: f64,
    pub completed_im: f64,
    pub per_k_bound_sum: f64,
    pub main_term_bound: f64,
    pub final_rhs: f64,
}

impl TableRow for CompletionRow {
    fn header() -> &'static [&'static str] {
        &[
            "spec",
            "interval",
            "direct_re",
            "direct_im",
            "completed_re",
            "completed_im",
            "per_k_bound_sum",
            "main_term_bound",
            "final_rhs",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.spec.clone(),
            self.interval.clone(),
            fmt_sig(self.direct_re),
            fmt_sig(self.direct_im),
            fmt_sig(self.completed_re),
            fmt_sig(self.completed_im),
            fmt_sig(self.per_k_bound_sum),
            fmt_sig(self.main_term_bound),
            fmt_sig(self.final_rhs),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Where a table goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    fn label(&self) -> PathBuf {
        match self {
            Destination::Stdout => PathBuf::from("<stdout>"),
            Destination::File(p) => p.clone(),
        }
    }
}

pub fn render_csv<R: TableRow>(rows: &[R]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(R::header()).expect("in-memory write");
    for r in rows {
        w.write_record(r.fields()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn render_json<R: TableRow>(rows: &[R]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn render<R: TableRow>(rows: &[R], format: Format) -> String {
    match format {
        Format::Csv => render_csv(rows),
        Format::Json => render_json(rows),
    }
}

/// Writes `rows` to `dest` in the requested format.
pub fn emit<R: TableRow>(rows: &[R], format: Format, dest: &Destination) -> Result<()> {
    let text = render(rows, format);
    let res = match dest {
        Destination::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush())
        }
        Destination::File(path) => fs::write(path, text),
    };
    res.map_err(|source| Error::Io {
        path: dest.label(),
        source,
    })
}

/// Reads scan records written by [`emit`] in either format.
pub fn read_scan_records(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scan_records(&text).map_err(|message| Error::Parse {
        path: path.to_path_buf(),
        message,
    })
}

pub fn parse_scan_records(text: &str) -> std::result::Result<Vec<ScanRecord>, String> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| e.to_string());
    }
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if header != ScanRecord::header() {
        return Err(format!("unexpected header {header:?}"));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| e.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // mpmath references
        assert!((mordell_rhs(7) - 16.588_291_278_283_157).abs() < 1e-10);
        assert!((mordell_rhs(101) - 113.862_525_583_717_41).abs() < 1e-9);
        assert!((stoneham_ratio(7, 1.0) - 0.194_235_316_154_098_25).abs() < 1e-12);
        assert!((theorem1_reference(1009) - 756.360_837_940_840_8).abs() < 1e-9);
        assert!((theorem1_reference(2) - 1.943_063_882_307_211_7).abs() < 1e-12);
        assert!((phi_estimate_report(7).unwrap() - 0.190_208_517_308_078_97).abs() < 1e-12);
        assert!((phi_estimate_report(11).unwrap() - 0.318_033_230_154_068_7).abs() < 1e-12);
        assert!(phi_estimate_report(3).is_err());
    }

    #[test]
    fn monotone_and_sublinear() {
        let primes = crate::numtheory::primes_in(3, 5000);
        for w in primes.windows(2) {
            assert!(mordell_rhs(w[0]) < mordell_rhs(w[1]));
        }
        for p in 2..10_000u64 {
            assert!(theorem1_reference(p) < p as f64);
        }
        for &p in primes.iter().filter(|&&p| p >= 5) {
            assert!(phi_estimate_report(p).unwrap() > 0.0);
        }
    }

    #[test]
    fn fit_exact_power_laws() {
        let pts: Vec<(u64, f64)> = [101u64, 1009, 10007]
            .iter()
            .map(|&p| (p, (p as f64).sqrt()))
            .collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-9);
        assert!(f.residual < 1e-9);
        let pts: Vec<(u64, f64)> = [11u64, 13, 17, 19]
            .iter()
            .map(|&p| (p, 3.5 * p as f64))
            .collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-9);
        assert!((f.intercept - 3.5f64.ln()).abs() < 1e-9);
        assert!(fit_exponent(&pts[..2]).is_err());
        assert!(fit_exponent(&[(3, 1.0), (5, 0.0), (7, 1.0)]).is_err());
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(16.588_291_278_283_157), "16.5882912783");
        assert_eq!(fmt_sig(-1.0), "-1.00000000000");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-1e-20), "-1.00000000000e-20");
        assert_eq!(fmt_sig(1.833_087_929_028e9), "1833087929.03");
        assert_eq!(fmt_sig(2.5e15), "2.50000000000e15");
    }

    #[test]
    fn csv_header_only_when_empty() {
        let rows: Vec<ScanRecord> = Vec::new();
        assert_eq!(
            render_csv(&rows),
            "p,quantity,max_abs,mordell_rhs,theorem1_ref,ratio,samples,seed\n"
        );
    }

    #[test]
    fn csv_and_json_round_trip() {
        let rows = vec![
            ScanRecord::new(1009, "avg_complete", 3.271_828_182_845_904, 50, 7),
            ScanRecord::new(10007, "avg_complete", 0.001_234_567_890_123_4, 50, 7),
        ];
        for format in [Format::Csv, Format::Json] {
            let text = render(&rows, format);
            assert!(!text.contains('\r'));
            let back = parse_scan_records(&text).unwrap();
            assert_eq!(back.len(), rows.len());
            for (a, b) in rows.iter().zip(&back) {
                assert_eq!(
                    (a.p, &a.quantity, a.samples, a.seed),
                    (b.p, &b.quantity, b.samples, b.seed)
                );
                for (x, y) in [
                    (a.max_abs, b.max_abs),
                    (a.mordell_rhs, b.mordell_rhs),
                    (a.theorem1_ref, b.theorem1_ref),
                    (a.ratio, b.ratio),
                ] {
                    assert!((x - y).abs() <= 1e-11 * x.abs(), "{x} vs {y}");
                }
            }
        }
    }
}
