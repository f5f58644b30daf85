//! ħ-sweeps for the Dirac, von Neumann and Rieffel conditions, in the
//! Banach-algebra norm and in operator norm, with log-log rate fits.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::error::{Result, WeylError};
use crate::io::{format_g17, num};
use crate::measure::Measure;
use crate::phase_space::SupNormSampling;
use crate::representation::{
    build_operator, classical_norm, operator_norm, QuantizationFamily, RepConfig, SchrodingerRep, DEFAULT_TOL,
};
use crate::space::{HbarScaler, SeminormSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepMode {
    DiracBanach,
    VonNeumannBanach,
    DiracOperator,
    VonNeumannOperator,
    Rieffel,
}

impl SweepMode {
    pub const ALL: [SweepMode; 5] = [
        SweepMode::DiracBanach,
        SweepMode::VonNeumannBanach,
        SweepMode::DiracOperator,
        SweepMode::VonNeumannOperator,
        SweepMode::Rieffel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepMode::DiracBanach => "dirac-banach",
            SweepMode::VonNeumannBanach => "vonneumann-banach",
            SweepMode::DiracOperator => "dirac-op",
            SweepMode::VonNeumannOperator => "vonneumann-op",
            SweepMode::Rieffel => "rieffel",
        }
    }

    fn needs_nu(self) -> bool {
        self != SweepMode::Rieffel
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepMode {
    type Err = WeylError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| WeylError::validation("mode", format!("unknown sweep mode {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub hbar_grid: Vec<f64>,
    pub mu: Measure,
    pub nu: Option<Measure>,
    pub mode: SweepMode,
    pub rep: RepConfig,
    pub scaler: HbarScaler,
    pub seminorm: SeminormSpec,
    pub tol: f64,
    /// Rows with `lo ≤ ħ ≤ hi` enter the slope fit.
    pub fit_range: (f64, f64),
    pub sampling: SupNormSampling,
}

impl SweepSpec {
    /// Default grid, identity semi-norm with `c = ‖σ‖₂`, sqrt scaling.
    pub fn new(mode: SweepMode, mu: Measure, nu: Option<Measure>, seminorm: SeminormSpec) -> Self {
        Self {
            hbar_grid: default_hbar_grid(),
            mu,
            nu,
            mode,
            rep: RepConfig::default(),
            scaler: HbarScaler::sqrt(),
            seminorm,
            tol: DEFAULT_TOL,
            fit_range: (1e-4, 1e-1),
            sampling: SupNormSampling::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hbar_grid.is_empty() {
            return Err(WeylError::validation("hbar_grid", "must not be empty"));
        }
        if self.hbar_grid.iter().any(|h| !h.is_finite()) {
            return Err(WeylError::validation("hbar_grid", "values must be finite"));
        }
        if self.hbar_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WeylError::validation("hbar_grid", "must be strictly increasing"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(WeylError::validation("tol", "must be positive"));
        }
        let (lo, hi) = self.fit_range;
        if !(lo > 0.0 && hi > lo) {
            return Err(WeylError::validation("fit_range", "need 0 < lo < hi"));
        }
        if self.seminorm.dim() != self.mu.space().dim() {
            return Err(WeylError::validation("seminorm", "dimension differs from the space"));
        }
        match (&self.nu, self.mode.needs_nu()) {
            (None, true) => Err(WeylError::validation("nu", format!("mode {} needs a second measure", self.mode))),
            (Some(nu), true) if !same_space(&self.mu, nu) => Err(WeylError::SpaceMismatch),
            _ => Ok(()),
        }
    }

    fn nu(&self) -> &Measure {
        self.nu.as_ref().expect("validated")
    }
}

fn same_space(a: &Measure, b: &Measure) -> bool {
    Arc::ptr_eq(a.space(), b.space()) || **a.space() == **b.space()
}

/// 25 log-spaced points on `[1e-4, 1]`.
pub fn default_hbar_grid() -> Vec<f64> {
    log_grid(1e-4, 1.0, 25)
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.log10(), b.log10());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                10f64.powf(la + (lb - la) * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// `log:a:b:n`, `lin:a:b:n` or a comma-separated list; the result is
/// sorted and free of duplicates.
pub fn parse_hbar_grid(text: &str) -> Result<Vec<f64>> {
    let err = |m: &str| WeylError::validation("hbar-grid", m.to_string());
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| err(&format!("not a number: {s:?}")))
    };
    let mut grid = if let Some(rest) = text.strip_prefix("log:").or_else(|| text.strip_prefix("lin:")) {
        let parts: Vec<&str> = rest.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(err("expected kind:start:stop:count"));
        };
        let (a, b) = (parse(a)?, parse(b)?);
        let n: usize = n.trim().parse().map_err(|_| err("count must be a positive integer"))?;
        if n == 0 {
            return Err(err("count must be a positive integer"));
        }
        if text.starts_with("log:") {
            if !(a > 0.0 && b > 0.0) {
                return Err(err("log grids need positive endpoints"));
            }
            log_grid(a, b, n)
        } else if n == 1 {
            vec![a]
        } else {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        }
    } else {
        text.split(',').map(parse).collect::<Result<Vec<_>>>()?
    };
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        return Err(err("empty grid"));
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    /// The representation band was exceeded.
    Aliased,
    /// The norm iteration hit its cap; the value is the best lower bound.
    NotConverged,
    /// ħ outside the scaler's domain.
    Domain,
}

impl RowFlag {
    pub fn name(self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::Aliased => "aliased",
            RowFlag::NotConverged => "not_converged",
            RowFlag::Domain => "domain",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub hbar: f64,
    pub value: f64,
    pub flag: RowFlag,
    /// Operator sweeps: the matching `‖·‖₁` value.
    pub banach: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// No prediction exists for this input.
    None,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

impl Verdict {
    fn new(name: &str, outcome: Outcome, detail: String) -> Self {
        Self {
            name: name.into(),
            outcome,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub mode: SweepMode,
    pub rows: Vec<SweepRow>,
    pub fit: Option<SlopeFit>,
    pub verdicts: Vec<Verdict>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.outcome != Outcome::Fail)
    }

    pub fn converged(&self) -> bool {
        self.rows.iter().all(|r| r.flag != RowFlag::NotConverged)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("hbar,value,flag\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", format_g17(r.hbar), format_g17(r.value), r.flag.name()));
        }
        match self.fit {
            Some(f) => {
                s.push_str(&format!("slope,{},fit\n", format_g17(f.slope)));
                s.push_str(&format!("stderr,{},fit\n", format_g17(f.stderr)));
            }
            None => {
                s.push_str("slope,,none\n");
                s.push_str("stderr,,none\n");
            }
        }
        for v in &self.verdicts {
            s.push_str(&format!("verdict,{},{}\n", v.name, v.outcome.name()));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut o = Map::new();
                o.insert("hbar".into(), num(r.hbar));
                o.insert("value".into(), num(r.value));
                o.insert("flag".into(), Value::from(r.flag.name()));
                if let Some(b) = r.banach {
                    o.insert("banach".into(), num(b));
                }
                Value::Object(o)
            })
            .collect();
        let mut o = Map::new();
        o.insert("mode".into(), Value::from(self.mode.name()));
        o.insert("rows".into(), Value::Array(rows));
        o.insert("slope".into(), self.fit.map_or(Value::Null, |f| num(f.slope)));
        o.insert("stderr".into(), self.fit.map_or(Value::Null, |f| num(f.stderr)));
        o.insert(
            "verdicts".into(),
            Value::Array(
                self.verdicts
                    .iter()
                    .map(|v| {
                        let mut m = Map::new();
                        m.insert("name".into(), Value::from(v.name.clone()));
                        m.insert("outcome".into(), Value::from(v.outcome.name()));
                        m.insert("detail".into(), Value::from(v.detail.clone()));
                        Value::Object(m)
                    })
                    .collect(),
            ),
        );
        Value::Object(o)
    }
}

/// Least squares on `(log ħ, log value)` over rows with `lo ≤ ħ ≤ hi`;
/// non-positive or non-finite values are skipped.
pub fn slope_fit(rows: &[(f64, f64)], range: (f64, f64)) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(h, v)| *h >= range.0 && *h <= range.1 && *h > 0.0 && *v > 0.0 && v.is_finite())
        .map(|(h, v)| (h.ln(), v.ln()))
        .collect();
    let n = pts.len();
    if n < 5 {
        return Err(WeylError::Fit(format!("{n} usable rows in [{}, {}], need at least 5", range.0, range.1)));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(WeylError::Fit("all usable rows share one ħ".into()));
    }
    let slope = sxy / sxx;
    let sse: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        stderr: (sse / (nf - 2.0) / sxx).sqrt(),
        points: n,
    })
}

fn fit_rows(rows: &[SweepRow], range: (f64, f64)) -> Option<SlopeFit> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.flag == RowFlag::Ok)
        .map(|r| (r.hbar, r.value))
        .collect();
    slope_fit(&usable, range).ok()
}

fn slope_verdict(name: &str, fit: Option<SlopeFit>, target: f64, width: f64) -> Verdict {
    match fit {
        Some(f) => Verdict::new(
            name,
            Outcome::from_bool((f.slope - target).abs() <= width),
            format!("slope {} ± {} against {target} ± {width}", f.slope, f.stderr),
        ),
        // an identically vanishing difference has no rate to fit
        None => Verdict::new(name, Outcome::None, "fewer than 5 positive rows in the fit range".into()),
    }
}

fn sweep_rows(grid: &[f64], row: impl Fn(f64) -> Result<SweepRow> + Sync) -> Result<Vec<SweepRow>> {
    grid.par_iter().map(|&h| row(h)).collect()
}

fn flag_for(err: WeylError, hbar: f64) -> Result<SweepRow> {
    let flag = match err {
        WeylError::Aliasing(_) => RowFlag::Aliased,
        WeylError::HbarDomain(_) => RowFlag::Domain,
        other => return Err(other),
    };
    Ok(SweepRow {
        hbar,
        value: f64::NAN,
        flag,
        banach: None,
    })
}

/// `(i/ħ)[μ, ν]_ħ − {μ, ν}₀` as one convolution with kernel
/// `(2/ħ) sin(ħσ/2) − σ`.
fn dirac_difference(mu: &Measure, nu: &Measure, hbar: f64) -> Result<Measure> {
    let space = mu.space().clone();
    mu.convolve(nu, move |f, g| {
        let s = space.sigma_unchecked(f, g);
        C64::new(2.0 / hbar * (0.5 * hbar * s).sin() - s, 0.0)
    })
}

/// `μ ⋆_ħ ν − μ ⋆₀ ν` with kernel `e^{−iħσ/2} − 1 = −2i sin(ħσ/4) e^{−iħσ/4}`.
fn vonneumann_difference(mu: &Measure, nu: &Measure, hbar: f64) -> Result<Measure> {
    let space = mu.space().clone();
    mu.convolve(nu, move |f, g| {
        let t = 0.25 * hbar * space.sigma_unchecked(f, g);
        C64::new(0.0, -2.0 * t.sin()) * C64::from_polar(1.0, -t)
    })
}

fn ok_row(hbar: f64, value: f64) -> SweepRow {
    SweepRow {
        hbar,
        value,
        flag: RowFlag::Ok,
        banach: None,
    }
}

fn smallest_positive(rows: &[SweepRow]) -> Option<&SweepRow> {
    rows.iter().find(|r| r.hbar > 0.0 && r.flag == RowFlag::Ok)
}

/// `‖(i/ħ)[μ, ν]_ħ − {μ, ν}₀‖₁` along the grid.
pub fn dirac_banach_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let (mu, nu) = (&spec.mu, spec.nu());
    let m1 = mu.moment_norm(&spec.seminorm, 1)?.total;
    let n1 = nu.moment_norm(&spec.seminorm, 1)?.total;
    // rejects measures without a finite first moment
    mu.poisson_bracket0(nu)?;
    let rows = sweep_rows(&spec.hbar_grid, |h| {
        if h == 0.0 {
            return Ok(ok_row(h, 0.0));
        }
        Ok(ok_row(h, dirac_difference(mu, nu, h)?.norm1()))
    })?;
    let fit = fit_rows(&rows, spec.fit_range);
    let floor = 1e-8 * m1 * n1;
    let mut verdicts = vec![monotone_verdict(&rows, spec.fit_range.1)];
    verdicts.push(match smallest_positive(&rows) {
        Some(r) => Verdict::new(
            "limit",
            Outcome::from_bool(r.value < floor),
            format!("value {} at ħ = {} against {floor}", r.value, r.hbar),
        ),
        None => Verdict::new("limit", Outcome::None, "no positive ħ in the grid".into()),
    });
    verdicts.push(slope_verdict("slope", fit, 2.0, 0.15));
    Ok(SweepReport {
        mode: SweepMode::DiracBanach,
        rows,
        fit,
        verdicts,
    })
}

/// Values must not grow as ħ decreases towards 0, over `0 < ħ ≤ upper`.
fn monotone_verdict(rows: &[SweepRow], upper: f64) -> Verdict {
    let pts: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.hbar > 0.0 && r.hbar <= upper && r.flag == RowFlag::Ok)
        .collect();
    let bad = pts
        .windows(2)
        .find(|w| w[0].value > w[1].value * (1.0 + 1e-9) + 1e-300);
    match bad {
        None => Verdict::new("monotone", Outcome::Pass, format!("{} rows up to ħ = {upper}", pts.len())),
        Some(w) => Verdict::new(
            "monotone",
            Outcome::Fail,
            format!("value {} at ħ = {} exceeds {} at ħ = {}", w[0].value, w[0].hbar, w[1].value, w[1].hbar),
        ),
    }
}

/// The phase bound `|e^{−iħσ/2} − 1| ≤ ħ|σ|/2 ≤ (ħc/2) ς(f) ς(g)` summed
/// over atom pairs.
fn vonneumann_limit_bound(spec: &SweepSpec, hbar: f64) -> Result<f64> {
    let m1 = spec.mu.moment_norm(&spec.seminorm, 1)?;
    let n1 = spec.nu().moment_norm(&spec.seminorm, 1)?;
    let first = |p: &crate::measure::MomentProfile| p.norms.get(1).copied().unwrap_or(0.0);
    Ok(0.5 * hbar * spec.seminorm.compat_c() * first(&m1) * first(&n1))
}

fn vonneumann_limit_verdict(spec: &SweepSpec, rows: &[SweepRow]) -> Result<Verdict> {
    Ok(match smallest_positive(rows) {
        Some(r) => {
            let bound = vonneumann_limit_bound(spec, r.hbar)? * (1.0 + 1e-9) + 1e-15;
            Verdict::new(
                "limit",
                Outcome::from_bool(r.value <= bound),
                format!("value {} at ħ = {} against {bound}", r.value, r.hbar),
            )
        }
        None => Verdict::new("limit", Outcome::None, "no positive ħ in the grid".into()),
    })
}

/// `‖μ ⋆_ħ ν − μ ⋆₀ ν‖₁` along the grid.
pub fn vonneumann_banach_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let (mu, nu) = (&spec.mu, spec.nu());
    let rows = sweep_rows(&spec.hbar_grid, |h| {
        Ok(ok_row(h, vonneumann_difference(mu, nu, h)?.norm1()))
    })?;
    let fit = fit_rows(&rows, spec.fit_range);
    let verdicts = vec![
        vonneumann_limit_verdict(spec, &rows)?,
        slope_verdict("slope", fit, 1.0, 0.15),
    ];
    Ok(SweepReport {
        mode: SweepMode::VonNeumannBanach,
        rows,
        fit,
        verdicts,
    })
}

fn operator_sweep(spec: &SweepSpec, mode: SweepMode) -> Result<SweepReport> {
    spec.validate()?;
    let (mu, nu) = (&spec.mu, spec.nu());
    if mode == SweepMode::DiracOperator {
        mu.poisson_bracket0(nu)?;
    }
    let rows = sweep_rows(&spec.hbar_grid, |h| {
        if h == 0.0 {
            return Ok(SweepRow {
                banach: Some(0.0),
                ..ok_row(h, 0.0)
            });
        }
        let diff = match mode {
            SweepMode::DiracOperator => dirac_difference(mu, nu, h)?,
            _ => vonneumann_difference(mu, nu, h)?,
        };
        let banach = diff.norm1();
        let rep = match SchrodingerRep::new(mu.space().clone(), h, &spec.rep) {
            Ok(r) => Arc::new(r),
            Err(e) => return flag_for(e, h),
        };
        let op = match build_operator(&rep, &diff) {
            Ok(op) => op,
            Err(e) => return flag_for(e, h),
        };
        let report = operator_norm(&op, spec.tol)?;
        Ok(SweepRow {
            hbar: h,
            value: report.norm,
            flag: if report.converged { RowFlag::Ok } else { RowFlag::NotConverged },
            banach: Some(banach),
        })
    })?;
    let fit = fit_rows(&rows, spec.fit_range);

    let worst = rows
        .iter()
        .filter(|r| r.flag == RowFlag::Ok)
        .map(|r| (r, r.value - r.banach.unwrap_or(0.0) * (1.0 + 1e-6)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let contraction = match worst {
        Some((r, excess)) => Verdict::new(
            "contraction",
            Outcome::from_bool(excess <= 0.0),
            format!("largest excess {excess} at ħ = {}", r.hbar),
        ),
        None => Verdict::new("contraction", Outcome::None, "no usable rows".into()),
    };
    let limit = match mode {
        SweepMode::DiracOperator => {
            let floor = 1e-8
                * mu.moment_norm(&spec.seminorm, 1)?.total
                * nu.moment_norm(&spec.seminorm, 1)?.total;
            match smallest_positive(&rows) {
                Some(r) => Verdict::new(
                    "limit",
                    Outcome::from_bool(r.value < floor),
                    format!("value {} at ħ = {} against {floor}", r.value, r.hbar),
                ),
                None => Verdict::new("limit", Outcome::None, "no positive ħ in the grid".into()),
            }
        }
        _ => vonneumann_limit_verdict(spec, &rows)?,
    };
    Ok(SweepReport {
        mode,
        rows,
        fit,
        verdicts: vec![contraction, limit],
    })
}

/// `‖Π_ħ((i/ħ)[μ, ν]_ħ − {μ, ν}₀)‖` along the grid.
pub fn dirac_operator_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    operator_sweep(spec, SweepMode::DiracOperator)
}

/// `‖Π_ħ(μ ⋆_ħ ν − μ ⋆₀ ν)‖` along the grid.
pub fn vonneumann_operator_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    operator_sweep(spec, SweepMode::VonNeumannOperator)
}

const JUMP_FACTOR: f64 = 10.0;

/// Family norms `‖Π₁(β_ħ μ)‖`, with `‖μ̂‖₀` at `ħ = 0`.
pub fn rieffel_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let mu = &spec.mu;
    let total = mu.norm1();
    let family = QuantizationFamily::new(mu.space().clone(), spec.scaler.clone(), spec.rep.clone());
    let rows = sweep_rows(&spec.hbar_grid, |h| {
        if h == 0.0 {
            return Ok(ok_row(h, classical_norm(mu, &spec.sampling)?.lower_bound));
        }
        match family.family_norm(h, mu, spec.tol) {
            Ok(r) => Ok(SweepRow {
                hbar: h,
                value: r.norm,
                flag: if r.converged { RowFlag::Ok } else { RowFlag::NotConverged },
                banach: Some(total),
            }),
            Err(e) => flag_for(e, h),
        }
    })?;
    let verdicts = rieffel_verdicts(&rows, total, mu.is_positive(), spec.tol);
    Ok(SweepReport {
        mode: SweepMode::Rieffel,
        rows,
        fit: None,
        verdicts,
    })
}

/// Semicontinuity, continuity, endpoint (positive `μ` only) and the
/// contraction bound, from the rows of a Rieffel sweep.
pub fn rieffel_verdicts(rows: &[SweepRow], total: f64, positive: bool, tol: f64) -> Vec<Verdict> {
    let usable: Vec<&SweepRow> = rows.iter().filter(|r| r.flag == RowFlag::Ok).collect();
    let numeric = 2.0 * tol * total + 1e-12;

    let mut verdicts = Vec::new();
    // Each triple's secant slope is its local modulus, so the allowance over
    // the smaller neighbour is the secant rise `|n_c − n_a|`: only an
    // isolated upward spike, which no lower semicontinuous curve has, fails.
    let mut lsc_fail = None;
    for w in usable.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let modulus = (c.value - a.value).abs() / (c.hbar - a.hbar);
        let allowance = modulus * (c.hbar - a.hbar) + numeric;
        if b.value > a.value.min(c.value) + allowance {
            lsc_fail = Some((b.hbar, b.value - a.value.max(c.value)));
            break;
        }
    }
    // A jump shows up as one step much steeper than both adjacent steps.
    let slopes: Vec<(f64, f64)> = usable
        .windows(2)
        .map(|w| (w[0].hbar, (w[1].value - w[0].value).abs() / (w[1].hbar - w[0].hbar)))
        .collect();
    let gaps: Vec<f64> = usable.windows(2).map(|w| w[1].hbar - w[0].hbar).collect();
    let mut cont_fail = None;
    for j in 1..slopes.len().saturating_sub(1) {
        let local = slopes[j - 1].1.max(slopes[j + 1].1);
        if slopes[j].1 > JUMP_FACTOR * local + numeric / gaps[j] {
            cont_fail = Some(slopes[j].0);
            break;
        }
    }
    let interior = usable.len().saturating_sub(2);
    verdicts.push(match (interior, lsc_fail) {
        (0, _) => Verdict::new("lsc", Outcome::None, "fewer than 3 usable rows".into()),
        (_, None) => Verdict::new("lsc", Outcome::Pass, format!("{interior} interior rows")),
        (_, Some((h, excess))) => Verdict::new(
            "lsc",
            Outcome::Fail,
            format!("upward spike of {excess} at ħ = {h}"),
        ),
    });
    verdicts.push(match (slopes.len(), cont_fail) {
        (0..=2, _) => Verdict::new("continuity", Outcome::None, "fewer than 4 usable rows".into()),
        (_, None) => Verdict::new("continuity", Outcome::Pass, format!("no step above {JUMP_FACTOR}× its neighbours")),
        (_, Some(h)) => Verdict::new("continuity", Outcome::Fail, format!("jump after ħ = {h}")),
    });

    verdicts.push(if positive {
        match smallest_positive(rows) {
            Some(r) => {
                let err = (r.value - total).abs();
                Verdict::new(
                    "endpoint",
                    Outcome::from_bool(err <= 1e-2),
                    format!("|{} − {total}| = {err} at ħ = {}", r.value, r.hbar),
                )
            }
            None => Verdict::new("endpoint", Outcome::None, "no positive ħ in the grid".into()),
        }
    } else {
        Verdict::new("endpoint", Outcome::None, "μ is not positive".into())
    });

    let over = usable
        .iter()
        .map(|r| (r.hbar, r.value - total * (1.0 + tol)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    verdicts.push(match over {
        Some((h, excess)) => Verdict::new(
            "bound",
            Outcome::from_bool(excess <= 1e-12 * total.max(1.0)),
            format!("largest excess {excess} at ħ = {h}"),
        ),
        None => Verdict::new("bound", Outcome::None, "no usable rows".into()),
    });
    verdicts
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    match spec.mode {
        SweepMode::DiracBanach => dirac_banach_sweep(spec),
        SweepMode::VonNeumannBanach => vonneumann_banach_sweep(spec),
        SweepMode::DiracOperator => dirac_operator_sweep(spec),
        SweepMode::VonNeumannOperator => vonneumann_operator_sweep(spec),
        SweepMode::Rieffel => rieffel_sweep(spec),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdqReport {
    pub sweeps: Vec<SweepReport>,
    /// `‖μ‖₁` is ħ-independent by construction; recorded per grid point.
    pub banach_rieffel: Vec<(f64, f64)>,
    pub injective: bool,
}

impl SdqReport {
    pub fn passed(&self) -> bool {
        self.injective && self.sweeps.iter().all(SweepReport::passed)
    }
}

/// All sweeps for discrete `μ, ν`, plus the check that distinct atoms give
/// distinct operator terms.
pub fn weyl_algebra_sdq_check(spec: &SweepSpec) -> Result<SdqReport> {
    spec.validate()?;
    let nu = spec.nu.as_ref().ok_or_else(|| WeylError::validation("nu", "required"))?;
    if !spec.mu.is_discrete() || !nu.is_discrete() {
        return Err(WeylError::validation("mu", "the Weyl-algebra check needs discrete measures"));
    }
    let sweeps = SweepMode::ALL
        .iter()
        .map(|&mode| run_sweep(&SweepSpec { mode, ..spec.clone() }))
        .collect::<Result<Vec<_>>>()?;
    let banach_rieffel = spec.hbar_grid.iter().map(|&h| (h, spec.mu.norm1())).collect();

    let hbar = spec.hbar_grid.iter().copied().find(|h| *h != 0.0).unwrap_or(1.0);
    let rep = SchrodingerRep::new(spec.mu.space().clone(), hbar, &spec.rep)?;
    let mut injective = true;
    for m in [&spec.mu, nu] {
        let mut seen: Vec<Vec<u64>> = Vec::new();
        for (c, z) in m.discrete().iter() {
            let t = rep.term(*z, &m.space().point(c))?;
            let sig: Vec<u64> = t.u.iter().chain(&t.v).chain(&t.kernel).map(|x| (x + 0.0).to_bits()).collect();
            if seen.contains(&sig) {
                injective = false;
            }
            seen.push(sig);
        }
    }
    Ok(SdqReport {
        sweeps,
        banach_rieffel,
        injective,
    })
}
