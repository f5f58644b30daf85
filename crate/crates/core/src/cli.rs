//! The `weylkit` command line. Every JSON output carries
//! `{"version": 1, "command", "inputs_digest"}`; the digest is the SHA-256 of
//! the canonical JSON of all parsed inputs and flags.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::{Result, WeylError};
use crate::io::{
    canonical_json, complex_value, matrix_value, measure_from_value, measure_to_value, num, probes_from_value,
    read_json_file, sha256_hex, space_from_value, state_from_value, vec_value, SpaceConfig,
};
use crate::measure::Measure;
use crate::phase_space::{PhasePoint, PhaseSpaceFunction, SupNormSampling};
use crate::representation::state::gauge_twist;
use crate::representation::{
    build_operator, classical_norm, operator_norm, GridSpec, NormReport, QuantizationFamily, RepConfig,
    SchrodingerRep, DEFAULT_TOL,
};
use crate::sampling::rng;
use crate::verify::{parse_hbar_grid, run_sweep, SweepMode, SweepSpec};

#[derive(Parser, Debug)]
#[command(name = "weylkit", version, about = "Weyl deformation quantization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Out {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Pair {
    #[arg(long)]
    mu: PathBuf,
    #[arg(long)]
    nu: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Twisted convolution μ ⋆_ħ ν.
    Star {
        #[arg(long, allow_negative_numbers = true)]
        hbar: f64,
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        out: Out,
    },
    /// Poisson bracket {μ, ν}₀.
    Bracket {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        out: Out,
    },
    /// Scaled commutator (i/ħ)(μ ⋆_ħ ν − ν ⋆_ħ μ).
    Commutator {
        #[arg(long, allow_negative_numbers = true)]
        hbar: f64,
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        out: Out,
    },
    /// Involution μ*.
    Involution {
        #[arg(long)]
        mu: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Total variation ‖μ‖₁.
    Norm1 {
        #[arg(long)]
        mu: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Moment norms up to order n with the semi-norm of the space file.
    MomentNorm {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Fourier transform μ̂[F].
    FourierEval {
        #[arg(long)]
        mu: PathBuf,
        /// Comma-separated point F.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        out: Out,
    },
    /// Lower bound for sup_F |μ̂[F]|.
    Supnorm {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// Differential of μ̂ at F.
    Diff {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Project out the null directions of the semi-norm.
        #[arg(long)]
        quotient: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Operator norm ‖Π_ħ(μ)‖ (ħ = 0 gives ‖μ̂‖₀).
    RepNorm {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        hbar: f64,
        /// `N=<points per axis>,L=<half length>`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Use the scaling family Π₁ ∘ β_ħ of the space file.
        #[arg(long)]
        family: bool,
        #[command(flatten)]
        out: Out,
    },
    /// ħ-sweep for one quantization condition.
    Sweep {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: Option<PathBuf>,
        /// `log:a:b:n`, `lin:a:b:n` or a comma list.
        #[arg(long, default_value = "log:1e-4:1:25")]
        hbar_grid: String,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
    /// Positive-definiteness of a state's Gram matrix on probe points.
    PsdCheck {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        hbar: f64,
        /// JSON array of points; random points when omitted.
        #[arg(long)]
        probes: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        out: Out,
    },
    /// State lower bound sqrt(Re ⟨ω, μ* ⋆_ħ μ⟩) for ‖Π_ħ(μ)‖.
    StateBound {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        hbar: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Multiply every weight at f by e^{iF·f}.
    GaugeTwist {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        out: Out,
    },
    /// Darboux basis of the space.
    Darboux {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    DiracBanach,
    VonneumannBanach,
    DiracOp,
    VonneumannOp,
    Rieffel,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::DiracBanach => SweepMode::DiracBanach,
            ModeArg::VonneumannBanach => SweepMode::VonNeumannBanach,
            ModeArg::DiracOp => SweepMode::DiracOperator,
            ModeArg::VonneumannOp => SweepMode::VonNeumannOperator,
            ModeArg::Rieffel => SweepMode::Rieffel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Inputs recorded for the digest.
struct Ctx {
    command: &'static str,
    inputs: Map<String, Value>,
}

impl Ctx {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            inputs: Map::new(),
        }
    }

    fn flag(&mut self, name: &str, v: Value) {
        self.inputs.insert(name.into(), v);
    }

    fn file(&mut self, name: &str, path: &Path) -> Result<Value> {
        let v = read_json_file(path, name)?;
        self.inputs.insert(name.into(), v.clone());
        Ok(v)
    }

    fn measure(&mut self, name: &str, path: &Path) -> Result<(SpaceConfig, Measure)> {
        let v = self.file(name, path)?;
        measure_from_value(&v).map_err(|e| prefix(e, name))
    }

    fn header(&self) -> Map<String, Value> {
        let mut digest_input = Map::new();
        digest_input.insert("command".into(), Value::from(self.command));
        digest_input.insert("inputs".into(), Value::Object(self.inputs.clone()));
        let mut h = Map::new();
        h.insert("version".into(), Value::from(1));
        h.insert("command".into(), Value::from(self.command));
        h.insert("inputs_digest".into(), Value::from(sha256_hex(&canonical_json(&Value::Object(digest_input)))));
        h
    }

    fn document(&self, fields: Vec<(&str, Value)>) -> Value {
        let mut h = self.header();
        for (k, v) in fields {
            h.insert(k.into(), v);
        }
        Value::Object(h)
    }
}

fn prefix(e: WeylError, name: &str) -> WeylError {
    match e {
        WeylError::Validation { field, message } => WeylError::Validation {
            field: format!("{name}.{field}"),
            message,
        },
        other => other,
    }
}

/// Status codes: 0 success, 1 numerical failure, 2 invalid input.
pub fn exit_code(e: &WeylError) -> i32 {
    match e {
        WeylError::NonConvergence { .. } | WeylError::MomentFailure(_) | WeylError::Fit(_) => 1,
        _ => 2,
    }
}

fn parse_point(text: &str, dim: usize) -> Result<PhasePoint> {
    let coords = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| WeylError::validation("at", format!("not a number: {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if coords.len() != dim {
        return Err(WeylError::validation("at", format!("expected {dim} coordinates, got {}", coords.len())));
    }
    Ok(PhasePoint::new(coords))
}

fn parse_grid(text: &str, half_dim: usize) -> Result<GridSpec> {
    let mut n = None;
    let mut l = None;
    for part in text.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| WeylError::validation("grid", "expected N=<points>,L=<half length>"))?;
        match k.trim() {
            "N" => n = Some(v.trim().parse::<usize>().map_err(|_| WeylError::validation("grid", "N must be an integer"))?),
            "L" => l = Some(v.trim().parse::<f64>().map_err(|_| WeylError::validation("grid", "L must be a number"))?),
            other => return Err(WeylError::validation("grid", format!("unknown key {other:?}"))),
        }
    }
    let default = GridSpec::default_for(half_dim);
    GridSpec::new(half_dim, n.unwrap_or(default.points_per_axis), l.unwrap_or(default.half_length))
        .map_err(|e| WeylError::validation("grid", e.to_string()))
}

fn rep_config(cfg: &SpaceConfig, grid: &Option<String>, ctx: &mut Ctx) -> Result<RepConfig> {
    let mut rep = cfg.rep.clone();
    if let Some(g) = grid {
        ctx.flag("grid", Value::from(g.clone()));
        rep.grid = Some(parse_grid(g, cfg.space.darboux_decompose().half_dim())?);
    }
    Ok(rep)
}

fn norm_json(r: &NormReport) -> Vec<(&'static str, Value)> {
    vec![
        ("norm", num(r.norm)),
        ("iterations", Value::from(r.iterations)),
        ("converged", Value::from(r.converged)),
        ("upper_bound", num(r.upper_bound)),
    ]
}

fn write_output(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| WeylError::validation("out", format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| WeylError::validation("stdout", e.to_string())),
    }
}

fn emit(doc: &Value, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    write_output(out, &format!("{}\n", canonical_json(doc)), stdout)
}

fn init_threads() {
    if let Some(n) = std::env::var("WEYLKIT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs one command; `args[0]` is the program name.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    init_threads();
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn binary(
    ctx: &mut Ctx,
    pair: &Pair,
    op: impl Fn(&Measure, &Measure) -> Result<Measure>,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let (cfg, mu) = ctx.measure("mu", &pair.mu)?;
    let (_, nu) = ctx.measure("nu", &pair.nu)?;
    if *cfg.space != **nu.space() {
        return Err(WeylError::SpaceMismatch);
    }
    let nu = rebase(&cfg, &nu)?;
    let result = op(&mu, &nu)?;
    emit(&ctx.document(vec![("result", measure_to_value(&cfg, &result))]), out, stdout)?;
    Ok(0)
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Star { hbar, pair, out } => {
            let mut ctx = Ctx::new("star");
            ctx.flag("hbar", num(hbar));
            binary(&mut ctx, &pair, |m, n| m.star(hbar, n), &out.out, stdout)
        }
        Command::Bracket { pair, out } => {
            let mut ctx = Ctx::new("bracket");
            binary(&mut ctx, &pair, |m, n| m.poisson_bracket0(n), &out.out, stdout)
        }
        Command::Commutator { hbar, pair, out } => {
            let mut ctx = Ctx::new("commutator");
            ctx.flag("hbar", num(hbar));
            binary(&mut ctx, &pair, |m, n| m.scaled_commutator(hbar, n), &out.out, stdout)
        }
        Command::Involution { mu, out } => {
            let mut ctx = Ctx::new("involution");
            let (cfg, m) = ctx.measure("mu", &mu)?;
            emit(&ctx.document(vec![("result", measure_to_value(&cfg, &m.involution()))]), &out.out, stdout)?;
            Ok(0)
        }
        Command::Norm1 { mu, out } => {
            let mut ctx = Ctx::new("norm1");
            let (_, m) = ctx.measure("mu", &mu)?;
            emit(&ctx.document(vec![("norm1", num(m.norm1()))]), &out.out, stdout)?;
            Ok(0)
        }
        Command::MomentNorm { mu, order, out } => {
            let mut ctx = Ctx::new("moment-norm");
            ctx.flag("order", Value::from(order));
            let (cfg, m) = ctx.measure("mu", &mu)?;
            let p = m.moment_norm(&cfg.seminorm, order)?;
            emit(
                &ctx.document(vec![
                    ("order", Value::from(p.n)),
                    ("norms", vec_value(&p.norms)),
                    ("total", num(p.total)),
                    ("c_n", num(p.c_n)),
                ]),
                &out.out,
                stdout,
            )?;
            Ok(0)
        }
        Command::FourierEval { mu, at, out } => {
            let mut ctx = Ctx::new("fourier-eval");
            let (cfg, m) = ctx.measure("mu", &mu)?;
            let at = parse_point(&at, cfg.space.dim())?;
            ctx.flag("at", vec_value(at.as_slice()));
            let z = PhaseSpaceFunction::new(m).fourier_eval(&at)?;
            emit(&ctx.document(vec![("value", complex_value(z))]), &out.out, stdout)?;
            Ok(0)
        }
        Command::Supnorm {
            mu,
            samples,
            radius,
            seed,
            out,
        } => {
            let mut ctx = Ctx::new("supnorm");
            ctx.flag("samples", Value::from(samples));
            ctx.flag("radius", radius.map_or(Value::Null, num));
            ctx.flag("seed", Value::from(seed));
            let (_, m) = ctx.measure("mu", &mu)?;
            if let Some(r) = radius {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(WeylError::validation("radius", "must be positive"));
                }
            }
            let est = PhaseSpaceFunction::new(m).sup_norm_estimate(&SupNormSampling {
                count: samples,
                radius,
                seed,
            })?;
            emit(
                &ctx.document(vec![
                    ("lower_bound", num(est.lower_bound)),
                    ("at", vec_value(est.at.as_slice())),
                    ("upper_bound", num(est.upper_bound)),
                ]),
                &out.out,
                stdout,
            )?;
            Ok(0)
        }
        Command::Diff { mu, at, quotient, out } => {
            let mut ctx = Ctx::new("diff");
            ctx.flag("quotient", Value::from(quotient));
            let (cfg, m) = ctx.measure("mu", &mu)?;
            let at = parse_point(&at, cfg.space.dim())?;
            ctx.flag("at", vec_value(at.as_slice()));
            let f = PhaseSpaceFunction::new(m);
            let d = if quotient {
                f.differential_quotient(&at, &cfg.seminorm)?
            } else {
                f.differential(&at)?
            };
            emit(
                &ctx.document(vec![("differential", Value::Array(d.into_iter().map(complex_value).collect()))]),
                &out.out,
                stdout,
            )?;
            Ok(0)
        }
        Command::RepNorm {
            mu,
            hbar,
            grid,
            tol,
            family,
            out,
        } => {
            let mut ctx = Ctx::new("rep-norm");
            ctx.flag("hbar", num(hbar));
            ctx.flag("tol", num(tol));
            ctx.flag("family", Value::from(family));
            let (cfg, m) = ctx.measure("mu", &mu)?;
            let rep = rep_config(&cfg, &grid, &mut ctx)?;
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(WeylError::validation("tol", "must be positive"));
            }
            let report = if hbar == 0.0 {
                let est = classical_norm(&m, &SupNormSampling::default())?;
                NormReport {
                    norm: est.lower_bound,
                    iterations: 0,
                    converged: true,
                    upper_bound: est.upper_bound,
                }
            } else if family {
                QuantizationFamily::new(cfg.space.clone(), cfg.scaler.clone(), rep).family_norm(hbar, &m, tol)?
            } else {
                let r = Arc::new(SchrodingerRep::new(cfg.space.clone(), hbar, &rep)?);
                operator_norm(&build_operator(&r, &m)?, tol)?
            };
            emit(&ctx.document(norm_json(&report)), &out.out, stdout)?;
            Ok(if report.converged { 0 } else { 1 })
        }
        Command::Sweep {
            mode,
            mu,
            nu,
            hbar_grid,
            grid,
            tol,
            format,
            out,
        } => {
            let mut ctx = Ctx::new("sweep");
            let mode = SweepMode::from(mode);
            ctx.flag("mode", Value::from(mode.name()));
            ctx.flag("hbar_grid", Value::from(hbar_grid.clone()));
            ctx.flag("tol", num(tol));
            let (cfg, m) = ctx.measure("mu", &mu)?;
            let n = match nu {
                Some(p) => {
                    let (_, n) = ctx.measure("nu", &p)?;
                    if *cfg.space != **n.space() {
                        return Err(WeylError::SpaceMismatch);
                    }
                    Some(rebase(&cfg, &n)?)
                }
                None => None,
            };
            let rep = rep_config(&cfg, &grid, &mut ctx)?;
            let mut spec = SweepSpec::new(mode, m, n, cfg.seminorm.clone());
            spec.hbar_grid = parse_hbar_grid(&hbar_grid)?;
            spec.rep = rep;
            spec.scaler = cfg.scaler.clone();
            spec.tol = tol;
            let report = run_sweep(&spec)?;
            let text = match format {
                Format::Csv => {
                    let header = canonical_json(&Value::Object(ctx.header()));
                    format!("# {header}\n{}", report.to_csv())
                }
                Format::Json => {
                    let mut doc = ctx.header();
                    if let Value::Object(r) = report.to_json() {
                        doc.extend(r);
                    }
                    format!("{}\n", canonical_json(&Value::Object(doc)))
                }
            };
            write_output(&out.out, &text, stdout)?;
            Ok(if report.converged() { 0 } else { 1 })
        }
        Command::PsdCheck {
            space,
            state,
            hbar,
            probes,
            tol,
            seed,
            out,
        } => {
            let mut ctx = Ctx::new("psd-check");
            ctx.flag("hbar", num(hbar));
            ctx.flag("tol", num(tol));
            let sv = ctx.file("space", &space)?;
            let cfg = space_from_value(&sv).map_err(|e| prefix(e, "space"))?;
            let st = state_from_value(&ctx.file("state", &state)?).map_err(|e| prefix(e, "state"))?;
            let probes = match probes {
                Some(p) => probes_from_value(&ctx.file("probes", &p)?).map_err(|e| prefix(e, "probes"))?,
                None => {
                    ctx.flag("seed", Value::from(seed));
                    random_probes(cfg.space.dim(), hbar, seed)
                }
            };
            let r = st.psd_check(&cfg.space, hbar, &probes, tol)?;
            emit(
                &ctx.document(vec![
                    ("ok", Value::from(r.ok)),
                    ("min_eig", num(r.min_eig)),
                    ("probes", Value::from(probes.len())),
                ]),
                &out.out,
                stdout,
            )?;
            Ok(0)
        }
        Command::StateBound { mu, state, hbar, out } => {
            let mut ctx = Ctx::new("state-bound");
            ctx.flag("hbar", num(hbar));
            let (_, m) = ctx.measure("mu", &mu)?;
            let st = state_from_value(&ctx.file("state", &state)?).map_err(|e| prefix(e, "state"))?;
            let bound = st.norm_lower_bound(hbar, &m)?;
            emit(
                &ctx.document(vec![("bound", num(bound)), ("norm1", num(m.norm1()))]),
                &out.out,
                stdout,
            )?;
            Ok(0)
        }
        Command::GaugeTwist { mu, at, out } => {
            let mut ctx = Ctx::new("gauge-twist");
            let (cfg, m) = ctx.measure("mu", &mu)?;
            let at = parse_point(&at, cfg.space.dim())?;
            ctx.flag("at", vec_value(at.as_slice()));
            let result = gauge_twist(&m, &at)?;
            emit(&ctx.document(vec![("result", measure_to_value(&cfg, &result))]), &out.out, stdout)?;
            Ok(0)
        }
        Command::Darboux { space, out } => {
            let mut ctx = Ctx::new("darboux");
            let sv = ctx.file("space", &space)?;
            let cfg = space_from_value(&sv).map_err(|e| prefix(e, "space"))?;
            let d = cfg.space.darboux_decompose();
            emit(
                &ctx.document(vec![
                    ("basis", matrix_value(&d.basis)),
                    ("inverse", matrix_value(&d.inverse)),
                    ("rank", Value::from(d.rank_symplectic)),
                    ("kernel_dim", Value::from(d.kernel_dim)),
                    ("normal_form", matrix_value(&d.normal_form())),
                ]),
                &out.out,
                stdout,
            )?;
            Ok(0)
        }
    }
}

/// Rebuilds `m` on the `Arc` of `cfg` so both operands share one space.
fn rebase(cfg: &SpaceConfig, m: &Measure) -> Result<Measure> {
    let base = Measure::from_atoms(cfg.space.clone(), m.discrete().iter().map(|(c, z)| (c.clone(), *z)))?;
    match m.density() {
        Some(d) => base.with_density(d.clone()),
        None => Ok(base),
    }
}

fn random_probes(dim: usize, hbar: f64, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut r = rng(seed);
    let scale = 2.0 / hbar.abs().max(1e-12).sqrt();
    (0..32)
        .map(|_| (0..dim).map(|_| scale * r.random_range(-1.0..1.0)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = std::iter::once("weylkit").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_lists_subcommands() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        for c in [
            "star", "bracket", "commutator", "involution", "norm1", "moment-norm", "fourier-eval", "supnorm", "diff",
            "rep-norm", "sweep", "psd-check", "state-bound", "gauge-twist", "darboux",
        ] {
            assert!(out.contains(c), "{c} missing from help");
        }
    }

    #[test]
    fn missing_file_and_bad_flags() {
        let (code, _, err) = run_args(&["norm1", "--mu", "/nonexistent/m.json"]);
        assert_eq!(code, 2);
        assert!(err.contains("mu"), "{err}");
        let (code, _, _) = run_args(&["norm1", "--mu", "a.json", "--bogus"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn norm1_of_two_atoms() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(
            &p,
            r#"{"space":{"sigma":[[0,1],[-1,0]]},"discrete":[{"coord":[1,0],"re":2,"im":0},{"coord":[0,1],"re":0,"im":-3}]}"#,
        )
        .unwrap();
        let (code, out, err) = run_args(&["norm1", "--mu", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["norm1"], 5.0);
        assert_eq!(v["version"], 1);
        assert_eq!(v["command"], "norm1");
        assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn grid_flag() {
        let g = parse_grid("N=512,L=15", 1).unwrap();
        assert_eq!((g.points_per_axis, g.half_length), (512, 15.0));
        assert!(parse_grid("N=100,L=15", 1).is_err());
        assert!(parse_grid("M=2", 1).is_err());
    }
}
