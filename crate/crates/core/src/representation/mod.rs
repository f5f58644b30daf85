//! Hilbert-space realizations: the Schrödinger representation on a periodic
//! grid, character copies along `ker σ`, integration-type operators
//! `Π_ħ(μ) = Σ z_k W^ħ(f_k)`, their norms, states and well-matched families.

pub mod family;
pub mod grid;
pub mod lanczos;
pub mod state;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{check_len, Result, WeylError};
use crate::measure::Measure;
use crate::phase_space::{PhaseSpaceFunction, SupNormEstimate, SupNormSampling};
use crate::sampling::quasi_random_box;
use crate::space::{DarbouxDecomposition, PreSymplecticSpace};

pub use family::{PushedMeasure, QuantizationFamily};
pub use grid::{GridFft, GridSpec};
pub use state::{PsdReport, QuantumState};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_MATVECS: usize = 5000;
const LANCZOS_SEED: u64 = 42;

/// Sampled characters on `ker σ`: the zero character followed by
/// quasi-random points of the box `[−π/s, π/s]^k`, `s` the smallest lattice
/// step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterConfig {
    pub count: usize,
    pub seed: u64,
}

impl Default for CharacterConfig {
    fn default() -> Self {
        Self { count: 256, seed: 42 }
    }
}

impl CharacterConfig {
    pub fn sample(&self, space: &PreSymplecticSpace, kernel_dim: usize) -> Vec<Vec<f64>> {
        if kernel_dim == 0 {
            return vec![Vec::new()];
        }
        let step = space.lattice_step().iter().fold(f64::INFINITY, |m, &s| m.min(s));
        let half = vec![std::f64::consts::PI / step; kernel_dim];
        let mut out = vec![vec![0.0; kernel_dim]];
        out.extend(quasi_random_box(kernel_dim, self.count.saturating_sub(1), &half, self.seed));
        out
    }
}

/// Grid and character settings; `grid = None` picks [`GridSpec::default_for`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RepConfig {
    pub grid: Option<GridSpec>,
    pub characters: CharacterConfig,
}

/// `π_ħ` on `L²` of the grid, one copy per character of `ker σ`.
#[derive(Debug, Clone)]
pub struct SchrodingerRep {
    space: Arc<PreSymplecticSpace>,
    decomposition: DarbouxDecomposition,
    hbar: f64,
    grid: GridSpec,
    fft: GridFft,
    characters: Vec<Vec<f64>>,
}

impl SchrodingerRep {
    pub fn new(space: Arc<PreSymplecticSpace>, hbar: f64, config: &RepConfig) -> Result<Self> {
        let decomposition = space.darboux_decompose();
        let characters = config.characters.sample(&space, decomposition.kernel_dim);
        Self::with_characters(space, decomposition, hbar, config.grid, characters)
    }

    pub fn with_characters(
        space: Arc<PreSymplecticSpace>,
        decomposition: DarbouxDecomposition,
        hbar: f64,
        grid: Option<GridSpec>,
        characters: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if hbar == 0.0 || !hbar.is_finite() {
            return Err(WeylError::HbarDomain(
                "a Schrödinger representation needs finite ħ ≠ 0; use the classical operator at ħ = 0".into(),
            ));
        }
        let d = decomposition.half_dim();
        let grid = grid.unwrap_or_else(|| GridSpec::default_for(d));
        if grid.half_dim != d {
            return Err(WeylError::validation(
                "grid",
                format!("grid has {} position axes but the symplectic part needs {d}", grid.half_dim),
            ));
        }
        if characters.is_empty() {
            return Err(WeylError::validation("characters", "need at least one character"));
        }
        for c in &characters {
            check_len(decomposition.kernel_dim, c.len())?;
        }
        Ok(Self {
            fft: GridFft::new(grid),
            space,
            decomposition,
            hbar,
            grid,
            characters,
        })
    }

    pub fn space(&self) -> &Arc<PreSymplecticSpace> {
        &self.space
    }

    pub fn decomposition(&self) -> &DarbouxDecomposition {
        &self.decomposition
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn characters(&self) -> &[Vec<f64>] {
        &self.characters
    }

    /// Splits `f` into Darboux coordinates and checks the band limits
    /// `|u_i| < π/Δx` and `|ħ v_i| < L`.
    pub fn term(&self, weight: C64, f: &[f64]) -> Result<RepTerm> {
        let c = self.decomposition.coordinates(f)?;
        let nyq = self.grid.nyquist();
        if let Some(u) = c.u.iter().find(|u| u.abs() >= nyq) {
            return Err(WeylError::Aliasing(format!(
                "momentum {u} outside the band |u| < {nyq} of the {}-point grid",
                self.grid.points_per_axis
            )));
        }
        let l = self.grid.half_length;
        if let Some(v) = c.v.iter().find(|v| (self.hbar * *v).abs() >= l) {
            return Err(WeylError::Aliasing(format!(
                "translation ħ·v = {} exceeds the half-period L = {l}",
                self.hbar * v
            )));
        }
        Ok(RepTerm {
            weight,
            u: c.u,
            v: c.v,
            kernel: c.kernel,
        })
    }

    /// `W^ħ(f)ψ` on the copy of character `copy`:
    /// `e^{(i/2)ħu·v} e^{iF·k} e^{iu·x} ψ(x + ħv)`.
    pub fn weyl_apply_in_copy(&self, f: &[f64], psi: &[C64], copy: usize) -> Result<Vec<C64>> {
        let op = QuantumOperator {
            rep: Arc::new(self.clone()),
            terms: vec![self.term(C64::new(1.0, 0.0), f)?],
        };
        op.apply(psi, copy)
    }

    pub fn weyl_apply(&self, f: &[f64], psi: &[C64]) -> Result<Vec<C64>> {
        self.weyl_apply_in_copy(f, psi, 0)
    }
}

/// One summand `w · W^ħ(f)` in Darboux coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RepTerm {
    pub weight: C64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub kernel: Vec<f64>,
}

/// `Σ w_t W^ħ(f_t)` acting lazily on grid vectors.
#[derive(Debug, Clone)]
pub struct QuantumOperator {
    rep: Arc<SchrodingerRep>,
    terms: Vec<RepTerm>,
}

/// `Π_ħ(μ)`, or multiplication by `μ̂` at `ħ = 0`.
#[derive(Debug, Clone)]
pub enum RepOperator {
    Quantum(QuantumOperator),
    Classical(Measure),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub norm: f64,
    /// Largest number of operator products spent on any character copy.
    pub iterations: usize,
    pub converged: bool,
    /// `Σ |weights| = ‖μ‖₁`.
    pub upper_bound: f64,
}

/// Diagonal multiplier and translation for one group of terms sharing `ħv`.
struct Group {
    symbol: Option<Vec<C64>>,
    multiplier: Vec<C64>,
}

fn key(shift: &[f64]) -> Vec<u64> {
    shift.iter().map(|x| (x + 0.0).to_bits()).collect()
}

impl QuantumOperator {
    pub fn rep(&self) -> &Arc<SchrodingerRep> {
        &self.rep
    }

    pub fn terms(&self) -> &[RepTerm] {
        &self.terms
    }

    pub fn upper_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.weight.norm()).sum()
    }

    /// `Σ conj(w_t) W^ħ(−f_t)`.
    pub fn adjoint(&self) -> Self {
        let neg = |x: &[f64]| x.iter().map(|a| -a).collect();
        Self {
            rep: self.rep.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| RepTerm {
                    weight: t.weight.conj(),
                    u: neg(&t.u),
                    v: neg(&t.v),
                    kernel: neg(&t.kernel),
                })
                .collect(),
        }
    }

    fn compile(&self, copy: usize) -> Vec<Group> {
        let rep = &self.rep;
        let hbar = rep.hbar;
        let character = &rep.characters[copy];
        let mut groups: BTreeMap<Vec<u64>, Group> = BTreeMap::new();
        for t in &self.terms {
            let shift: Vec<f64> = t.v.iter().map(|v| hbar * v).collect();
            let uv: f64 = t.u.iter().zip(&t.v).map(|(a, b)| a * b).sum();
            let fk: f64 = character.iter().zip(&t.kernel).map(|(a, b)| a * b).sum();
            let coeff = t.weight * C64::from_polar(1.0, 0.5 * hbar * uv + fk);
            let wave = rep.grid.plane_wave(&t.u);
            let g = groups.entry(key(&shift)).or_insert_with(|| Group {
                symbol: shift.iter().any(|&a| a != 0.0).then(|| rep.grid.translation_symbol(&shift)),
                multiplier: vec![C64::new(0.0, 0.0); rep.grid.len()],
            });
            g.multiplier.iter_mut().zip(&wave).for_each(|(m, w)| *m += coeff * w);
        }
        groups.into_values().collect()
    }

    fn apply_groups(&self, groups: &[Group], psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        let mut spectrum: Option<Vec<C64>> = None;
        for g in groups {
            match &g.symbol {
                None => out
                    .iter_mut()
                    .zip(&g.multiplier)
                    .zip(psi)
                    .for_each(|((o, m), p)| *o += m * p),
                Some(symbol) => {
                    let spec = spectrum.get_or_insert_with(|| {
                        let mut s = psi.to_vec();
                        self.rep.fft.forward(&mut s);
                        s
                    });
                    let mut shifted: Vec<C64> = spec.iter().zip(symbol).map(|(a, b)| a * b).collect();
                    self.rep.fft.inverse(&mut shifted);
                    out.iter_mut()
                        .zip(&g.multiplier)
                        .zip(&shifted)
                        .for_each(|((o, m), p)| *o += m * p);
                }
            }
        }
        out
    }

    /// The exact adjoint of [`Self::apply_groups`] on the grid: each group
    /// `M T` contributes `T† M̄`. The continuum adjoint `Σ w̄ W(−f)` agrees
    /// with it only for dual-lattice `u`.
    fn apply_groups_adjoint(&self, groups: &[Group], psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        let mut unshifted = vec![C64::new(0.0, 0.0); psi.len()];
        for g in groups {
            let weighted = g.multiplier.iter().zip(psi).map(|(m, p)| m.conj() * p);
            match &g.symbol {
                None => unshifted.iter_mut().zip(weighted).for_each(|(o, x)| *o += x),
                Some(symbol) => {
                    let mut s: Vec<C64> = weighted.collect();
                    self.rep.fft.forward(&mut s);
                    s.iter_mut().zip(symbol).for_each(|(a, b)| *a *= b.conj());
                    self.rep.fft.inverse(&mut s);
                    out.iter_mut().zip(&s).for_each(|(o, x)| *o += x);
                }
            }
        }
        out.iter_mut().zip(&unshifted).for_each(|(o, x)| *o += x);
        out
    }

    /// `Π_ħ(μ)ψ` in character copy `copy`.
    pub fn apply(&self, psi: &[C64], copy: usize) -> Result<Vec<C64>> {
        check_len(self.rep.grid.len(), psi.len())?;
        if copy >= self.rep.characters.len() {
            return Err(WeylError::validation("copy", format!("no character copy {copy}")));
        }
        Ok(self.apply_groups(&self.compile(copy), psi))
    }

    fn copy_norm(&self, copy: usize, tol: f64) -> (f64, usize, bool) {
        let groups = self.compile(copy);
        match groups.len() {
            0 => (0.0, 0, true),
            // a diagonal multiplier times a unitary translation
            1 => (groups[0].multiplier.iter().fold(0.0f64, |m, z| m.max(z.norm())), 0, true),
            _ => {
                let out = lanczos::largest_eigenvalue(
                    self.rep.grid.len(),
                    |x| {
                        let ax = self.apply_groups(&groups, x);
                        self.apply_groups_adjoint(&groups, &ax)
                    },
                    tol,
                    MAX_MATVECS,
                    LANCZOS_SEED,
                );
                (out.eigenvalue.max(0.0).sqrt(), out.matvecs, out.converged)
            }
        }
    }

    /// Largest singular value, maximised over character copies.
    pub fn norm(&self, tol: f64) -> Result<NormReport> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(WeylError::validation("tol", "must be positive"));
        }
        // single-group operators are cheap; otherwise parallelise over copies
        let results: Vec<(f64, usize, bool)> = (0..self.rep.characters.len())
            .into_par_iter()
            .map(|c| self.copy_norm(c, tol))
            .collect();
        let (norm, iterations, converged) = results
            .iter()
            .fold((0.0f64, 0usize, true), |acc, r| (acc.0.max(r.0), acc.1.max(r.1), acc.2 && r.2));
        Ok(NormReport {
            norm,
            iterations,
            converged,
            upper_bound: self.upper_bound(),
        })
    }
}

impl RepOperator {
    pub fn classical(mu: Measure) -> Self {
        Self::Classical(mu)
    }

    pub fn upper_bound(&self) -> f64 {
        match self {
            Self::Quantum(q) => q.upper_bound(),
            Self::Classical(m) => m.norm1(),
        }
    }
}

/// `Π_ħ(μ)`: every atom and density cell becomes one term.
pub fn build_operator(rep: &Arc<SchrodingerRep>, mu: &Measure) -> Result<RepOperator> {
    if !(Arc::ptr_eq(rep.space(), mu.space()) || **rep.space() == **mu.space()) {
        return Err(WeylError::SpaceMismatch);
    }
    build_from_points(rep, mu.quadrature())
}

/// Builds from real points, which need not lie on the lattice.
pub fn build_from_points(rep: &Arc<SchrodingerRep>, points: Vec<(Vec<f64>, C64)>) -> Result<RepOperator> {
    let terms = points
        .into_iter()
        .filter(|(_, w)| *w != C64::new(0.0, 0.0))
        .map(|(p, w)| rep.term(w, &p))
        .collect::<Result<Vec<_>>>()?;
    Ok(RepOperator::Quantum(QuantumOperator {
        rep: rep.clone(),
        terms,
    }))
}

/// `‖Π_ħ(μ)‖`; the classical operator is routed to the sup-norm search.
pub fn operator_norm(op: &RepOperator, tol: f64) -> Result<NormReport> {
    match op {
        RepOperator::Quantum(q) => q.norm(tol),
        RepOperator::Classical(mu) => {
            let est = classical_norm(mu, &SupNormSampling::default())?;
            Ok(NormReport {
                norm: est.lower_bound,
                iterations: 0,
                converged: true,
                upper_bound: est.upper_bound,
            })
        }
    }
}

/// `‖Π₀(μ)‖ = ‖μ̂‖₀`.
pub fn classical_norm(mu: &Measure, sampling: &SupNormSampling) -> Result<SupNormEstimate> {
    PhaseSpaceFunction::new(mu.clone()).sup_norm_estimate(sampling)
}

/// A normalised Gaussian wave packet on the grid, centred at `centre` with
/// width `width` and carrier momentum `momentum`.
pub fn gaussian_vector(grid: &GridSpec, centre: &[f64], width: f64, momentum: &[f64]) -> Vec<C64> {
    let xs = grid.positions();
    let n = grid.points_per_axis;
    let d = grid.half_dim;
    let mut out = Vec::with_capacity(grid.len());
    let mut x = vec![0.0; d];
    for idx in 0..grid.len() {
        let mut rest = idx;
        for a in (0..d).rev() {
            x[a] = xs[rest % n];
            rest /= n;
        }
        let r2: f64 = x.iter().zip(centre).map(|(a, c)| (a - c).powi(2)).sum();
        let phase: f64 = x.iter().zip(momentum).map(|(a, k)| a * k).sum();
        out.push(C64::from_polar((-r2 / (2.0 * width * width)).exp(), phase));
    }
    let nrm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    out.iter_mut().for_each(|z| *z /= nrm);
    out
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn small_config() -> RepConfig {
        RepConfig {
            grid: Some(GridSpec::new(1, 256, 10.0).unwrap()),
            characters: CharacterConfig::default(),
        }
    }

    fn std2(step: f64) -> Arc<PreSymplecticSpace> {
        Arc::new(PreSymplecticSpace::standard(1, step).unwrap())
    }

    fn diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn zero_translation_is_identity() {
        let rep = SchrodingerRep::new(std2(1.0), 0.3, &small_config()).unwrap();
        let psi = gaussian_vector(rep.grid(), &[0.5], 1.0, &[0.2]);
        let out = rep.weyl_apply(&[0.0, 0.0], &psi).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn dual_lattice_momentum_is_pure_multiplication() {
        let rep = SchrodingerRep::new(std2(1.0), 0.3, &small_config()).unwrap();
        let u = 3.0 * std::f64::consts::PI / 10.0;
        let psi = gaussian_vector(rep.grid(), &[0.0], 1.0, &[0.0]);
        let out = rep.weyl_apply(&[u, 0.0], &psi).unwrap();
        for ((o, p), x) in out.iter().zip(&psi).zip(rep.grid().positions()) {
            assert_eq!(*o, p * C64::from_polar(1.0, u * x));
        }
    }

    #[test]
    fn weyl_relations_on_gaussian() {
        let space = std2(1.0);
        let hbar = 0.7;
        let rep = SchrodingerRep::new(space.clone(), hbar, &small_config()).unwrap();
        let psi = gaussian_vector(rep.grid(), &[0.3], 1.0, &[0.5]);
        let mut r = crate::sampling::rng(5);
        for _ in 0..20 {
            let f: Vec<f64> = (0..2).map(|_| r.random_range(-2.0..2.0)).collect();
            let g: Vec<f64> = (0..2).map(|_| r.random_range(-2.0..2.0)).collect();
            let fg: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
            let lhs = rep.weyl_apply(&f, &rep.weyl_apply(&g, &psi).unwrap()).unwrap();
            let phase = C64::from_polar(1.0, -0.5 * hbar * space.sigma_eval(&f, &g).unwrap());
            let rhs: Vec<C64> = rep.weyl_apply(&fg, &psi).unwrap().iter().map(|z| z * phase).collect();
            assert!(diff(&lhs, &rhs) < 1e-8, "{}", diff(&lhs, &rhs));
            assert!((vector_norm(&lhs) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn aliasing_rejected() {
        let rep = SchrodingerRep::new(std2(1.0), 1.0, &small_config()).unwrap();
        assert!(matches!(rep.term(c(1.0, 0.0), &[100.0, 0.0]), Err(WeylError::Aliasing(_))));
        assert!(matches!(rep.term(c(1.0, 0.0), &[0.0, 10.0]), Err(WeylError::Aliasing(_))));
        assert!(SchrodingerRep::new(std2(1.0), 0.0, &small_config()).is_err());
    }

    #[test]
    fn norms_of_simple_operators() {
        let space = std2(1.0);
        let rep = Arc::new(SchrodingerRep::new(space.clone(), 0.5, &small_config()).unwrap());
        let id = build_operator(&rep, &Measure::delta(space.clone(), &[0, 0]).unwrap()).unwrap();
        assert_eq!(operator_norm(&id, 1e-6).unwrap().norm, 1.0);
        let w = build_operator(&rep, &Measure::delta(space.clone(), &[1, 2]).unwrap()).unwrap();
        assert!((operator_norm(&w, 1e-6).unwrap().norm - 1.0).abs() < 1e-12);
        let zero = build_operator(&rep, &Measure::zero(space.clone())).unwrap();
        assert_eq!(operator_norm(&zero, 1e-6).unwrap().norm, 0.0);

        let mu = Measure::from_atoms(
            space.clone(),
            [(vec![0, 0], c(1.0, 0.0)), (vec![1, 1], c(0.5, 0.5)), (vec![-2, 1], c(0.0, -0.7))],
        )
        .unwrap();
        let report = operator_norm(&build_operator(&rep, &mu).unwrap(), 1e-8).unwrap();
        assert!(report.converged);
        assert!(report.norm <= mu.norm1() * (1.0 + 1e-8));
        assert!(report.norm > 0.5);
    }

    #[test]
    fn adjoint_and_product_match_measure_side() {
        let space = std2(0.5);
        let hbar = 0.8;
        let rep = Arc::new(SchrodingerRep::new(space.clone(), hbar, &small_config()).unwrap());
        let mu = Measure::from_atoms(space.clone(), [(vec![1, 0], c(1.0, 0.2)), (vec![-1, 3], c(0.3, -0.4))]).unwrap();
        let nu = Measure::from_atoms(space.clone(), [(vec![2, -1], c(0.5, 0.0)), (vec![0, 1], c(-0.1, 0.9))]).unwrap();
        let psi = gaussian_vector(rep.grid(), &[0.0], 1.2, &[0.3]);
        let op = |m: &Measure| match build_operator(&rep, m).unwrap() {
            RepOperator::Quantum(q) => q,
            RepOperator::Classical(_) => unreachable!(),
        };
        let prod = op(&mu.star(hbar, &nu).unwrap()).apply(&psi, 0).unwrap();
        let seq = op(&mu).apply(&op(&nu).apply(&psi, 0).unwrap(), 0).unwrap();
        assert!(diff(&prod, &seq) < 1e-8);

        let phi = gaussian_vector(rep.grid(), &[0.5], 0.9, &[-0.2]);
        let a = op(&mu);
        let lhs: C64 = phi.iter().zip(a.apply(&psi, 0).unwrap()).map(|(x, y)| x.conj() * y).sum();
        let rhs: C64 = op(&mu.involution())
            .apply(&phi, 0)
            .unwrap()
            .iter()
            .zip(&psi)
            .map(|(x, y)| x.conj() * y)
            .sum();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn grid_adjoint_is_exact() {
        let space = std2(1.0);
        let rep = Arc::new(SchrodingerRep::new(space.clone(), 0.7, &small_config()).unwrap());
        let mu = Measure::from_atoms(space, [(vec![1, 1], c(0.4, 1.0)), (vec![-2, 1], c(1.0, 0.0)), (vec![3, 0], c(0.0, -0.5))]).unwrap();
        let RepOperator::Quantum(q) = build_operator(&rep, &mu).unwrap() else {
            unreachable!()
        };
        let mut r = crate::sampling::rng(5);
        let mut random = || -> Vec<C64> { (0..256).map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect() };
        let (psi, phi) = (random(), random());
        let groups = q.compile(0);
        let lhs: C64 = phi.iter().zip(q.apply_groups(&groups, &psi)).map(|(x, y)| x.conj() * y).sum();
        let rhs: C64 = q.apply_groups_adjoint(&groups, &phi).iter().zip(&psi).map(|(x, y)| x.conj() * y).sum();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn kernel_only_measures_use_characters() {
        let sig = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let space = Arc::new(PreSymplecticSpace::new(sig, vec![1.0; 3]).unwrap());
        let mu = Measure::from_atoms(space.clone(), [(vec![0, 0, 0], c(1.0, 0.0)), (vec![0, 0, 1], c(-1.0, 0.0))]).unwrap();
        let rep = Arc::new(SchrodingerRep::new(space.clone(), 0.4, &small_config()).unwrap());
        assert_eq!(rep.characters().len(), 256);
        let report = operator_norm(&build_operator(&rep, &mu).unwrap(), 1e-6).unwrap();
        // max over characters of |1 − e^{iθ}| approaches 2
        assert!(report.norm > 2.0 - 1e-3 && report.norm <= 2.0, "{}", report.norm);
    }

    #[test]
    fn classical_operator_uses_sup_norm() {
        let space = std2(1.0);
        let pos = Measure::from_atoms(space.clone(), [(vec![0, 0], c(1.0, 0.0)), (vec![3, 1], c(2.0, 0.0))]).unwrap();
        let r = operator_norm(&RepOperator::classical(pos), 1e-6).unwrap();
        assert_eq!(r.norm, 3.0);
    }
}
