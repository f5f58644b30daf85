//! States through their characteristic functions `C_ω(f) = ⟨ω, W^ħ(f)⟩`,
//! the projective positive-definiteness test and gauge transformations.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{check_len, Result, WeylError};
use crate::measure::{GridDensity, Measure};
use crate::phase_space::PhasePoint;
use crate::sampling::rng;
use crate::space::PreSymplecticSpace;

pub const MAX_PROBES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    /// `C(f) = e^{−fᵀ s f / 4}`.
    Gaussian { s: DMatrix<f64> },
    /// `C(f) = e^{iF·f}`.
    Character { at: PhasePoint },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub ok: bool,
    pub min_eig: f64,
}

impl QuantumState {
    /// Requires `s` symmetric and positive semi-definite.
    pub fn gaussian(s: DMatrix<f64>) -> Result<Self> {
        if !s.is_square() {
            return Err(WeylError::validation("s", "must be square"));
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(WeylError::validation("s", "non-finite entry"));
        }
        let scale = s.amax().max(1.0);
        if (&s - s.transpose()).amax() > 1e-12 * scale {
            return Err(WeylError::validation("s", "must be symmetric"));
        }
        let min = SymmetricEigen::new(s.clone()).eigenvalues.min();
        if min < -1e-12 * scale {
            return Err(WeylError::validation("s", format!("must be positive semi-definite (eigenvalue {min})")));
        }
        Ok(Self::Gaussian { s })
    }

    pub fn character(at: PhasePoint) -> Self {
        Self::Character { at }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian { s } => s.nrows(),
            Self::Character { at } => at.dim(),
        }
    }

    pub fn char_fn_eval(&self, f: &[f64]) -> Result<C64> {
        check_len(self.dim(), f.len())?;
        Ok(self.char_fn_unchecked(f))
    }

    fn char_fn_unchecked(&self, f: &[f64]) -> C64 {
        match self {
            Self::Gaussian { s } => C64::new((-quad(s, f, f) / 4.0).exp(), 0.0),
            Self::Character { at } => C64::from_polar(1.0, at.pair(f)),
        }
    }

    /// `ħ²σ(f,g)² ≤ s(f,f) s(g,g)` on every pair of probes. Character
    /// states only pass when `σ` vanishes on the probes or `ħ = 0`.
    pub fn admissible_on(&self, space: &PreSymplecticSpace, hbar: f64, probes: &[Vec<f64>]) -> Result<bool> {
        check_len(space.dim(), self.dim())?;
        for p in probes {
            check_len(space.dim(), p.len())?;
        }
        for (i, f) in probes.iter().enumerate() {
            for g in &probes[i + 1..] {
                let lhs = (hbar * space.sigma_unchecked(f, g)).powi(2);
                let rhs = match self {
                    Self::Gaussian { s } => quad(s, f, f) * quad(s, g, g),
                    Self::Character { .. } => 0.0,
                };
                if lhs > rhs * (1.0 + 1e-12) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Smallest eigenvalue of `M_ij = e^{(i/2)ħσ(f_i,f_j)} C(f_j − f_i)`.
    pub fn psd_check(&self, space: &PreSymplecticSpace, hbar: f64, probes: &[Vec<f64>], tol: f64) -> Result<PsdReport> {
        check_len(space.dim(), self.dim())?;
        if probes.len() > MAX_PROBES {
            return Err(WeylError::validation(
                "probes",
                format!("at most {MAX_PROBES} probes, got {}", probes.len()),
            ));
        }
        for p in probes {
            check_len(space.dim(), p.len())?;
        }
        if probes.is_empty() {
            return Ok(PsdReport { ok: true, min_eig: 0.0 });
        }
        let n = probes.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let diff: Vec<f64> = probes[j].iter().zip(&probes[i]).map(|(a, b)| a - b).collect();
            C64::from_polar(1.0, 0.5 * hbar * space.sigma_unchecked(&probes[i], &probes[j])) * self.char_fn_unchecked(&diff)
        });
        let min_eig = m.symmetric_eigenvalues().min();
        Ok(PsdReport {
            ok: min_eig >= -tol,
            min_eig,
        })
    }

    /// `⟨ω, μ⟩ = ∫ C_ω(f) dμ(f)`.
    pub fn expectation(&self, mu: &Measure) -> Result<C64> {
        check_len(mu.space().dim(), self.dim())?;
        Ok(mu.quadrature().iter().map(|(p, z)| z * self.char_fn_unchecked(p)).sum())
    }

    /// `sqrt(Re ⟨ω, μ* ⋆_ħ μ⟩)`; a real part below `−1e−10` means the state
    /// is not positive on this element.
    pub fn norm_lower_bound(&self, hbar: f64, mu: &Measure) -> Result<f64> {
        let square = mu.involution().star(hbar, mu)?;
        let value = self.expectation(&square)?.re;
        if value < -1e-10 * mu.norm1().powi(2).max(1.0) {
            return Err(WeylError::validation(
                "state",
                format!("⟨ω, μ*⋆μ⟩ has real part {value}; the state is inadmissible at ħ = {hbar}"),
            ));
        }
        Ok(value.max(0.0).sqrt())
    }
}

fn quad(s: &DMatrix<f64>, f: &[f64], g: &[f64]) -> f64 {
    let n = f.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += f[i] * s[(i, j)] * g[j];
        }
    }
    acc
}

/// Random search for probe sets on which the Gram matrix of `state` has a
/// negative eigenvalue below `−tol`: rescaled square lattices and random
/// clouds at log-spaced scales. Returns the worst probe set found.
pub fn find_psd_witness(
    state: &QuantumState,
    space: &PreSymplecticSpace,
    hbar: f64,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Option<(Vec<Vec<f64>>, f64)>> {
    let dim = space.dim();
    let mut r = rng(seed);
    let base = 1.0 / hbar.abs().max(f64::MIN_POSITIVE).sqrt();
    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    for t in 0..trials {
        let scale = base * 10f64.powf(r.random_range(-1.5..1.0));
        let probes: Vec<Vec<f64>> = if t % 2 == 0 {
            (0..MAX_PROBES)
                .map(|_| (0..dim).map(|_| scale * r.random_range(-1.0..1.0)).collect())
                .collect()
        } else {
            // axis-aligned lattice filling the probe budget
            let side = (MAX_PROBES as f64).powf(1.0 / dim.max(1) as f64).floor().max(1.0) as usize;
            let count = side.pow(dim as u32).min(MAX_PROBES);
            (0..count)
                .map(|mut i| {
                    (0..dim)
                        .map(|_| {
                            let j = i % side;
                            i /= side;
                            scale * (j as f64 - (side as f64 - 1.0) / 2.0)
                        })
                        .collect()
                })
                .collect()
        };
        let report = state.psd_check(space, hbar, &probes, tol)?;
        if best.as_ref().is_none_or(|b| report.min_eig < b.1) {
            best = Some((probes, report.min_eig));
        }
    }
    Ok(best.filter(|b| b.1 < -tol))
}

/// `γ^F`: multiplies the weight at `f` by `e^{iF·f}`.
pub fn gauge_twist(mu: &Measure, at: &PhasePoint) -> Result<Measure> {
    let space = mu.space();
    check_len(space.dim(), at.dim())?;
    let atoms = mu
        .discrete()
        .iter()
        .map(|(c, z)| (c.clone(), z * C64::from_polar(1.0, at.pair(&space.point(c)))));
    let mut out = Measure::from_atoms(space.clone(), atoms)?;
    if let Some(d) = mu.density() {
        let samples = d
            .cells()
            .map(|(c, z)| z * C64::from_polar(1.0, at.pair(&space.point(&c))))
            .collect();
        out = out.with_density(GridDensity::new(d.lo().to_vec(), d.shape().to_vec(), d.stride().to_vec(), samples)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn std2() -> Arc<PreSymplecticSpace> {
        Arc::new(PreSymplecticSpace::standard(1, 1.0).unwrap())
    }

    #[test]
    fn characteristic_function_examples() {
        let g = QuantumState::gaussian(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(g.char_fn_eval(&[0.0, 0.0]).unwrap(), c(1.0, 0.0));
        assert!((g.char_fn_eval(&[2.0, 0.0]).unwrap() - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
        let ch = QuantumState::character(PhasePoint::new(vec![0.3, -0.2]));
        assert!((ch.char_fn_eval(&[1.0, 4.0]).unwrap().norm() - 1.0).abs() < 1e-15);
        assert!(QuantumState::gaussian(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])).is_err());
        assert!(QuantumState::gaussian(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn vacuum_passes_and_squeezed_fails() {
        let s = std2();
        let hbar = 1.0;
        let probes: Vec<Vec<f64>> = (0..49).map(|i| vec![(i % 7) as f64 * 0.6 - 1.8, (i / 7) as f64 * 0.6 - 1.8]).collect();
        let vacuum = QuantumState::gaussian(DMatrix::identity(2, 2) * hbar).unwrap();
        assert!(vacuum.admissible_on(&s, hbar, &probes).unwrap());
        let rep = vacuum.psd_check(&s, hbar, &probes, 1e-10).unwrap();
        assert!(rep.ok, "{}", rep.min_eig);

        let squeezed = QuantumState::gaussian(DMatrix::identity(2, 2) * 0.1).unwrap();
        assert!(!squeezed.admissible_on(&s, hbar, &probes).unwrap());
        let w = find_psd_witness(&squeezed, &s, hbar, 40, 1, 1e-10).unwrap();
        assert!(w.is_some());

        let ch = QuantumState::character(PhasePoint::new(vec![0.7, 0.1]));
        assert!(ch.psd_check(&s, 0.0, &probes, 1e-10).unwrap().ok);
        assert!(vacuum.psd_check(&s, hbar, &vec![vec![0.0, 0.0]; 65], 1e-10).is_err());
    }

    #[test]
    fn expectation_and_bound_examples() {
        let s = std2();
        let st = QuantumState::gaussian(DMatrix::identity(2, 2)).unwrap();
        let f = Measure::delta(s.clone(), &[1, 2]).unwrap();
        assert_eq!(st.expectation(&f).unwrap(), st.char_fn_eval(&[1.0, 2.0]).unwrap());
        assert_eq!(st.expectation(&Measure::delta(s.clone(), &[0, 0]).unwrap()).unwrap(), c(1.0, 0.0));
        assert!((st.norm_lower_bound(1.0, &f).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(st.norm_lower_bound(1.0, &Measure::zero(s.clone())).unwrap(), 0.0);

        // δ(0)+δ(f): μ*⋆μ = 2δ(0) + δ(f) + δ(−f), phases vanish since σ(f,−f)=0
        let mu = Measure::from_atoms(s.clone(), [(vec![0, 0], c(1.0, 0.0)), (vec![1, 2], c(1.0, 0.0))]).unwrap();
        let expected = (2.0 + 2.0 * st.char_fn_eval(&[1.0, 2.0]).unwrap().re).sqrt();
        let got = st.norm_lower_bound(1.0, &mu).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!(got <= 2.0);
    }

    #[test]
    fn gauge_twist_examples() {
        let s = std2();
        let mu = Measure::from_atoms(s.clone(), [(vec![1, 0], c(1.0, 1.0)), (vec![-2, 3], c(0.5, 0.0))]).unwrap();
        assert_eq!(gauge_twist(&mu, &PhasePoint::origin(2)).unwrap(), mu);
        let at = PhasePoint::new(vec![0.4, -0.3]);
        let d = gauge_twist(&Measure::delta(s.clone(), &[2, 1]).unwrap(), &at).unwrap();
        assert!((d.discrete().get(&[2, 1]).unwrap() - C64::from_polar(1.0, 0.5)).norm() < 1e-15);
        let nu = Measure::from_atoms(s.clone(), [(vec![0, 1], c(0.2, -1.0)), (vec![1, 1], c(1.0, 0.0))]).unwrap();
        let lhs = gauge_twist(&mu.star(0.6, &nu).unwrap(), &at).unwrap();
        let rhs = gauge_twist(&mu, &at).unwrap().star(0.6, &gauge_twist(&nu, &at).unwrap()).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
        assert!((gauge_twist(&mu, &at).unwrap().norm1() - mu.norm1()).abs() < 1e-15);
    }
}
