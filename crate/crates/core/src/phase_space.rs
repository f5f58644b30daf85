//! Phase-space picture: the Fourier transform `μ ↦ μ̂` turns measures into
//! almost-periodic functions on the dual space, twisted products into
//! deformed products and `{·,·}₀` into the canonical Poisson bracket.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{check_len, Result, WeylError};
use crate::measure::Measure;
use crate::sampling::quasi_random_ball;
use crate::space::SeminormSpec;

/// A point `F` of the dual space, paired with test functions by `F·f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint(pub Vec<f64>);

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn pair(&self, f: &[f64]) -> f64 {
        self.0.iter().zip(f).map(|(a, b)| a * b).sum()
    }
}

/// The function `μ̂` backed by its measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceFunction {
    backing: Measure,
}

/// Sampling parameters for [`PhaseSpaceFunction::sup_norm_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormSampling {
    pub count: usize,
    /// `None` picks `8π / min(lattice_step)`.
    pub radius: Option<f64>,
    pub seed: u64,
}

impl Default for SupNormSampling {
    fn default() -> Self {
        Self {
            count: 4096,
            radius: None,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupNormEstimate {
    pub lower_bound: f64,
    pub at: PhasePoint,
    /// `‖μ‖₁`.
    pub upper_bound: f64,
}

const GOLDEN_ITERATIONS: usize = 60;
const REFINE_SWEEPS: usize = 3;

impl PhaseSpaceFunction {
    pub fn new(backing: Measure) -> Self {
        Self { backing }
    }

    pub fn measure(&self) -> &Measure {
        &self.backing
    }

    pub fn into_measure(self) -> Measure {
        self.backing
    }

    pub fn dim(&self) -> usize {
        self.backing.space().dim()
    }

    fn check_point(&self, at: &PhasePoint) -> Result<()> {
        check_len(self.dim(), at.dim())
    }

    /// `μ̂[F] = Σ z_k e^{iF·f_k}` plus the Riemann sum of the density part.
    pub fn fourier_eval(&self, at: &PhasePoint) -> Result<C64> {
        self.check_point(at)?;
        if at.as_slice().iter().all(|x| *x == 0.0) {
            return Ok(self.backing.total_mass());
        }
        Ok(eval_quadrature(&self.backing.quadrature(), at.as_slice()))
    }

    /// `μ̂ ·_ħ ν̂ = (μ ⋆_ħ ν)ˆ`.
    pub fn deformed_product(&self, hbar: f64, other: &Self) -> Result<Self> {
        Ok(Self::new(self.backing.star(hbar, &other.backing)?))
    }

    /// `d_F μ̂ = i Σ z_k e^{iF·f_k} f_k`, in raw coordinates.
    pub fn differential(&self, at: &PhasePoint) -> Result<Vec<C64>> {
        self.check_point(at)?;
        let total = self.backing.norm1();
        if !total.is_finite() {
            return Err(WeylError::MomentFailure("first moment is not finite".into()));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (p, z) in self.backing.quadrature() {
            let w = C64::new(0.0, 1.0) * z * C64::from_polar(1.0, at.pair(&p));
            for (o, x) in out.iter_mut().zip(&p) {
                *o += w * x;
            }
        }
        Ok(out)
    }

    /// The differential as a class modulo `ker(gram)`: when the semi-norm is
    /// degenerate its null directions are projected out.
    pub fn differential_quotient(&self, at: &PhasePoint, spec: &SeminormSpec) -> Result<Vec<C64>> {
        check_len(self.dim(), spec.dim())?;
        let mut d = self.differential(at)?;
        for k in spec.null_space() {
            let re: f64 = d.iter().zip(k.iter()).map(|(z, x)| z.re * x).sum();
            let im: f64 = d.iter().zip(k.iter()).map(|(z, x)| z.im * x).sum();
            for (z, x) in d.iter_mut().zip(k.iter()) {
                *z -= C64::new(re * x, im * x);
            }
        }
        Ok(d)
    }

    /// `{μ̂, ν̂}[F]` from the differentials, split into real and imaginary
    /// parts `d = d₁ + i d₂`.
    pub fn function_bracket(&self, other: &Self, at: &PhasePoint) -> Result<C64> {
        let space = self.backing.space();
        if !(std::sync::Arc::ptr_eq(space, other.backing.space()) || **space == **other.backing.space()) {
            return Err(WeylError::SpaceMismatch);
        }
        let da = self.differential(at)?;
        let db = other.differential(at)?;
        let (a1, a2): (Vec<f64>, Vec<f64>) = da.iter().map(|z| (z.re, z.im)).unzip();
        let (b1, b2): (Vec<f64>, Vec<f64>) = db.iter().map(|z| (z.re, z.im)).unzip();
        let s = |x: &[f64], y: &[f64]| space.sigma_unchecked(x, y);
        Ok(C64::new(-s(&a1, &b1) + s(&a2, &b2), -s(&a1, &b2) - s(&a2, &b1)))
    }

    /// Certified lower bound for `‖μ̂‖₀ = sup_F |μ̂[F]|`: the maximum over
    /// `F = 0`, a quasi-random sample of the ball and a coordinate-wise
    /// golden-section refinement around the best sample.
    pub fn sup_norm_estimate(&self, sampling: &SupNormSampling) -> Result<SupNormEstimate> {
        if sampling.count == 0 {
            return Err(WeylError::validation("samples", "must be at least 1"));
        }
        let dim = self.dim();
        let quad = self.backing.quadrature();
        let upper_bound = self.backing.norm1();
        let radius = sampling.radius.unwrap_or_else(|| {
            let min_step = self
                .backing
                .space()
                .lattice_step()
                .iter()
                .fold(f64::INFINITY, |m, &s| m.min(s));
            8.0 * std::f64::consts::PI / min_step
        });
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(WeylError::validation("radius", "must be finite and non-negative"));
        }

        let origin = vec![0.0; dim];
        let mut best = (self.backing.total_mass().norm(), origin);
        if dim > 0 {
            let samples = quasi_random_ball(dim, sampling.count, radius, sampling.seed);
            let values: Vec<f64> = samples.par_iter().map(|p| eval_quadrature(&quad, p).norm()).collect();
            for (p, v) in samples.into_iter().zip(values) {
                if v > best.0 {
                    best = (v, p);
                }
            }

            let half_width = 2.0 * radius / (sampling.count as f64).powf(1.0 / dim as f64);
            let value = |p: &[f64]| eval_quadrature(&quad, p).norm();
            for _ in 0..REFINE_SWEEPS {
                for axis in 0..dim {
                    let (v, x) = golden_section_max(
                        |t| {
                            let mut p = best.1.clone();
                            p[axis] = t;
                            value(&p)
                        },
                        best.1[axis] - half_width,
                        best.1[axis] + half_width,
                    );
                    if v > best.0 {
                        best.0 = v;
                        best.1[axis] = x;
                    }
                }
            }
        }
        // |μ̂| ≤ ‖μ‖₁ exactly; anything above is rounding
        Ok(SupNormEstimate {
            lower_bound: best.0.min(upper_bound),
            at: PhasePoint(best.1),
            upper_bound,
        })
    }
}

pub(crate) fn eval_quadrature(quad: &[(Vec<f64>, C64)], at: &[f64]) -> C64 {
    quad.iter()
        .map(|(p, z)| {
            let phase: f64 = p.iter().zip(at).map(|(a, b)| a * b).sum();
            z * C64::from_polar(1.0, phase)
        })
        .sum()
}

/// Golden-section search for a maximum of `f` on `[a, b]`; returns the best
/// value seen and its abscissa.
fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc >= fd { (fc, c) } else { (fd, d) };
    for _ in 0..GOLDEN_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc > best.0 {
                best = (fc, c);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd > best.0 {
                best = (fd, d);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::PreSymplecticSpace;
    use rand::Rng;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn std2() -> Arc<PreSymplecticSpace> {
        Arc::new(PreSymplecticSpace::standard(1, 1.0).unwrap())
    }

    fn random_measure(space: &Arc<PreSymplecticSpace>, atoms: usize, seed: u64) -> Measure {
        let mut r = crate::sampling::rng(seed);
        let d = space.dim();
        Measure::from_atoms(
            space.clone(),
            (0..atoms).map(|_| {
                (
                    (0..d).map(|_| r.random_range(-3..=3)).collect(),
                    c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)),
                )
            }),
        )
        .unwrap()
    }

    #[test]
    fn weyl_function_values() {
        let s = std2();
        let f = PhaseSpaceFunction::new(Measure::delta(s.clone(), &[2, -1]).unwrap());
        let at = PhasePoint::new(vec![0.3, 0.7]);
        let v = f.fourier_eval(&at).unwrap();
        assert!((v - C64::from_polar(1.0, 0.6 - 0.7)).norm() < 1e-15);

        let mu = random_measure(&s, 6, 1);
        let hat = PhaseSpaceFunction::new(mu.clone());
        assert!((hat.fourier_eval(&PhasePoint::origin(2)).unwrap() - mu.total_mass()).norm() < 1e-15);

        let sym = PhaseSpaceFunction::new(
            Measure::from_atoms(s, [(vec![1, 2], c(1.0, 0.0)), (vec![-1, -2], c(1.0, 0.0))]).unwrap(),
        );
        let at = PhasePoint::new(vec![0.4, -0.1]);
        let v = sym.fourier_eval(&at).unwrap();
        assert!((v - c(2.0 * 0.2f64.cos(), 0.0)).norm() < 1e-15);
        assert!(sym.fourier_eval(&PhasePoint::new(vec![1.0])).is_err());
    }

    #[test]
    fn deformed_product_of_weyl_functions() {
        let s = std2();
        let f = PhaseSpaceFunction::new(Measure::delta(s.clone(), &[1, 0]).unwrap());
        let g = PhaseSpaceFunction::new(Measure::delta(s.clone(), &[0, 1]).unwrap());
        let p = f.deformed_product(0.5, &g).unwrap();
        let at = PhasePoint::new(vec![0.2, 0.9]);
        let expected = C64::from_polar(1.0, -0.25) * C64::from_polar(1.0, 1.1);
        assert!((p.fourier_eval(&at).unwrap() - expected).norm() < 1e-15);
        let one = PhaseSpaceFunction::new(Measure::delta(s, &[0, 0]).unwrap());
        assert_eq!(one.deformed_product(0.5, &f).unwrap(), f);
    }

    #[test]
    fn classical_product_is_pointwise_and_involution_conjugates() {
        let s = Arc::new(PreSymplecticSpace::standard(2, 0.5).unwrap());
        let a = PhaseSpaceFunction::new(random_measure(&s, 5, 2));
        let b = PhaseSpaceFunction::new(random_measure(&s, 5, 3));
        let ab = a.deformed_product(0.0, &b).unwrap();
        let star = PhaseSpaceFunction::new(a.measure().involution());
        let mut r = crate::sampling::rng(4);
        for _ in 0..100 {
            let at = PhasePoint::new((0..4).map(|_| r.random_range(-5.0..5.0)).collect());
            let lhs = ab.fourier_eval(&at).unwrap();
            let rhs = a.fourier_eval(&at).unwrap() * b.fourier_eval(&at).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            let conj = star.fourier_eval(&at).unwrap() - a.fourier_eval(&at).unwrap().conj();
            assert!(conj.norm() < 1e-12);
            assert!(a.fourier_eval(&at).unwrap().norm() <= a.measure().norm1() + 1e-12);
        }
    }

    #[test]
    fn sup_norm_examples() {
        let s = std2();
        let pos = PhaseSpaceFunction::new(
            Measure::from_atoms(s.clone(), [(vec![0, 0], c(1.0, 0.0)), (vec![1, 0], c(1.0, 0.0))]).unwrap(),
        );
        let est = pos.sup_norm_estimate(&SupNormSampling::default()).unwrap();
        assert_eq!(est.lower_bound, 2.0);
        assert_eq!(est.upper_bound, 2.0);

        let diff = PhaseSpaceFunction::new(
            Measure::from_atoms(s.clone(), [(vec![0, 0], c(1.0, 0.0)), (vec![1, 0], c(-1.0, 0.0))]).unwrap(),
        );
        let est = diff.sup_norm_estimate(&SupNormSampling::default()).unwrap();
        assert!((est.lower_bound - 2.0).abs() < 1e-6, "{}", est.lower_bound);
        assert!(est.lower_bound <= 2.0 + 1e-12);

        let mu = random_measure(&s, 7, 9);
        let est = PhaseSpaceFunction::new(mu.clone())
            .sup_norm_estimate(&SupNormSampling {
                count: 64,
                radius: Some(3.0),
                seed: 1,
            })
            .unwrap();
        assert!(est.lower_bound <= mu.norm1() + 1e-12);
        assert!(PhaseSpaceFunction::new(mu)
            .sup_norm_estimate(&SupNormSampling {
                count: 0,
                ..Default::default()
            })
            .is_err());
    }

    #[test]
    fn differential_examples() {
        let s = std2();
        let at = PhasePoint::new(vec![0.3, -1.2]);
        let f = PhaseSpaceFunction::new(Measure::delta(s.clone(), &[2, 1]).unwrap());
        let d = f.differential(&at).unwrap();
        let w = c(0.0, 1.0) * C64::from_polar(1.0, 0.6 - 1.2);
        assert!((d[0] - w * 2.0).norm() < 1e-15 && (d[1] - w).norm() < 1e-15);

        let origin = PhaseSpaceFunction::new(
            Measure::from_atoms(s.clone(), [(vec![0, 0], c(3.0, -2.0))]).unwrap(),
        );
        assert!(origin.differential(&at).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn differential_matches_finite_differences() {
        let s = Arc::new(PreSymplecticSpace::standard(1, 0.5).unwrap());
        let mu = PhaseSpaceFunction::new(random_measure(&s, 5, 11));
        let at = PhasePoint::new(vec![0.37, -0.81]);
        let d = mu.differential(&at).unwrap();
        let h = 1e-5;
        for axis in 0..2 {
            let mut p = at.clone();
            p.0[axis] += h;
            let plus = mu.fourier_eval(&p).unwrap();
            p.0[axis] -= 2.0 * h;
            let minus = mu.fourier_eval(&p).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            assert!((fd - d[axis]).norm() <= 1e-6 * d[axis].norm().max(1e-3));
        }
    }

    #[test]
    fn bracket_of_weyl_functions() {
        let s = std2();
        let f = PhaseSpaceFunction::new(Measure::delta(s.clone(), &[1, 2]).unwrap());
        let g = PhaseSpaceFunction::new(Measure::delta(s.clone(), &[-2, 1]).unwrap());
        let at = PhasePoint::new(vec![0.5, 0.25]);
        let b = f.function_bracket(&g, &at).unwrap();
        let sigma = 1.0 * 1.0 - 2.0 * (-2.0);
        let expected = C64::from_polar(sigma, at.pair(&[-1.0, 3.0]));
        assert!((b - expected).norm() < 1e-14);
        assert!(f.function_bracket(&f, &at).unwrap().norm() < 1e-15);
    }

    #[test]
    fn bracket_matches_measure_side() {
        let s = Arc::new(PreSymplecticSpace::standard(2, 1.0).unwrap());
        let mu = random_measure(&s, 6, 21);
        let nu = random_measure(&s, 6, 22);
        let pb = PhaseSpaceFunction::new(mu.poisson_bracket0(&nu).unwrap());
        let (a, b) = (PhaseSpaceFunction::new(mu), PhaseSpaceFunction::new(nu));
        let mut r = crate::sampling::rng(23);
        for _ in 0..100 {
            let at = PhasePoint::new((0..4).map(|_| r.random_range(-4.0..4.0)).collect());
            let lhs = a.function_bracket(&b, &at).unwrap();
            let rhs = pb.fourier_eval(&at).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10);
        }
    }

    #[test]
    fn quotient_differential_drops_null_directions() {
        let s = std2();
        let spec = SeminormSpec::new(nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1.0).unwrap();
        let f = PhaseSpaceFunction::new(Measure::delta(s, &[1, 3]).unwrap());
        let at = PhasePoint::new(vec![0.1, 0.2]);
        let d = f.differential_quotient(&at, &spec).unwrap();
        assert!(d[1].norm() < 1e-15);
        assert!((d[0] - f.differential(&at).unwrap()[0]).norm() < 1e-15);
    }
}
