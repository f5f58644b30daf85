//! The pre-symplectic arena: `σ`, its kernel, quadratic semi-norms, the
//! Darboux normal form and the scaling maps `T_ħ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_len, Result, WeylError};

/// Relative antisymmetry tolerance accepted for `σ`.
const ANTISYMMETRY_TOL: f64 = 1e-14;

/// Singular values `≤ KERNEL_THRESHOLD · σ_max` count as zero.
pub const KERNEL_THRESHOLD: f64 = 1e-10;

/// A finite-dimensional truncation `E_α = R^D` of the test-function space,
/// carrying a possibly degenerate antisymmetric form and the pitch of the
/// integer lattice on which point measures live.
#[derive(Debug, Clone, PartialEq)]
pub struct PreSymplecticSpace {
    sigma: DMatrix<f64>,
    lattice_step: Vec<f64>,
    // (i, j, (σ_ij − σ_ji)/2) for i < j; evaluating through these pairs makes
    // σ(f, g) = −σ(g, f) hold bit-for-bit.
    pairs: Vec<(usize, usize, f64)>,
}

impl PreSymplecticSpace {
    pub fn new(sigma: DMatrix<f64>, lattice_step: Vec<f64>) -> Result<Self> {
        let dim = sigma.nrows();
        if dim == 0 {
            return Err(WeylError::InvalidSpace("dimension must be positive".into()));
        }
        if sigma.ncols() != dim {
            return Err(WeylError::InvalidSpace(format!(
                "sigma must be square, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        check_len(dim, lattice_step.len())?;
        if sigma.iter().any(|x| !x.is_finite()) {
            return Err(WeylError::InvalidSpace("sigma has non-finite entries".into()));
        }
        if let Some(bad) = lattice_step.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return Err(WeylError::InvalidSpace(format!(
                "lattice_step entries must be positive, got {bad}"
            )));
        }
        let scale = sigma.amax();
        let asym = (&sigma + sigma.transpose()).amax();
        if asym > ANTISYMMETRY_TOL * scale {
            return Err(WeylError::InvalidSpace(format!(
                "sigma is not antisymmetric (|σ + σᵀ|max = {asym:e})"
            )));
        }
        let mut pairs = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = 0.5 * (sigma[(i, j)] - sigma[(j, i)]);
                if a != 0.0 {
                    pairs.push((i, j, a));
                }
            }
        }
        Ok(Self {
            sigma,
            lattice_step,
            pairs,
        })
    }

    /// The standard symplectic form `σ((u,v),(u',v')) = u·v' − v·u'` on
    /// `R^d × R^d` with a uniform lattice pitch.
    pub fn standard(half_dim: usize, step: f64) -> Result<Self> {
        Self::new(standard_form(half_dim), vec![step; 2 * half_dim])
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn lattice_step(&self) -> &[f64] {
        &self.lattice_step
    }

    /// `σ(f, g) = fᵀ·sigma·g`.
    pub fn sigma_eval(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        check_len(self.dim(), f.len())?;
        check_len(self.dim(), g.len())?;
        Ok(self.sigma_unchecked(f, g))
    }

    pub(crate) fn sigma_unchecked(&self, f: &[f64], g: &[f64]) -> f64 {
        self.pairs
            .iter()
            .map(|&(i, j, a)| a * (f[i] * g[j] - f[j] * g[i]))
            .sum()
    }

    /// Physical point `coord ⊙ lattice_step`.
    pub fn point(&self, coord: &[i64]) -> Vec<f64> {
        coord
            .iter()
            .zip(&self.lattice_step)
            .map(|(&c, &s)| c as f64 * s)
            .collect()
    }

    pub fn cell_volume(&self, stride: &[i64]) -> f64 {
        stride
            .iter()
            .zip(&self.lattice_step)
            .map(|(&n, &s)| n as f64 * s)
            .product()
    }

    /// Orthonormal basis of `ker σ`, empty iff `σ` is non-degenerate.
    pub fn kernel_basis(&self) -> Vec<DVector<f64>> {
        let svd = self.sigma.clone().svd(false, true);
        let v_t = svd.v_t.expect("svd requested v_t");
        let s_max = svd.singular_values.max();
        svd.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= KERNEL_THRESHOLD * s_max)
            .map(|(i, _)| v_t.row(i).transpose())
            .collect()
    }

    /// Symplectic Gram–Schmidt on the complement of the kernel.
    pub fn darboux_decompose(&self) -> DarbouxDecomposition {
        let dim = self.dim();
        let kernel = self.kernel_basis();
        let half = (dim - kernel.len()) / 2;

        let mut projector = DMatrix::<f64>::identity(dim, dim);
        for k in &kernel {
            projector -= k * k.transpose();
        }
        let mut candidates: Vec<DVector<f64>> = (0..dim)
            .map(|i| projector.column(i).into_owned())
            .filter(|w| w.norm() > KERNEL_THRESHOLD)
            .collect();

        let form = |a: &DVector<f64>, b: &DVector<f64>| self.sigma_unchecked(a.as_slice(), b.as_slice());
        let mut es = Vec::with_capacity(half);
        let mut fs = Vec::with_capacity(half);
        for _ in 0..half {
            // full pivoting on |σ(w_i, w_j)|
            let mut best = (0, 1, 0.0f64);
            for i in 0..candidates.len() {
                for j in (i + 1)..candidates.len() {
                    let s = form(&candidates[i], &candidates[j]);
                    if s.abs() > best.2.abs() {
                        best = (i, j, s);
                    }
                }
            }
            let (i, j, s) = best;
            if s == 0.0 {
                break;
            }
            let root = s.abs().sqrt();
            let e = &candidates[i] / root;
            let f = &candidates[j] * (s.signum() / root);
            candidates.remove(j);
            candidates.remove(i);
            for w in candidates.iter_mut() {
                let a = form(w, &f);
                let b = form(w, &e);
                *w -= &e * a;
                *w += &f * b;
            }
            candidates.retain(|w| w.norm() > KERNEL_THRESHOLD);
            es.push(e);
            fs.push(f);
        }

        let mut columns = es;
        columns.extend(fs);
        columns.extend(kernel);
        let basis = DMatrix::from_columns(&columns);
        let inverse = basis
            .clone()
            .try_inverse()
            .expect("Darboux basis is invertible by construction");
        DarbouxDecomposition {
            rank_symplectic: 2 * half,
            kernel_dim: dim - 2 * half,
            basis,
            inverse,
        }
    }
}

/// `J_d = [[0, I], [−I, 0]]`.
pub fn standard_form(half_dim: usize) -> DMatrix<f64> {
    let dim = 2 * half_dim;
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..half_dim {
        j[(i, half_dim + i)] = 1.0;
        j[(half_dim + i, i)] = -1.0;
    }
    j
}

/// Columns `e_1..e_m, f_1..f_m, k_1..k_r` with `σ(e_i, f_j) = δ_ij` and the
/// `k`'s spanning `ker σ`, so `basisᵀ·sigma·basis = diag(J_m, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxDecomposition {
    pub basis: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub rank_symplectic: usize,
    pub kernel_dim: usize,
}

/// Coordinates of a vector in a Darboux basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxCoords {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub kernel: Vec<f64>,
}

impl DarbouxDecomposition {
    pub fn half_dim(&self) -> usize {
        self.rank_symplectic / 2
    }

    pub fn coordinates(&self, f: &[f64]) -> Result<DarbouxCoords> {
        check_len(self.basis.nrows(), f.len())?;
        let c = &self.inverse * DVector::from_column_slice(f);
        let d = self.half_dim();
        Ok(DarbouxCoords {
            u: c.rows(0, d).iter().copied().collect(),
            v: c.rows(d, d).iter().copied().collect(),
            kernel: c.rows(2 * d, self.kernel_dim).iter().copied().collect(),
        })
    }

    /// `diag(J_m, 0)`, the target of `basisᵀ·sigma·basis`.
    pub fn normal_form(&self) -> DMatrix<f64> {
        let dim = self.basis.nrows();
        let mut target = DMatrix::zeros(dim, dim);
        let j = standard_form(self.half_dim());
        target
            .view_mut((0, 0), (self.rank_symplectic, self.rank_symplectic))
            .copy_from(&j);
        target
    }
}

/// Quadratic semi-norm `ς(f) = sqrt(fᵀ·gram·f)` with the compatibility
/// constant `c` of `|σ(f,g)| ≤ c ς(f) ς(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormSpec {
    gram: DMatrix<f64>,
    compat_c: f64,
}

impl SeminormSpec {
    pub fn new(gram: DMatrix<f64>, compat_c: f64) -> Result<Self> {
        if gram.nrows() != gram.ncols() || gram.nrows() == 0 {
            return Err(WeylError::InvalidSeminorm("gram must be square and non-empty".into()));
        }
        if gram.iter().any(|x| !x.is_finite()) {
            return Err(WeylError::InvalidSeminorm("gram has non-finite entries".into()));
        }
        if !(compat_c > 0.0 && compat_c.is_finite()) {
            return Err(WeylError::InvalidSeminorm(format!("c must be positive, got {compat_c}")));
        }
        let scale = gram.amax();
        if (&gram - gram.transpose()).amax() > 1e-12 * scale {
            return Err(WeylError::InvalidSeminorm("gram is not symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(gram.clone()).eigenvalues.min();
        if min_eig < -1e-12 * scale {
            return Err(WeylError::InvalidSeminorm(format!(
                "gram is not positive semi-definite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { gram, compat_c })
    }

    pub fn identity(dim: usize, compat_c: f64) -> Self {
        Self::new(DMatrix::identity(dim, dim), compat_c).expect("identity gram is valid")
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn compat_c(&self) -> f64 {
        self.compat_c
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn eval(&self, f: &[f64]) -> Result<f64> {
        check_len(self.dim(), f.len())?;
        Ok(self.eval_unchecked(f))
    }

    pub(crate) fn eval_unchecked(&self, f: &[f64]) -> f64 {
        let n = f.len();
        let mut q = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.gram[(i, j)] * f[j];
            }
            q += f[i] * row;
        }
        q.max(0.0).sqrt()
    }

    /// Orthonormal basis of `ker(gram)` (eigenvalues `≤ 1e−10·λ_max`).
    pub fn null_space(&self) -> Vec<DVector<f64>> {
        let eig = SymmetricEigen::new(self.gram.clone());
        let lmax = eig.eigenvalues.max().max(0.0);
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l <= KERNEL_THRESHOLD * lmax)
            .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
            .collect()
    }

    /// Checks `|σ(f,g)| ≤ c ς(f) ς(g)` in closed form.
    ///
    /// On the range of `gram` the best constant is the spectral norm of
    /// `Rᵀ σ R` with `R = U_r Λ_r^{−1/2}`; directions in `ker(gram)` must also
    /// lie in `ker σ`.
    pub fn verify_compat(&self, space: &PreSymplecticSpace) -> Result<CompatReport> {
        check_len(space.dim(), self.dim())?;
        let sigma = space.sigma();
        let sigma_scale = sigma.amax();
        let eig = SymmetricEigen::new(self.gram.clone());
        let lmax = eig.eigenvalues.max().max(0.0);

        let mut range_cols = Vec::new();
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            let u = eig.eigenvectors.column(i).into_owned();
            if l > KERNEL_THRESHOLD * lmax && l > 0.0 {
                range_cols.push(u / l.sqrt());
            } else {
                let image = sigma * &u;
                if image.amax() > KERNEL_THRESHOLD * sigma_scale.max(f64::MIN_POSITIVE) && sigma_scale > 0.0 {
                    return Ok(CompatReport {
                        ok: false,
                        worst_ratio: f64::INFINITY,
                        witness: Some((u.as_slice().to_vec(), image.as_slice().to_vec())),
                    });
                }
            }
        }
        if range_cols.is_empty() {
            return Ok(CompatReport {
                ok: true,
                worst_ratio: 0.0,
                witness: None,
            });
        }
        let r = DMatrix::from_columns(&range_cols);
        let m = r.transpose() * sigma * &r;
        let svd = m.svd(true, true);
        let (imax, &ratio) = svd
            .singular_values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let ok = ratio <= self.compat_c * (1.0 + 1e-10);
        let witness = if ok {
            None
        } else {
            let u = svd.u.as_ref().expect("u").column(imax).into_owned();
            let v = svd.v_t.as_ref().expect("v_t").row(imax).transpose();
            Some(((&r * u).as_slice().to_vec(), (&r * v).as_slice().to_vec()))
        };
        Ok(CompatReport {
            ok,
            worst_ratio: ratio,
            witness,
        })
    }
}

/// Outcome of [`SeminormSpec::verify_compat`]. `worst_ratio` is
/// `sup |σ(f,g)| / (ς(f) ς(g))`, infinite when `ker(gram) ⊄ ker σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    pub ok: bool,
    pub worst_ratio: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalingKind {
    /// `T_ħ f = sqrt(ħ) f`, defined for `ħ > 0`.
    Sqrt,
    /// `T_ħ = θ₊(ħ) P₊ + θ₋(ħ) P₋` with `P± = (1 ± C)/2` for a conjugation `C`.
    /// The split of `ħ` is `θ₊ = sgn(ħ)|ħ|^α`, `θ₋ = |ħ|^{1−α}`.
    Split {
        conjugation: DMatrix<f64>,
        theta_exponent: f64,
    },
}

/// Linear maps `T_ħ` with `σ(T_ħ f, T_ħ g) = ħ σ(f, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HbarScaler {
    kind: ScalingKind,
}

impl HbarScaler {
    pub fn sqrt() -> Self {
        Self {
            kind: ScalingKind::Sqrt,
        }
    }

    /// Validates `C² = 1` and `σ(Cf, g) = −σ(f, Cg)`.
    pub fn split(space: &PreSymplecticSpace, conjugation: DMatrix<f64>, theta_exponent: f64) -> Result<Self> {
        let dim = space.dim();
        if conjugation.nrows() != dim || conjugation.ncols() != dim {
            return Err(WeylError::DimensionMismatch {
                expected: dim,
                got: conjugation.nrows(),
            });
        }
        if !theta_exponent.is_finite() {
            return Err(WeylError::validation("theta_exponent", "must be finite"));
        }
        let scale = conjugation.amax().max(1.0);
        let square = &conjugation * &conjugation - DMatrix::identity(dim, dim);
        if square.amax() > 1e-12 * scale * scale {
            return Err(WeylError::validation("conjugation", "C² must be the identity"));
        }
        let sigma = space.sigma();
        let anti = conjugation.transpose() * sigma + sigma * &conjugation;
        if anti.amax() > 1e-12 * scale * sigma.amax().max(1.0) {
            return Err(WeylError::validation("conjugation", "σ(Cf, g) = −σ(f, Cg) fails"));
        }
        Ok(Self {
            kind: ScalingKind::Split {
                conjugation,
                theta_exponent,
            },
        })
    }

    pub fn kind(&self) -> &ScalingKind {
        &self.kind
    }

    fn check_hbar(&self, hbar: f64) -> Result<()> {
        if hbar == 0.0 || !hbar.is_finite() {
            return Err(WeylError::HbarDomain(format!("T_ħ needs finite ħ ≠ 0, got {hbar}")));
        }
        if matches!(self.kind, ScalingKind::Sqrt) && hbar < 0.0 {
            return Err(WeylError::HbarDomain(format!(
                "sqrt scaling is only defined for ħ > 0 (got {hbar}); the induced map would be an anti-isomorphism"
            )));
        }
        Ok(())
    }

    pub fn thetas(&self, hbar: f64) -> Result<(f64, f64)> {
        self.check_hbar(hbar)?;
        Ok(match &self.kind {
            ScalingKind::Sqrt => (hbar.sqrt(), hbar.sqrt()),
            ScalingKind::Split { theta_exponent, .. } => {
                let a = hbar.abs();
                (hbar.signum() * a.powf(*theta_exponent), a.powf(1.0 - theta_exponent))
            }
        })
    }

    /// The matrix of `T_ħ` on `R^dim`.
    pub fn matrix(&self, dim: usize, hbar: f64) -> Result<DMatrix<f64>> {
        let (tp, tm) = self.thetas(hbar)?;
        Ok(match &self.kind {
            ScalingKind::Sqrt => DMatrix::identity(dim, dim) * tp,
            ScalingKind::Split { conjugation, .. } => {
                check_len(conjugation.nrows(), dim)?;
                let id = DMatrix::<f64>::identity(dim, dim);
                let p_plus = (&id + conjugation) * 0.5;
                let p_minus = (&id - conjugation) * 0.5;
                p_plus * tp + p_minus * tm
            }
        })
    }

    pub fn apply(&self, hbar: f64, f: &[f64]) -> Result<Vec<f64>> {
        let t = self.matrix(f.len(), hbar)?;
        Ok((t * DVector::from_column_slice(f)).as_slice().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn std2() -> PreSymplecticSpace {
        PreSymplecticSpace::standard(1, 1.0).unwrap()
    }

    fn degenerate3() -> PreSymplecticSpace {
        let s = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        PreSymplecticSpace::new(s, vec![1.0; 3]).unwrap()
    }

    fn random_antisymmetric(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        &a - a.transpose()
    }

    #[test]
    fn sigma_eval_examples() {
        let s = std2();
        assert_eq!(s.sigma_eval(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(s.sigma_eval(&[2.0, 3.0], &[5.0, 7.0]).unwrap(), -1.0);
        assert_eq!(s.sigma_eval(&[2.5, -3.0], &[2.5, -3.0]).unwrap(), 0.0);
        assert!(matches!(
            s.sigma_eval(&[1.0], &[0.0, 1.0]),
            Err(WeylError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_bad_spaces() {
        let sym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(PreSymplecticSpace::new(sym, vec![1.0, 1.0]).is_err());
        assert!(PreSymplecticSpace::new(standard_form(1), vec![1.0, 0.0]).is_err());
        assert!(PreSymplecticSpace::new(standard_form(1), vec![1.0]).is_err());
    }

    #[test]
    fn antisymmetry_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = PreSymplecticSpace::new(random_antisymmetric(&mut rng, 5), vec![1.0; 5]).unwrap();
        for _ in 0..100 {
            let f: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
            let g: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert_eq!(s.sigma_eval(&f, &g).unwrap(), -s.sigma_eval(&g, &f).unwrap());
            assert_eq!(s.sigma_eval(&f, &f).unwrap(), 0.0);
        }
    }

    #[test]
    fn kernel_examples() {
        assert!(std2().kernel_basis().is_empty());
        let k = degenerate3().kernel_basis();
        assert_eq!(k.len(), 1);
        assert!((k[0][2].abs() - 1.0).abs() < 1e-14);
        let zero = PreSymplecticSpace::new(DMatrix::zeros(3, 3), vec![1.0; 3]).unwrap();
        assert_eq!(zero.kernel_basis().len(), 3);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [3, 5, 7] {
            let s = PreSymplecticSpace::new(random_antisymmetric(&mut rng, dim), vec![1.0; dim]).unwrap();
            let scale = s.sigma().amax();
            for k in s.kernel_basis() {
                for _ in 0..100 {
                    let g: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                    assert!(s.sigma_eval(k.as_slice(), &g).unwrap().abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn darboux_examples() {
        let d = std2().darboux_decompose();
        assert_eq!(d.rank_symplectic, 2);
        assert_eq!(d.kernel_dim, 0);
        assert!((&d.basis - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);

        let s = PreSymplecticSpace::new(standard_form(1) * 2.0, vec![1.0; 2]).unwrap();
        let d = s.darboux_decompose();
        let expected = DMatrix::<f64>::identity(2, 2) / 2f64.sqrt();
        assert!((&d.basis - expected).amax() < 1e-15);

        let d = degenerate3().darboux_decompose();
        assert_eq!((d.rank_symplectic, d.kernel_dim), (2, 1));
    }

    #[test]
    fn darboux_reconstructs_normal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..60 {
            let dim = 2 + trial % 7;
            let sigma = if trial % 3 == 0 {
                // degenerate: A J_m Aᵀ with A of rank 2m < dim
                let m = rng.random_range(0..=(dim - 1) / 2);
                let a = DMatrix::from_fn(dim, 2 * m, |_, _| rng.random_range(-1.0..1.0));
                &a * standard_form(m) * a.transpose()
            } else {
                random_antisymmetric(&mut rng, dim)
            };
            let s = PreSymplecticSpace::new(sigma, vec![1.0; dim]).unwrap();
            let d = s.darboux_decompose();
            let recon = d.basis.transpose() * s.sigma() * &d.basis;
            let err = (&recon - d.normal_form()).amax();
            assert!(err <= 1e-10, "dim {dim}: reconstruction error {err:e}");
            assert_eq!(d.rank_symplectic + d.kernel_dim, dim);
        }
    }

    #[test]
    fn darboux_coordinates_reproduce_sigma() {
        let s = degenerate3();
        let d = s.darboux_decompose();
        let f = [0.3, -1.2, 2.0];
        let g = [1.1, 0.4, -0.7];
        let cf = d.coordinates(&f).unwrap();
        let cg = d.coordinates(&g).unwrap();
        let via = cf.u[0] * cg.v[0] - cf.v[0] * cg.u[0];
        assert!((via - s.sigma_eval(&f, &g).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn seminorm_examples() {
        let id = SeminormSpec::identity(2, 1.0);
        assert_eq!(id.eval(&[3.0, 4.0]).unwrap(), 5.0);
        let zero = SeminormSpec::new(DMatrix::zeros(2, 2), 1.0).unwrap();
        assert_eq!(zero.eval(&[3.0, -7.0]).unwrap(), 0.0);
        let g = SeminormSpec::new(DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]), 1.0).unwrap();
        assert_eq!(g.eval(&[1.0, 1.0]).unwrap(), 13f64.sqrt());
        assert!(SeminormSpec::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), 1.0).is_err());
    }

    #[test]
    fn compat_examples() {
        let s = std2();
        let r = SeminormSpec::identity(2, 1.0).verify_compat(&s).unwrap();
        assert!(r.ok);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);

        let zero = SeminormSpec::new(DMatrix::zeros(2, 2), 1.0).unwrap();
        let r = zero.verify_compat(&s).unwrap();
        assert!(!r.ok);
        assert!(r.worst_ratio.is_infinite());

        let s2 = PreSymplecticSpace::new(standard_form(1) * 2.0, vec![1.0; 2]).unwrap();
        let r = SeminormSpec::identity(2, 1.0).verify_compat(&s2).unwrap();
        assert!(!r.ok);
        assert!((r.worst_ratio - 2.0).abs() < 1e-12);
        let (f, g) = r.witness.unwrap();
        let id = SeminormSpec::identity(2, 1.0);
        let lhs = s2.sigma_eval(&f, &g).unwrap().abs();
        assert!(lhs > id.eval(&f).unwrap() * id.eval(&g).unwrap() * 1.5);
    }

    #[test]
    fn compat_matches_sampling_oracle() {
        // Cauchy–Schwarz oracle: random pairs never beat the closed-form ratio
        // and the best random pair approaches it.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sigma = random_antisymmetric(&mut rng, 4);
        let s = PreSymplecticSpace::new(sigma, vec![1.0; 4]).unwrap();
        let gram = {
            let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            &a * a.transpose() + DMatrix::identity(4, 4) * 0.1
        };
        let spec = SeminormSpec::new(gram, 100.0).unwrap();
        let report = spec.verify_compat(&s).unwrap();
        let mut best = 0.0f64;
        for _ in 0..20000 {
            let f: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = s.sigma_eval(&f, &g).unwrap().abs() / (spec.eval(&f).unwrap() * spec.eval(&g).unwrap());
            best = best.max(r);
        }
        assert!(best <= report.worst_ratio * (1.0 + 1e-12));
        assert!(best >= 0.8 * report.worst_ratio);
    }

    #[test]
    fn degenerate_seminorm_compat() {
        let s = degenerate3();
        // ς ignores the kernel direction e₃ only
        let gram = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(SeminormSpec::new(gram, 1.0).unwrap().verify_compat(&s).unwrap().ok);
        // ignoring e₁ is not allowed, e₁ ∉ ker σ
        let gram = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(!SeminormSpec::new(gram, 1.0).unwrap().verify_compat(&s).unwrap().ok);
    }

    #[test]
    fn t_hbar_examples() {
        let s = std2();
        let sq = HbarScaler::sqrt();
        assert_eq!(sq.apply(4.0, &[1.0, 2.0]).unwrap(), vec![2.0, 4.0]);
        assert_eq!(sq.apply(1.0, &[1.5, -2.0]).unwrap(), vec![1.5, -2.0]);
        assert!(matches!(sq.apply(-1.0, &[1.0, 2.0]), Err(WeylError::HbarDomain(_))));
        assert!(sq.apply(0.0, &[1.0, 2.0]).is_err());

        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let split = HbarScaler::split(&s, c, 1.0).unwrap();
        assert_eq!(split.apply(0.3, &[2.0, 5.0]).unwrap(), vec![0.6, 5.0]);
        assert_eq!(split.apply(-2.0, &[2.0, 5.0]).unwrap(), vec![-4.0, 5.0]);
        assert_eq!(split.apply(1.0, &[2.0, 5.0]).unwrap(), vec![2.0, 5.0]);
    }

    #[test]
    fn split_rejects_non_conjugations() {
        let s = std2();
        let not_involution = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(HbarScaler::split(&s, not_involution, 0.5).is_err());
        // identity squares to one but commutes σ instead of anticommuting
        assert!(HbarScaler::split(&s, DMatrix::identity(2, 2), 0.5).is_err());
    }

    #[test]
    fn scaling_law_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = PreSymplecticSpace::standard(2, 1.0).unwrap();
        let c = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
        let scalers = [
            HbarScaler::sqrt(),
            HbarScaler::split(&s, c.clone(), 1.0).unwrap(),
            HbarScaler::split(&s, c, 0.3).unwrap(),
        ];
        for (idx, sc) in scalers.iter().enumerate() {
            for _ in 0..100 {
                let mut hbar: f64 = rng.random_range(-5.0..5.0);
                if idx == 0 {
                    hbar = hbar.abs();
                }
                if hbar == 0.0 {
                    continue;
                }
                let f: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
                let g: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
                let lhs = s.sigma_eval(&sc.apply(hbar, &f).unwrap(), &sc.apply(hbar, &g).unwrap()).unwrap();
                let rhs = hbar * s.sigma_eval(&f, &g).unwrap();
                let sfg = s.sigma_eval(&f, &g).unwrap().abs();
                assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + hbar.abs()) * sfg);
            }
        }
    }
}
