//! Finite complex measures on the lattice-truncated space and the
//! Banach-*-algebra operations: involution, twisted convolution `⋆_ħ`,
//! total variation, moment norms, the Poisson bracket `{·,·}₀` and the scaled
//! commutators `{·,·}_ħ`.
//!
//! Point masses sit on the integer lattice `Z^D` scaled by the space's
//! `lattice_step`, so sums of support points are exact and products close
//! without any merge radius. Absolutely continuous parts are stored as Riemann
//! samples on a (possibly coarser) sub-lattice.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{check_len, Result, WeylError};
use crate::space::{PreSymplecticSpace, SeminormSpec};

pub type Coord = Vec<i64>;

/// Point masses `Σ z_k δ(f_k)` keyed by integer lattice coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscreteMeasure {
    atoms: BTreeMap<Coord, C64>,
}

impl DiscreteMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `z` to the weight at `coord`, removing the entry if it cancels
    /// exactly.
    pub fn accumulate(&mut self, coord: Coord, z: C64) {
        use std::collections::btree_map::Entry;
        match self.atoms.entry(coord) {
            Entry::Vacant(e) => {
                if z != C64::new(0.0, 0.0) {
                    e.insert(z);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += z;
                if *e.get() == C64::new(0.0, 0.0) {
                    e.remove();
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Coord, &C64)> {
        self.atoms.iter()
    }

    pub fn get(&self, coord: &[i64]) -> Option<C64> {
        self.atoms.get(coord).copied()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn map_weights(&self, mut f: impl FnMut(&Coord, C64) -> C64) -> Self {
        let mut out = Self::new();
        for (c, &z) in &self.atoms {
            out.accumulate(c.clone(), f(c, z));
        }
        out
    }
}

/// Riemann samples of an absolutely continuous density on the cells
/// `lo + j ⊙ stride`, `0 ≤ j < shape`, row-major with the last axis fastest.
/// Each cell has volume `Π stride_i · lattice_step_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    lo: Vec<i64>,
    shape: Vec<usize>,
    stride: Vec<i64>,
    samples: Vec<C64>,
}

impl GridDensity {
    pub fn new(lo: Vec<i64>, shape: Vec<usize>, stride: Vec<i64>, samples: Vec<C64>) -> Result<Self> {
        check_len(lo.len(), shape.len())?;
        check_len(lo.len(), stride.len())?;
        if stride.iter().any(|&s| s <= 0) {
            return Err(WeylError::validation("density.stride", "entries must be positive"));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(WeylError::validation("density.box", "every axis needs at least one cell"));
        }
        let count: usize = shape.iter().product();
        if samples.len() != count {
            return Err(WeylError::validation(
                "density.samples",
                format!("expected {count} samples, got {}", samples.len()),
            ));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(WeylError::validation("density.samples", "non-finite sample"));
        }
        Ok(Self {
            lo,
            shape,
            stride,
            samples,
        })
    }

    /// Builds a density from inclusive per-axis bounds `[lo, hi]`.
    pub fn from_box(bounds: &[(i64, i64)], stride: Vec<i64>, samples: Vec<C64>) -> Result<Self> {
        check_len(bounds.len(), stride.len())?;
        let mut shape = Vec::with_capacity(bounds.len());
        for (&(lo, hi), &s) in bounds.iter().zip(&stride) {
            if hi < lo || s <= 0 || (hi - lo) % s != 0 {
                return Err(WeylError::validation(
                    "density.box",
                    format!("[{lo}, {hi}] is not a whole number of stride-{s} cells"),
                ));
            }
            shape.push(((hi - lo) / s) as usize + 1);
        }
        Self::new(bounds.iter().map(|b| b.0).collect(), shape, stride, samples)
    }

    fn zeros(lo: Vec<i64>, hi: &[i64], stride: Vec<i64>) -> Self {
        let shape: Vec<usize> = lo
            .iter()
            .zip(hi)
            .zip(&stride)
            .map(|((&l, &h), &s)| ((h - l) / s) as usize + 1)
            .collect();
        let count = shape.iter().product();
        Self {
            lo,
            shape,
            stride,
            samples: vec![C64::new(0.0, 0.0); count],
        }
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> Vec<i64> {
        self.lo
            .iter()
            .zip(&self.shape)
            .zip(&self.stride)
            .map(|((&l, &n), &s)| l + (n as i64 - 1) * s)
            .collect()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn stride(&self) -> &[i64] {
        &self.stride
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn coord_of(&self, mut idx: usize) -> Coord {
        let mut c = vec![0; self.lo.len()];
        for a in (0..self.lo.len()).rev() {
            let j = idx % self.shape[a];
            idx /= self.shape[a];
            c[a] = self.lo[a] + j as i64 * self.stride[a];
        }
        c
    }

    fn index_of(&self, coord: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for a in 0..self.lo.len() {
            let off = coord[a] - self.lo[a];
            if off < 0 || off % self.stride[a] != 0 {
                return None;
            }
            let j = (off / self.stride[a]) as usize;
            if j >= self.shape[a] {
                return None;
            }
            idx = idx * self.shape[a] + j;
        }
        Some(idx)
    }

    /// `(cell coordinate, density value)` in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (Coord, C64)> + '_ {
        self.samples
            .iter()
            .enumerate()
            .map(move |(i, &z)| (self.coord_of(i), z))
    }

    fn same_lattice(&self, other: &Self) -> bool {
        self.stride == other.stride
            && self
                .lo
                .iter()
                .zip(&other.lo)
                .zip(&self.stride)
                .all(|((a, b), s)| (a - b).rem_euclid(*s) == 0)
    }

    fn admits_shift(&self, coord: &[i64]) -> bool {
        coord.iter().zip(&self.stride).all(|(c, s)| c.rem_euclid(*s) == 0)
    }

    fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

/// Collects shifted boxes on a common sub-lattice, then allocates the union.
struct DensityBuilder {
    stride: Vec<i64>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl DensityBuilder {
    fn new(stride: &[i64], lo: Vec<i64>, hi: Vec<i64>) -> Self {
        Self {
            stride: stride.to_vec(),
            lo,
            hi,
        }
    }

    fn include(&mut self, stride: &[i64], lo: &[i64], hi: &[i64]) -> Result<()> {
        if stride != self.stride.as_slice()
            || lo
                .iter()
                .zip(&self.lo)
                .zip(stride)
                .any(|((a, b), s)| (a - b).rem_euclid(*s) != 0)
        {
            return Err(WeylError::GridMismatch(
                "density parts lie on different sub-lattices".into(),
            ));
        }
        for a in 0..lo.len() {
            self.lo[a] = self.lo[a].min(lo[a]);
            self.hi[a] = self.hi[a].max(hi[a]);
        }
        Ok(())
    }

    fn build(self) -> GridDensity {
        GridDensity::zeros(self.lo, &self.hi, self.stride)
    }
}

fn add_coords(a: &[i64], b: &[i64]) -> Coord {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// A finite complex measure on `E_α`: a discrete part plus an optional
/// gridded density part, both on the same space.
#[derive(Debug, Clone)]
pub struct Measure {
    space: Arc<PreSymplecticSpace>,
    discrete: DiscreteMeasure,
    density: Option<GridDensity>,
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.discrete == other.discrete && self.density == other.density
    }
}

fn same_space(a: &Arc<PreSymplecticSpace>, b: &Arc<PreSymplecticSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Measure {
    pub fn zero(space: Arc<PreSymplecticSpace>) -> Self {
        Self {
            space,
            discrete: DiscreteMeasure::new(),
            density: None,
        }
    }

    /// `δ(f)` at the lattice point `coord`.
    pub fn delta(space: Arc<PreSymplecticSpace>, coord: &[i64]) -> Result<Self> {
        Self::from_atoms(space, [(coord.to_vec(), C64::new(1.0, 0.0))])
    }

    pub fn from_atoms(
        space: Arc<PreSymplecticSpace>,
        atoms: impl IntoIterator<Item = (Coord, C64)>,
    ) -> Result<Self> {
        let mut discrete = DiscreteMeasure::new();
        for (c, z) in atoms {
            check_len(space.dim(), c.len())?;
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(WeylError::validation("weight", format!("non-finite weight at {c:?}")));
            }
            discrete.accumulate(c, z);
        }
        Ok(Self {
            space,
            discrete,
            density: None,
        })
    }

    pub fn from_density(space: Arc<PreSymplecticSpace>, density: GridDensity) -> Result<Self> {
        check_len(space.dim(), density.lo.len())?;
        Ok(Self {
            space,
            discrete: DiscreteMeasure::new(),
            density: Some(density),
        })
    }

    pub fn with_density(mut self, density: GridDensity) -> Result<Self> {
        check_len(self.space.dim(), density.lo.len())?;
        self.density = Some(density);
        Ok(self)
    }

    pub fn space(&self) -> &Arc<PreSymplecticSpace> {
        &self.space
    }

    pub fn discrete(&self) -> &DiscreteMeasure {
        &self.discrete
    }

    pub fn density(&self) -> Option<&GridDensity> {
        self.density.as_ref()
    }

    pub fn is_discrete(&self) -> bool {
        self.density.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.discrete.is_empty() && self.density.as_ref().is_none_or(|d| d.is_zero())
    }

    pub fn cell_volume(&self) -> f64 {
        self.density
            .as_ref()
            .map_or(0.0, |d| self.space.cell_volume(&d.stride))
    }

    /// Every point mass of the measure, with density cells contributing
    /// `sample · cell_volume` at their centres: `(point, weight)`.
    pub fn quadrature(&self) -> Vec<(Vec<f64>, C64)> {
        let mut out: Vec<(Vec<f64>, C64)> = self
            .discrete
            .iter()
            .map(|(c, &z)| (self.space.point(c), z))
            .collect();
        if let Some(d) = &self.density {
            let cv = self.space.cell_volume(&d.stride);
            out.extend(d.cells().map(|(c, z)| (self.space.point(&c), z * cv)));
        }
        out
    }

    /// Same as [`Measure::quadrature`] keyed by lattice coordinates.
    pub fn lattice_quadrature(&self) -> Vec<(Coord, C64)> {
        let mut out: Vec<(Coord, C64)> = self.discrete.iter().map(|(c, &z)| (c.clone(), z)).collect();
        if let Some(d) = &self.density {
            let cv = self.space.cell_volume(&d.stride);
            out.extend(d.cells().map(|(c, z)| (c, z * cv)));
        }
        out
    }

    /// `μ ≥ 0`: every weight and sample is real and non-negative.
    pub fn is_positive(&self) -> bool {
        let ok = |z: &C64| z.im == 0.0 && z.re >= 0.0;
        self.discrete.iter().all(|(_, z)| ok(z)) && self.density.as_ref().is_none_or(|d| d.samples.iter().all(ok))
    }

    /// `μ(E)`, summed like [`Measure::norm1`] so that `μ(E) = ‖μ‖₁` holds
    /// exactly for positive `μ`.
    pub fn total_mass(&self) -> C64 {
        let part = |it: &mut dyn Iterator<Item = &C64>| {
            let zs: Vec<C64> = it.copied().collect();
            C64::new(exact_sum(zs.iter().map(|z| z.re)), exact_sum(zs.iter().map(|z| z.im)))
        };
        let atoms = part(&mut self.discrete.iter().map(|(_, z)| z));
        let dens = self.density.as_ref().map_or(C64::new(0.0, 0.0), |d| {
            part(&mut d.samples.iter()) * self.space.cell_volume(&d.stride)
        });
        atoms + dens
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(WeylError::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut discrete = self.discrete.clone();
        for (c, &z) in other.discrete.iter() {
            discrete.accumulate(c.clone(), z);
        }
        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => {
                if !a.same_lattice(b) {
                    return Err(WeylError::GridMismatch(
                        "cannot add densities on different sub-lattices".into(),
                    ));
                }
                let mut builder = DensityBuilder::new(&a.stride, a.lo.clone(), a.hi());
                builder.include(&b.stride, &b.lo, &b.hi())?;
                let mut out = builder.build();
                for part in [a, b] {
                    for (c, z) in part.cells() {
                        let i = out.index_of(&c).expect("cell inside union box");
                        out.samples[i] += z;
                    }
                }
                Some(out)
            }
        };
        Ok(Self {
            space: self.space.clone(),
            discrete,
            density,
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            space: self.space.clone(),
            discrete: self.discrete.map_weights(|_, w| z * w),
            density: self.density.as_ref().map(|d| GridDensity {
                samples: d.samples.iter().map(|w| z * w).collect(),
                ..d.clone()
            }),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Drops atoms with `|z| < eps`; `eps = 0` removes exact zeros only.
    /// Density samples are left untouched.
    pub fn prune(&self, eps: f64) -> Self {
        let mut discrete = DiscreteMeasure::new();
        for (c, &z) in self.discrete.iter() {
            if z.norm() >= eps && z != C64::new(0.0, 0.0) {
                discrete.atoms.insert(c.clone(), z);
            }
        }
        Self {
            space: self.space.clone(),
            discrete,
            density: self.density.clone(),
        }
    }

    /// `μ*(Λ) = conj(μ(−Λ))`.
    pub fn involution(&self) -> Self {
        let mut discrete = DiscreteMeasure::new();
        for (c, z) in self.discrete.iter() {
            discrete.accumulate(c.iter().map(|x| -x).collect(), z.conj());
        }
        let density = self.density.as_ref().map(|d| {
            let hi = d.hi();
            let lo: Vec<i64> = hi.iter().map(|h| -h).collect();
            // reflection reverses every axis, i.e. the whole row-major order
            let samples = d.samples.iter().rev().map(|z| z.conj()).collect();
            GridDensity {
                lo,
                shape: d.shape.clone(),
                stride: d.stride.clone(),
                samples,
            }
        });
        Self {
            space: self.space.clone(),
            discrete,
            density,
        }
    }

    /// Total variation `‖μ‖₁`; the density part is the Riemann sum
    /// `Σ |sample| · cell_volume`. Sums are correctly rounded, so the result
    /// depends only on the multiset of weights.
    pub fn norm1(&self) -> f64 {
        let atoms = exact_sum(self.discrete.iter().map(|(_, z)| z.norm()));
        let dens = self.density.as_ref().map_or(0.0, |d| {
            exact_sum(d.samples.iter().map(|z| z.norm())) * self.space.cell_volume(&d.stride)
        });
        atoms + dens
    }

    /// `‖μ − ν‖₁`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm1())
    }

    /// `dμ_κ^m(f) = κ(f)^m dμ(f)`.
    pub fn moment_measure(&self, spec: &SeminormSpec, m: u32) -> Result<Self> {
        check_len(self.space.dim(), spec.dim())?;
        if m == 0 {
            return Ok(self.clone());
        }
        let weight = |c: &[i64]| spec.eval_unchecked(&self.space.point(c)).powi(m as i32);
        let discrete = self.discrete.map_weights(|c, z| z * weight(c));
        let density = self.density.as_ref().map(|d| GridDensity {
            samples: d.cells().map(|(c, z)| z * weight(&c)).collect(),
            ..d.clone()
        });
        Ok(Self {
            space: self.space.clone(),
            discrete,
            density,
        })
    }

    /// `‖μ‖_κ^n = Σ_{m=0}^n ‖μ_κ^m‖₁` together with its summands and `c_n`.
    pub fn moment_norm(&self, spec: &SeminormSpec, n: u32) -> Result<MomentProfile> {
        let norms = (0..=n)
            .map(|m| self.moment_measure(spec, m).map(|mm| mm.norm1()))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentProfile {
            n,
            total: norms.iter().sum(),
            norms,
            c_n: moment_constant(n),
        })
    }

    /// Bilinear "convolution" `∫∫ K(f,g) 1_Λ(f+g) dμ(f) dν(g)` for an
    /// arbitrary pair kernel. Summation order per output cell is fixed by the
    /// iteration order of the inputs.
    pub(crate) fn convolve(&self, other: &Self, kernel: impl Fn(&[f64], &[f64]) -> C64) -> Result<Self> {
        self.check_space(other)?;
        let space = &self.space;
        let a_pts: Vec<(Coord, Vec<f64>, C64)> = self
            .discrete
            .iter()
            .map(|(c, &z)| (c.clone(), space.point(c), z))
            .collect();
        let b_pts: Vec<(Coord, Vec<f64>, C64)> = other
            .discrete
            .iter()
            .map(|(c, &z)| (c.clone(), space.point(c), z))
            .collect();

        let mut discrete = DiscreteMeasure::new();
        for (ca, pa, za) in &a_pts {
            for (cb, pb, zb) in &b_pts {
                discrete.accumulate(add_coords(ca, cb), za * zb * kernel(pa, pb));
            }
        }

        // bounding box of every density piece
        let mut builder: Option<DensityBuilder> = None;
        let mut include = |stride: &[i64], lo: Vec<i64>, hi: Vec<i64>| -> Result<()> {
            match builder.as_mut() {
                None => {
                    builder = Some(DensityBuilder::new(stride, lo, hi));
                    Ok(())
                }
                Some(b) => b.include(stride, &lo, &hi),
            }
        };
        if let Some(da) = &self.density {
            for (cb, _, _) in &b_pts {
                if !da.admits_shift(cb) {
                    return Err(WeylError::OffLattice {
                        coord: cb.clone(),
                        stride: da.stride.clone(),
                    });
                }
                include(&da.stride, add_coords(&da.lo, cb), add_coords(&da.hi(), cb))?;
            }
        }
        if let Some(db) = &other.density {
            for (ca, _, _) in &a_pts {
                if !db.admits_shift(ca) {
                    return Err(WeylError::OffLattice {
                        coord: ca.clone(),
                        stride: db.stride.clone(),
                    });
                }
                include(&db.stride, add_coords(&db.lo, ca), add_coords(&db.hi(), ca))?;
            }
        }
        if let (Some(da), Some(db)) = (&self.density, &other.density) {
            if da.stride != db.stride {
                return Err(WeylError::GridMismatch(format!(
                    "density strides differ: {:?} vs {:?}",
                    da.stride, db.stride
                )));
            }
            include(&da.stride, add_coords(&da.lo, &db.lo), add_coords(&da.hi(), &db.hi()))?;
        }

        let density = match builder {
            None => None,
            Some(b) => {
                let mut out = b.build();
                if let Some(da) = &self.density {
                    let cells: Vec<(Coord, Vec<f64>, C64)> =
                        da.cells().map(|(c, z)| (space.point(&c), c, z)).map(|(p, c, z)| (c, p, z)).collect();
                    for (cb, pb, zb) in &b_pts {
                        for (ca, pa, za) in &cells {
                            let i = out.index_of(&add_coords(ca, cb)).expect("inside union");
                            out.samples[i] += za * zb * kernel(pa, pb);
                        }
                    }
                }
                if let Some(db) = &other.density {
                    let cells: Vec<(Coord, Vec<f64>, C64)> =
                        db.cells().map(|(c, z)| (space.point(&c), c, z)).map(|(p, c, z)| (c, p, z)).collect();
                    for (ca, pa, za) in &a_pts {
                        for (cb, pb, zb) in &cells {
                            let i = out.index_of(&add_coords(ca, cb)).expect("inside union");
                            out.samples[i] += za * zb * kernel(pa, pb);
                        }
                    }
                }
                if let (Some(da), Some(db)) = (&self.density, &other.density) {
                    let cv = space.cell_volume(&da.stride);
                    let bcells: Vec<(Coord, Vec<f64>, C64)> = db.cells().map(|(c, z)| (c.clone(), space.point(&c), z)).collect();
                    for (ca, za) in da.cells() {
                        let pa = space.point(&ca);
                        for (cb, pb, zb) in &bcells {
                            let i = out.index_of(&add_coords(&ca, cb)).expect("inside union");
                            out.samples[i] += za * zb * kernel(&pa, pb) * cv;
                        }
                    }
                }
                Some(out)
            }
        };
        Ok(Self {
            space: self.space.clone(),
            discrete,
            density,
        })
    }

    /// Twisted convolution `μ ⋆_ħ ν` with multiplier `e^{−(i/2)ħσ(f,g)}`.
    pub fn star(&self, hbar: f64, other: &Self) -> Result<Self> {
        let space = self.space.clone();
        self.convolve(other, move |f, g| {
            C64::from_polar(1.0, -0.5 * hbar * space.sigma_unchecked(f, g))
        })
    }

    /// `{μ, ν}₀(Λ) = ∫∫ σ(f,g) 1_Λ(f+g) dμ(f) dν(g)`.
    ///
    /// Gridded measures always have finite moments of every order, so the only
    /// failure is a non-finite weight or sample.
    pub fn poisson_bracket0(&self, other: &Self) -> Result<Self> {
        for m in [self, other] {
            if !m.norm1().is_finite() {
                return Err(WeylError::MomentFailure("first moment is not finite".into()));
            }
        }
        let space = self.space.clone();
        self.convolve(other, move |f, g| C64::new(space.sigma_unchecked(f, g), 0.0))
    }

    /// `{μ, ν}_ħ = (i/ħ)(μ ⋆_ħ ν − ν ⋆_ħ μ)` for `ħ ≠ 0`.
    pub fn scaled_commutator(&self, hbar: f64, other: &Self) -> Result<Self> {
        if hbar == 0.0 || !hbar.is_finite() {
            return Err(WeylError::HbarDomain(
                "the scaled commutator needs ħ ≠ 0; use poisson_bracket0 at ħ = 0".into(),
            ));
        }
        // both products range over the same pairs, so the commutator is one
        // convolution with kernel (i/ħ)(e^{−iħσ/2} − e^{iħσ/2}) = (2/ħ) sin(ħσ/2)
        let space = self.space.clone();
        self.convolve(other, move |f, g| {
            C64::new(2.0 / hbar * (0.5 * hbar * space.sigma_unchecked(f, g)).sin(), 0.0)
        })
    }
}

/// Moment norms `‖μ_κ^m‖₁` for `m = 0..=n`, their sum `‖μ‖_κ^n` and the
/// constant `c_n = max_k binom(n, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProfile {
    pub n: u32,
    pub norms: Vec<f64>,
    pub total: f64,
    pub c_n: f64,
}

/// Correctly rounded floating-point sum (Shewchuk's partials with the
/// final half-way correction), independent of the input order.
pub(crate) fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    let mut naive = 0.0;
    for mut x in values {
        naive += x;
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    if !naive.is_finite() {
        return naive;
    }
    let Some(mut n) = partials.len().checked_sub(1) else {
        return 0.0;
    };
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// `c_n = sup{binom(n, k) : k = 0..n} = binom(n, ⌊n/2⌋)`.
pub fn moment_constant(n: u32) -> f64 {
    binomial(n, n / 2)
}
