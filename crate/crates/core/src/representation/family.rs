//! Well-matched families `Π_ħ = Π₁ ∘ β_ħ`: push a measure through `T_ħ`,
//! then represent at `ħ = 1`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{build_from_points, operator_norm, NormReport, RepConfig, SchrodingerRep};
use crate::error::{Result, WeylError};
use crate::measure::{Coord, Measure};
use crate::space::{DarbouxDecomposition, HbarScaler, PreSymplecticSpace};

/// The image of a measure under `T_ħ`. Atoms keep their lattice keys; the
/// actual support points `T_ħ f` are off-lattice in general and are never
/// snapped.
#[derive(Debug, Clone, PartialEq)]
pub struct PushedMeasure {
    inner: Measure,
    map: DMatrix<f64>,
}

impl PushedMeasure {
    pub fn new(mu: &Measure, map: DMatrix<f64>) -> Result<Self> {
        let d = mu.space().dim();
        if map.nrows() != d || map.ncols() != d {
            return Err(WeylError::DimensionMismatch {
                expected: d,
                got: map.nrows(),
            });
        }
        Ok(Self {
            inner: mu.clone(),
            map,
        })
    }

    pub fn map(&self) -> &DMatrix<f64> {
        &self.map
    }

    /// The measure before pushing, i.e. the lattice keys and weights.
    pub fn source(&self) -> &Measure {
        &self.inner
    }

    fn push(&self, p: &[f64]) -> Vec<f64> {
        (&self.map * DVector::from_column_slice(p)).as_slice().to_vec()
    }

    /// `(lattice key, T_ħ f, weight)` for every atom and density cell.
    pub fn atoms(&self) -> Vec<(Coord, Vec<f64>, C64)> {
        self.inner
            .lattice_quadrature()
            .into_iter()
            .map(|(c, z)| {
                let p = self.push(&self.inner.space().point(&c));
                (c, p, z)
            })
            .collect()
    }

    pub fn points(&self) -> Vec<(Vec<f64>, C64)> {
        self.atoms().into_iter().map(|(_, p, z)| (p, z)).collect()
    }

    fn check_map(&self, other: &Self) -> Result<()> {
        if self.map != other.map {
            return Err(WeylError::validation("pushforward", "measures were pushed by different maps"));
        }
        Ok(())
    }

    /// `⋆₁` on pushed measures: multiplier `e^{−(i/2)σ(T f, T g)}`.
    pub fn star_one(&self, other: &Self) -> Result<Self> {
        self.check_map(other)?;
        let space = self.inner.space().clone();
        let map = self.map.clone();
        let inner = self.inner.convolve(&other.inner, move |f, g| {
            let tf = &map * DVector::from_column_slice(f);
            let tg = &map * DVector::from_column_slice(g);
            C64::from_polar(1.0, -0.5 * space.sigma_unchecked(tf.as_slice(), tg.as_slice()))
        })?;
        Ok(Self {
            inner,
            map: self.map.clone(),
        })
    }

    /// Total variation of the difference, matched by lattice key.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_map(other)?;
        self.inner.distance(&other.inner)
    }
}

/// `T_ħ` together with the `ħ = 1` representation settings.
#[derive(Debug, Clone)]
pub struct QuantizationFamily {
    space: Arc<PreSymplecticSpace>,
    decomposition: DarbouxDecomposition,
    scaler: HbarScaler,
    config: RepConfig,
    characters: Vec<Vec<f64>>,
}

impl QuantizationFamily {
    pub fn new(space: Arc<PreSymplecticSpace>, scaler: HbarScaler, config: RepConfig) -> Self {
        let decomposition = space.darboux_decompose();
        let characters = config.characters.sample(&space, decomposition.kernel_dim);
        Self {
            space,
            decomposition,
            scaler,
            config,
            characters,
        }
    }

    pub fn scaler(&self) -> &HbarScaler {
        &self.scaler
    }

    pub fn config(&self) -> &RepConfig {
        &self.config
    }

    pub fn pushforward(&self, mu: &Measure, hbar: f64) -> Result<PushedMeasure> {
        PushedMeasure::new(mu, self.scaler.matrix(self.space.dim(), hbar)?)
    }

    /// The `ħ = 1` representation whose characters are transported by the
    /// inverse transpose of `T_ħ` restricted to `ker σ`, so that `Π₁ ∘ β_ħ`
    /// sees the same characters as `Π_ħ`.
    pub fn base_rep(&self, hbar: f64) -> Result<SchrodingerRep> {
        let dim = self.space.dim();
        let t = self.scaler.matrix(dim, hbar)?;
        let kd = self.decomposition.kernel_dim;
        let characters = if kd == 0 {
            self.characters.clone()
        } else {
            let off = dim - kd;
            let block = (&self.decomposition.inverse * &t * &self.decomposition.basis)
                .view((off, off), (kd, kd))
                .into_owned();
            let inv_t = block
                .try_inverse()
                .ok_or_else(|| WeylError::HbarDomain("T_ħ is singular on ker σ".into()))?
                .transpose();
            self.characters
                .iter()
                .map(|f| (&inv_t * DVector::from_column_slice(f)).as_slice().to_vec())
                .collect()
        };
        SchrodingerRep::with_characters(
            self.space.clone(),
            self.decomposition.clone(),
            1.0,
            self.config.grid,
            characters,
        )
    }

    /// `‖Π₁(β_ħ μ)‖`.
    pub fn family_norm(&self, hbar: f64, mu: &Measure, tol: f64) -> Result<NormReport> {
        let pushed = self.pushforward(mu, hbar)?;
        let rep = Arc::new(self.base_rep(hbar)?);
        operator_norm(&build_from_points(&rep, pushed.points())?, tol)
    }
}
