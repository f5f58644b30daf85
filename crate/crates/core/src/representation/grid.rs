//! Periodic position grid on `[−L, L)^d` with cell-centred nodes and the
//! matching FFT momentum grid.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, WeylError};

/// `N^d` nodes `x_j = −L + (j + ½)Δx`, `Δx = 2L/N`, per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_dim: usize,
    pub points_per_axis: usize,
    pub half_length: f64,
}

impl GridSpec {
    pub fn new(half_dim: usize, points_per_axis: usize, half_length: f64) -> Result<Self> {
        if half_dim > 0 && (points_per_axis < 2 || !points_per_axis.is_power_of_two()) {
            return Err(WeylError::validation(
                "points_per_axis",
                format!("must be a power of two ≥ 2, got {points_per_axis}"),
            ));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(WeylError::validation("half_length", "must be finite and positive"));
        }
        let total = (points_per_axis as f64).powi(half_dim as i32);
        if total > (1u64 << 26) as f64 {
            return Err(WeylError::validation("points_per_axis", "grid exceeds 2^26 nodes"));
        }
        Ok(Self {
            half_dim,
            points_per_axis: if half_dim == 0 { 1 } else { points_per_axis },
            half_length,
        })
    }

    /// `N=1024, L=20` for `d=1`; `N=256, L=12` for `d=2`; `N=32, L=8` above.
    pub fn default_for(half_dim: usize) -> Self {
        let (n, l) = match half_dim {
            0 => (1, 1.0),
            1 => (1024, 20.0),
            2 => (256, 12.0),
            _ => (32, 8.0),
        };
        Self {
            half_dim,
            points_per_axis: n,
            half_length: l,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_axis as f64
    }

    /// `π/Δx`: momenta must satisfy `|u_i| < nyquist`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.half_dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn positions(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points_per_axis)
            .map(|j| -self.half_length + (j as f64 + 0.5) * dx)
            .collect()
    }

    /// Momenta in FFT order: `k_m = mπ/L` for `m < N/2`, `(m − N)π/L` after.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.points_per_axis as i64;
        let dk = std::f64::consts::PI / self.half_length;
        (0..n).map(|m| if m < n / 2 { m } else { m - n } as f64 * dk).collect()
    }

    /// `e^{i u·x}` on every node.
    pub fn plane_wave(&self, u: &[f64]) -> Vec<C64> {
        self.separable(u, &self.positions())
    }

    /// `e^{i a·k}` on the momentum grid.
    pub fn translation_symbol(&self, a: &[f64]) -> Vec<C64> {
        self.separable(a, &self.momenta())
    }

    fn separable(&self, coeffs: &[f64], axis_values: &[f64]) -> Vec<C64> {
        let mut out = vec![C64::new(1.0, 0.0)];
        for &c in coeffs.iter().take(self.half_dim) {
            let factors: Vec<C64> = axis_values.iter().map(|&x| C64::from_polar(1.0, c * x)).collect();
            out = out
                .iter()
                .flat_map(|o| factors.iter().map(move |f| o * f))
                .collect();
        }
        out
    }
}

/// Unnormalised forward / normalised inverse multidimensional FFT.
#[derive(Clone)]
pub struct GridFft {
    spec: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFft").field("spec", &self.spec).finish()
    }
}

impl GridFft {
    pub fn new(spec: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let n = spec.points_per_axis;
        Self {
            spec,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn transform(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.spec.points_per_axis;
        let d = self.spec.half_dim;
        if d == 0 {
            return;
        }
        let total = data.len();
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut line = vec![C64::new(0.0, 0.0); n];
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = stride * n;
            for base in (0..total).step_by(block) {
                for off in 0..stride {
                    for (j, l) in line.iter_mut().enumerate() {
                        *l = data[base + off + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, l) in line.iter().enumerate() {
                        data[base + off + j * stride] = *l;
                    }
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(1, 8, 2.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.positions()[0], -1.75);
        assert_eq!(g.positions()[7], 1.75);
        let k = g.momenta();
        assert_eq!(k[1], std::f64::consts::PI / 2.0);
        assert_eq!(k[4], -2.0 * std::f64::consts::PI);
        assert!(GridSpec::new(1, 12, 1.0).is_err());
        assert!(GridSpec::new(1, 8, 0.0).is_err());
        assert_eq!(GridSpec::new(0, 8, 1.0).unwrap().len(), 1);
    }

    #[test]
    fn fft_round_trip_and_plane_waves() {
        let g = GridSpec::new(2, 8, 3.0).unwrap();
        let fft = GridFft::new(g);
        // a plane wave on the dual lattice lands in a single bin
        let k = g.momenta();
        let mut w = g.plane_wave(&[k[2], k[7]]);
        let orig = w.clone();
        fft.forward(&mut w);
        let big: Vec<usize> = (0..w.len()).filter(|&i| w[i].norm() > 1e-9).collect();
        assert_eq!(big, vec![2 * 8 + 7]);
        fft.inverse(&mut w);
        for (a, b) in w.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn translation_symbol_shifts_band_limited_data() {
        let g = GridSpec::new(1, 64, 4.0).unwrap();
        let fft = GridFft::new(g);
        let k = g.momenta();
        let u = k[3];
        let mut w = g.plane_wave(&[u]);
        fft.forward(&mut w);
        let a = 0.37;
        for (z, s) in w.iter_mut().zip(g.translation_symbol(&[a])) {
            *z *= s;
        }
        fft.inverse(&mut w);
        for (z, x) in w.iter().zip(g.positions()) {
            assert!((z - C64::from_polar(1.0, u * (x + a))).norm() < 1e-12);
        }
    }
}
