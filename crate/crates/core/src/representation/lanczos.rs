//! Largest eigenvalue of a Hermitian positive semi-definite operator by a
//! thick-restarted Krylov–Rayleigh–Ritz iteration: the subspace grows by the
//! orthonormalised image of its newest vector, and on restart only the
//! leading Ritz vectors are kept.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand_distr::{Distribution, StandardNormal};

use crate::sampling::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOutcome {
    pub eigenvalue: f64,
    pub matvecs: usize,
    pub converged: bool,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormalises `w` against `basis` (two passes); `None` if nothing is
/// left.
fn orthonormalise(mut w: Vec<C64>, basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    let before = norm(&w);
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, &w);
            w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
        }
    }
    let n = norm(&w);
    if n <= 1e-12 * before || n == 0.0 {
        return None;
    }
    w.iter_mut().for_each(|z| *z /= n);
    Some(w)
}

fn combine(vectors: &[Vec<C64>], coeffs: impl Iterator<Item = C64>) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); vectors[0].len()];
    for (v, c) in vectors.iter().zip(coeffs) {
        out.iter_mut().zip(v).for_each(|(x, y)| *x += c * y);
    }
    out
}

/// Dimensions up to this size are solved densely: `dim` products assemble
/// the matrix and a Hermitian eigensolver gives the spectrum exactly.
pub const DENSE_LIMIT: usize = 1024;

fn dense_largest(dim: usize, apply: impl Fn(&[C64]) -> Vec<C64>) -> LanczosOutcome {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let mut e = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        e[j] = C64::new(1.0, 0.0);
        let col = apply(&e);
        e[j] = C64::new(0.0, 0.0);
        m.column_mut(j).iter_mut().zip(col).for_each(|(a, b)| *a = b);
    }
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let top = m.symmetric_eigenvalues().max().max(0.0);
    LanczosOutcome {
        eigenvalue: top,
        matvecs: dim,
        converged: true,
    }
}

/// Stops when the residual `‖A x − θ x‖` of the leading Ritz pair is at most
/// `tol · θ`, or after `max_matvecs` products. The returned value is a Ritz
/// value, hence never above the true maximum up to rounding.
pub fn largest_eigenvalue(
    dim: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    tol: f64,
    max_matvecs: usize,
    seed: u64,
) -> LanczosOutcome {
    if dim <= DENSE_LIMIT {
        return dense_largest(dim, apply);
    }
    let (max_basis, keep) = if dim <= 16_384 { (64, 16) } else { (32, 8) };
    let max_basis = max_basis.min(dim);
    let keep = keep.min(max_basis.saturating_sub(1)).max(1);

    let mut r = rng(seed);
    let start: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(&mut r), StandardNormal.sample(&mut r)))
        .collect();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut images: Vec<Vec<C64>> = Vec::new();
    let mut next = orthonormalise(start, &[]);
    let mut matvecs = 0;
    let mut best = 0.0f64;

    loop {
        while let Some(v) = next.take() {
            let w = apply(&v);
            matvecs += 1;
            basis.push(v);
            next = orthonormalise(w.clone(), &basis);
            images.push(w);
            if basis.len() >= max_basis || matvecs >= max_matvecs {
                break;
            }
        }

        let k = basis.len();
        let h = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let theta = eig.eigenvalues[order[0]];
        best = best.max(theta);

        let y0 = eig.eigenvectors.column(order[0]);
        let x = combine(&basis, y0.iter().copied());
        let ax = combine(&images, y0.iter().copied());
        let res: Vec<C64> = ax.iter().zip(&x).map(|(a, b)| a - b * theta).collect();
        let residual = norm(&res);

        if theta <= 0.0 {
            return LanczosOutcome {
                eigenvalue: 0.0,
                matvecs,
                converged: true,
            };
        }
        // an exhausted Krylov space is invariant, so its Ritz values are exact
        if residual <= tol * theta || next.is_none() {
            return LanczosOutcome {
                eigenvalue: best,
                matvecs,
                converged: true,
            };
        }
        if matvecs >= max_matvecs {
            return LanczosOutcome {
                eigenvalue: best,
                matvecs,
                converged: false,
            };
        }

        if k >= max_basis {
            let kept: Vec<usize> = order.iter().copied().take(keep).collect();
            let new_basis: Vec<Vec<C64>> = kept
                .iter()
                .map(|&i| combine(&basis, eig.eigenvectors.column(i).iter().copied()))
                .collect();
            let new_images: Vec<Vec<C64>> = kept
                .iter()
                .map(|&i| combine(&images, eig.eigenvectors.column(i).iter().copied()))
                .collect();
            basis = new_basis;
            images = new_images;
            next = orthonormalise(res, &basis);
            if next.is_none() {
                return LanczosOutcome {
                    eigenvalue: best,
                    matvecs,
                    converged: true,
                };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum() {
        let diag: Vec<f64> = (0..1500).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
        let max = diag.iter().cloned().fold(f64::MIN, f64::max);
        let out = largest_eigenvalue(
            1500,
            |x| x.iter().zip(&diag).map(|(z, d)| z * d).collect(),
            1e-8,
            5000,
            1,
        );
        assert!(out.converged);
        assert!((out.eigenvalue - max).abs() < 1e-10 * max, "{} vs {max}", out.eigenvalue);
        assert!(out.eigenvalue <= max * (1.0 + 1e-14));
    }

    #[test]
    fn dense_path_is_exact() {
        let n = 40;
        let a = DMatrix::<C64>::from_fn(n, n, |i, j| C64::new(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64));
        let ata = a.adjoint() * &a;
        let want = a.singular_values().max().powi(2);
        let out = largest_eigenvalue(n, |x| (&ata * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec(), 1e-8, 5000, 3);
        assert!(out.converged);
        assert!((out.eigenvalue - want).abs() < 1e-10 * want);
    }

    #[test]
    fn zero_operator() {
        let out = largest_eigenvalue(10, |x| vec![C64::new(0.0, 0.0); x.len()], 1e-6, 100, 1);
        assert_eq!(out.eigenvalue, 0.0);
        assert!(out.converged);
    }

    #[test]
    fn tiny_dimension() {
        let out = largest_eigenvalue(1, |x| vec![x[0] * 3.0], 1e-6, 100, 1);
        assert!((out.eigenvalue - 3.0).abs() < 1e-14);
    }
}
