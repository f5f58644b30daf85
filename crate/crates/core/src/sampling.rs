//! Deterministic sampling helpers shared by the sup-norm search and the
//! character families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generalized golden ratio: the unique positive root of `x^{d+1} = x + 1`.
fn plastic_root(dim: usize) -> f64 {
    let mut x = 2.0f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (dim as f64 + 1.0));
    }
    x
}

/// Kronecker (R_d) low-discrepancy sequence on `[0,1)^dim` with a
/// seeded Cranley–Patterson shift.
pub fn kronecker_unit(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let g = plastic_root(dim);
    let alpha: Vec<f64> = (1..=dim).map(|i| g.powi(-(i as i32))).collect();
    let mut r = rng(seed);
    let shift: Vec<f64> = (0..dim).map(|_| r.random::<f64>()).collect();
    (1..=count)
        .map(|n| {
            alpha
                .iter()
                .zip(&shift)
                .map(|(a, s)| (s + n as f64 * a).fract())
                .collect()
        })
        .collect()
}

/// Quasi-random points in the closed ball of radius `radius`, obtained by
/// radially squeezing the cube `[−1,1]^dim` onto the unit ball.
pub fn quasi_random_ball(dim: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    kronecker_unit(dim, count, seed)
        .into_iter()
        .map(|p| {
            let c: Vec<f64> = p.iter().map(|x| 2.0 * x - 1.0).collect();
            let inf = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let two = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let squeeze = if two > 0.0 { inf / two } else { 0.0 };
            c.iter().map(|x| x * squeeze * radius).collect()
        })
        .collect()
}

/// Quasi-random points in the box `[−half_width, half_width]^dim`.
pub fn quasi_random_box(dim: usize, count: usize, half_width: &[f64], seed: u64) -> Vec<Vec<f64>> {
    kronecker_unit(dim, count, seed)
        .into_iter()
        .map(|p| {
            p.iter()
                .zip(half_width)
                .map(|(x, w)| (2.0 * x - 1.0) * w)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_points_stay_inside() {
        for dim in 1..6 {
            for p in quasi_random_ball(dim, 500, 3.0, 42) {
                let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(r <= 3.0 + 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        assert_eq!(kronecker_unit(3, 10, 7), kronecker_unit(3, 10, 7));
        assert_ne!(kronecker_unit(3, 10, 7), kronecker_unit(3, 10, 8));
    }

    #[test]
    fn one_dimensional_sequence_fills_interval() {
        let mut xs: Vec<f64> = kronecker_unit(1, 256, 42).into_iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        let mut gap = xs[0] + 1.0 - xs[255];
        for w in xs.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        assert!(gap < 3.0 / 256.0, "max gap {gap}");
    }
}
