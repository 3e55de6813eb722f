//! Quadrature on the reference triangle and on the unit interval.

use super::AssemblyError;
use crate::mesh::Point;

pub const MAX_QUADRATURE_DEGREE: usize = 20;

/// Points in reference coordinates; weights sum to 1, so
/// `integral over T = area(T) * sum_q w_q f(x_q)`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]` (weights sum to 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

fn symmetric(orbits: &[(f64, Option<f64>)], degree: usize) -> QuadratureRule {
    // (weight, a): a = None is the centroid; otherwise the 3-orbit (a, a, 1 - 2a).
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for &(w, a) in orbits {
        match a {
            None => {
                points.push([1.0 / 3.0, 1.0 / 3.0]);
                weights.push(w);
            }
            Some(a) => {
                let b = 1.0 - 2.0 * a;
                for p in [[a, a], [b, a], [a, b]] {
                    points.push(p);
                    weights.push(w);
                }
            }
        }
    }
    QuadratureRule { points, weights, degree }
}

/// Collapsed (Duffy) tensor-product Gauss rule.
fn collapsed(degree: usize) -> QuadratureRule {
    let n = (degree + 2).div_ceil(2);
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (u, wu) in x.iter().zip(&w) {
        for (v, wv) in x.iter().zip(&w) {
            points.push([*u, v * (1.0 - u)]);
            weights.push(2.0 * wu * wv * (1.0 - u));
        }
    }
    QuadratureRule { points, weights, degree }
}

/// Rule on the reference triangle exact for polynomials of total degree `degree`.
pub fn quadrature_rule(degree: usize) -> Result<QuadratureRule, AssemblyError> {
    if !(1..=MAX_QUADRATURE_DEGREE).contains(&degree) {
        return Err(AssemblyError::UnsupportedQuadratureDegree(degree));
    }
    Ok(match degree {
        1 => symmetric(&[(1.0, None)], 1),
        2 => symmetric(&[(1.0 / 3.0, Some(1.0 / 6.0))], 2),
        3 | 4 => symmetric(
            &[
                (0.223_381_589_678_011_07, Some(0.445_948_490_915_964_9)),
                (0.109_951_743_655_321_6, Some(0.091_576_213_509_770_74)),
            ],
            4,
        ),
        5 => symmetric(
            &[
                (0.225, None),
                (0.132_394_152_788_506_2, Some(0.470_142_064_105_115_1)),
                (0.125_939_180_544_827_15, Some(0.101_286_507_323_456_34)),
            ],
            5,
        ),
        d => collapsed(d),
    })
}
