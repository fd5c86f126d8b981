//! Polynomial helpers for lag operators. Coefficients are stored in ascending
//! powers of the back-shift variable `z`.

use num_complex::Complex64;

use super::UnitRootSpec;
use crate::scalar::Real;

pub fn poly_mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += *ai * *bj;
        }
    }
    out
}

/// Full characteristic polynomial `(1−z)^a (1+z)^b Π(1 − 2cosθ z + z²)^d ψ(z)`.
pub fn characteristic_polynomial(spec: &UnitRootSpec) -> Vec<f64> {
    let mut p = vec![1.0];
    for _ in 0..spec.a {
        p = poly_mul(&p, &[1.0, -1.0]);
    }
    for _ in 0..spec.b {
        p = poly_mul(&p, &[1.0, 1.0]);
    }
    for pair in &spec.complex_pairs {
        let factor = [1.0, -2.0 * pair.theta.cos(), 1.0];
        for _ in 0..pair.multiplicity {
            p = poly_mul(&p, &factor);
        }
    }
    let mut psi = Vec::with_capacity(spec.psi_coeffs.len() + 1);
    psi.push(1.0);
    psi.extend_from_slice(&spec.psi_coeffs);
    poly_mul(&p, &psi)
}

/// AR coefficients `α` with `1 − Σ α_i z^i` equal to the characteristic polynomial.
pub fn expand_characteristic(spec: &UnitRootSpec) -> Vec<f64> {
    characteristic_polynomial(spec)[1..].iter().map(|c| -c).collect()
}

/// Complex roots of `Σ c_i z^i` by Durand–Kerner iteration. Trailing zero
/// coefficients are dropped; a constant polynomial has no roots.
pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|v| v.abs() < 1e-300) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|v| Complex64::new(v / lead, 0.0)).collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for coef in monic.iter().rev() {
            acc = acc * z + coef;
        }
        acc
    };
    let radius = 1.0 + monic[..deg].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32) * radius.min(2.0)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    z
}

/// True when every root of `Σ c_i z^i` lies strictly outside the unit circle
/// (modulus greater than `1 + tol`).
pub fn roots_outside_unit_circle(coeffs: &[f64], tol: f64) -> bool {
    roots(coeffs).iter().all(|r| r.norm() > 1.0 + tol)
}
