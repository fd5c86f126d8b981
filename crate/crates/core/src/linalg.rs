//! Small dense kernels: dot products, pivoted least squares and symmetric
//! eigenvalues. Matrices are stored as slices of columns.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

#[inline]
pub fn sq_norm<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

/// Relative squared-norm survival below which a residualized column counts as
/// linearly dependent on the columns it was projected against.
pub fn collinear_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(100.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<T> {
    pub coef: Vec<T>,
    pub rank: usize,
}

impl<T> LeastSquares<T> {
    pub fn rank_deficient(&self) -> bool {
        self.rank < self.coef.len()
    }
}

struct Householder<T> {
    v: Vec<T>,
    beta: T,
}

impl<T: Real> Householder<T> {
    /// Reflector mapping `x` onto a multiple of the first unit vector.
    /// Returns the reflector and the resulting leading entry.
    fn new(x: &[T]) -> (Self, T) {
        let norm = sq_norm(x).sqrt();
        let mut v = x.to_vec();
        if norm == T::zero() {
            return (Self { v, beta: T::zero() }, T::zero());
        }
        let alpha = if x[0] >= T::zero() { -norm } else { norm };
        v[0] -= alpha;
        let vv = sq_norm(&v);
        let beta = if vv > T::zero() { T::lit(2.0) / vv } else { T::zero() };
        (Self { v, beta }, alpha)
    }

    /// Applies the reflector to `c[offset..]`.
    fn apply(&self, c: &mut [T], offset: usize) {
        if self.beta == T::zero() {
            return;
        }
        let tail = &mut c[offset..offset + self.v.len()];
        let s = self.beta * dot(&self.v, tail);
        axpy(-s, &self.v, tail);
    }
}

/// Least squares `min ‖y − A c‖²` by Householder QR with column pivoting.
///
/// Pivoting is on relative remaining norm so the rank decision does not depend
/// on column scale. A rank-deficient system is solved in the minimum-norm sense
/// through a second QR factorization of the leading block's transpose.
pub fn lstsq<T: Real>(columns: &[&[T]], y: &[T]) -> LeastSquares<T> {
    let k = columns.len();
    let m = y.len();
    if k == 0 {
        return LeastSquares { coef: Vec::new(), rank: 0 };
    }
    let mut a: Vec<Vec<T>> = columns.iter().map(|c| c.to_vec()).collect();
    let mut rhs = y.to_vec();
    let mut orig: Vec<T> = a.iter().map(|c| sq_norm(c)).collect();
    let mut perm: Vec<usize> = (0..k).collect();
    let tol = collinear_tol::<T>();
    let steps = k.min(m);
    let mut rank = 0;

    for j in 0..steps {
        let mut best = j;
        let mut best_rel = -T::one();
        for c in j..k {
            let rel = if orig[c] > T::zero() { sq_norm(&a[c][j..]) / orig[c] } else { T::zero() };
            if rel > best_rel {
                best_rel = rel;
                best = c;
            }
        }
        if best_rel <= tol {
            break;
        }
        a.swap(j, best);
        orig.swap(j, best);
        perm.swap(j, best);
        let (h, alpha) = Householder::new(&a[j][j..]);
        for c in a.iter_mut().skip(j + 1) {
            h.apply(c, j);
        }
        h.apply(&mut rhs, j);
        a[j][j] = alpha;
        for i in j + 1..m {
            a[j][i] = T::zero();
        }
        rank += 1;
    }

    let mut z = vec![T::zero(); k];
    if rank == k {
        back_substitute(&a, &rhs[..k], &mut z);
    } else if rank > 0 {
        // Leading block [R11 R12] is rank × k; solve it in the minimum-norm sense.
        let mut t: Vec<Vec<T>> = (0..rank).map(|i| (0..k).map(|c| a[c][i]).collect()).collect();
        let mut reflectors = Vec::with_capacity(rank);
        for j in 0..rank {
            let (h, alpha) = Householder::new(&t[j][j..]);
            for c in t.iter_mut().skip(j + 1) {
                h.apply(c, j);
            }
            t[j][j] = alpha;
            reflectors.push(h);
        }
        // Tᵀ = U S  ⇒  Sᵀ w = c,  z = U w.
        let mut w = vec![T::zero(); k];
        for i in 0..rank {
            let mut s = rhs[i];
            for (jj, wj) in w.iter().enumerate().take(i) {
                s -= t[i][jj] * *wj;
            }
            w[i] = s / t[i][i];
        }
        for (j, h) in reflectors.iter().enumerate().rev() {
            h.apply(&mut w, j);
        }
        z = w;
    }

    let mut coef = vec![T::zero(); k];
    for (slot, &orig_idx) in perm.iter().enumerate() {
        coef[orig_idx] = z[slot];
    }
    LeastSquares { coef, rank }
}

fn back_substitute<T: Real>(r: &[Vec<T>], rhs: &[T], out: &mut [T]) {
    let k = rhs.len();
    for i in (0..k).rev() {
        let mut s = rhs[i];
        for c in i + 1..k {
            s -= r[c][i] * out[c];
        }
        out[i] = s / r[i][i];
    }
}

/// Cholesky factor `L` of a symmetric positive-definite matrix.
pub struct Cholesky<T> {
    l: Vec<T>,
    dim: usize,
}

impl<T: Real> Cholesky<T> {
    /// Factors a row-major `dim × dim` matrix; `None` when a pivot is not positive.
    pub fn new(mut a: Vec<T>, dim: usize) -> Option<Self> {
        for j in 0..dim {
            let mut d = a[j * dim + j];
            for k in 0..j {
                d -= a[j * dim + k] * a[j * dim + k];
            }
            if !(d > T::zero()) {
                return None;
            }
            let d = d.sqrt();
            a[j * dim + j] = d;
            for i in j + 1..dim {
                let mut v = a[i * dim + j];
                for k in 0..j {
                    v -= a[i * dim + k] * a[j * dim + k];
                }
                a[i * dim + j] = v / d;
            }
        }
        Some(Self { l: a, dim })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let (l, dim) = (&self.l, self.dim);
        let mut x = b.to_vec();
        for i in 0..dim {
            for k in 0..i {
                let v = l[i * dim + k] * x[k];
                x[i] -= v;
            }
            x[i] /= l[i * dim + i];
        }
        for i in (0..dim).rev() {
            for k in i + 1..dim {
                let v = l[k * dim + i] * x[k];
                x[i] -= v;
            }
            x[i] /= l[i * dim + i];
        }
        x
    }
}

/// Solves `A x = b` for symmetric positive-definite `A`, polishing the result
/// with `refine` rounds of iterative refinement.
pub fn cholesky_solve<T: Real>(a: Vec<T>, dim: usize, b: &[T], refine: usize) -> Option<Vec<T>> {
    let chol = Cholesky::new(a.clone(), dim)?;
    let mut x = chol.solve(b);
    for _ in 0..refine {
        let resid: Vec<T> = (0..dim).map(|i| b[i] - dot(&a[i * dim..(i + 1) * dim], &x)).collect();
        let dx = chol.solve(&resid);
        x.iter_mut().zip(dx).for_each(|(xi, d)| *xi += d);
    }
    Some(x)
}

/// Eigenvalues of a symmetric matrix (row-major, `dim × dim`) by cyclic Jacobi
/// rotations, sorted ascending.
pub fn symmetric_eigenvalues<T: Real>(mut a: Vec<T>, dim: usize) -> Vec<T> {
    assert_eq!(a.len(), dim * dim);
    let idx = |i: usize, j: usize| i * dim + j;
    let frob: T = a.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let eps = T::epsilon() * frob.max(T::min_positive_value());
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..dim {
            for j in i + 1..dim {
                off += a[idx(i, j)] * a[idx(i, j)];
            }
        }
        if off.sqrt() <= eps {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[idx(p, q)];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..dim).map(|i| a[idx(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        // Gaussian elimination on XᵀX c = Xᵀy.
        let k = cols.len();
        let mut m = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                m[i][j] = dot(&cols[i], &cols[j]);
            }
            m[i][k] = dot(&cols[i], y);
        }
        for p in 0..k {
            let piv = (p..k).max_by(|&a, &b| m[a][p].abs().total_cmp(&m[b][p].abs())).unwrap();
            m.swap(p, piv);
            for r in p + 1..k {
                let f = m[r][p] / m[p][p];
                for c in p..=k {
                    m[r][c] -= f * m[p][c];
                }
            }
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = m[i][k];
            for j in i + 1..k {
                s -= m[i][j] * x[j];
            }
            x[i] = s / m[i][i];
        }
        x
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn lstsq_matches_normal_equations() {
        let mut s = 7u64;
        let cols: Vec<Vec<f64>> = (0..6).map(|_| (0..100).map(|_| lcg(&mut s)).collect()).collect();
        let y: Vec<f64> = (0..100).map(|_| lcg(&mut s)).collect();
        let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
        let ls = lstsq(&refs, &y);
        let oracle = normal_equations(&cols, &y);
        assert_eq!(ls.rank, 6);
        for (a, b) in ls.coef.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn duplicated_column_gives_minimum_norm() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 4.0 * v).collect();
        let ls = lstsq(&[&x, &x], &y);
        assert_eq!(ls.rank, 1);
        assert!(ls.rank_deficient());
        assert!((ls.coef[0] - 2.0).abs() < 1e-10);
        assert!((ls.coef[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn cholesky_matches_known_solution() {
        // A = [[4,2],[2,3]], x = (1,-1) → b = (2,-1).
        let x = cholesky_solve::<f64>(vec![4.0, 2.0, 2.0, 3.0], 2, &[2.0, -1.0], 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12);
        assert!(cholesky_solve::<f64>(vec![1.0, 1.0, 1.0, 1.0], 2, &[1.0, 1.0], 0).is_none());
    }

    #[test]
    fn jacobi_two_by_two() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let ev = symmetric_eigenvalues::<f64>(vec![2.0, 1.0, 1.0, 2.0], 2);
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_singular() {
        let ev = symmetric_eigenvalues::<f64>(vec![1.0, 1.0, 1.0, 1.0], 2);
        assert!(ev[0].abs() < 1e-12);
        assert!((ev[1] - 2.0).abs() < 1e-12);
    }
}
