//! Banded symmetric linear algebra used by the 1D solvers and the
//! linearization: LDL^T with inertia counts (Sturm bisection), a general
//! banded LU with partial pivoting (Newton systems, inverse iteration), and
//! a cyclic Jacobi for small dense symmetric matrices.

use ndarray::Array2;
use thiserror::Error;

use crate::scalar::{lit, Real};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is numerically singular at column {0}")]
    Singular(usize),
    #[error("eigensolve failed: {0}")]
    Eigensolve(String),
}

/// Symmetric banded matrix, lower storage: `bands[(d, i)] = A[i+d, i]`,
/// `d = 0..=hbw`.
#[derive(Debug, Clone)]
pub struct SymBanded<F> {
    n: usize,
    hbw: usize,
    bands: Array2<F>,
}

impl<F: Real> SymBanded<F> {
    pub fn zeros(n: usize, hbw: usize) -> Self {
        SymBanded {
            n,
            hbw,
            bands: Array2::zeros((hbw + 1, n)),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn half_bandwidth(&self) -> usize {
        self.hbw
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        let (lo, hi) = if i >= j { (j, i) } else { (i, j) };
        if hi - lo > self.hbw {
            F::zero()
        } else {
            self.bands[[hi - lo, lo]]
        }
    }

    /// Set `A[i+d, i]` (and by symmetry `A[i, i+d]`).
    #[inline]
    pub fn set_lower(&mut self, d: usize, i: usize, v: F) {
        self.bands[[d, i]] = v;
    }

    #[inline]
    pub fn add_lower(&mut self, d: usize, i: usize, v: F) {
        self.bands[[d, i]] += v;
    }

    pub fn matvec(&self, x: &[F], y: &mut [F]) {
        let n = self.n;
        for yi in y.iter_mut() {
            *yi = F::zero();
        }
        for i in 0..n {
            y[i] += self.bands[[0, i]] * x[i];
            let top = self.hbw.min(n - 1 - i);
            for d in 1..=top {
                let a = self.bands[[d, i]];
                y[i + d] += a * x[i];
                y[i] += a * x[i + d];
            }
        }
    }

    pub fn quadratic_form(&self, x: &[F]) -> F {
        let mut y = vec![F::zero(); self.n];
        self.matvec(x, &mut y);
        x.iter().zip(y.iter()).map(|(a, b)| *a * *b).sum()
    }

    /// Gershgorin bounds on the spectrum.
    pub fn gershgorin(&self) -> (F, F) {
        let mut lo = F::infinity();
        let mut hi = F::neg_infinity();
        for i in 0..self.n {
            let mut r = F::zero();
            for d in 1..=self.hbw {
                if i + d < self.n {
                    r += self.bands[[d, i]].abs();
                }
                if i >= d && i - d + d <= self.n - 1 {
                    r += self.bands[[d, i - d]].abs();
                }
            }
            let a = self.bands[[0, i]];
            lo = lo.min(a - r);
            hi = hi.max(a + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `shift`, by counting negative
    /// pivots of the LDL^T factorization of `A - shift I`. Near-zero pivots
    /// are replaced by a tiny value of the same sign (Martin-Wilkinson), which
    /// bisection tolerates.
    pub fn count_below(&self, shift: F) -> usize {
        let n = self.n;
        let hbw = self.hbw;
        // working copy of the band window
        let mut work = self.bands.clone();
        for i in 0..n {
            work[[0, i]] -= shift;
        }
        let scale = {
            let mut s = F::zero();
            for i in 0..n {
                s = s.max(work[[0, i]].abs());
            }
            s.max(F::one())
        };
        let tiny = F::epsilon() * scale * lit::<F>(16.0);
        let mut negatives = 0usize;
        let mut l = vec![F::zero(); hbw];
        for j in 0..n {
            let mut d = work[[0, j]];
            if d.abs() < tiny {
                d = if d < F::zero() { -tiny } else { tiny };
            }
            if d < F::zero() {
                negatives += 1;
            }
            let top = hbw.min(n - 1 - j);
            for (t, lt) in l.iter_mut().enumerate().take(top) {
                *lt = work[[t + 1, j]] / d;
            }
            // rank-one update of the trailing window restricted to the band
            for r in 0..top {
                let lr = l[r];
                for c in r..top {
                    // element A[j+1+c, j+1+r] sits at band (c - r, j+1+r)
                    work[[c - r, j + 1 + r]] -= lr * d * l[c];
                }
            }
        }
        negatives
    }
}

/// General banded LU with partial pivoting (LAPACK-style band storage with
/// `kl` fill-in rows).
pub struct BandedLu<F> {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Array2<F>,
    ipiv: Vec<usize>,
}

impl<F: Real> BandedLu<F> {
    /// Factor `A - shift I` where `A` is symmetric banded.
    pub fn from_sym_shifted(a: &SymBanded<F>, shift: F) -> Result<Self, LinalgError> {
        let n = a.n();
        let kl = a.half_bandwidth();
        let ku = kl;
        let ldab = 2 * kl + ku + 1;
        let mut ab = Array2::zeros((ldab, n));
        for j in 0..n {
            let lo = j.saturating_sub(ku);
            let hi = (j + kl).min(n - 1);
            for i in lo..=hi {
                let mut v = a.get(i, j);
                if i == j {
                    v -= shift;
                }
                ab[[kl + ku + i - j, j]] = v;
            }
        }
        Self::factor(n, kl, ku, ab)
    }

    /// Factor from a dense closure over a general banded matrix.
    pub fn from_banded(
        n: usize,
        kl: usize,
        ku: usize,
        entry: impl Fn(usize, usize) -> F,
    ) -> Result<Self, LinalgError> {
        let ldab = 2 * kl + ku + 1;
        let mut ab = Array2::zeros((ldab, n));
        for j in 0..n {
            let lo = j.saturating_sub(ku);
            let hi = (j + kl).min(n - 1);
            for i in lo..=hi {
                ab[[kl + ku + i - j, j]] = entry(i, j);
            }
        }
        Self::factor(n, kl, ku, ab)
    }

    fn factor(n: usize, kl: usize, ku: usize, mut ab: Array2<F>) -> Result<Self, LinalgError> {
        let kv = kl + ku; // rows of U above the diagonal after fill-in
        let mut ipiv = vec![0usize; n];
        let mut max_abs = F::zero();
        for v in ab.iter() {
            max_abs = max_abs.max(v.abs());
        }
        let tiny = F::epsilon() * max_abs.max(F::one());
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            // pivot search in column j
            let mut jp = 0usize;
            let mut best = ab[[kv, j]].abs();
            for i in 1..=km {
                let v = ab[[kv + i, j]].abs();
                if v > best {
                    best = v;
                    jp = i;
                }
            }
            ipiv[j] = j + jp;
            if best < tiny {
                // keep going with a perturbed pivot; exact singularity is
                // what inverse iteration wants to hit
                ab[[kv + jp, j]] = if ab[[kv + jp, j]] < F::zero() {
                    -tiny
                } else {
                    tiny
                };
            }
            if jp != 0 {
                // swap rows j and j+jp across the accessible columns
                let hi_col = (j + kv).min(n - 1);
                for k in j..=hi_col {
                    let r1 = kv + j - k;
                    let r2 = kv + j + jp - k;
                    let t = ab[[r1, k]];
                    ab[[r1, k]] = ab[[r2, k]];
                    ab[[r2, k]] = t;
                }
            }
            let piv = ab[[kv, j]];
            for i in 1..=km {
                let m = ab[[kv + i, j]] / piv;
                ab[[kv + i, j]] = m;
                let hi_col = (j + kv).min(n - 1);
                for k in j + 1..=hi_col {
                    let u = ab[[kv + j - k, k]];
                    ab[[kv + j + i - k, k]] = ab[[kv + j + i - k, k]] - m * u;
                }
            }
        }
        Ok(BandedLu { n, kl, ku, ab, ipiv })
    }

    pub fn solve_in_place(&self, b: &mut [F]) {
        let n = self.n;
        let kv = self.kl + self.ku;
        // forward: apply pivots and L
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = self.kl.min(n - 1 - j);
            for i in 1..=km {
                b[j + i] = b[j + i] - self.ab[[kv + i, j]] * b[j];
            }
        }
        // back substitution with U (bandwidth kv)
        for j in (0..n).rev() {
            let mut s = b[j];
            let hi = (j + kv).min(n - 1);
            for k in j + 1..=hi {
                s -= self.ab[[kv + j - k, k]] * b[k];
            }
            b[j] = s / self.ab[[kv, j]];
        }
    }
}

/// Options for the lowest-eigenpair solve.
#[derive(Debug, Clone, Copy)]
pub struct EigOptions<F> {
    pub abs_tol: F,
    pub residual_tol: F,
    pub max_inverse_iters: usize,
}

impl<F: Real> Default for EigOptions<F> {
    fn default() -> Self {
        EigOptions {
            abs_tol: lit(1e-12),
            residual_tol: lit(1e-8),
            max_inverse_iters: 6,
        }
    }
}

/// Lowest `k` eigenpairs of a symmetric banded matrix by Sturm-count
/// bisection plus inverse iteration, ordered ascending. Residuals
/// `||A v - lambda v||` are checked against `residual_tol`.
pub fn lowest_eigenpairs<F: Real>(
    a: &SymBanded<F>,
    k: usize,
    opts: &EigOptions<F>,
) -> Result<Vec<(F, Vec<F>)>, LinalgError> {
    let n = a.n();
    let k = k.min(n);
    let (glo, ghi) = a.gershgorin();
    let span = (ghi - glo).max(F::one());
    let mut values = Vec::with_capacity(k);
    for j in 0..k {
        let mut lo = glo;
        let mut hi = ghi;
        // keep count(lo) <= j < count(hi)
        for _ in 0..200 {
            let mid = lit::<F>(0.5) * (lo + hi);
            if a.count_below(mid) <= j {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= opts.abs_tol * (F::one() + mid.abs()) {
                break;
            }
        }
        values.push(lit::<F>(0.5) * (lo + hi));
    }

    let mut pairs: Vec<(F, Vec<F>)> = Vec::with_capacity(k);
    let cluster_tol = lit::<F>(1e-7) * span;
    for (j, &lam) in values.iter().enumerate() {
        // shift slightly off the eigenvalue so the LU stays usable
        let delta = (opts.abs_tol * lit::<F>(32.0) + F::epsilon() * span) * lit::<F>(8.0);
        let lu = BandedLu::from_sym_shifted(a, lam + delta)?;
        let mut v: Vec<F> = (0..n)
            .map(|i| {
                // fixed quasi-random start, nonzero in every component
                let t = (i as f64 * 0.754877666246693 + (j as f64) * 0.1) % 1.0;
                lit::<F>(2.0 * t - 1.0 + 0.017)
            })
            .collect();
        normalize(&mut v);
        let mut residual = F::infinity();
        for _ in 0..opts.max_inverse_iters {
            lu.solve_in_place(&mut v);
            // orthogonalize within clusters
            for (mu, w) in pairs.iter() {
                if (lam - *mu).abs() < cluster_tol {
                    let d = dot(&v, w);
                    for (vi, wi) in v.iter_mut().zip(w.iter()) {
                        *vi -= d * *wi;
                    }
                }
            }
            normalize(&mut v);
            let mut av = vec![F::zero(); n];
            a.matvec(&v, &mut av);
            let rq = dot(&v, &av);
            let mut r2 = F::zero();
            for i in 0..n {
                let r = av[i] - rq * v[i];
                r2 += r * r;
            }
            residual = r2.sqrt();
            if residual <= opts.residual_tol {
                break;
            }
        }
        if residual > opts.residual_tol {
            return Err(LinalgError::Eigensolve(format!(
                "inverse iteration residual {residual:e} for eigenvalue {j}"
            )));
        }
        // Rayleigh quotient sharpens the bisection value
        let mut av = vec![F::zero(); n];
        a.matvec(&v, &mut av);
        let rq = dot(&v, &av);
        pairs.push((rq, v));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    Ok(pairs)
}

fn dot<F: Real>(x: &[F], y: &[F]) -> F {
    x.iter().zip(y.iter()).map(|(a, b)| *a * *b).sum()
}

fn normalize<F: Real>(v: &mut [F]) {
    let n = dot(v, v).sqrt();
    if n > F::zero() {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// Eigenvalues (ascending) of a small dense symmetric matrix, cyclic Jacobi.
/// `a` is row-major `m x m` and is destroyed.
pub fn jacobi_eigenvalues<F: Real>(a: &mut [F], m: usize) -> Vec<F> {
    debug_assert_eq!(a.len(), m * m);
    let tol = F::epsilon() * lit::<F>(4.0);
    for _sweep in 0..64 {
        let mut off = F::zero();
        for p in 0..m {
            for q in p + 1..m {
                off += a[p * m + q] * a[p * m + q];
            }
        }
        let mut scale = F::zero();
        for d in 0..m {
            scale = scale.max(a[d * m + d].abs());
        }
        if off.sqrt() <= tol * scale.max(F::one()) {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == F::zero() {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = lit::<F>(0.5) * (aqq - app) / apq;
                let t = {
                    let s = (theta * theta + F::one()).sqrt();
                    let t = if theta >= F::zero() {
                        (theta + s).recip()
                    } else {
                        (theta - s).recip()
                    };
                    t
                };
                let c = (t * t + F::one()).sqrt().recip();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut evs: Vec<F> = (0..m).map(|d| a[d * m + d]).collect();
    evs.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    evs
}
