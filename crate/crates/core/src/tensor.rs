//! Dense three-leg tensors and the handful of factorizations the MPS code
//! needs. All buffers are row-major; matrix products go through faer views
//! over the same storage, so reshapes are free.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, MatRef, Par, Side};

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_CUTOFF: f64 = 1e-14;

/// Site tensor with legs `[left bond][physical][right bond]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    pub dl: usize,
    pub d: usize,
    pub dr: usize,
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dl: usize, d: usize, dr: usize) -> Self {
        Self {
            dl,
            d,
            dr,
            data: vec![0.0; dl * d * dr],
        }
    }

    pub fn from_vec(dl: usize, d: usize, dr: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dl * d * dr, "tensor buffer size mismatch");
        Self { dl, d, dr, data }
    }

    #[inline]
    pub fn idx(&self, l: usize, s: usize, r: usize) -> usize {
        (l * self.d + s) * self.dr + r
    }

    #[inline]
    pub fn get(&self, l: usize, s: usize, r: usize) -> f64 {
        self.data[self.idx(l, s, r)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, s: usize, r: usize, v: f64) {
        let i = self.idx(l, s, r);
        self.data[i] = v;
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.dl, self.d, self.dr]
    }

    /// `(dl·d) × dr` view.
    pub fn left_mat(&self) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(&self.data, self.dl * self.d, self.dr)
    }

    /// `dl × (d·dr)` view.
    pub fn right_mat(&self) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(&self.data, self.dl, self.d * self.dr)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn scale(&mut self, k: f64) {
        self.data.iter_mut().for_each(|x| *x *= k);
    }

    /// Contract the physical leg with `u` (`d × k`, row-major): `[l][s][r] -> [l][k][r]`.
    pub fn map_physical(&self, u: &[f64], k: usize) -> Tensor3 {
        debug_assert_eq!(u.len(), self.d * k);
        let mut out = Tensor3::zeros(self.dl, k, self.dr);
        let um = MatRef::from_row_major_slice(u, self.d, k);
        for l in 0..self.dl {
            let src = &self.data[l * self.d * self.dr..(l + 1) * self.d * self.dr];
            let dst = &mut out.data[l * k * self.dr..(l + 1) * k * self.dr];
            gemm_into(
                MatMut::from_row_major_slice_mut(dst, k, self.dr),
                um.transpose(),
                MatRef::from_row_major_slice(src, self.d, self.dr),
                false,
                Par::Seq,
            );
        }
        out
    }
}

/// `dst (+)= lhs · rhs`.
#[inline]
pub fn gemm_into(dst: MatMut<'_, f64>, lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>, accumulate: bool, par: Par) {
    let beta = if accumulate { Accum::Add } else { Accum::Replace };
    matmul(dst, beta, lhs, rhs, 1.0, par);
}

/// Row-major product of two row-major buffers.
pub fn matmul_rm(a: &[f64], m: usize, k: usize, b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * n];
    gemm_into(
        MatMut::from_row_major_slice_mut(&mut out, m, n),
        MatRef::from_row_major_slice(a, m, k),
        MatRef::from_row_major_slice(b, k, n),
        false,
        Par::Seq,
    );
    out
}

pub fn to_row_major(m: MatRef<'_, f64>) -> Vec<f64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Truncated singular value decomposition of a row-major `m × n` matrix.
#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    /// `m × kept`, row-major.
    pub u: Vec<f64>,
    pub s: Vec<f64>,
    /// `kept × n`, row-major.
    pub vt: Vec<f64>,
    pub kept: usize,
    /// Fraction of the total squared weight that was dropped.
    pub discarded: f64,
    /// True when `max_rank` prevented reaching `max_discard`.
    pub capped: bool,
    /// All singular values, descending, before truncation.
    pub full_spectrum: Vec<f64>,
}

pub fn truncated_svd(a: &[f64], m: usize, n: usize, max_rank: usize, max_discard: f64) -> Result<TruncatedSvd> {
    let view = MatRef::from_row_major_slice(a, m, n);
    let svd = view
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("svd of {m}x{n} matrix did not converge: {e:?}")))?;
    let r = m.min(n);
    let sv: Vec<f64> = (0..r).map(|i| svd.S()[i]).collect();
    let total: f64 = sv.iter().map(|x| x * x).sum();
    if !total.is_finite() {
        return Err(Error::Numerical("non-finite singular values".into()));
    }
    let (keep, capped, discarded) = select_rank(&sv, total, max_rank, max_discard);
    let uu = svd.U();
    let vv = svd.V();
    let mut u = vec![0.0; m * keep];
    for i in 0..m {
        for k in 0..keep {
            u[i * keep + k] = uu[(i, k)];
        }
    }
    let mut vt = vec![0.0; keep * n];
    for k in 0..keep {
        for j in 0..n {
            vt[k * n + j] = vv[(j, k)];
        }
    }
    Ok(TruncatedSvd {
        u,
        s: sv[..keep].to_vec(),
        vt,
        kept: keep,
        discarded,
        capped,
        full_spectrum: sv,
    })
}

/// Smallest rank whose dropped relative weight is within `max_discard`,
/// limited by `max_rank`. `sv` may be a leading subset of the spectrum as long
/// as `total` is the exact squared norm.
fn select_rank(sv: &[f64], total: f64, max_rank: usize, max_discard: f64) -> (usize, bool, f64) {
    let r = sv.len();
    let smax = sv.first().copied().unwrap_or(0.0);
    let nonzero = sv.iter().take_while(|&&x| x > RANK_CUTOFF * smax).count().clamp(1, r.max(1));
    let mut kept_weight = vec![0.0; r + 1];
    for k in 0..r {
        kept_weight[k + 1] = kept_weight[k] + sv[k] * sv[k];
    }
    let rel = |k: usize| {
        if total > 0.0 {
            ((total - kept_weight[k]) / total).max(0.0)
        } else {
            0.0
        }
    };
    let mut keep = (1..=nonzero).find(|&k| rel(k) <= max_discard).unwrap_or(nonzero);
    let mut capped = false;
    if keep > max_rank.max(1) {
        keep = max_rank.max(1);
        capped = rel(keep) > max_discard;
    }
    (keep, capped, rel(keep))
}

/// Extra sketch columns beyond the rank cap.
const OVERSAMPLE: usize = 16;
const POWER_STEPS: usize = 2;

/// Same contract as [`truncated_svd`] for a matrix whose kept rank is at most
/// `max_rank`, computed through a randomized range sketch with power
/// iterations when the matrix is much larger than the cap. Discarded weights
/// are measured against the exact norm; `full_spectrum` then holds only the
/// sketched leading values.
pub fn sketched_svd(a: &[f64], m: usize, n: usize, max_rank: usize, max_discard: f64) -> Result<TruncatedSvd> {
    let k = max_rank.saturating_add(OVERSAMPLE);
    if m.min(n) <= k.max(2 * OVERSAMPLE) * 2 {
        return truncated_svd(a, m, n, max_rank, max_discard);
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64((m as u64) << 32 ^ n as u64);
    let omega: Vec<f64> = (0..n * k).map(|_| rng.random::<f64>() - 0.5).collect();
    let at = to_row_major(MatRef::from_row_major_slice(a, m, n).transpose());
    let mut y = matmul_rm(a, m, n, &omega, k);
    let (mut q, _, _) = qr_positive(&y, m, k);
    for _ in 0..POWER_STEPS {
        let z = matmul_rm(&at, n, m, &q, k);
        let (qz, _, _) = qr_positive(&z, n, k);
        y = matmul_rm(a, m, n, &qz, k);
        q = qr_positive(&y, m, k).0;
    }
    // B = Qᵀ A  (k × n)
    let qt = to_row_major(MatRef::from_row_major_slice(&q, m, k).transpose());
    let b = matmul_rm(&qt, k, m, a, n);
    let small = truncated_svd(&b, k, n, k, 0.0)?;
    let total: f64 = a.iter().map(|x| x * x).sum();
    if !total.is_finite() {
        return Err(Error::Numerical("non-finite matrix entries".into()));
    }
    let sv = small.full_spectrum;
    let (keep, capped, discarded) = select_rank(&sv, total, max_rank, max_discard);
    let r = small.kept;
    let mut ub = vec![0.0; k * keep];
    for i in 0..k {
        ub[i * keep..(i + 1) * keep].copy_from_slice(&small.u[i * r..i * r + keep]);
    }
    let u = matmul_rm(&q, m, k, &ub, keep);
    Ok(TruncatedSvd {
        u,
        s: sv[..keep].to_vec(),
        vt: small.vt[..keep * n].to_vec(),
        kept: keep,
        discarded,
        capped,
        full_spectrum: sv,
    })
}

/// Thin QR of a row-major `m × n` matrix with a non-negative diagonal in R,
/// which makes the factorization unique for full-rank input.
/// Returns `(q: m × k, r: k × n, k)` with `k = min(m, n)`.
pub fn qr_positive(a: &[f64], m: usize, n: usize) -> (Vec<f64>, Vec<f64>, usize) {
    let view = MatRef::from_row_major_slice(a, m, n);
    let qr = view.qr();
    let q = qr.compute_thin_Q();
    let r = qr.thin_R();
    let k = m.min(n);
    let mut qo = vec![0.0; m * k];
    let mut ro = vec![0.0; k * n];
    for i in 0..k {
        let sign = if r[(i, i)] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            ro[i * n + j] = if j >= i { sign * r[(i, j)] } else { 0.0 };
        }
        for row in 0..m {
            qo[row * k + i] = sign * q[(row, i)];
        }
    }
    (qo, ro, k)
}

/// Eigen-decomposition of a symmetric row-major `n × n` matrix; eigenvalues
/// ascending, eigenvectors as the columns of the returned faer matrix.
pub fn sym_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Mat<f64>)> {
    let view = MatRef::from_row_major_slice(a, n, n);
    let evd = view
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver failed on {n}x{n}: {e:?}")))?;
    let vals = (0..n).map(|i| evd.S()[i]).collect();
    Ok((vals, evd.U().to_owned()))
}

/// −Σ p ln p over a probability vector, skipping negligible entries.
pub fn shannon_nats(probs: &[f64]) -> f64 {
    let pmax = probs.iter().cloned().fold(0.0, f64::max);
    probs
        .iter()
        .filter(|&&p| p > RANK_CUTOFF * pmax && p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}
