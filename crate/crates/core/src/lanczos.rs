//! Restarted Lanczos for the lowest eigenpairs of a real symmetric operator
//! given only as a matrix-vector product.

use faer::{ColMut, ColRef, MatRef, Par};

use crate::error::{Error, Result};
use crate::tensor::{gemm_into, sym_eigen};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Accuracy target: residual `‖Hx − θx‖` of a unit vector, or the
    /// eigenvalue error bound `r²/δ`, whichever is met first.
    pub tol: f64,
    /// Maximum number of operator applications.
    pub max_iter: usize,
    /// Krylov subspace size between restarts.
    pub krylov: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 200,
            krylov: 32,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four independent partial sums let the loop vectorize.
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(b, a)| *b += alpha * a);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal vectors stored contiguously, one per row.
struct Basis {
    n: usize,
    rows: Vec<f64>,
}

impl Basis {
    fn new(n: usize) -> Self {
        Self { n, rows: Vec::new() }
    }

    fn len(&self) -> usize {
        self.rows.len() / self.n
    }

    fn push(&mut self, v: &[f64]) {
        self.rows.extend_from_slice(v);
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    /// Two passes of classical Gram-Schmidt.
    fn project_out(&self, v: &mut [f64]) {
        let m = self.len();
        if m == 0 {
            return;
        }
        let b = MatRef::from_row_major_slice(&self.rows, m, self.n);
        let mut c = vec![0.0; m];
        for _ in 0..2 {
            gemm_into(
                ColMut::from_slice_mut(&mut c).as_mat_mut(),
                b,
                ColRef::from_slice(v).as_mat(),
                false,
                Par::Seq,
            );
            c.iter_mut().for_each(|x| *x = -*x);
            gemm_into(
                ColMut::from_slice_mut(v).as_mat_mut(),
                b.transpose(),
                ColRef::from_slice(&c).as_mat(),
                true,
                Par::Seq,
            );
        }
    }
}

fn orthogonalize(v: &mut [f64], locked: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in locked {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }
}

/// Lowest eigenpair of `apply`, orthogonal to every vector in `locked`.
pub fn lowest<F>(mut apply: F, x0: &[f64], locked: &[Vec<f64>], opts: &LanczosOptions) -> Result<EigenPair>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = x0.len();
    let room = n.saturating_sub(locked.len());
    if room == 0 {
        return Err(Error::DegenerateInput("no space left orthogonal to the locked vectors".into()));
    }
    let m_max = opts.krylov.max(2).min(room);
    let mut x = x0.to_vec();
    orthogonalize(&mut x, locked);
    let mut nx = norm(&x);
    if nx < 1e-300 || !nx.is_finite() {
        // Fall back to a deterministic start with weight on every component.
        x = (0..n).map(|i| 1.0 + (i as f64 * 0.618_033_988_75).fract()).collect();
        orthogonalize(&mut x, locked);
        nx = norm(&x);
        if nx < 1e-300 {
            return Err(Error::Numerical("could not build a start vector".into()));
        }
    }
    x.iter_mut().for_each(|v| *v /= nx);

    let mut iterations = 0usize;
    let mut w = vec![0.0; n];
    let best = loop {
        let mut basis = Basis::new(n);
        basis.push(&x);
        let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let (theta, coef, residual, gap) = loop {
            let j = basis.len() - 1;
            w.iter_mut().for_each(|v| *v = 0.0);
            apply(basis.row(j), &mut w);
            iterations += 1;
            alpha.push(dot(basis.row(j), &w));
            orthogonalize(&mut w, locked);
            basis.project_out(&mut w);
            let b = norm(&w);
            let m = alpha.len();
            let (vals, vecs) = tridiagonal_eigen(&alpha, &beta)?;
            let theta = vals[0];
            if !theta.is_finite() {
                return Err(Error::Numerical("non-finite Ritz value".into()));
            }
            let exhausted = b <= 1e-14 * theta.abs().max(vals[m - 1].abs()).max(1.0);
            let residual = if exhausted { 0.0 } else { (b * vecs[(m - 1, 0)]).abs() };
            let gap = if m >= MIN_GAP_KRYLOV { vals[1] - vals[0] } else { 0.0 };
            let coef = || (0..m).map(|k| vecs[(k, 0)]).collect::<Vec<f64>>();
            if is_converged(residual, gap, opts.tol) || exhausted || m == m_max || iterations >= opts.max_iter {
                break (theta, coef(), residual, gap);
            }
            beta.push(b);
            w.iter_mut().for_each(|v| *v /= b);
            basis.push(&w);
        };
        let m = coef.len();
        let mut ritz = vec![0.0; n];
        gemm_into(
            ColMut::from_slice_mut(&mut ritz).as_mat_mut(),
            MatRef::from_row_major_slice(&basis.rows[..m * n], m, n).transpose(),
            ColRef::from_slice(&coef).as_mat(),
            false,
            Par::Seq,
        );
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|v| *v /= rn);
        let converged = is_converged(residual, gap, opts.tol);
        if converged || iterations >= opts.max_iter {
            break EigenPair {
                value: theta,
                vector: ritz,
                residual,
                iterations,
                converged,
            };
        }
        x = ritz;
        orthogonalize(&mut x, locked);
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
    };
    Ok(best)
}

/// A Ritz pair is accepted when either its residual or the eigenvalue error
/// bound `r²/δ` (δ: distance to the next Ritz value) is within `tol`.
/// Krylov size below which the second Ritz value is too crude a gap estimate.
const MIN_GAP_KRYLOV: usize = 8;

fn is_converged(residual: f64, gap: f64, tol: f64) -> bool {
    residual <= tol || (gap > 0.0 && residual * residual / gap <= tol)
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, faer::Mat<f64>)> {
    let m = alpha.len();
    let mut t = vec![0.0; m * m];
    for i in 0..m {
        t[i * m + i] = alpha[i];
        if i + 1 < m {
            t[i * m + i + 1] = beta[i];
            t[(i + 1) * m + i] = beta[i];
        }
    }
    sym_eigen(&t, m)
}

/// The `k` lowest eigenpairs by successive locking.
pub fn lowest_k<F>(mut apply: F, x0: &[f64], k: usize, opts: &LanczosOptions) -> Result<Vec<EigenPair>>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let p = lowest(&mut apply, x0, &locked, opts)?;
        locked.push(p.vector.clone());
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::matmul_rm;

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.random::<f64>() - 0.5;
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }

    #[test]
    fn matches_dense_diagonalization() {
        let n = 120;
        let a = random_symmetric(n, 4);
        let (vals, _) = sym_eigen(&a, n).unwrap();
        let opts = LanczosOptions {
            tol: 1e-10,
            max_iter: 2000,
            krylov: 30,
        };
        let x0 = vec![1.0; n];
        let pairs = lowest_k(|x, y| y.copy_from_slice(&matmul_rm(&a, n, n, x, 1)), &x0, 3, &opts).unwrap();
        for (k, (p, v)) in pairs.iter().zip(&vals).enumerate() {
            assert!(p.converged);
            assert!((p.value - v).abs() < 1e-9, "{} vs {}", p.value, v);
            let hx = matmul_rm(&a, n, n, &p.vector, 1);
            let r: f64 = hx.iter().zip(&p.vector).map(|(h, x)| (h - p.value * x).powi(2)).sum::<f64>().sqrt();
            if k == 0 {
                assert!((r - p.residual).abs() < 1e-10);
            }
            let gap = vals[k + 1] - vals[k];
            assert!(r <= opts.tol || r * r / gap <= 10.0 * opts.tol, "r = {r}");
        }
    }

    #[test]
    fn small_space_terminates_exactly() {
        // diag(3, 1, 2) is exhausted after three steps
        let d = [3.0, 1.0, 2.0];
        let p = lowest(
            |x, y| y.iter_mut().zip(x).zip(&d).for_each(|((o, i), e)| *o = e * i),
            &[1.0, 1.0, 1.0],
            &[],
            &LanczosOptions::default(),
        )
        .unwrap();
        assert!(p.converged);
        assert!((p.value - 1.0).abs() < 1e-14);
        assert!((p.vector[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let n = 400;
        let a = random_symmetric(n, 9);
        let p = lowest(
            |x, y| y.copy_from_slice(&matmul_rm(&a, n, n, x, 1)),
            &vec![1.0; n],
            &[],
            &LanczosOptions {
                tol: 1e-14,
                max_iter: 5,
                krylov: 4,
            },
        )
        .unwrap();
        assert!(!p.converged);
        assert!(p.iterations <= 5);
    }
}
