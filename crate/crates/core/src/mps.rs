//! Real matrix-product states: construction, canonical forms, truncation,
//! and the contractions built on top of them.

use faer::Par;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{extend_left, Env};
use crate::error::{Error, Result};
use crate::mpo::Mpo;
use crate::tensor::{matmul_rm, qr_positive, shannon_nats, truncated_svd, Tensor3};

#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    pub sites: Vec<Tensor3>,
    /// Largest bond dimension this state may grow to.
    pub bond_cap: usize,
    /// Site holding the norm when the state is in mixed-canonical form.
    pub center: Option<usize>,
}

/// Per-bond outcome of truncating singular values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TruncationReport {
    pub discarded: Vec<f64>,
    pub max_discarded: f64,
    pub bond_dims: Vec<usize>,
    /// Some bond hit its dimension cap before reaching the weight target.
    pub capped: bool,
}

impl TruncationReport {
    pub fn record(&mut self, discarded: f64, dim: usize, capped: bool) {
        self.discarded.push(discarded);
        self.bond_dims.push(dim);
        self.max_discarded = self.max_discarded.max(discarded);
        self.capped |= capped;
    }
}

fn random_tensor(rng: &mut ChaCha8Rng, dl: usize, d: usize, dr: usize) -> Tensor3 {
    let data = (0..dl * d * dr).map(|_| rng.random::<f64>() - 0.5).collect();
    Tensor3::from_vec(dl, d, dr, data)
}

/// Bond dimensions `min(D, Π left dims, Π right dims)`.
fn bounded_bonds(local_dims: &[usize], cap: usize) -> Vec<usize> {
    let n = local_dims.len();
    let mut bonds = vec![1usize; n + 1];
    for b in 1..n {
        let left = local_dims[..b].iter().try_fold(1usize, |a, &d| a.checked_mul(d)).unwrap_or(usize::MAX);
        let right = local_dims[b..].iter().try_fold(1usize, |a, &d| a.checked_mul(d)).unwrap_or(usize::MAX);
        bonds[b] = cap.min(left).min(right);
    }
    bonds
}

impl Mps {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|t| t.d).collect()
    }

    /// Virtual bond dimensions, boundaries included.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.sites.iter().map(|t| t.dl).collect();
        v.push(self.sites.last().map_or(1, |t| t.dr));
        v
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Normalized, right-canonical random state, reproducible from `seed`.
    pub fn random(local_dims: &[usize], bond: usize, seed: u64) -> Mps {
        Self::random_biased(local_dims, bond, seed, &vec![0.0; local_dims.len()])
    }

    /// Random state with `bias[i]` added to the amplitude of local level 0 on
    /// the diagonal of every site tensor (e.g. a bosonic vacuum preference).
    pub fn random_biased(local_dims: &[usize], bond: usize, seed: u64, bias: &[f64]) -> Mps {
        assert!(bond >= 1);
        assert_eq!(bias.len(), local_dims.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bonds = bounded_bonds(local_dims, bond);
        let sites = local_dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut t = random_tensor(&mut rng, bonds[i], d, bonds[i + 1]);
                if bias[i] != 0.0 {
                    for k in 0..bonds[i].min(bonds[i + 1]) {
                        let v = t.get(k, 0, k) + bias[i];
                        t.set(k, 0, k, v);
                    }
                }
                t
            })
            .collect();
        let mut mps = Mps {
            sites,
            bond_cap: bond,
            center: None,
        };
        mps.canonicalize_mut(0);
        mps.normalize();
        mps
    }

    /// Product state from one local vector per site.
    pub fn product(locals: &[Vec<f64>]) -> Mps {
        let sites = locals
            .iter()
            .map(|v| Tensor3::from_vec(1, v.len(), 1, v.clone()))
            .collect();
        Mps {
            sites,
            bond_cap: 1,
            center: None,
        }
    }

    /// Exact MPS of a dense state vector (site 0 most significant).
    pub fn from_dense(psi: &[f64], local_dims: &[usize]) -> Result<Mps> {
        let total: usize = local_dims.iter().product();
        if psi.len() != total {
            return Err(Error::Config(format!(
                "state has {} amplitudes, layout needs {total}",
                psi.len()
            )));
        }
        let n = local_dims.len();
        let mut sites = Vec::with_capacity(n);
        let mut rest = psi.to_vec();
        let mut dl = 1;
        for (i, &d) in local_dims.iter().enumerate() {
            if i + 1 == n {
                sites.push(Tensor3::from_vec(dl, d, 1, rest.clone()));
                break;
            }
            let rows = dl * d;
            let cols = rest.len() / rows;
            let svd = truncated_svd(&rest, rows, cols, usize::MAX, 0.0)?;
            let k = svd.kept;
            sites.push(Tensor3::from_vec(dl, d, k, svd.u));
            let mut sv = svd.vt;
            for r in 0..k {
                sv[r * cols..(r + 1) * cols].iter_mut().for_each(|x| *x *= svd.s[r]);
            }
            rest = sv;
            dl = k;
        }
        let cap = sites.iter().map(|t| t.dr).max().unwrap_or(1);
        Ok(Mps {
            sites,
            bond_cap: cap,
            center: Some(n - 1),
        })
    }

    /// Dense amplitudes; only sensible for small lattices.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut acc = vec![1.0];
        let mut rows = 1usize;
        let mut dl = 1usize;
        for t in &self.sites {
            acc = matmul_rm(&acc, rows, dl, &t.data, t.d * t.dr);
            rows *= t.d;
            dl = t.dr;
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        if let Some(c) = self.center {
            return self.sites[c].norm_sqr();
        }
        self.overlap(self)
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let c = self.center.unwrap_or(0);
            self.sites[c].scale(1.0 / n);
        }
    }

    /// QR on site `i`, pushing the remainder into site `i + 1`.
    pub fn shift_right(&mut self, i: usize) {
        let t = &self.sites[i];
        let (q, r, k) = qr_positive(&t.data, t.dl * t.d, t.dr);
        let (dl, d, dr) = (t.dl, t.d, t.dr);
        self.sites[i] = Tensor3::from_vec(dl, d, k, q);
        let next = &self.sites[i + 1];
        let data = matmul_rm(&r, k, dr, &next.data, next.d * next.dr);
        self.sites[i + 1] = Tensor3::from_vec(k, next.d, next.dr, data);
    }

    /// LQ on site `i`, pushing the remainder into site `i − 1`.
    pub fn shift_left(&mut self, i: usize) {
        let t = &self.sites[i];
        let (dl, d, dr) = (t.dl, t.d, t.dr);
        // Aᵀ = Q R  ⇒  A = Rᵀ Qᵀ
        let at: Vec<f64> = (0..dl * d * dr).map(|x| t.data[(x % dl) * d * dr + x / dl]).collect();
        let (q, r, k) = qr_positive(&at, d * dr, dl);
        let qt: Vec<f64> = (0..k * d * dr).map(|x| q[(x % (d * dr)) * k + x / (d * dr)]).collect();
        self.sites[i] = Tensor3::from_vec(k, d, dr, qt);
        let rt: Vec<f64> = (0..dl * k).map(|x| r[(x % k) * dl + x / k]).collect();
        let prev = &self.sites[i - 1];
        let data = matmul_rm(&prev.data, prev.dl * prev.d, dl, &rt, k);
        self.sites[i - 1] = Tensor3::from_vec(prev.dl, prev.d, k, data);
    }

    /// Bring the state into mixed-canonical form around `center`.
    pub fn canonicalize_mut(&mut self, center: usize) {
        assert!(center < self.len());
        for i in 0..center {
            self.shift_right(i);
        }
        for i in (center + 1..self.len()).rev() {
            self.shift_left(i);
        }
        self.center = Some(center);
    }

    pub fn canonicalize(&self, center: usize) -> Mps {
        let mut out = self.clone();
        out.canonicalize_mut(center);
        out
    }

    /// Move an existing orthogonality center without touching other sites.
    pub fn move_center(&mut self, target: usize) {
        let Some(mut c) = self.center else {
            self.canonicalize_mut(target);
            return;
        };
        while c < target {
            self.shift_right(c);
            c += 1;
        }
        while c > target {
            self.shift_left(c);
            c -= 1;
        }
        self.center = Some(target);
    }

    /// Truncate the bond between `bond` and `bond + 1`. Keeps the smallest
    /// number of singular values whose dropped weight is at most `w_max`,
    /// never more than `d_max`. The result is not renormalized.
    pub fn truncate_bond(&self, bond: usize, d_max: usize, w_max: f64) -> Result<(Mps, TruncationReport)> {
        let mut out = self.clone();
        let report = out.truncate_bond_mut(bond, d_max, w_max)?;
        Ok((out, report))
    }

    pub fn truncate_bond_mut(&mut self, bond: usize, d_max: usize, w_max: f64) -> Result<TruncationReport> {
        if bond + 1 >= self.len() {
            return Err(Error::Config(format!("bond {bond} is outside the chain")));
        }
        self.move_center(bond);
        let t = &self.sites[bond];
        let (dl, d) = (t.dl, t.d);
        let svd = truncated_svd(&t.data, dl * d, t.dr, d_max, w_max)?;
        let norm2: f64 = svd.full_spectrum.iter().map(|s| s * s).sum();
        let k = svd.kept;
        self.sites[bond] = Tensor3::from_vec(dl, d, k, svd.u);
        let mut sv = svd.vt;
        let cols = sv.len() / k;
        for r in 0..k {
            sv[r * cols..(r + 1) * cols].iter_mut().for_each(|x| *x *= svd.s[r]);
        }
        let next = &self.sites[bond + 1];
        let data = matmul_rm(&sv, k, cols, &next.data, next.d * next.dr);
        self.sites[bond + 1] = Tensor3::from_vec(k, next.d, next.dr, data);
        self.center = Some(bond + 1);
        let mut report = TruncationReport::default();
        report.record(if norm2 > 0.0 { svd.discarded } else { 0.0 }, k, svd.capped);
        Ok(report)
    }

    /// Schmidt coefficients across the bond after site `bond`, normalized.
    pub fn schmidt_values(&self, bond: usize) -> Result<Vec<f64>> {
        if bond + 1 >= self.len() {
            return Err(Error::Config(format!("bond {bond} is outside the chain")));
        }
        let mut c = self.clone();
        c.move_center(bond);
        let t = &c.sites[bond];
        let svd = truncated_svd(&t.data, t.dl * t.d, t.dr, usize::MAX, 0.0)?;
        let norm = svd.full_spectrum.iter().map(|s| s * s).sum::<f64>().sqrt();
        Ok(svd.full_spectrum.iter().map(|s| s / norm).collect())
    }

    /// Von Neumann entropy (nats) of the bipartition after site `bond`.
    pub fn bond_entropy(&self, bond: usize) -> Result<f64> {
        let probs: Vec<f64> = self.schmidt_values(bond)?.iter().map(|s| s * s).collect();
        Ok(shannon_nats(&probs))
    }

    /// `⟨self|op|self⟩` by full transfer contraction (not normalized).
    pub fn expectation(&self, op: &Mpo) -> f64 {
        sandwich(self, op, self)
    }

    /// `⟨self|other⟩`. States are real, so the overlap is real.
    pub fn overlap(&self, other: &Mps) -> f64 {
        let ident = Mpo::identity(&self.local_dims());
        sandwich(self, &ident, other)
    }

    /// Single-site reduced density matrix (`d × d`, row-major) of a
    /// normalized state.
    pub fn site_density_matrix(&self, site: usize) -> Vec<f64> {
        let mut c = self.clone();
        c.move_center(site);
        let t = &c.sites[site];
        let d = t.d;
        let mut rho = vec![0.0; d * d];
        for l in 0..t.dl {
            for s in 0..d {
                for sp in 0..d {
                    let mut acc = 0.0;
                    for r in 0..t.dr {
                        acc += t.get(l, s, r) * t.get(l, sp, r);
                    }
                    rho[s * d + sp] += acc;
                }
            }
        }
        let tr: f64 = (0..d).map(|i| rho[i * d + i]).sum();
        if tr > 0.0 {
            rho.iter_mut().for_each(|x| *x /= tr);
        }
        rho
    }
}

/// `⟨bra|op|ket⟩`.
pub fn sandwich(bra: &Mps, op: &Mpo, ket: &Mps) -> f64 {
    assert_eq!(bra.len(), op.len());
    assert_eq!(ket.len(), op.len());
    let mut env = Env::boundary();
    for i in 0..op.len() {
        env = extend_left(&env, &bra.sites[i], &op.sites[i], &ket.sites[i], Par::Seq);
    }
    env.data[0]
}
