//! Matrix-product operators stored as sparse lists of local operator blocks.
//!
//! Every site tensor `W[wl, wr]` is a `d × d` operator; only non-zero blocks
//! are kept, and identity blocks are tagged so contractions can skip the
//! multiplication.

use crate::error::{Error, Result};
use crate::tensor::matmul_rm;

/// Largest Hilbert dimension [`Mpo::dense`] will expand.
pub const DENSE_LIMIT: usize = 20_000;

#[derive(Clone, Debug, PartialEq)]
pub enum LocalOp {
    Identity,
    /// Row-major `d × d`, `op[out * d + in]`.
    Dense(Vec<f64>),
}

impl LocalOp {
    pub fn to_dense(&self, d: usize) -> Vec<f64> {
        match self {
            LocalOp::Identity => identity(d),
            LocalOp::Dense(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpTerm {
    pub left: usize,
    pub right: usize,
    pub op: LocalOp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpoSite {
    pub d: usize,
    pub wl: usize,
    pub wr: usize,
    pub terms: Vec<OpTerm>,
}

impl MpoSite {
    /// Change the physical basis with an isometry `u` (`d × k`, row-major):
    /// every block becomes `uᵀ·op·u`.
    pub fn rotated(&self, u: &[f64], k: usize) -> MpoSite {
        let d = self.d;
        assert_eq!(u.len(), d * k);
        let ut: Vec<f64> = (0..k * d).map(|i| u[(i % d) * k + i / d]).collect();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let op = match &t.op {
                    LocalOp::Identity => LocalOp::Identity,
                    LocalOp::Dense(m) => {
                        let mu = matmul_rm(m, d, d, u, k);
                        LocalOp::Dense(matmul_rm(&ut, k, d, &mu, k))
                    }
                };
                OpTerm {
                    left: t.left,
                    right: t.right,
                    op,
                }
            })
            .collect();
        MpoSite {
            d: k,
            wl: self.wl,
            wr: self.wr,
            terms,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mpo {
    pub sites: Vec<MpoSite>,
}

pub fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

/// A Hamiltonian made of on-site terms and nearest-neighbour products.
#[derive(Clone, Debug, Default)]
pub struct NearestNeighbor {
    pub local_dims: Vec<usize>,
    pub onsite: Vec<Option<Vec<f64>>>,
    /// `bonds[i]` couples sites `i` and `i + 1` through `Σ_k A_k ⊗ B_k`.
    pub bonds: Vec<Vec<(Vec<f64>, Vec<f64>)>>,
}

impl NearestNeighbor {
    pub fn new(local_dims: Vec<usize>) -> Self {
        let n = local_dims.len();
        Self {
            onsite: vec![None; n],
            bonds: vec![Vec::new(); n.saturating_sub(1)],
            local_dims,
        }
    }

    pub fn add_onsite(&mut self, site: usize, op: Vec<f64>) {
        let d = self.local_dims[site];
        assert_eq!(op.len(), d * d);
        match &mut self.onsite[site] {
            Some(h) => h.iter_mut().zip(&op).for_each(|(a, b)| *a += b),
            slot => *slot = Some(op),
        }
    }

    pub fn add_bond(&mut self, site: usize, left: Vec<f64>, right: Vec<f64>) {
        assert_eq!(left.len(), self.local_dims[site].pow(2));
        assert_eq!(right.len(), self.local_dims[site + 1].pow(2));
        self.bonds[site].push((left, right));
    }

    /// Finite-automaton MPO: channel 0 of every bond means "nothing placed
    /// yet", the last channel "term complete", and the channels in between
    /// carry the left halves of that bond's products.
    pub fn to_mpo(&self) -> Mpo {
        let n = self.local_dims.len();
        let bond_dim = |b: usize| 2 + self.bonds[b].len();
        let mut sites = Vec::with_capacity(n);
        for i in 0..n {
            let d = self.local_dims[i];
            let wl = if i == 0 { 1 } else { bond_dim(i - 1) };
            let wr = if i + 1 == n { 1 } else { bond_dim(i) };
            let (l_start, r_done) = (0, wr - 1);
            let mut terms = Vec::new();
            if i + 1 < n {
                terms.push(OpTerm {
                    left: l_start,
                    right: 0,
                    op: LocalOp::Identity,
                });
                for (k, (a, _)) in self.bonds[i].iter().enumerate() {
                    terms.push(OpTerm {
                        left: l_start,
                        right: 1 + k,
                        op: LocalOp::Dense(a.clone()),
                    });
                }
            }
            if let Some(h) = &self.onsite[i] {
                terms.push(OpTerm {
                    left: l_start,
                    right: r_done,
                    op: LocalOp::Dense(h.clone()),
                });
            }
            if i > 0 {
                for (k, (_, b)) in self.bonds[i - 1].iter().enumerate() {
                    terms.push(OpTerm {
                        left: 1 + k,
                        right: r_done,
                        op: LocalOp::Dense(b.clone()),
                    });
                }
                terms.push(OpTerm {
                    left: wl - 1,
                    right: r_done,
                    op: LocalOp::Identity,
                });
            }
            sites.push(MpoSite { d, wl, wr, terms });
        }
        Mpo { sites }
    }
}

impl Mpo {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.d).collect()
    }

    /// Dimensions of the `len + 1` virtual bonds, boundaries included.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.sites.iter().map(|s| s.wl).collect();
        out.push(self.sites.last().map_or(1, |s| s.wr));
        out
    }

    pub fn identity(local_dims: &[usize]) -> Mpo {
        Mpo {
            sites: local_dims
                .iter()
                .map(|&d| MpoSite {
                    d,
                    wl: 1,
                    wr: 1,
                    terms: vec![OpTerm {
                        left: 0,
                        right: 0,
                        op: LocalOp::Identity,
                    }],
                })
                .collect(),
        }
    }

    /// Product operator: `op` on `site`, identity elsewhere.
    pub fn single_site(local_dims: &[usize], site: usize, op: Vec<f64>) -> Mpo {
        let mut mpo = Mpo::identity(local_dims);
        assert_eq!(op.len(), local_dims[site].pow(2));
        mpo.sites[site].terms[0].op = LocalOp::Dense(op);
        mpo
    }

    pub fn hilbert_dim(&self) -> usize {
        self.sites.iter().map(|s| s.d).product()
    }

    /// Full contraction into a dense row-major matrix; site 0 is the most
    /// significant index.
    pub fn dense(&self) -> Result<Vec<f64>> {
        let dim = self
            .sites
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.d))
            .unwrap_or(usize::MAX);
        if dim > DENSE_LIMIT {
            return Err(Error::DimensionLimit {
                dim,
                limit: DENSE_LIMIT,
            });
        }
        let mut part_dim = 1usize;
        let mut blocks: Vec<Vec<f64>> = vec![vec![1.0]];
        for site in &self.sites {
            let d = site.d;
            let nd = part_dim * d;
            let mut next = vec![vec![0.0; nd * nd]; site.wr];
            for term in &site.terms {
                let h = &blocks[term.left];
                let op = term.op.to_dense(d);
                let out = &mut next[term.right];
                for i in 0..part_dim {
                    for j in 0..part_dim {
                        let hij = h[i * part_dim + j];
                        if hij == 0.0 {
                            continue;
                        }
                        for a in 0..d {
                            let row = (i * d + a) * nd + j * d;
                            for b in 0..d {
                                out[row + b] += hij * op[a * d + b];
                            }
                        }
                    }
                }
            }
            blocks = next;
            part_dim = nd;
        }
        Ok(blocks.swap_remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_mpo_contracts_to_identity() {
        let mpo = Mpo::identity(&[2, 3]);
        let h = mpo.dense().unwrap();
        assert_eq!(h, identity(6));
    }

    #[test]
    fn nearest_neighbor_dense_matches_kron() {
        // H = h0 ⊗ 1 + 1 ⊗ h1 + A ⊗ B on 2 ⊗ 2
        let mut nn = NearestNeighbor::new(vec![2, 2]);
        nn.add_onsite(0, vec![1.0, 0.0, 0.0, -1.0]);
        nn.add_onsite(1, vec![0.0, 0.5, 0.5, 0.0]);
        nn.add_bond(0, vec![0.0, 1.0, 1.0, 0.0], vec![2.0, 0.0, 0.0, 3.0]);
        let h = nn.to_mpo().dense().unwrap();
        #[rustfmt::skip]
        let want = [
            1.0, 0.5, 2.0, 0.0,
            0.5, 1.0, 0.0, 3.0,
            2.0, 0.0, -1.0, 0.5,
            0.0, 3.0, 0.5, -1.0,
        ];
        assert_eq!(h, want);
    }

    #[test]
    fn dense_refuses_huge_operators() {
        let mpo = Mpo::identity(&[50, 50, 50]);
        assert!(matches!(mpo.dense(), Err(Error::DimensionLimit { .. })));
    }

    #[test]
    fn rotation_by_identity_is_noop() {
        let mut nn = NearestNeighbor::new(vec![3]);
        nn.add_onsite(0, (0..9).map(|x| x as f64).collect());
        let mpo = nn.to_mpo();
        let r = mpo.sites[0].rotated(&identity(3), 3);
        assert_eq!(r, mpo.sites[0]);
    }
}
