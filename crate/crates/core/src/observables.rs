//! Spin observables, entanglement entropy, fidelity and parity of converged
//! states.

use faer::{MatMut, MatRef, Par};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::ChainMethod;
use crate::dmrg::{Flag, GroundState, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{Geometry, ModelParams};
use crate::mps::Mps;
use crate::tensor::{gemm_into, shannon_nats};

/// Tolerance of the Bloch-vector / entropy consistency check.
pub const ENTROPY_IDENTITY_TOL: f64 = 1e-8;

/// One solved parameter point, flat enough to serialize as a single record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub energy: f64,
    pub sx: f64,
    /// Antisymmetric residue of the spin density matrix; zero for real states.
    pub sy: f64,
    pub sz: f64,
    /// Spin von Neumann entropy in nats.
    pub svn: f64,
    pub bloch_norm: f64,
    /// `|⟨ψ_prev|ψ⟩|` against the previous grid point, when there is one.
    pub fidelity_prev: Option<f64>,
    pub flags: Vec<Flag>,
    pub converged: bool,
    pub sweeps: usize,
    pub max_discarded: f64,
    pub max_bond: usize,
    pub geometry: Geometry,
    pub chain_length: usize,
    pub lambda: f64,
    pub chain_method: ChainMethod,
    #[serde(flatten)]
    pub params: ModelParams,
    #[serde(flatten)]
    pub solver: SolverConfig,
}

impl RunResult {
    pub fn flag_tokens(&self) -> String {
        self.flags.iter().map(Flag::token).collect::<Vec<_>>().join(";")
    }

    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    /// `|S_vN − S(r)|`, the gap in the two-level entropy identity.
    pub fn entropy_identity_error(&self) -> f64 {
        (self.svn - entropy_from_bloch(self.bloch_norm)).abs()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run results always serialize")
    }
}

/// Context needed to turn a ground state into a [`RunResult`].
#[derive(Clone, Copy, Debug)]
pub struct RunContext {
    pub params: ModelParams,
    pub geometry: Geometry,
    pub chain_length: usize,
    pub lambda: f64,
    pub chain_method: ChainMethod,
    pub solver: SolverConfig,
    pub spin_site: usize,
}

pub fn measure(gs: &GroundState, ctx: &RunContext) -> Result<RunResult> {
    let (sx, sy, sz) = spin_expectations(&gs.mps, ctx.spin_site)?;
    let svn = spin_entropy(&gs.mps, ctx.spin_site)?;
    let bloch_norm = (sx * sx + sy * sy + sz * sz).sqrt();
    let last = gs.stats.last().cloned().unwrap_or_default();
    Ok(RunResult {
        energy: gs.energy,
        sx,
        sy,
        sz,
        svn,
        bloch_norm,
        fidelity_prev: None,
        flags: gs.flags.clone(),
        converged: gs.stats.converged,
        sweeps: gs.stats.sweeps.len(),
        max_discarded: last.max_discarded,
        max_bond: gs.mps.max_bond(),
        geometry: ctx.geometry,
        chain_length: ctx.chain_length,
        lambda: ctx.lambda,
        chain_method: ctx.chain_method,
        params: ctx.params,
        solver: ctx.solver,
    })
}

/// Spin reduced density matrix (2×2, row-major, unit trace).
pub fn spin_density_matrix(psi: &Mps, spin_site: usize) -> Result<[f64; 4]> {
    if spin_site >= psi.len() || psi.sites[spin_site].d != 2 {
        return Err(Error::Config(format!("site {spin_site} is not a two-level site")));
    }
    let rho = psi.site_density_matrix(spin_site);
    Ok([rho[0], rho[1], rho[2], rho[3]])
}

/// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`; the middle entry is the antisymmetric residue of
/// the density matrix, which vanishes for real states.
pub fn spin_expectations(psi: &Mps, spin_site: usize) -> Result<(f64, f64, f64)> {
    let r = spin_density_matrix(psi, spin_site)?;
    Ok((r[1] + r[2], r[2] - r[1], r[0] - r[3]))
}

pub fn spin_entropy(psi: &Mps, spin_site: usize) -> Result<f64> {
    let r = spin_density_matrix(psi, spin_site)?;
    // Eigenvalues of the symmetric part in closed form.
    let (a, d, b) = (r[0], r[3], 0.5 * (r[1] + r[2]));
    let mean = 0.5 * (a + d);
    let half = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    Ok(shannon_nats(&[mean + half, (mean - half).max(0.0)]))
}

/// Entropy of a two-level density matrix with Bloch vector length `r`.
pub fn entropy_from_bloch(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    shannon_nats(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0])
}

/// `|⟨ψ|φ⟩|` of the normalized states.
pub fn fidelity(psi: &Mps, phi: &Mps) -> f64 {
    let n = (psi.overlap(psi) * phi.overlap(phi)).sqrt();
    if n == 0.0 {
        return 0.0;
    }
    (psi.overlap(phi) / n).abs().min(1.0)
}

/// Complex local operator, row-major `d × d`.
type COp = Vec<Complex64>;

fn parity_ops(psi: &Mps, spin_site: usize, phase: f64) -> Result<Vec<COp>> {
    if spin_site >= psi.len() || psi.sites[spin_site].d != 2 {
        return Err(Error::Config(format!("site {spin_site} is not a two-level site")));
    }
    let i = Complex64::i();
    Ok(psi
        .sites
        .iter()
        .enumerate()
        .map(|(k, t)| {
            if k == spin_site {
                vec![0.0.into(), -i, i, 0.0.into()]
            } else {
                let d = t.d;
                let mut m = vec![Complex64::new(0.0, 0.0); d * d];
                for n in 0..d {
                    m[n * d + n] = Complex64::from_polar(1.0, phase * n as f64);
                }
                m
            }
        })
        .collect())
}

/// `⟨bra|⊗_k O_k|ket⟩` for real states and complex product operators.
pub fn product_element(bra: &Mps, ket: &Mps, ops: &[COp]) -> Complex64 {
    assert_eq!(bra.len(), ket.len());
    assert_eq!(ops.len(), ket.len());
    // E = re + i·im, shape bra.dr × ket.dr
    let (mut re, mut im) = (vec![1.0], vec![0.0]);
    for ((a, b), op) in bra.sites.iter().zip(&ket.sites).zip(ops) {
        let d = b.d;
        let (db, dk) = (a.dr, b.dr);
        let (mut nre, mut nim) = (vec![0.0; db * dk], vec![0.0; db * dk]);
        let mut tre = vec![0.0; a.dl * dk];
        let mut tim = vec![0.0; a.dl * dk];
        for s in 0..d {
            // T = E · ket[:, s, :]
            let ks: Vec<f64> = (0..b.dl).flat_map(|l| (0..dk).map(move |r| (l, r))).map(|(l, r)| b.get(l, s, r)).collect();
            let km = MatRef::from_row_major_slice(&ks, b.dl, dk);
            gemm_into(MatMut::from_row_major_slice_mut(&mut tre, a.dl, dk), MatRef::from_row_major_slice(&re, a.dl, b.dl), km, false, Par::Seq);
            gemm_into(MatMut::from_row_major_slice_mut(&mut tim, a.dl, dk), MatRef::from_row_major_slice(&im, a.dl, b.dl), km, false, Par::Seq);
            for sp in 0..d {
                let c = op[sp * d + s];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let bs: Vec<f64> = (0..a.dl).flat_map(|l| (0..db).map(move |r| (l, r))).map(|(l, r)| a.get(l, sp, r)).collect();
                let bm = MatRef::from_row_major_slice(&bs, a.dl, db);
                // bra[:, s', :]ᵀ · T, then scale by c
                let mut pre = vec![0.0; db * dk];
                let mut pim = vec![0.0; db * dk];
                gemm_into(MatMut::from_row_major_slice_mut(&mut pre, db, dk), bm.transpose(), MatRef::from_row_major_slice(&tre, a.dl, dk), false, Par::Seq);
                gemm_into(MatMut::from_row_major_slice_mut(&mut pim, db, dk), bm.transpose(), MatRef::from_row_major_slice(&tim, a.dl, dk), false, Par::Seq);
                for k in 0..db * dk {
                    nre[k] += c.re * pre[k] - c.im * pim[k];
                    nim[k] += c.re * pim[k] + c.im * pre[k];
                }
            }
        }
        re = nre;
        im = nim;
    }
    Complex64::new(re[0], im[0])
}

/// `⟨bra|σy ⊗ e^{i·phase·Σn̂}|ket⟩`.
pub fn parity_element(bra: &Mps, ket: &Mps, spin_site: usize, phase: f64) -> Result<Complex64> {
    let ops = parity_ops(ket, spin_site, phase)?;
    Ok(product_element(bra, ket, &ops))
}

/// `⟨ψ|P|ψ⟩/⟨ψ|ψ⟩` as a complex number.
pub fn parity_expectation_complex(psi: &Mps, spin_site: usize, phase: f64) -> Result<Complex64> {
    Ok(parity_element(psi, psi, spin_site, phase)? / psi.overlap(psi))
}

/// Real part of the parity expectation. For real states at the default
/// phase π it vanishes identically; parity eigenstates are complex
/// combinations, see [`parity_of_combination`].
pub fn parity_expectation(psi: &Mps, spin_site: usize, phase: f64) -> Result<f64> {
    Ok(parity_expectation_complex(psi, spin_site, phase)?.re)
}

/// Parity of the normalized state `a + c·b` built from two real states.
pub fn parity_of_combination(a: &Mps, b: &Mps, c: Complex64, spin_site: usize, phase: f64) -> Result<f64> {
    let paa = parity_element(a, a, spin_site, phase)?;
    let pab = parity_element(a, b, spin_site, phase)?;
    let pba = parity_element(b, a, spin_site, phase)?;
    let pbb = parity_element(b, b, spin_site, phase)?;
    let num = paa + c * pab + c.conj() * pba + c.norm_sqr() * pbb;
    let den = a.overlap(a) + c.norm_sqr() * b.overlap(b) + 2.0 * c.re * a.overlap(b);
    Ok((num / den).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vac(d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[0] = 1.0;
        v
    }

    #[test]
    fn product_spin_states() {
        let up = Mps::product(&[vac(3), vec![1.0, 0.0], vac(3)]);
        assert_eq!(spin_expectations(&up, 1).unwrap(), (0.0, 0.0, 1.0));
        assert!(spin_entropy(&up, 1).unwrap().abs() < 1e-15);
        let h = 0.5f64.sqrt();
        let plus = Mps::product(&[vac(3), vec![h, h], vac(3)]);
        let (sx, sy, sz) = spin_expectations(&plus, 1).unwrap();
        assert!((sx - 1.0).abs() < 1e-15 && sy.abs() < 1e-15 && sz.abs() < 1e-15);
        assert!(matches!(spin_expectations(&plus, 0), Err(Error::Config(_))));
    }

    #[test]
    fn maximally_entangled_spin() {
        // (|↑,0⟩ + |↓,1⟩)/√2
        let h = 0.5f64.sqrt();
        let psi = Mps::from_dense(&[h, 0.0, 0.0, 0.0, h, 0.0], &[2, 3]).unwrap();
        assert!((spin_entropy(&psi, 0).unwrap() - 2f64.ln()).abs() < 1e-12);
        let (sx, _, sz) = spin_expectations(&psi, 0).unwrap();
        assert!(sx.abs() < 1e-12 && sz.abs() < 1e-12);
    }

    #[test]
    fn entropy_identity_on_random_states() {
        for seed in 0..20 {
            let psi = Mps::random(&[3, 2, 4], 3, seed);
            let (sx, sy, sz) = spin_expectations(&psi, 1).unwrap();
            let r = (sx * sx + sy * sy + sz * sz).sqrt();
            assert!(r <= 1.0 + 1e-9);
            let s = spin_entropy(&psi, 1).unwrap();
            assert!((s - entropy_from_bloch(r)).abs() < ENTROPY_IDENTITY_TOL);
            assert!((0.0..=2f64.ln() + 1e-12).contains(&s));
            assert!(sy.abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        let a = Mps::random(&[2, 3, 3], 3, 1);
        assert!((fidelity(&a, &a) - 1.0).abs() < 1e-12);
        let up = Mps::product(&[vec![1.0, 0.0], vac(3)]);
        let dn = Mps::product(&[vec![0.0, 1.0], vac(3)]);
        assert_eq!(fidelity(&up, &dn), 0.0);
    }

    #[test]
    fn parity_examples() {
        let up = Mps::product(&[vac(3), vec![1.0, 0.0], vac(3)]);
        let dn = Mps::product(&[vac(3), vec![0.0, 1.0], vac(3)]);
        let pi = std::f64::consts::PI;
        assert!(parity_expectation(&up, 1, pi).unwrap().abs() < 1e-15);
        // σy = +1 eigenstate (|↑⟩ + i|↓⟩)/√2 with bosons in vacuum
        let p = parity_of_combination(&up, &dn, Complex64::i(), 1, pi).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        let m = parity_of_combination(&up, &dn, -Complex64::i(), 1, pi).unwrap();
        assert!((m + 1.0).abs() < 1e-14);
        // one boson in the first mode flips the sign
        let mut one = vec![0.0; 3];
        one[1] = 1.0;
        let up1 = Mps::product(&[one.clone(), vec![1.0, 0.0], vac(3)]);
        let dn1 = Mps::product(&[one, vec![0.0, 1.0], vac(3)]);
        let p = parity_of_combination(&up1, &dn1, Complex64::i(), 1, pi).unwrap();
        assert!((p + 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_element_matches_dense() {
        let a = Mps::random(&[3, 2, 3], 4, 8);
        let b = Mps::random(&[3, 2, 3], 4, 9);
        let phase = 0.7;
        let z = parity_element(&a, &b, 1, phase).unwrap();
        let (va, vb) = (a.to_dense(), b.to_dense());
        let mut want = Complex64::new(0.0, 0.0);
        let i = Complex64::i();
        for n0 in 0..3 {
            for n2 in 0..3 {
                let g = Complex64::from_polar(1.0, phase * (n0 + n2) as f64);
                // σy: ⟨↑|σy|↓⟩ = −i, ⟨↓|σy|↑⟩ = i
                let idx = |s: usize| n0 * 6 + s * 3 + n2;
                want += g * (-i * va[idx(0)] * vb[idx(1)] + i * va[idx(1)] * vb[idx(0)]);
            }
        }
        assert!((z - want).norm() < 1e-12);
    }
}
