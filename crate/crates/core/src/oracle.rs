//! Exact diagonalization of small truncated instances, used to check the
//! chain, MPO, solver and observable code against brute force.

use serde::Serialize;

use crate::bath::WilsonChain;
use crate::dmrg::SolverConfig;
use crate::error::{Error, Result};
use crate::model::{build_two_chain_mpo, dense_hamiltonian, Geometry, LatticeLayout, ModelParams};
use crate::mpo::{Mpo, DENSE_LIMIT};
use crate::observables::{entropy_from_bloch, RunResult};
use crate::point::{run_point, PointSpec};
use crate::tensor::{matmul_rm, shannon_nats, sym_eigen};

/// Residual bound every returned eigenpair must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Slack on the variational bound.
pub const VARIATIONAL_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DenseSpectrum {
    /// Lowest eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Matching unit eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    pub dim: usize,
    pub local_dims: Vec<usize>,
    pub spin_site: usize,
}

impl DenseSpectrum {
    pub fn ground_energy(&self) -> f64 {
        self.values[0]
    }

    /// Spin observables `(⟨σx⟩, ⟨σz⟩, S_vN)` of eigenvector `k`.
    pub fn spin_observables(&self, k: usize) -> (f64, f64, f64) {
        dense_spin_observables(&self.vectors[k], &self.local_dims, self.spin_site)
    }

    /// Largest splitting inside consecutive pairs of the returned levels.
    pub fn pair_splitting(&self) -> f64 {
        self.values.chunks_exact(2).map(|p| p[1] - p[0]).fold(0.0, f64::max)
    }
}

/// Lowest `k` eigenpairs of `mpo` by dense diagonalization.
pub fn dense_spectrum(mpo: &Mpo, spin_site: usize, k: usize) -> Result<DenseSpectrum> {
    let local_dims = mpo.local_dims();
    let dim: usize = local_dims.iter().product();
    if dim > DENSE_LIMIT {
        return Err(Error::DimensionLimit { dim, limit: DENSE_LIMIT });
    }
    let h = dense_hamiltonian(mpo)?;
    let (vals, vecs) = sym_eigen(&h, dim)?;
    let k = k.min(dim);
    let vectors: Vec<Vec<f64>> = (0..k).map(|j| (0..dim).map(|i| vecs[(i, j)]).collect()).collect();
    for (j, v) in vectors.iter().enumerate() {
        let hv = matmul_rm(&h, dim, dim, v, 1);
        let r = hv.iter().zip(v).map(|(a, b)| (a - vals[j] * b).powi(2)).sum::<f64>().sqrt();
        if r > RESIDUAL_TOL * vals[j].abs().max(1.0) {
            return Err(Error::Numerical(format!("dense eigenpair {j} has residual {r:e}")));
        }
    }
    Ok(DenseSpectrum {
        values: vals[..k].to_vec(),
        vectors,
        dim,
        local_dims,
        spin_site,
    })
}

/// Dense spectrum of the two-chain model with the given chains. `d_p` bare
/// levels per boson, chain length taken from the chains.
pub fn exact_ground_state(
    params: &ModelParams,
    chain_z: &WilsonChain,
    chain_x: &WilsonChain,
    d_p: usize,
    k: usize,
) -> Result<DenseSpectrum> {
    let layout = LatticeLayout::two_chain(chain_z.len(), d_p);
    let dim: usize = layout.local_dims.iter().product();
    if dim > DENSE_LIMIT {
        return Err(Error::DimensionLimit { dim, limit: DENSE_LIMIT });
    }
    let mpo = build_two_chain_mpo(params, chain_z, chain_x, d_p)?;
    dense_spectrum(&mpo, layout.spin_site(), k)
}

/// Dense spectrum for a point spec of either geometry.
pub fn exact_for(spec: &PointSpec, d_p: usize, k: usize) -> Result<DenseSpectrum> {
    let layout = spec.layout(d_p);
    let dim: usize = layout.local_dims.iter().product();
    if dim > DENSE_LIMIT {
        return Err(Error::DimensionLimit { dim, limit: DENSE_LIMIT });
    }
    dense_spectrum(&spec.mpo(d_p)?, layout.spin_site(), k)
}

/// Spin `(⟨σx⟩, ⟨σz⟩, S_vN)` of a dense real state.
pub fn dense_spin_observables(v: &[f64], local_dims: &[usize], spin_site: usize) -> (f64, f64, f64) {
    let left: usize = local_dims[..spin_site].iter().product();
    let right: usize = local_dims[spin_site + 1..].iter().product();
    let mut rho = [0.0f64; 4];
    for l in 0..left {
        for s in 0..2 {
            for sp in 0..2 {
                let a = (l * 2 + s) * right;
                let b = (l * 2 + sp) * right;
                rho[s * 2 + sp] += (0..right).map(|r| v[a + r] * v[b + r]).sum::<f64>();
            }
        }
    }
    let tr = rho[0] + rho[3];
    rho.iter_mut().for_each(|x| *x /= tr);
    let sx = rho[1] + rho[2];
    let sz = rho[0] - rho[3];
    let (ev, _) = sym_eigen(&rho, 2).expect("2x2 eigensolve");
    (sx, sz, shannon_nats(&ev.iter().map(|p| p.max(0.0)).collect::<Vec<_>>()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub quantity: &'static str,
    pub got: f64,
    pub want: f64,
    pub tol: f64,
}

/// Compares a run with the dense ground state. Both must use the same pilot
/// field, which makes the dense ground state the symmetry-broken member the
/// run is expected to find.
pub fn oracle_compare(run: &RunResult, spectrum: &DenseSpectrum, tol_e: f64, tol_obs: f64) -> Vec<Violation> {
    let e0 = spectrum.ground_energy();
    let (sx, sz, svn) = spectrum.spin_observables(0);
    let mut out = Vec::new();
    let mut check = |quantity, got: f64, want: f64, tol: f64| {
        if !((got - want).abs() <= tol) {
            out.push(Violation { quantity, got, want, tol });
        }
    };
    check("energy", run.energy, e0, tol_e);
    check("sx", run.sx, sx, tol_obs);
    check("sz", run.sz, sz, tol_obs);
    check("svn", run.svn, svn, tol_obs);
    if run.energy < e0 - VARIATIONAL_SLACK {
        out.push(Violation {
            quantity: "variational_bound",
            got: run.energy,
            want: e0,
            tol: VARIATIONAL_SLACK,
        });
    }
    if (run.svn - entropy_from_bloch(run.bloch_norm)).abs() > crate::observables::ENTROPY_IDENTITY_TOL {
        out.push(Violation {
            quantity: "entropy_identity",
            got: run.svn,
            want: entropy_from_bloch(run.bloch_norm),
            tol: crate::observables::ENTROPY_IDENTITY_TOL,
        });
    }
    out
}

/// The fixed oracle instances: `(sites per chain, d_p)`.
pub const ED_GRID: [(usize, usize); 8] = [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3)];

/// Pilot used for the oracle comparisons.
pub const ORACLE_PILOT: f64 = -1e-5;

#[derive(Clone, Copy, Debug)]
pub struct OracleInstance {
    pub name: &'static str,
    pub spec: PointSpec,
    pub d_p: usize,
}

fn oracle_points() -> [(&'static str, ModelParams); 2] {
    [
        (
            "weak",
            ModelParams {
                alpha: 0.02,
                beta: 0.01,
                pilot_z: ORACLE_PILOT,
                ..Default::default()
            },
        ),
        (
            "strong",
            ModelParams {
                epsilon: 0.05,
                delta: 0.1,
                alpha: 0.3,
                s: 0.3,
                beta: 0.2,
                s_bar: 0.2,
                ..Default::default()
            },
        ),
    ]
}

/// Every oracle instance: each physical point on each grid size.
pub fn published_grid() -> Vec<OracleInstance> {
    let mut out = Vec::new();
    for (name, params) in oracle_points() {
        for &(l, d_p) in &ED_GRID {
            out.push(OracleInstance {
                name,
                spec: PointSpec {
                    params,
                    geometry: Geometry::TwoChain,
                    chain_length: l,
                    ..Default::default()
                },
                d_p,
            });
        }
    }
    out
}

/// Solver budget under which the DMRG result is exact at oracle scale. The
/// pilot splits the ground pair by only ~1e-5, so the state error is about
/// residual/1e-5 and the eigensolver tolerance sits far below the energy
/// target.
pub fn oracle_solver(d_p: usize) -> SolverConfig {
    SolverConfig {
        d_c: 64,
        w_max: 1e-14,
        d_p,
        d_opt: d_p,
        max_sweeps: 30,
        energy_tol: 1e-12,
        eigensolver_tol: 1e-18,
        eigensolver_max_iter: 1000,
        seed: 7,
        strict: true,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub name: &'static str,
    pub chain_length: usize,
    pub d_p: usize,
    pub dim: usize,
    pub dmrg_energy: f64,
    pub dense_energy: f64,
    pub violations: Vec<Violation>,
}

impl OracleRow {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const ORACLE_TOL_E: f64 = 1e-8;
pub const ORACLE_TOL_OBS: f64 = 1e-6;

pub fn check_instance(inst: &OracleInstance) -> Result<OracleRow> {
    let cfg = oracle_solver(inst.d_p);
    let run = run_point(&inst.spec, &cfg, None)?;
    let spectrum = exact_for(&inst.spec, inst.d_p, 2)?;
    Ok(OracleRow {
        name: inst.name,
        chain_length: inst.spec.chain_length,
        d_p: inst.d_p,
        dim: spectrum.dim,
        dmrg_energy: run.result.energy,
        dense_energy: spectrum.ground_energy(),
        violations: oracle_compare(&run.result, &spectrum, ORACLE_TOL_E, ORACLE_TOL_OBS),
    })
}

/// Runs the whole oracle grid.
pub fn validate_all() -> Result<Vec<OracleRow>> {
    published_grid().iter().map(check_instance).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::ChainMethod;
    use crate::model::build_chains;
    use crate::mps::Mps;
    use crate::observables::parity_of_combination;
    use num_complex::Complex64;

    fn spec(params: ModelParams, l: usize) -> PointSpec {
        PointSpec {
            params,
            chain_length: l,
            ..Default::default()
        }
    }

    #[test]
    fn zero_coupling_spectrum() {
        let p = ModelParams { epsilon: 0.3, delta: 0.4, ..Default::default() };
        let sp = exact_for(&spec(p, 2), 3, 4).unwrap();
        assert!((sp.ground_energy() + 0.25).abs() < 1e-12);
        let (cz, _) = build_chains(&p, 2.0, 2, ChainMethod::ClosedForm).unwrap();
        // Lowest excitation: flip the spin or excite the softest chain mode.
        let tb = crate::tensor::sym_eigen(
            &[cz.site_energies[0], cz.hoppings[0], cz.hoppings[0], cz.site_energies[1]],
            2,
        )
        .unwrap()
        .0[0];
        let gap = sp.values[1] - sp.values[0];
        assert!((gap - 0.5f64.min(tb)).abs() < 1e-10, "{gap} vs {tb}");
    }

    #[test]
    fn dimension_cap_refuses() {
        let p = ModelParams::default();
        assert!(matches!(exact_for(&spec(p, 4), 4, 1), Err(Error::DimensionLimit { .. })));
    }

    #[test]
    fn pilot_free_spectrum_is_paired() {
        for (a, b) in [(0.02, 0.01), (0.3, 0.2), (0.1, 0.4)] {
            let p = ModelParams { alpha: a, beta: b, s: 0.3, s_bar: 0.2, ..Default::default() };
            let sp = exact_for(&spec(p, 2), 3, 18 * 18).unwrap();
            assert_eq!(sp.values.len(), sp.dim);
            assert!(sp.pair_splitting() < 1e-10, "{}", sp.pair_splitting());
        }
    }

    #[test]
    fn single_mode_displaced_oscillator() {
        // σz coupling only, one chain site: E0 = −g²/ω, approached from above in d_p
        let p = ModelParams { alpha: 0.1, ..Default::default() };
        let (cz, cx) = build_chains(&p, 2.0, 1, ChainMethod::ClosedForm).unwrap();
        let g = 0.5 * cz.head_amplitude();
        let w = cz.site_energies[0];
        let exact = -g * g / w;
        let mut prev = f64::INFINITY;
        for d_p in 2..=12 {
            let e = exact_ground_state(&p, &cz, &cx, d_p, 1).unwrap().ground_energy();
            assert!(e <= prev + 1e-14 && e >= exact - 1e-12);
            prev = e;
        }
        assert!((prev - exact).abs() < 1e-10);
    }

    #[test]
    fn pilot_selects_sign() {
        let base = ModelParams { alpha: 0.3, beta: 0.1, ..Default::default() };
        for pilot in [1e-8, -1e-8] {
            let p = ModelParams { pilot_z: pilot, ..base };
            let (_, sz, _) = exact_for(&spec(p, 2), 3, 1).unwrap().spin_observables(0);
            assert!(sz * pilot < 0.0);
        }
    }

    #[test]
    fn parity_of_dense_pair() {
        let p = ModelParams { alpha: 0.3, beta: 0.1, ..Default::default() };
        let s = spec(p, 1);
        let sp = exact_for(&s, 3, 2).unwrap();
        let a = Mps::from_dense(&sp.vectors[0], &sp.local_dims).unwrap();
        let b = Mps::from_dense(&sp.vectors[1], &sp.local_dims).unwrap();
        let pi = std::f64::consts::PI;
        let plus = parity_of_combination(&a, &b, Complex64::i(), sp.spin_site, pi).unwrap();
        let minus = parity_of_combination(&a, &b, -Complex64::i(), sp.spin_site, pi).unwrap();
        assert!((plus.abs() - 1.0).abs() < 1e-3 && (minus.abs() - 1.0).abs() < 1e-3);
        assert!(plus * minus < 0.0);
    }

    #[test]
    fn grid_instance_matches() {
        let inst = published_grid().into_iter().find(|i| i.spec.chain_length == 2 && i.d_p == 3).unwrap();
        let row = check_instance(&inst).unwrap();
        assert!(row.passed(), "{:?}", row.violations);
    }

    #[test]
    fn under_converged_run_is_caught() {
        let inst = published_grid().into_iter().find(|i| i.name == "strong" && i.spec.chain_length == 3).unwrap();
        let cfg = SolverConfig { max_sweeps: 1, d_c: 2, ..oracle_solver(inst.d_p) };
        let run = run_point(&inst.spec, &cfg, None).unwrap();
        let sp = exact_for(&inst.spec, inst.d_p, 1).unwrap();
        let v = oracle_compare(&run.result, &sp, ORACLE_TOL_E, ORACLE_TOL_OBS);
        assert!(v.iter().any(|v| v.quantity == "energy"));
    }
}
