//! Two-site DMRG with an optimized local boson basis.
//!
//! Boson sites whose bare dimension exceeds `d_opt` are represented through
//! an isometry `U` (bare × optimized). The working state and the rotated MPO
//! live in the optimized basis; `U` is refreshed from the single-site reduced
//! density matrix of a bare-space local optimization.

use faer::{MatMut, MatRef, Par};
use serde::{Deserialize, Serialize};

use crate::env::{apply_middle, extend_left, extend_right, Env};
use crate::error::{Error, Result};
use crate::lanczos::{lowest, EigenPair, LanczosOptions};
use crate::mpo::{Mpo, MpoSite};
use crate::mps::{sandwich, Mps, TruncationReport};
use crate::tensor::{gemm_into, matmul_rm, sketched_svd, sym_eigen, Tensor3};

/// Largest supported bare boson dimension.
pub const MAX_D_P: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Bond dimension cap.
    pub d_c: usize,
    /// Discarded-weight target per cut.
    pub w_max: f64,
    /// Bare boson levels per site.
    pub d_p: usize,
    /// Optimized local basis size.
    pub d_opt: usize,
    pub max_sweeps: usize,
    pub energy_tol: f64,
    pub eigensolver_tol: f64,
    pub eigensolver_max_iter: usize,
    pub seed: u64,
    /// Fixed reduction order (no internal parallelism).
    pub strict: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            d_c: 50,
            w_max: 1e-7,
            d_p: 24,
            d_opt: 12,
            max_sweeps: 40,
            energy_tol: 1e-9,
            eigensolver_tol: 1e-9,
            eigensolver_max_iter: 200,
            seed: 1,
            strict: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_p < 2 || self.d_p > MAX_D_P {
            return Err(Error::Config(format!("d_p must lie in [2, {MAX_D_P}], got {}", self.d_p)));
        }
        if self.d_opt < 2 || self.d_opt > self.d_p {
            return Err(Error::Config(format!(
                "d_opt must lie in [2, d_p = {}], got {}",
                self.d_p, self.d_opt
            )));
        }
        if self.d_c < 2 {
            return Err(Error::Config(format!("d_c must be at least 2, got {}", self.d_c)));
        }
        if self.max_sweeps == 0 || self.eigensolver_max_iter == 0 {
            return Err(Error::Config("sweep and iteration limits must be positive".into()));
        }
        for (name, v) in [
            ("w_max", self.w_max),
            ("energy_tol", self.energy_tol),
            ("eigensolver_tol", self.eigensolver_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn par(&self) -> Par {
        if self.strict {
            Par::Seq
        } else {
            Par::rayon(0)
        }
    }
}

/// Conditions that make a result untrustworthy without being errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// `max_sweeps` reached before the energy settled.
    NotConverged,
    /// Final sweep discarded more weight than `w_max` at some cut.
    TruncationAboveTarget,
    /// A local eigenproblem hit its iteration cap in the final sweep.
    EigensolverNotConverged,
    /// Some sweep raised the energy by more than `energy_tol`.
    EnergyIncrease,
}

impl Flag {
    pub fn token(&self) -> &'static str {
        match self {
            Flag::NotConverged => "not_converged",
            Flag::TruncationAboveTarget => "truncation_above_target",
            Flag::EigensolverNotConverged => "eigensolver_not_converged",
            Flag::EnergyIncrease => "energy_increase",
        }
    }

    pub fn parse(token: &str) -> Option<Flag> {
        [
            Flag::NotConverged,
            Flag::TruncationAboveTarget,
            Flag::EigensolverNotConverged,
            Flag::EnergyIncrease,
        ]
        .into_iter()
        .find(|f| f.token() == token)
    }
}

/// Amplitude added towards the requested spin state in a biased start.
pub const SPIN_BIAS: f64 = 2.0;

/// Slack allowed for sweep-to-sweep energy increases.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub energy: f64,
    pub energy_change: f64,
    pub max_discarded: f64,
    pub max_bond: usize,
    /// Largest single-site weight dropped by a basis rotation (0 if none ran).
    pub basis_discarded: f64,
    pub basis_updated: bool,
    pub eigensolver_failures: usize,
    pub matvecs: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub sweeps: Vec<SweepRecord>,
    pub converged: bool,
}

impl SweepStats {
    pub fn energies(&self) -> Vec<f64> {
        self.sweeps.iter().map(|s| s.energy).collect()
    }

    pub fn last(&self) -> Option<&SweepRecord> {
        self.sweeps.last()
    }
}

/// Working representation reusable as a warm start for a nearby problem.
#[derive(Clone, Debug)]
pub struct WarmStart {
    pub mps: Mps,
    /// Per-site isometry (bare × optimized), `None` where no rotation is used.
    pub bases: Vec<Option<Vec<f64>>>,
}

#[derive(Clone, Debug)]
pub struct GroundState {
    /// `⟨ψ|H|ψ⟩` of the normalized bare-basis state.
    pub energy: f64,
    /// Normalized state in the bare basis.
    pub mps: Mps,
    pub stats: SweepStats,
    pub truncation: TruncationReport,
    pub flags: Vec<Flag>,
    pub warm: WarmStart,
}

/// Outcome of [`optimized_basis_update`].
#[derive(Clone, Debug)]
pub struct BasisUpdate {
    /// Bare × kept isometry, row-major.
    pub rotation: Vec<f64>,
    /// Natural-level weights, descending, all of them.
    pub weights: Vec<f64>,
    pub discarded: f64,
}

/// Natural levels of the site tensor `x` (treated as the orthogonality
/// center): eigenvectors of its single-site reduced density matrix.
pub fn natural_basis(x: &Tensor3, keep: usize) -> Result<BasisUpdate> {
    let d = x.d;
    if keep > d {
        return Err(Error::Config(format!("cannot keep {keep} of {d} local levels")));
    }
    let mut rho = vec![0.0; d * d];
    let cols = x.dr;
    for l in 0..x.dl {
        let blk = &x.data[l * d * cols..(l + 1) * d * cols];
        let m = MatRef::from_row_major_slice(blk, d, cols);
        gemm_into(MatMut::from_row_major_slice_mut(&mut rho, d, d), m, m.transpose(), true, Par::Seq);
    }
    let tr: f64 = (0..d).map(|i| rho[i * d + i]).sum();
    if !(tr > 0.0) {
        return Err(Error::DegenerateInput("site tensor has zero norm".into()));
    }
    let (vals, vecs) = sym_eigen(&rho, d)?;
    let weights: Vec<f64> = vals.iter().rev().map(|v| (v / tr).max(0.0)).collect();
    let mut rotation = vec![0.0; d * keep];
    for j in 0..keep {
        let col = d - 1 - j;
        // Fix the sign so the largest component is positive.
        let mut big = 0.0f64;
        for i in 0..d {
            if vecs[(i, col)].abs() > big.abs() {
                big = vecs[(i, col)];
            }
        }
        let sign = if big < 0.0 { -1.0 } else { 1.0 };
        for i in 0..d {
            rotation[i * keep + j] = sign * vecs[(i, col)];
        }
    }
    let discarded = weights[keep..].iter().sum();
    Ok(BasisUpdate {
        rotation,
        weights,
        discarded,
    })
}

/// Rotate the physical leg of `site` (the orthogonality center) onto the
/// `d_opt` most probable natural levels. The returned state is renormalized.
pub fn optimized_basis_update(psi: &Mps, site: usize, d_opt: usize) -> Result<(BasisUpdate, Mps)> {
    if site >= psi.len() {
        return Err(Error::Config(format!("site {site} is outside the chain")));
    }
    let d = psi.sites[site].d;
    if d_opt > d {
        return Err(Error::Config(format!("d_opt = {d_opt} exceeds the local dimension {d}")));
    }
    let mut out = psi.clone();
    out.move_center(site);
    let upd = natural_basis(&out.sites[site], d_opt)?;
    out.sites[site] = out.sites[site].map_physical(&upd.rotation, d_opt);
    out.normalize();
    Ok((upd, out))
}

fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; a.len()];
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = a[r * cols + c];
        }
    }
    t
}

/// `y = H_eff x` for one site; `x` has shape `(dl, d, dr)`.
pub(crate) fn apply_one(l: &Env, w: &MpoSite, r: &Env, x: &[f64], y: &mut [f64], par: Par) {
    let (dl, d, dr) = (l.ket, w.d, r.ket);
    let size = dl * d * dr;
    let mut t = vec![0.0; l.w * size];
    for wi in 0..l.w {
        gemm_into(
            MatMut::from_row_major_slice_mut(&mut t[wi * size..(wi + 1) * size], dl, d * dr),
            l.block_mat(wi),
            MatRef::from_row_major_slice(x, dl, d * dr),
            false,
            par,
        );
    }
    let mut u = vec![0.0; w.wr * size];
    for term in &w.terms {
        apply_middle(
            &term.op,
            &t[term.left * size..(term.left + 1) * size],
            &mut u[term.right * size..(term.right + 1) * size],
            dl,
            d,
            d,
            dr,
            par,
        );
    }
    y.iter_mut().for_each(|v| *v = 0.0);
    for wi in 0..w.wr {
        gemm_into(
            MatMut::from_row_major_slice_mut(y, dl * d, dr),
            MatRef::from_row_major_slice(&u[wi * size..(wi + 1) * size], dl * d, dr),
            r.block_mat(wi).transpose(),
            true,
            par,
        );
    }
}

/// `y = H_eff x` for two sites; `x` has shape `(dl, d1, d2, dr)`.
pub(crate) fn apply_two(l: &Env, w1: &MpoSite, w2: &MpoSite, r: &Env, x: &[f64], y: &mut [f64], par: Par) {
    let (dl, d1, d2, dr) = (l.ket, w1.d, w2.d, r.ket);
    let size = dl * d1 * d2 * dr;
    let mut t = vec![0.0; l.w * size];
    for wi in 0..l.w {
        gemm_into(
            MatMut::from_row_major_slice_mut(&mut t[wi * size..(wi + 1) * size], dl, d1 * d2 * dr),
            l.block_mat(wi),
            MatRef::from_row_major_slice(x, dl, d1 * d2 * dr),
            false,
            par,
        );
    }
    let mut z = vec![0.0; w1.wr * size];
    for term in &w1.terms {
        apply_middle(
            &term.op,
            &t[term.left * size..(term.left + 1) * size],
            &mut z[term.right * size..(term.right + 1) * size],
            dl,
            d1,
            d1,
            d2 * dr,
            par,
        );
    }
    drop(t);
    let mut v = vec![0.0; w2.wr * size];
    for term in &w2.terms {
        apply_middle(
            &term.op,
            &z[term.left * size..(term.left + 1) * size],
            &mut v[term.right * size..(term.right + 1) * size],
            dl * d1,
            d2,
            d2,
            dr,
            par,
        );
    }
    y.iter_mut().for_each(|e| *e = 0.0);
    for wi in 0..w2.wr {
        gemm_into(
            MatMut::from_row_major_slice_mut(y, dl * d1 * d2, dr),
            MatRef::from_row_major_slice(&v[wi * size..(wi + 1) * size], dl * d1 * d2, dr),
            r.block_mat(wi).transpose(),
            true,
            par,
        );
    }
}

/// Sites that carry an optimized basis under `cfg`.
fn rotated_sites(mpo: &Mpo, cfg: &SolverConfig) -> Vec<bool> {
    mpo.local_dims().iter().map(|&d| d > cfg.d_opt).collect()
}

/// True for sweeps (1-based) that refresh the local bases.
pub fn basis_update_due(sweep: usize) -> bool {
    sweep <= 5 || (sweep - 5) % 2 == 0
}

struct Solver<'a> {
    bare: &'a Mpo,
    cfg: SolverConfig,
    par: Par,
    lz: LanczosOptions,
    w: Vec<MpoSite>,
    bases: Vec<Option<Vec<f64>>>,
    psi: Mps,
    left: Vec<Env>,
    right: Vec<Env>,
    matvecs: usize,
    eig_failures: usize,
    max_discarded: f64,
    basis_discarded: f64,
    report: TruncationReport,
}

impl<'a> Solver<'a> {
    fn n(&self) -> usize {
        self.psi.len()
    }

    fn tally(&mut self, pair: EigenPair) -> Vec<f64> {
        self.matvecs += pair.iterations;
        if !pair.converged {
            self.eig_failures += 1;
        }
        pair.vector
    }

    /// Re-optimize site `i` (the center) in its bare space and rotate.
    fn update_basis(&mut self, i: usize) -> Result<()> {
        let Some(u) = self.bases[i].clone() else {
            return Ok(());
        };
        let k = self.psi.sites[i].d;
        let dp = self.bare.sites[i].d;
        let ut = transpose(&u, dp, k);
        let lifted = self.psi.sites[i].map_physical(&ut, dp);
        let (l, r, w, par) = (&self.left[i], &self.right[i + 1], &self.bare.sites[i], self.par);
        let pair = lowest(|x, y| apply_one(l, w, r, x, y, par), &lifted.data, &[], &self.lz)?;
        let x = self.tally(pair);
        let x = Tensor3::from_vec(lifted.dl, dp, lifted.dr, x);
        let upd = natural_basis(&x, self.cfg.d_opt)?;
        let mut t = x.map_physical(&upd.rotation, self.cfg.d_opt);
        let nrm = t.norm_sqr().sqrt();
        t.scale(1.0 / nrm);
        self.psi.sites[i] = t;
        self.w[i] = self.bare.sites[i].rotated(&upd.rotation, self.cfg.d_opt);
        self.bases[i] = Some(upd.rotation);
        self.basis_discarded = self.basis_discarded.max(upd.discarded);
        Ok(())
    }

    /// Optimize the bond `(i, i+1)` and move the center one step.
    fn two_site(&mut self, i: usize, rightward: bool) -> Result<()> {
        let (a, b) = (&self.psi.sites[i], &self.psi.sites[i + 1]);
        let (dl, d1, d2, dr) = (a.dl, a.d, b.d, b.dr);
        let theta = matmul_rm(&a.data, dl * d1, a.dr, &b.data, d2 * dr);
        let (l, r, w1, w2, par) = (&self.left[i], &self.right[i + 2], &self.w[i], &self.w[i + 1], self.par);
        let pair = lowest(|x, y| apply_two(l, w1, w2, r, x, y, par), &theta, &[], &self.lz)?;
        let x = self.tally(pair);
        let svd = sketched_svd(&x, dl * d1, d2 * dr, self.cfg.d_c, self.cfg.w_max)?;
        let k = svd.kept;
        let snorm = svd.s.iter().map(|s| s * s).sum::<f64>().sqrt();
        self.max_discarded = self.max_discarded.max(svd.discarded);
        self.report.record(svd.discarded, k, svd.capped);
        if rightward {
            let mut vt = svd.vt;
            for (row, s) in vt.chunks_mut(d2 * dr).zip(&svd.s) {
                row.iter_mut().for_each(|v| *v *= s / snorm);
            }
            self.psi.sites[i] = Tensor3::from_vec(dl, d1, k, svd.u);
            self.psi.sites[i + 1] = Tensor3::from_vec(k, d2, dr, vt);
            self.left[i + 1] = extend_left(&self.left[i], &self.psi.sites[i], &self.w[i], &self.psi.sites[i], par);
            self.psi.center = Some(i + 1);
        } else {
            let mut u = svd.u;
            for row in u.chunks_mut(k) {
                row.iter_mut().zip(&svd.s).for_each(|(v, s)| *v *= s / snorm);
            }
            self.psi.sites[i] = Tensor3::from_vec(dl, d1, k, u);
            self.psi.sites[i + 1] = Tensor3::from_vec(k, d2, dr, svd.vt);
            self.right[i + 1] =
                extend_right(&self.right[i + 2], &self.psi.sites[i + 1], &self.w[i + 1], &self.psi.sites[i + 1], par);
            self.psi.center = Some(i);
        }
        Ok(())
    }

    fn center_energy(&self) -> f64 {
        let c = self.psi.center.unwrap_or(0);
        let t = &self.psi.sites[c];
        let mut y = vec![0.0; t.data.len()];
        apply_one(&self.left[c], &self.w[c], &self.right[c + 1], &t.data, &mut y, self.par);
        let e: f64 = y.iter().zip(&t.data).map(|(a, b)| a * b).sum();
        e / t.norm_sqr()
    }

    /// One full right-then-left sweep.
    fn sweep(&mut self, update_bases: bool) -> Result<()> {
        let n = self.n();
        self.max_discarded = 0.0;
        self.basis_discarded = 0.0;
        self.eig_failures = 0;
        self.report = TruncationReport::default();
        if n == 1 {
            if update_bases {
                self.update_basis(0)?;
            }
            let (l, r, w, par) = (&self.left[0], &self.right[1], &self.w[0], self.par);
            let pair = lowest(|x, y| apply_one(l, w, r, x, y, par), &self.psi.sites[0].data, &[], &self.lz)?;
            let x = self.tally(pair);
            self.psi.sites[0].data = x;
            return Ok(());
        }
        for i in 0..n - 1 {
            if update_bases {
                self.update_basis(i)?;
            }
            self.two_site(i, true)?;
        }
        for i in (0..n - 1).rev() {
            if update_bases {
                self.update_basis(i + 1)?;
            }
            self.two_site(i, false)?;
        }
        Ok(())
    }

    fn lifted(&self) -> Mps {
        let mut out = self.psi.clone();
        for (i, u) in self.bases.iter().enumerate() {
            if let Some(u) = u {
                let (dp, k) = (self.bare.sites[i].d, self.psi.sites[i].d);
                out.sites[i] = self.psi.sites[i].map_physical(&transpose(u, dp, k), dp);
            }
        }
        out.bond_cap = self.cfg.d_c;
        out
    }
}

fn check_consistency(mpo: &Mpo, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if mpo.is_empty() {
        return Err(Error::Config("empty operator".into()));
    }
    for (i, d) in mpo.local_dims().into_iter().enumerate() {
        if d != 2 && d != cfg.d_p {
            return Err(Error::Config(format!(
                "site {i} has local dimension {d}; expected 2 or d_p = {}",
                cfg.d_p
            )));
        }
    }
    Ok(())
}

fn initial_state(mpo: &Mpo, cfg: &SolverConfig) -> WarmStart {
    biased_start(mpo, cfg, None)
}

/// Seeded random start with vacuum bias on bosons and, optionally, a bias
/// `(site, v)` pulling a two-level site towards the local state `v`.
pub fn biased_start(mpo: &Mpo, cfg: &SolverConfig, spin: Option<(usize, [f64; 2])>) -> WarmStart {
    let rot = rotated_sites(mpo, cfg);
    let dims: Vec<usize> = mpo
        .local_dims()
        .iter()
        .zip(&rot)
        .map(|(&d, &r)| if r { cfg.d_opt } else { d })
        .collect();
    let bias: Vec<f64> = dims.iter().map(|&d| if d > 2 { 0.9 } else { 0.0 }).collect();
    let mut mps = Mps::random_biased(&dims, 8.min(cfg.d_c), cfg.seed, &bias);
    // Odd occupations are removed so no boson starts displaced: a random
    // displacement would pick the symmetry-broken sector before the pilot
    // field can.
    for (t, &d) in mps.sites.iter_mut().zip(&dims) {
        if d > 2 {
            for l in 0..t.dl {
                for s in (1..d).step_by(2) {
                    for r in 0..t.dr {
                        t.set(l, s, r, 0.0);
                    }
                }
            }
        }
    }
    if let Some((site, v)) = spin {
        let t = &mut mps.sites[site];
        for k in 0..t.dl.min(t.dr) {
            for (s, vs) in v.iter().enumerate() {
                let x = t.get(k, s, k) + SPIN_BIAS * vs;
                t.set(k, s, k, x);
            }
        }
    }
    mps.canonicalize_mut(0);
    mps.normalize();
    let bases = mpo
        .local_dims()
        .iter()
        .zip(&rot)
        .map(|(&d, &r)| {
            r.then(|| {
                // The lowest bare levels.
                let mut u = vec![0.0; d * cfg.d_opt];
                for j in 0..cfg.d_opt {
                    u[j * cfg.d_opt + j] = 1.0;
                }
                u
            })
        })
        .collect();
    WarmStart { mps, bases }
}

/// Lowest-energy MPS of `mpo` from a seeded random start.
pub fn ground_state(mpo: &Mpo, cfg: &SolverConfig) -> Result<GroundState> {
    ground_state_from(mpo, cfg, None)
}

/// Like [`ground_state`], optionally starting from a previous solution.
pub fn ground_state_from(mpo: &Mpo, cfg: &SolverConfig, warm: Option<&WarmStart>) -> Result<GroundState> {
    check_consistency(mpo, cfg)?;
    let start = match warm {
        Some(w) if compatible(w, mpo, cfg) => w.clone(),
        _ => initial_state(mpo, cfg),
    };
    let par = cfg.par();
    let w: Vec<MpoSite> = mpo
        .sites
        .iter()
        .zip(&start.bases)
        .map(|(s, u)| match u {
            Some(u) => s.rotated(u, cfg.d_opt),
            None => s.clone(),
        })
        .collect();
    let mut psi = start.mps;
    psi.canonicalize_mut(0);
    psi.normalize();
    psi.bond_cap = cfg.d_c;
    let n = psi.len();
    let mut right = vec![Env::boundary(); n + 1];
    for i in (1..n).rev() {
        right[i] = extend_right(&right[i + 1], &psi.sites[i], &w[i], &psi.sites[i], par);
    }
    let mut solver = Solver {
        bare: mpo,
        cfg: *cfg,
        par,
        lz: LanczosOptions {
            tol: cfg.eigensolver_tol,
            max_iter: cfg.eigensolver_max_iter,
            krylov: 32,
        },
        w,
        bases: start.bases,
        psi,
        left: vec![Env::boundary(); n + 1],
        right,
        matvecs: 0,
        eig_failures: 0,
        max_discarded: 0.0,
        basis_discarded: 0.0,
        report: TruncationReport::default(),
    };

    let mut stats = SweepStats::default();
    let mut flags = Vec::new();
    let mut prev = f64::INFINITY;
    for sweep in 1..=cfg.max_sweeps {
        let due = basis_update_due(sweep);
        solver.matvecs = 0;
        solver.sweep(due)?;
        let e = solver.center_energy();
        let change = e - prev;
        if change > MONOTONE_SLACK.max(cfg.energy_tol) && !flags.contains(&Flag::EnergyIncrease) {
            flags.push(Flag::EnergyIncrease);
        }
        stats.sweeps.push(SweepRecord {
            energy: e,
            energy_change: if prev.is_finite() { change } else { f64::NAN },
            max_discarded: solver.max_discarded,
            max_bond: solver.psi.max_bond(),
            basis_discarded: solver.basis_discarded,
            basis_updated: due && solver.bases.iter().any(Option::is_some),
            eigensolver_failures: solver.eig_failures,
            matvecs: solver.matvecs,
        });
        prev = e;
        if sweep >= 2 && change.abs() < cfg.energy_tol {
            stats.converged = true;
            break;
        }
    }
    if !stats.converged {
        flags.push(Flag::NotConverged);
    }
    let last = stats.last().cloned().unwrap_or_default();
    if last.max_discarded > cfg.w_max {
        flags.push(Flag::TruncationAboveTarget);
    }
    if last.eigensolver_failures > 0 {
        flags.push(Flag::EigensolverNotConverged);
    }
    flags.sort();

    let mut bare_state = solver.lifted();
    bare_state.normalize();
    let energy = sandwich(&bare_state, mpo, &bare_state);
    let warm = WarmStart {
        mps: solver.psi.clone(),
        bases: solver.bases.clone(),
    };
    Ok(GroundState {
        energy,
        mps: bare_state,
        stats,
        truncation: solver.report,
        flags,
        warm,
    })
}

fn compatible(w: &WarmStart, mpo: &Mpo, cfg: &SolverConfig) -> bool {
    let rot = rotated_sites(mpo, cfg);
    w.mps.len() == mpo.len()
        && w.bases.len() == mpo.len()
        && w.bases.iter().zip(&rot).all(|(b, &r)| b.is_some() == r)
        && w
            .mps
            .sites
            .iter()
            .zip(mpo.local_dims())
            .zip(&rot)
            .all(|((t, d), &r)| t.d == if r { cfg.d_opt } else { d })
}
