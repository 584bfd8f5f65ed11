//! Solving a single parameter point: chains, MPO, ground state, observables.

use serde::{Deserialize, Serialize};

use crate::bath::ChainMethod;
use crate::dmrg::{biased_start, ground_state_from, GroundState, SolverConfig, WarmStart};
use crate::error::{Error, Result};
use crate::model::{build_chains, build_single_chain_mpo, build_two_chain_mpo, Geometry, LatticeLayout, ModelParams, MAX_PILOT};
use crate::mpo::Mpo;
use crate::observables::{measure, RunContext, RunResult};

/// Default logarithmic discretization parameter.
pub const DEFAULT_LAMBDA: f64 = 2.0;
/// Default chain length (sites per chain).
pub const DEFAULT_CHAIN_LENGTH: usize = 51;
/// Pilot strength, in units of the cutoff, for the seeding sweeps.
pub const SEED_PILOT: f64 = MAX_PILOT;
/// Sweeps run under the seeding pilot before the true Hamiltonian.
pub const SEED_SWEEPS: usize = 2;

/// Everything about a point except the solver budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PointSpec {
    #[serde(flatten)]
    pub params: ModelParams,
    pub geometry: Geometry,
    /// Sites per chain.
    pub chain_length: usize,
    pub lambda: f64,
    pub chain_method: ChainMethod,
}

impl Default for PointSpec {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            geometry: Geometry::TwoChain,
            chain_length: DEFAULT_CHAIN_LENGTH,
            lambda: DEFAULT_LAMBDA,
            chain_method: ChainMethod::ClosedForm,
        }
    }
}

impl PointSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.chain_length == 0 {
            return Err(Error::Config("chain_length must be at least 1".into()));
        }
        if !(self.lambda > 1.0) {
            return Err(Error::Config(format!("lambda must exceed 1, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn layout(&self, d_p: usize) -> LatticeLayout {
        match self.geometry {
            Geometry::TwoChain => LatticeLayout::two_chain(self.chain_length, d_p),
            Geometry::SingleChain => LatticeLayout::single_chain(self.chain_length, d_p),
        }
    }

    pub fn mpo(&self, d_p: usize) -> Result<Mpo> {
        self.validate()?;
        let (cz, cx) = build_chains(&self.params, self.lambda, self.chain_length, self.chain_method)?;
        match self.geometry {
            Geometry::TwoChain => build_two_chain_mpo(&self.params, &cz, &cx, d_p),
            Geometry::SingleChain => build_single_chain_mpo(&self.params, &cz, d_p),
        }
    }

    pub fn context(&self, cfg: &SolverConfig) -> RunContext {
        RunContext {
            params: self.params,
            geometry: self.geometry,
            chain_length: self.chain_length,
            lambda: self.lambda,
            chain_method: self.chain_method,
            solver: *cfg,
            spin_site: self.layout(cfg.d_p).spin_site(),
        }
    }
}

/// Ground state of the bare spin term `((ε+p_z)/2)σz + ((p_x−Δ)/2)σx`, or
/// `None` when that field vanishes.
pub fn spin_field_ground(params: &ModelParams) -> Option<[f64; 2]> {
    let a = 0.5 * (params.epsilon + params.pilot_z);
    let b = 0.5 * (params.pilot_x - params.delta);
    if a == 0.0 && b == 0.0 {
        return None;
    }
    // Bloch vector −(b, a)/|h| at polar angle θ.
    let theta = (-b).atan2(-a);
    Some([(0.5 * theta).cos(), (0.5 * theta).sin()])
}

/// A solved point with its state kept for fidelities and warm starts.
#[derive(Clone, Debug)]
pub struct PointRun {
    pub result: RunResult,
    pub state: GroundState,
}

/// Solves one point, from `warm` when compatible, otherwise from a seeded
/// start biased towards the spin's local field.
pub fn run_point(spec: &PointSpec, cfg: &SolverConfig, warm: Option<&WarmStart>) -> Result<PointRun> {
    cfg.validate()?;
    let mpo = spec.mpo(cfg.d_p)?;
    run_point_with(spec, &mpo, cfg, warm)
}

pub fn run_point_with(spec: &PointSpec, mpo: &Mpo, cfg: &SolverConfig, warm: Option<&WarmStart>) -> Result<PointRun> {
    let ctx = spec.context(cfg);
    let start;
    let warm = match warm {
        Some(w) => w,
        None => {
            start = seeded_start(spec, mpo, cfg, ctx.spin_site)?;
            &start
        }
    };
    let state = ground_state_from(mpo, cfg, Some(warm))?;
    let result = measure(&state, &ctx)?;
    Ok(PointRun { result, state })
}

/// Cold start for a pilot-selected sector. The pilot alone splits the pair
/// by far less than the truncation noise, so a few sweeps run first with
/// each nonzero pilot raised to `SEED_PILOT·ω_c`, and the true Hamiltonian
/// then relaxes from there.
fn seeded_start(spec: &PointSpec, mpo: &Mpo, cfg: &SolverConfig, spin_site: usize) -> Result<WarmStart> {
    let spin = spin_field_ground(&spec.params).map(|v| (spin_site, v));
    let start = biased_start(mpo, cfg, spin);
    let p = spec.params;
    if p.pilot_z == 0.0 && p.pilot_x == 0.0 {
        return Ok(start);
    }
    let boost = |x: f64| if x == 0.0 { 0.0 } else { SEED_PILOT * p.cutoff * x.signum() };
    let mut seed = *spec;
    seed.params.pilot_z = boost(p.pilot_z);
    seed.params.pilot_x = boost(p.pilot_x);
    let seed_cfg = SolverConfig {
        max_sweeps: SEED_SWEEPS,
        ..*cfg
    };
    Ok(ground_state_from(&seed.mpo(cfg.d_p)?, &seed_cfg, Some(&start))?.warm)
}

/// Two independent runs whose specs differ only in the sign of the pilot
/// field, exposing the two members of a degenerate pair.
pub fn degenerate_pair(plus: &PointSpec, minus: &PointSpec, cfg: &SolverConfig) -> Result<(PointRun, PointRun)> {
    let mut flipped = plus.params;
    flipped.pilot_z = -flipped.pilot_z;
    flipped.pilot_x = -flipped.pilot_x;
    let same_rest = PointSpec { params: flipped, ..*plus } == *minus;
    if !same_rest || (plus.params.pilot_z == 0.0 && plus.params.pilot_x == 0.0) {
        return Err(Error::Config("degenerate pair specs must differ only by a nonzero pilot sign".into()));
    }
    Ok((run_point(plus, cfg, None)?, run_point(minus, cfg, None)?))
}

/// The spec with its pilot field negated.
pub fn mirrored(spec: &PointSpec) -> PointSpec {
    let mut m = *spec;
    m.params.pilot_z = -m.params.pilot_z;
    m.params.pilot_x = -m.params.pilot_x;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ground_state_directions() {
        let up = ModelParams { pilot_z: -1e-5, ..Default::default() };
        let v = spin_field_ground(&up).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15);
        let down = ModelParams { epsilon: 0.3, ..Default::default() };
        let v = spin_field_ground(&down).unwrap();
        assert!(v[0].abs() < 1e-15 && (v[1].abs() - 1.0).abs() < 1e-15);
        // Δ > 0 favours ⟨σx⟩ = +1
        let x = ModelParams { delta: 0.1, ..Default::default() };
        let v = spin_field_ground(&x).unwrap();
        assert!((v[0] - v[1]).abs() < 1e-15 && v[0] > 0.0);
        assert!(spin_field_ground(&ModelParams::default()).is_none());
    }

    #[test]
    fn free_spin_point() {
        let spec = PointSpec {
            params: ModelParams { epsilon: 0.3, delta: 0.4, ..Default::default() },
            chain_length: 2,
            ..Default::default()
        };
        let cfg = SolverConfig { d_p: 3, d_opt: 3, d_c: 8, strict: true, ..Default::default() };
        let run = run_point(&spec, &cfg, None).unwrap();
        assert!((run.result.energy + 0.25).abs() < 1e-10);
        assert!((run.result.sz + 0.6).abs() < 1e-8);
        assert!((run.result.sx - 0.8).abs() < 1e-8);
        assert!(run.result.svn.abs() < 1e-8);
    }

    #[test]
    fn pair_requires_mirrored_pilots() {
        let plus = PointSpec {
            params: ModelParams { pilot_z: 1e-5, ..Default::default() },
            chain_length: 1,
            ..Default::default()
        };
        let cfg = SolverConfig { d_p: 2, d_opt: 2, d_c: 4, strict: true, ..Default::default() };
        assert!(degenerate_pair(&plus, &plus, &cfg).is_err());
        let (a, b) = degenerate_pair(&plus, &mirrored(&plus), &cfg).unwrap();
        assert!((a.result.sz + 1.0).abs() < 1e-8 && (b.result.sz - 1.0).abs() < 1e-8);
    }
}
