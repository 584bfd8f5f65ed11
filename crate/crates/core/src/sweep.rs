//! Parameter sweeps, critical-point detectors and CSV output.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkpoint;
use crate::dmrg::{Flag, SolverConfig, WarmStart};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::observables::{fidelity, RunResult};
use crate::point::{run_point, PointSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParam {
    Alpha,
    Beta,
    Delta,
    Epsilon,
}

impl SweptParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweptParam::Alpha => "alpha",
            SweptParam::Beta => "beta",
            SweptParam::Delta => "delta",
            SweptParam::Epsilon => "epsilon",
        }
    }

    pub fn set(&self, p: &mut ModelParams, v: f64) {
        match self {
            SweptParam::Alpha => p.alpha = v,
            SweptParam::Beta => p.beta = v,
            SweptParam::Delta => p.delta = v,
            SweptParam::Epsilon => p.epsilon = v,
        }
    }

    pub fn get(&self, p: &ModelParams) -> f64 {
        match self {
            SweptParam::Alpha => p.alpha,
            SweptParam::Beta => p.beta,
            SweptParam::Delta => p.delta,
            SweptParam::Epsilon => p.epsilon,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 3 {
            return Err(Error::Config(format!("a grid needs at least 3 points, got {}", self.points)));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start == self.stop {
            return Err(Error::Config("grid bounds must be finite and distinct".into()));
        }
        if self.spacing == Spacing::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(Error::Config("log grids need positive bounds".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if i == n - 1 {
                    return self.stop;
                }
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Up,
    Down,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub parameter: SweptParam,
    pub grid: Grid,
    #[serde(default)]
    pub point: PointSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub warm_start: bool,
    #[serde(default)]
    pub direction: Direction,
    /// Worker pool size; `None` uses the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Per-point checkpoint directories are written below this path.
    #[serde(default)]
    pub checkpoint_dir: Option<PathBuf>,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.point.validate()?;
        self.solver.validate()?;
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn spec_at(&self, v: f64) -> PointSpec {
        let mut s = self.point;
        self.parameter.set(&mut s.params, v);
        s
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: SweepPlan = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub parameter: SweptParam,
    pub values: Vec<f64>,
    /// Grid order.
    pub results: Vec<RunResult>,
    /// The opposite-direction pass of a warm-started `Both` sweep.
    pub reverse: Option<Vec<RunResult>>,
}

impl SweepOutput {
    pub fn any_flagged(&self) -> bool {
        self.results.iter().chain(self.reverse.iter().flatten()).any(RunResult::is_flagged)
    }

    pub fn csv(&self) -> String {
        sweep_csv(self.parameter, &self.values, &self.results)
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

type Solved = (RunResult, crate::mps::Mps);

fn checkpoint_point(plan: &SweepPlan, tag: &str, i: usize, spec: &PointSpec, run: &crate::point::PointRun) -> Result<()> {
    if let Some(dir) = &plan.checkpoint_dir {
        let sub = dir.join(format!("{tag}{i:03}"));
        checkpoint::save(&sub, &run.state.mps, spec, plan.solver.d_p, Some(run.result.energy))?;
    }
    Ok(())
}

/// Warm-started pass along `order`, results placed at their grid index.
fn warm_pass(plan: &SweepPlan, values: &[f64], order: &[usize], tag: &str) -> Result<Vec<Solved>> {
    let mut out: Vec<Option<Solved>> = vec![None; values.len()];
    let mut warm: Option<WarmStart> = None;
    for &i in order {
        let spec = plan.spec_at(values[i]);
        let run = run_point(&spec, &plan.solver, warm.as_ref())?;
        checkpoint_point(plan, tag, i, &spec, &run)?;
        warm = Some(run.state.warm.clone());
        out[i] = Some((run.result, run.state.mps));
    }
    Ok(out.into_iter().map(|s| s.expect("every grid point visited")).collect())
}

fn with_fidelities(solved: Vec<Solved>) -> Vec<RunResult> {
    let mut out = Vec::with_capacity(solved.len());
    for i in 0..solved.len() {
        let mut r = solved[i].0.clone();
        if i > 0 {
            r.fidelity_prev = Some(fidelity(&solved[i - 1].1, &solved[i].1));
        }
        out.push(r);
    }
    out
}

/// Solves every grid point; results come back in grid order with the
/// fidelity to the preceding grid point.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepOutput> {
    plan.validate()?;
    let values = plan.grid.values();
    let n = values.len();
    let up: Vec<usize> = (0..n).collect();
    let down: Vec<usize> = (0..n).rev().collect();
    let (primary, reverse) = if plan.warm_start {
        match plan.direction {
            Direction::Up => (warm_pass(plan, &values, &up, "up")?, None),
            Direction::Down => (warm_pass(plan, &values, &down, "down")?, None),
            Direction::Both => (
                warm_pass(plan, &values, &up, "up")?,
                Some(warm_pass(plan, &values, &down, "down")?),
            ),
        }
    } else {
        let solved: Vec<Result<Solved>> = pool(plan.workers)?.install(|| {
            values
                .par_iter()
                .enumerate()
                .map(|(i, &v)| {
                    let spec = plan.spec_at(v);
                    let run = run_point(&spec, &plan.solver, None)?;
                    checkpoint_point(plan, "point", i, &spec, &run)?;
                    Ok((run.result, run.state.mps))
                })
                .collect()
        });
        (solved.into_iter().collect::<Result<Vec<_>>>()?, None)
    };
    Ok(SweepOutput {
        parameter: plan.parameter,
        values,
        results: with_fidelities(primary),
        reverse: reverse.map(with_fidelities),
    })
}

fn fmt_num(out: &mut String, x: f64) {
    let _ = write!(out, "{x:.16e}");
}

fn flags_cell(flags: &[Flag]) -> String {
    flags.iter().map(Flag::token).collect::<Vec<_>>().join(";")
}

/// Columns: swept parameter, energy, sx, sy, sz, svn, fidelity_prev, flags.
pub fn sweep_csv(parameter: SweptParam, values: &[f64], results: &[RunResult]) -> String {
    let mut out = format!("{},energy,sx,sy,sz,svn,fidelity_prev,flags\n", parameter.name());
    for (v, r) in values.iter().zip(results) {
        for x in [*v, r.energy, r.sx, r.sy, r.sz, r.svn] {
            fmt_num(&mut out, x);
            out.push(',');
        }
        if let Some(f) = r.fidelity_prev {
            fmt_num(&mut out, f);
        }
        out.push(',');
        out.push_str(&flags_cell(&r.flags));
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    EntropyPeak,
    OrderSwap,
    FidelityDip,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub estimate: f64,
    pub detector: Detector,
    pub bracket: (f64, f64),
    /// Up/down difference of warm-started passes, when available.
    pub hysteresis: Option<f64>,
}

/// Quadratic-fit entropy maximum over the three points around the largest
/// entropy; `None` when the maximum sits at either end of the grid.
pub fn entropy_peak(values: &[f64], svn: &[f64]) -> Option<CriticalPoint> {
    let i = argmax(svn)?;
    if i == 0 || i + 1 >= svn.len() {
        return None;
    }
    let (x0, x1, x2) = (values[i - 1], values[i], values[i + 1]);
    let (y0, y1, y2) = (svn[i - 1], svn[i], svn[i + 1]);
    let d = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
    let estimate = if a < 0.0 { (-b / (2.0 * a)).clamp(x0.min(x2), x0.max(x2)) } else { x1 };
    Some(CriticalPoint {
        estimate,
        detector: Detector::EntropyPeak,
        bracket: (x0.min(x2), x0.max(x2)),
        hysteresis: None,
    })
}

/// First sign change of `|⟨σx⟩| − |⟨σz⟩|`, linearly interpolated.
pub fn order_swap(values: &[f64], sx: &[f64], sz: &[f64]) -> Option<CriticalPoint> {
    let f: Vec<f64> = sx.iter().zip(sz).map(|(x, z)| x.abs() - z.abs()).collect();
    for i in 0..f.len().saturating_sub(1) {
        let (a, b) = (f[i], f[i + 1]);
        if a == 0.0 {
            return Some(CriticalPoint {
                estimate: values[i],
                detector: Detector::OrderSwap,
                bracket: (values[i], values[i]),
                hysteresis: None,
            });
        }
        if a * b < 0.0 {
            let t = a / (a - b);
            let (lo, hi) = (values[i], values[i + 1]);
            return Some(CriticalPoint {
                estimate: lo + t * (hi - lo),
                detector: Detector::OrderSwap,
                bracket: (lo.min(hi), lo.max(hi)),
                hysteresis: None,
            });
        }
    }
    let last = f.len().checked_sub(1)?;
    (f[last] == 0.0).then(|| CriticalPoint {
        estimate: values[last],
        detector: Detector::OrderSwap,
        bracket: (values[last], values[last]),
        hysteresis: None,
    })
}

/// Minimum of the neighbour fidelity, placed mid-interval.
pub fn fidelity_dip(values: &[f64], fidelity_prev: &[Option<f64>]) -> Option<CriticalPoint> {
    let mut best: Option<(usize, f64)> = None;
    for (i, f) in fidelity_prev.iter().enumerate() {
        if let Some(f) = *f {
            if best.is_none_or(|(_, b)| f < b) {
                best = Some((i, f));
            }
        }
    }
    let (i, _) = best?;
    if i == 0 {
        return None;
    }
    let (lo, hi) = (values[i - 1], values[i]);
    Some(CriticalPoint {
        estimate: 0.5 * (lo + hi),
        detector: Detector::FidelityDip,
        bracket: (lo.min(hi), lo.max(hi)),
        hysteresis: None,
    })
}

fn argmax(v: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in v.iter().enumerate() {
        if best.is_none_or(|b| *x > v[b]) {
            best = Some(i);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub parameter: SweptParam,
    pub grid_spacing: f64,
    pub entropy_peak: Option<CriticalPoint>,
    pub order_swap: Option<CriticalPoint>,
    pub fidelity_dip: Option<CriticalPoint>,
    /// Largest pairwise distance between the available estimates.
    pub spread: f64,
    /// Whether every available pair agrees within two grid spacings.
    pub agree: bool,
    /// Hysteresis beyond two grid spacings was seen.
    pub hysteresis_flagged: bool,
}

impl CriticalReport {
    pub fn detectors(&self) -> Vec<CriticalPoint> {
        [self.entropy_peak, self.order_swap, self.fidelity_dip].into_iter().flatten().collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("critical reports always serialize")
    }
}

fn detect(values: &[f64], results: &[RunResult]) -> [Option<CriticalPoint>; 3] {
    let col = |f: fn(&RunResult) -> f64| results.iter().map(f).collect::<Vec<f64>>();
    let fid: Vec<Option<f64>> = results.iter().map(|r| r.fidelity_prev).collect();
    [
        entropy_peak(values, &col(|r| r.svn)),
        order_swap(values, &col(|r| r.sx), &col(|r| r.sz)),
        fidelity_dip(values, &fid),
    ]
}

/// Runs the three detectors separately and reports their agreement. With a
/// reverse pass, each detector also carries its up/down difference.
pub fn locate_critical(out: &SweepOutput) -> CriticalReport {
    let values = &out.values;
    let spacing = values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let mut found = detect(values, &out.results);
    let mut hysteresis_flagged = false;
    if let Some(rev) = &out.reverse {
        let back = detect(values, rev);
        for (f, b) in found.iter_mut().zip(back) {
            if let (Some(f), Some(b)) = (f.as_mut(), b) {
                let w = (f.estimate - b.estimate).abs();
                f.hysteresis = Some(w);
                hysteresis_flagged |= w >= 2.0 * spacing;
            }
        }
    }
    let est: Vec<f64> = found.iter().flatten().map(|c| c.estimate).collect();
    let mut spread: f64 = 0.0;
    for a in &est {
        for b in &est {
            spread = spread.max((a - b).abs());
        }
    }
    let [entropy_peak, order_swap, fidelity_dip] = found;
    CriticalReport {
        parameter: out.parameter,
        grid_spacing: spacing,
        entropy_peak,
        order_swap,
        fidelity_dip,
        spread,
        agree: spread <= 2.0 * spacing * (1.0 + 1e-9),
        hysteresis_flagged,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramPlan {
    pub alpha: Grid,
    pub beta: Grid,
    #[serde(default)]
    pub point: PointSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl PhaseDiagramPlan {
    pub fn validate(&self) -> Result<()> {
        self.alpha.validate()?;
        self.beta.validate()?;
        self.point.validate()?;
        self.solver.validate()?;
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: PhaseDiagramPlan = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Clone, Debug)]
pub struct PhaseDiagram {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Row-major: one row per α, one column per β.
    pub cells: Vec<RunResult>,
}

impl PhaseDiagram {
    pub fn at(&self, i_alpha: usize, i_beta: usize) -> &RunResult {
        &self.cells[i_alpha * self.betas.len() + i_beta]
    }

    pub fn any_flagged(&self) -> bool {
        self.cells.iter().any(RunResult::is_flagged)
    }

    /// Columns: alpha, beta, energy, sx, sy, sz, svn, flags.
    pub fn csv(&self) -> String {
        let mut out = String::from("alpha,beta,energy,sx,sy,sz,svn,flags\n");
        for (k, r) in self.cells.iter().enumerate() {
            let (a, b) = (self.alphas[k / self.betas.len()], self.betas[k % self.betas.len()]);
            for x in [a, b, r.energy, r.sx, r.sy, r.sz, r.svn] {
                fmt_num(&mut out, x);
                out.push(',');
            }
            out.push_str(&flags_cell(&r.flags));
            out.push('\n');
        }
        out
    }
}

pub fn phase_diagram(plan: &PhaseDiagramPlan) -> Result<PhaseDiagram> {
    plan.validate()?;
    let alphas = plan.alpha.values();
    let betas = plan.beta.values();
    let jobs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    let cells: Vec<Result<RunResult>> = pool(plan.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(a, b)| {
                let mut spec = plan.point;
                spec.params.alpha = a;
                spec.params.beta = b;
                run_point(&spec, &plan.solver, None).map(|r| r.result)
            })
            .collect()
    });
    Ok(PhaseDiagram {
        alphas,
        betas,
        cells: cells.into_iter().collect::<Result<Vec<_>>>()?,
    })
}

/// `(η_z, η_x) = 2π·ω_c²·(α/(1+s), β/(1+s̄))`.
pub fn renormalized_couplings(alpha: f64, s: f64, beta: f64, s_bar: f64, cutoff: f64) -> (f64, f64) {
    let k = 2.0 * std::f64::consts::PI * cutoff * cutoff;
    (k * alpha / (1.0 + s), k * beta / (1.0 + s_bar))
}

/// The β at which the two renormalized couplings are equal.
pub fn equal_coupling_beta(alpha: f64, s: f64, s_bar: f64) -> f64 {
    alpha * (1.0 + s_bar) / (1.0 + s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::SpectralDensity;

    fn result(sx: f64, sz: f64, svn: f64, fid: Option<f64>) -> RunResult {
        let spec = PointSpec::default();
        let cfg = SolverConfig::default();
        RunResult {
            energy: 0.0,
            sx,
            sy: 0.0,
            sz,
            svn,
            bloch_norm: (sx * sx + sz * sz).sqrt(),
            fidelity_prev: fid,
            flags: vec![],
            converged: true,
            sweeps: 2,
            max_discarded: 0.0,
            max_bond: 1,
            geometry: spec.geometry,
            chain_length: spec.chain_length,
            lambda: spec.lambda,
            chain_method: spec.chain_method,
            params: spec.params,
            solver: cfg,
        }
    }

    #[test]
    fn grid_values() {
        let g = Grid::linear(0.0, 0.05, 26);
        let v = g.values();
        assert_eq!(v.len(), 26);
        assert_eq!(v[25], 0.05);
        assert!((v[1] - 0.002).abs() < 1e-15);
        assert!(Grid::linear(0.0, 1.0, 2).validate().is_err());
        assert!(Grid::linear(1.0, 1.0, 5).validate().is_err());
        let l = Grid { spacing: Spacing::Log, ..Grid::linear(0.01, 1.0, 3) };
        assert!((l.values()[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn detectors_on_synthetic_curves() {
        let values: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let c = 0.43;
        let svn: Vec<f64> = values.iter().map(|x| 0.6 - (x - c).powi(2)).collect();
        let sz: Vec<f64> = values.iter().map(|x| (c - x).max(0.0)).collect();
        let sx: Vec<f64> = values.iter().map(|x| (x - c).max(0.0)).collect();
        let p = entropy_peak(&values, &svn).unwrap();
        assert!((p.estimate - c).abs() < 1e-12);
        assert!(p.bracket.0 <= p.estimate && p.estimate <= p.bracket.1);
        let o = order_swap(&values, &sx, &sz).unwrap();
        assert!((o.estimate - c).abs() < 1e-12);
        let fid: Vec<Option<f64>> = values
            .iter()
            .enumerate()
            .map(|(i, x)| (i > 0).then(|| 1.0 - 0.1 / (1.0 + 100.0 * (x - 0.05 - c).powi(2))))
            .collect();
        let f = fidelity_dip(&values, &fid).unwrap();
        assert!((f.estimate - 0.45).abs() < 1e-12);

        let results: Vec<RunResult> = (0..11).map(|i| result(sx[i], sz[i], svn[i], fid[i])).collect();
        let out = SweepOutput {
            parameter: SweptParam::Beta,
            values: values.clone(),
            results,
            reverse: None,
        };
        let rep = locate_critical(&out);
        assert!(rep.agree && !rep.hysteresis_flagged);
        assert_eq!(rep.detectors().len(), 3);
    }

    #[test]
    fn monotone_entropy_has_no_peak() {
        let values = [0.0, 1.0, 2.0, 3.0];
        assert!(entropy_peak(&values, &[0.1, 0.2, 0.3, 0.4]).is_none());
        assert!(order_swap(&values, &[1.0; 4], &[0.0; 4]).is_none());
    }

    #[test]
    fn symmetric_point_swaps_on_grid() {
        let values = [0.0, 0.01, 0.02, 0.03];
        let o = order_swap(&values, &[0.0, 0.3, 0.5, 0.8], &[0.9, 0.6, 0.5, 0.0]).unwrap();
        assert_eq!(o.estimate, 0.02);
    }

    #[test]
    fn renormalized_coupling_examples() {
        let (az, bx) = renormalized_couplings(0.02, 0.25, 0.01, 0.25, 1.0);
        assert!((az / bx - 2.0).abs() < 1e-14);
        assert!((equal_coupling_beta(0.02, 0.3, 0.2) - 0.018461538461538463).abs() < 1e-15);
        assert_eq!(renormalized_couplings(0.0, 0.3, 0.1, 0.2, 1.0).0, 0.0);
        let sd = SpectralDensity::new(0.02, 0.3, 1.0).unwrap();
        assert!((renormalized_couplings(0.02, 0.3, 0.0, 0.2, 1.0).0 - sd.eta()).abs() < 1e-15);
    }

    #[test]
    fn uncoupled_plan_is_constant() {
        let plan = SweepPlan {
            parameter: SweptParam::Epsilon,
            grid: Grid::linear(0.3, 0.3 + 1e-12, 3),
            point: PointSpec {
                params: ModelParams { delta: 0.4, ..Default::default() },
                chain_length: 2,
                ..Default::default()
            },
            solver: SolverConfig { d_p: 3, d_opt: 3, d_c: 8, strict: true, ..Default::default() },
            warm_start: false,
            direction: Direction::Up,
            workers: Some(1),
            checkpoint_dir: None,
        };
        let out = run_sweep(&plan).unwrap();
        for r in &out.results[1..] {
            assert!((r.fidelity_prev.unwrap() - 1.0).abs() < 1e-9);
            assert!((r.energy + 0.25).abs() < 1e-9);
        }
        assert!(out.csv().starts_with("epsilon,energy,sx,sy,sz,svn,fidelity_prev,flags\n"));
        assert_eq!(out.csv().lines().count(), 4);
    }

    #[test]
    fn plan_round_trips_through_toml() {
        let text = r#"
            parameter = "beta"
            warm_start = true
            direction = "both"
            [grid]
            start = 0.0
            stop = 0.05
            points = 26
            [point]
            alpha = 0.02
            chain_length = 31
            pilot_z = -1e-5
            [solver]
            d_c = 30
            strict = true
        "#;
        let plan = SweepPlan::from_toml(text).unwrap();
        assert_eq!(plan.point.params.alpha, 0.02);
        assert_eq!(plan.point.chain_length, 31);
        assert_eq!(plan.solver.d_c, 30);
        assert_eq!(plan.solver.d_p, 24);
        let back = SweepPlan::from_toml(&toml::to_string(&plan).unwrap()).unwrap();
        assert_eq!(back, plan);
        assert!(SweepPlan::from_toml("parameter = \"gamma\"").is_err());
    }
}
