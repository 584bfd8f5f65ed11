//! Two-chain spin-boson Hamiltonian as a matrix-product operator.
//!
//! Lattice order is `[chain-2 site L−1, …, chain-2 site 0, spin, chain-1
//! site 0, …, chain-1 site L−1]`, which keeps every coupling nearest
//! neighbour. Chain 1 couples to `σz`, chain 2 to `σx`.

use serde::{Deserialize, Serialize};

use crate::bath::{build_chain, ChainMethod, SpectralDensity, WilsonChain};
use crate::error::{Error, Result};
use crate::mpo::{Mpo, NearestNeighbor};

/// Physical couplings. Pilot fields enter as `pilot_z·σz/2 + pilot_x·σx/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Bias ε.
    pub epsilon: f64,
    /// Tunneling Δ.
    pub delta: f64,
    pub alpha: f64,
    pub s: f64,
    pub beta: f64,
    pub s_bar: f64,
    pub cutoff: f64,
    pub pilot_z: f64,
    pub pilot_x: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            delta: 0.0,
            alpha: 0.0,
            s: 0.25,
            beta: 0.0,
            s_bar: 0.25,
            cutoff: 1.0,
            pilot_z: 0.0,
            pilot_x: 0.0,
        }
    }
}

/// Upper bound on |pilot| in units of the cutoff.
pub const MAX_PILOT: f64 = 1e-3;

impl ModelParams {
    pub fn diagonal_bath(&self) -> SpectralDensity {
        SpectralDensity {
            coupling: self.alpha,
            exponent: self.s,
            cutoff: self.cutoff,
        }
    }

    pub fn off_diagonal_bath(&self) -> SpectralDensity {
        SpectralDensity {
            coupling: self.beta,
            exponent: self.s_bar,
            cutoff: self.cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.epsilon,
            self.delta,
            self.alpha,
            self.s,
            self.beta,
            self.s_bar,
            self.cutoff,
            self.pilot_z,
            self.pilot_x,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        self.diagonal_bath().validate().map_err(|e| Error::Config(format!("diagonal bath: {e}")))?;
        self.off_diagonal_bath()
            .validate()
            .map_err(|e| Error::Config(format!("off-diagonal bath: {e}")))?;
        for (name, p) in [("pilot_z", self.pilot_z), ("pilot_x", self.pilot_x)] {
            if p.abs() > MAX_PILOT * self.cutoff {
                return Err(Error::Config(format!(
                    "|{name}| = {} exceeds {MAX_PILOT}·cutoff",
                    p.abs()
                )));
            }
        }
        Ok(())
    }

    /// Image under the y-axis spin rotation that swaps the roles of `σz` and
    /// `σx` (with the chains exchanged).
    pub fn swapped(&self) -> ModelParams {
        ModelParams {
            epsilon: self.delta,
            delta: -self.epsilon,
            alpha: self.beta,
            s: self.s_bar,
            beta: self.alpha,
            s_bar: self.s,
            cutoff: self.cutoff,
            pilot_z: -self.pilot_x,
            pilot_x: self.pilot_z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    TwoChain,
    SingleChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteRole {
    Spin,
    /// `chain` is 1 (σz bath) or 2 (σx bath); `n` counts from the spin.
    Boson { chain: u8, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLayout {
    pub geometry: Geometry,
    pub chain_length: usize,
    pub local_dims: Vec<usize>,
}

impl LatticeLayout {
    pub fn two_chain(chain_length: usize, d_p: usize) -> Self {
        let mut local_dims = vec![d_p; 2 * chain_length + 1];
        local_dims[chain_length] = 2;
        Self {
            geometry: Geometry::TwoChain,
            chain_length,
            local_dims,
        }
    }

    pub fn single_chain(chain_length: usize, d_p: usize) -> Self {
        let mut local_dims = vec![d_p; chain_length + 1];
        local_dims[0] = 2;
        Self {
            geometry: Geometry::SingleChain,
            chain_length,
            local_dims,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn spin_site(&self) -> usize {
        match self.geometry {
            Geometry::TwoChain => self.chain_length,
            Geometry::SingleChain => 0,
        }
    }

    pub fn role(&self, site: usize) -> SiteRole {
        let l = self.chain_length;
        match self.geometry {
            Geometry::TwoChain if site < l => SiteRole::Boson {
                chain: 2,
                n: l - 1 - site,
            },
            Geometry::TwoChain if site == l => SiteRole::Spin,
            Geometry::TwoChain => SiteRole::Boson {
                chain: 1,
                n: site - l - 1,
            },
            Geometry::SingleChain if site == 0 => SiteRole::Spin,
            Geometry::SingleChain => SiteRole::Boson { chain: 1, n: site - 1 },
        }
    }

    pub fn site_of(&self, role: SiteRole) -> Option<usize> {
        let l = self.chain_length;
        match (self.geometry, role) {
            (_, SiteRole::Spin) => Some(self.spin_site()),
            (_, SiteRole::Boson { n, .. }) if n >= l => None,
            (Geometry::TwoChain, SiteRole::Boson { chain: 1, n }) => Some(l + 1 + n),
            (Geometry::TwoChain, SiteRole::Boson { chain: 2, n }) => Some(l - 1 - n),
            (Geometry::SingleChain, SiteRole::Boson { chain: 1, n }) => Some(1 + n),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expect = match self.geometry {
            Geometry::TwoChain => 2 * self.chain_length + 1,
            Geometry::SingleChain => self.chain_length + 1,
        };
        if self.local_dims.len() != expect {
            return Err(Error::Config(format!(
                "layout has {} sites, expected {expect}",
                self.local_dims.len()
            )));
        }
        if self.local_dims[self.spin_site()] != 2 {
            return Err(Error::Config("spin site must have dimension 2".into()));
        }
        Ok(())
    }
}

pub mod ops {
    //! Local operators, row-major `op[out * d + in]`. Spin basis is `[↑, ↓]`.

    pub fn sigma_z() -> Vec<f64> {
        vec![1.0, 0.0, 0.0, -1.0]
    }

    pub fn sigma_x() -> Vec<f64> {
        vec![0.0, 1.0, 1.0, 0.0]
    }

    /// `J` in `σy = i·J`, `J = [[0, −1], [1, 0]]`.
    pub fn sigma_y_over_i() -> Vec<f64> {
        vec![0.0, -1.0, 1.0, 0.0]
    }

    pub fn annihilation(d: usize) -> Vec<f64> {
        let mut a = vec![0.0; d * d];
        for n in 1..d {
            a[(n - 1) * d + n] = (n as f64).sqrt();
        }
        a
    }

    pub fn creation(d: usize) -> Vec<f64> {
        let mut a = vec![0.0; d * d];
        for n in 1..d {
            a[n * d + n - 1] = (n as f64).sqrt();
        }
        a
    }

    pub fn number(d: usize) -> Vec<f64> {
        let mut a = vec![0.0; d * d];
        for n in 0..d {
            a[n * d + n] = n as f64;
        }
        a
    }

    pub fn displacement(d: usize) -> Vec<f64> {
        annihilation(d).iter().zip(creation(d)).map(|(a, b)| a + b).collect()
    }

    pub fn scaled(op: &[f64], k: f64) -> Vec<f64> {
        op.iter().map(|x| x * k).collect()
    }

    pub fn sum(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
}

/// Largest MPO bond dimension produced by the builders.
pub const MAX_MPO_BOND: usize = 4;

fn spin_onsite(params: &ModelParams) -> Vec<f64> {
    ops::sum(
        &ops::scaled(&ops::sigma_z(), 0.5 * (params.epsilon + params.pilot_z)),
        &ops::scaled(&ops::sigma_x(), 0.5 * (params.pilot_x - params.delta)),
    )
}

fn check_chain(chain: &WilsonChain, len: usize, which: &str) -> Result<()> {
    if chain.len() != len {
        return Err(Error::Config(format!(
            "{which} chain has {} sites, expected {len}",
            chain.len()
        )));
    }
    if chain.hoppings.len() + 1 < len {
        return Err(Error::Config(format!("{which} chain is missing hoppings")));
    }
    Ok(())
}

fn add_chain_terms(nn: &mut NearestNeighbor, chain: &WilsonChain, site_of: impl Fn(usize) -> usize, d_p: usize) {
    let len = chain.len();
    let n_op = ops::number(d_p);
    let (a, ad) = (ops::annihilation(d_p), ops::creation(d_p));
    for n in 0..len {
        nn.add_onsite(site_of(n), ops::scaled(&n_op, chain.site_energies[n]));
    }
    for n in 0..len.saturating_sub(1) {
        let t = chain.hoppings[n];
        if t == 0.0 {
            continue;
        }
        let (i, j) = (site_of(n), site_of(n + 1));
        let left = i.min(j);
        nn.add_bond(left, ops::scaled(&ad, t), a.clone());
        nn.add_bond(left, ops::scaled(&a, t), ad.clone());
    }
}

/// Hamiltonian with chain 1 (`chain_z`) on `σz` and chain 2 (`chain_x`) on
/// `σx`, bosons truncated to `d_p` levels.
pub fn build_two_chain_mpo(params: &ModelParams, chain_z: &WilsonChain, chain_x: &WilsonChain, d_p: usize) -> Result<Mpo> {
    two_chain_terms(params, chain_z, chain_x, d_p).map(|nn| nn.to_mpo())
}

pub(crate) fn two_chain_terms(
    params: &ModelParams,
    chain_z: &WilsonChain,
    chain_x: &WilsonChain,
    d_p: usize,
) -> Result<NearestNeighbor> {
    if d_p < 2 {
        return Err(Error::Config(format!("d_p must be at least 2, got {d_p}")));
    }
    let len = chain_z.len();
    if len == 0 {
        return Err(Error::Config("chains must have at least one site".into()));
    }
    check_chain(chain_z, len, "diagonal")?;
    check_chain(chain_x, len, "off-diagonal")?;
    let layout = LatticeLayout::two_chain(len, d_p);
    let spin = layout.spin_site();
    let mut nn = NearestNeighbor::new(layout.local_dims.clone());

    nn.add_onsite(spin, spin_onsite(params));
    add_chain_terms(&mut nn, chain_z, |n| spin + 1 + n, d_p);
    add_chain_terms(&mut nn, chain_x, |n| spin - 1 - n, d_p);

    let x = ops::displacement(d_p);
    let gz = chain_z.head_amplitude();
    if gz != 0.0 {
        nn.add_bond(spin, ops::scaled(&ops::sigma_z(), 0.5 * gz), x.clone());
    }
    let gx = chain_x.head_amplitude();
    if gx != 0.0 {
        nn.add_bond(spin - 1, ops::scaled(&x, 0.5 * gx), ops::sigma_x());
    }
    Ok(nn)
}

/// Single bath on `σz`; the spin sits at site 0.
pub fn build_single_chain_mpo(params: &ModelParams, chain: &WilsonChain, d_p: usize) -> Result<Mpo> {
    if d_p < 2 {
        return Err(Error::Config(format!("d_p must be at least 2, got {d_p}")));
    }
    let len = chain.len();
    if len == 0 {
        return Err(Error::Config("chain must have at least one site".into()));
    }
    check_chain(chain, len, "diagonal")?;
    let layout = LatticeLayout::single_chain(len, d_p);
    let mut nn = NearestNeighbor::new(layout.local_dims.clone());
    nn.add_onsite(0, spin_onsite(params));
    add_chain_terms(&mut nn, chain, |n| 1 + n, d_p);
    let g = chain.head_amplitude();
    if g != 0.0 {
        nn.add_bond(0, ops::scaled(&ops::sigma_z(), 0.5 * g), ops::displacement(d_p));
    }
    Ok(nn.to_mpo())
}

/// Both chains for a parameter point.
pub fn build_chains(params: &ModelParams, lambda: f64, length: usize, method: ChainMethod) -> Result<(WilsonChain, WilsonChain)> {
    let chain = |sd: SpectralDensity| {
        if sd.coupling == 0.0 {
            // An uncoupled chain still contributes its (vacuum) energy scales.
            let mut c = build_chain(&SpectralDensity { coupling: 1.0, ..sd }, lambda, length, ChainMethod::ClosedForm)?;
            c.head_coupling = 0.0;
            Ok(c)
        } else {
            build_chain(&sd, lambda, length, method)
        }
    };
    Ok((chain(params.diagonal_bath())?, chain(params.off_diagonal_bath())?))
}

pub fn dense_hamiltonian(mpo: &Mpo) -> Result<Vec<f64>> {
    mpo.dense()
}

/// Identity on a layout.
pub fn identity_mpo(layout: &LatticeLayout) -> Mpo {
    Mpo::identity(&layout.local_dims)
}

/// `op` on the spin, identity elsewhere.
pub fn spin_operator(layout: &LatticeLayout, op: Vec<f64>) -> Mpo {
    Mpo::single_site(&layout.local_dims, layout.spin_site(), op)
}
