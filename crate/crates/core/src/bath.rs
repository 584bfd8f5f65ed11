//! Power-law boson baths and their mapping onto semi-infinite Wilson chains.
//!
//! Two independent routes produce the chain coefficients:
//!
//! * [`chain_coefficients`] evaluates the closed forms for logarithmic
//!   discretization (q-Pochhammer normalizations handled in log space), and
//! * [`discretize_bath`] followed by [`lanczos_chain`] bins the spectral
//!   density into star modes and tridiagonalizes the star Hamiltonian.
//!
//! The second route is slower but makes no use of the closed forms, so the
//! two serve as oracles for each other.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `J(ω) = 2·coupling·ω_c^{1−s}·ω^s` on `(0, ω_c]`, zero above the cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub coupling: f64,
    pub exponent: f64,
    pub cutoff: f64,
}

impl SpectralDensity {
    pub fn new(coupling: f64, exponent: f64, cutoff: f64) -> Result<Self> {
        let sd = Self {
            coupling,
            exponent,
            cutoff,
        };
        sd.validate()?;
        Ok(sd)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::Domain(format!("bath coupling must be >= 0, got {}", self.coupling)));
        }
        if !(self.exponent > 0.0 && self.exponent <= 1.0) {
            return Err(Error::Domain(format!(
                "spectral exponent must lie in (0, 1], got {}",
                self.exponent
            )));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::Domain(format!("cutoff must be > 0, got {}", self.cutoff)));
        }
        Ok(())
    }

    pub fn evaluate(&self, omega: f64) -> Result<f64> {
        spectral_density(self, omega)
    }

    pub fn eta(&self) -> f64 {
        eta(self)
    }
}

pub fn spectral_density(sd: &SpectralDensity, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("spectral density needs omega > 0, got {omega}")));
    }
    if omega > sd.cutoff {
        return Ok(0.0);
    }
    Ok(2.0 * sd.coupling * sd.cutoff.powf(1.0 - sd.exponent) * omega.powf(sd.exponent))
}

/// Integrated coupling `η = 2π·coupling·ω_c²/(1+s)`, so that `η/π = ∫J`.
pub fn eta(sd: &SpectralDensity) -> f64 {
    2.0 * PI * sd.coupling * sd.cutoff * sd.cutoff / (1.0 + sd.exponent)
}

/// Finite q-Pochhammer symbol `(a; b)_n = Π_{k<n} (1 − a·b^k)`.
pub fn q_pochhammer(a: f64, b: f64, n: usize) -> f64 {
    let mut prod = 1.0;
    let mut bk = 1.0;
    for _ in 0..n {
        prod *= 1.0 - a * bk;
        bk *= b;
    }
    prod
}

/// `ln (a; b)_n` for `0 < a·b^k < 1`, accumulated with `ln_1p` so that long
/// products neither underflow nor lose the small factors.
pub fn ln_q_pochhammer(a: f64, b: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    let mut bk = 1.0;
    for _ in 0..n {
        acc += (-a * bk).ln_1p();
        bk *= b;
    }
    acc
}

/// Site energies `ω_n`, hoppings `t_n`, and the impurity coupling `η` of one
/// Wilson chain. The spin couples to site 0 with amplitude `√(η/π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonChain {
    pub site_energies: Vec<f64>,
    /// `hoppings[n]` links sites `n` and `n + 1`. A chain of length `L`
    /// carries `L` or `L − 1` entries; only the first `L − 1` enter the
    /// truncated Hamiltonian.
    pub hoppings: Vec<f64>,
    pub head_coupling: f64,
}

impl WilsonChain {
    pub fn len(&self) -> usize {
        self.site_energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site_energies.is_empty()
    }

    /// Amplitude multiplying `(p₀ + p₀†)·σ/2`.
    pub fn head_amplitude(&self) -> f64 {
        (self.head_coupling / PI).sqrt()
    }

    pub fn truncated(&self, len: usize) -> WilsonChain {
        WilsonChain {
            site_energies: self.site_energies[..len.min(self.len())].to_vec(),
            hoppings: self.hoppings[..len.min(self.hoppings.len())].to_vec(),
            head_coupling: self.head_coupling,
        }
    }
}

#[inline]
fn one_minus_pow(x: f64, p: f64) -> f64 {
    // 1 − x^p for 0 < x < 1
    -(p * x.ln()).exp_m1()
}

/// `ζ_s = (s+1)/(s+2)·(1−λ^{−(s+2)})/(1−λ^{−(s+1)})·ω_c`, the mean frequency
/// of the highest logarithmic bin.
pub fn zeta(sd: &SpectralDensity, lambda: f64) -> f64 {
    let s = sd.exponent;
    let x = 1.0 / lambda;
    (s + 1.0) / (s + 2.0) * one_minus_pow(x, s + 2.0) / one_minus_pow(x, s + 1.0) * sd.cutoff
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 1.0) {
        return Err(Error::Domain(format!("discretization parameter must be > 1, got {lambda}")));
    }
    Ok(())
}

/// `ln N_n²` of the closed-form normalization.
fn ln_norm_sq(n: usize, s: f64, lambda: f64) -> f64 {
    let x = 1.0 / lambda;
    let nf = n as f64;
    -nf * (1.0 + s) * lambda.ln() + 2.0 * ln_q_pochhammer(x, x, n)
        - 2.0 * ln_q_pochhammer(x.powf(s + 1.0), x, n)
        - one_minus_pow(x, 2.0 * nf + 1.0 + s).ln()
}

/// Closed-form Wilson-chain coefficients for logarithmic discretization with
/// parameter `lambda`, `length` sites and `length` hoppings.
pub fn chain_coefficients(sd: &SpectralDensity, lambda: f64, length: usize) -> Result<WilsonChain> {
    sd.validate()?;
    check_lambda(lambda)?;
    if length < 1 {
        return Err(Error::Domain("chain length must be at least 1".into()));
    }
    let s = sd.exponent;
    let x = 1.0 / lambda;
    let z = zeta(sd, lambda);

    let a_n = |n: f64| {
        x.powf(n) * one_minus_pow(x, n + 1.0 + s).powi(2)
            / (one_minus_pow(x, 2.0 * n + 1.0 + s) * one_minus_pow(x, 2.0 * n + 2.0 + s))
    };
    let c_n = |n: f64| {
        if n == 0.0 {
            return 0.0;
        }
        x.powf(n + s) * one_minus_pow(x, n).powi(2)
            / (one_minus_pow(x, 2.0 * n + s) * one_minus_pow(x, 2.0 * n + 1.0 + s))
    };

    let mut site_energies = Vec::with_capacity(length);
    let mut hoppings = Vec::with_capacity(length);
    let mut ln_prev = ln_norm_sq(0, s, lambda);
    for n in 0..length {
        let nf = n as f64;
        let a = a_n(nf);
        site_energies.push(z * (a + c_n(nf)));
        let ln_next = ln_norm_sq(n + 1, s, lambda);
        hoppings.push(z * (0.5 * (ln_next - ln_prev)).exp() * a);
        ln_prev = ln_next;
    }
    Ok(WilsonChain {
        site_energies,
        hoppings,
        head_coupling: eta(sd),
    })
}

/// Star-geometry bath: independent modes coupled directly to the spin.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedBath {
    pub mode_frequencies: Vec<f64>,
    pub mode_couplings: Vec<f64>,
}

impl DiscretizedBath {
    pub fn count(&self) -> usize {
        self.mode_frequencies.len()
    }
}

/// Logarithmic binning `[λ^{−(m+1)}, λ^{−m}]·ω_c`, one mode per bin carrying the
/// bin's integrated weight at the J-weighted mean frequency.
pub fn discretize_bath(sd: &SpectralDensity, lambda: f64, bins: usize) -> Result<DiscretizedBath> {
    sd.validate()?;
    check_lambda(lambda)?;
    if bins == 0 {
        return Err(Error::Domain("need at least one bin".into()));
    }
    let s = sd.exponent;
    let x = 1.0 / lambda;
    let wc = sd.cutoff;
    // Closed-form moments of J over one bin, written relative to the bin's
    // upper edge to stay accurate deep in the tail.
    let base0 = 2.0 * sd.coupling * wc * wc / (s + 1.0) * one_minus_pow(x, s + 1.0);
    let shape = (s + 1.0) / (s + 2.0) * one_minus_pow(x, s + 2.0) / one_minus_pow(x, s + 1.0);
    let mut mode_frequencies = Vec::with_capacity(bins);
    let mut mode_couplings = Vec::with_capacity(bins);
    for m in 0..bins {
        let upper = wc * x.powi(m as i32);
        let weight = base0 * x.powf(m as f64 * (s + 1.0));
        mode_frequencies.push(shape * upper);
        mode_couplings.push(weight.sqrt());
    }
    Ok(DiscretizedBath {
        mode_frequencies,
        mode_couplings,
    })
}

const ORTHOGONALITY_LIMIT: f64 = 1e-10;

/// Tridiagonalize the star Hamiltonian `diag(ω_l)` starting from the
/// normalized coupling vector. Returns the first `length` diagonal entries as
/// site energies and up to `length` off-diagonals as hoppings.
pub fn lanczos_chain(bath: &DiscretizedBath, length: usize) -> Result<WilsonChain> {
    let count = bath.count();
    if length == 0 {
        return Err(Error::Domain("chain length must be at least 1".into()));
    }
    if count < length {
        return Err(Error::Domain(format!(
            "bath has {count} modes but {length} chain sites were requested"
        )));
    }
    let norm_sq: f64 = bath.mode_couplings.iter().map(|g| g * g).sum();
    if !(norm_sq > 0.0) {
        return Err(Error::DegenerateInput("coupling vector is zero".into()));
    }
    let norm = norm_sq.sqrt();
    let freqs = &bath.mode_frequencies;

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(length + 1);
    basis.push(bath.mode_couplings.iter().map(|g| g / norm).collect());
    let mut diag = Vec::with_capacity(length);
    let mut off = Vec::with_capacity(length);
    let wanted_hoppings = length.min(count - 1);

    for j in 0..length {
        let v = &basis[j];
        let mut w: Vec<f64> = v.iter().zip(freqs).map(|(a, f)| a * f).collect();
        let alpha: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
        diag.push(alpha);
        if j >= wanted_hoppings {
            break;
        }
        // two passes of classical Gram–Schmidt against every previous vector
        for _ in 0..2 {
            for q in basis.iter() {
                let c: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let beta = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(beta > 0.0) || !beta.is_finite() {
            break;
        }
        w.iter_mut().for_each(|a| *a /= beta);
        let worst = basis
            .iter()
            .map(|q| q.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max);
        if worst > ORTHOGONALITY_LIMIT {
            return Err(Error::Numerical(format!(
                "Lanczos lost orthogonality at step {j}: overlap {worst:.3e}"
            )));
        }
        off.push(beta);
        basis.push(w);
    }
    Ok(WilsonChain {
        site_energies: diag,
        hoppings: off,
        head_coupling: PI * norm_sq,
    })
}

/// Which route to use when building chains for a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChainMethod {
    #[default]
    ClosedForm,
    Lanczos,
}

/// Number of logarithmic bins used by the Lanczos route.
pub const DEFAULT_ORACLE_BINS: usize = 200;

pub fn build_chain(sd: &SpectralDensity, lambda: f64, length: usize, method: ChainMethod) -> Result<WilsonChain> {
    match method {
        ChainMethod::ClosedForm => chain_coefficients(sd, lambda, length),
        ChainMethod::Lanczos => {
            let bins = DEFAULT_ORACLE_BINS.max(length + 1);
            let bath = discretize_bath(sd, lambda, bins)?;
            lanczos_chain(&bath, length)
        }
    }
}
