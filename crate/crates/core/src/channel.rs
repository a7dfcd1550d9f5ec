//! The BPSK coherent-state channel and its exact finite-dimensional
//! embedding.
//!
//! Two coherent states `|±√E⟩` span a two-dimensional subspace with a real
//! Gram matrix, so each symbol embeds into `R²` with amplitudes
//! `(c, ±s)`, `c² − s² = γ`, and an `N`-symbol codeword into `R^(2^N)` by
//! Kronecker product. All downstream linear algebra stays real.

use crate::error::{Error, Result};

/// Effective energies above this clamp the overlap to exactly 0: `e^{-2·50}`
/// is below the smallest positive double, and letting it denormalize would
/// make fidelities silently lose precision instead of failing over to the
/// orthogonal limit.
pub const MAX_EFFECTIVE_ENERGY: f64 = 50.0;

/// BPSK channel with mean photon number `E` per pulse and transmissivity
/// `η ∈ (0,1]`. The transmissivity folds into an effective received energy
/// `ηE` at construction; every figure downstream depends on that product
/// only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpskChannel {
    energy: f64,
    eta: f64,
    overlap: f64,
    clamped: bool,
}

impl BpskChannel {
    pub fn new(energy: f64, eta: f64) -> Result<Self> {
        if !energy.is_finite() || energy < 0.0 {
            return Err(Error::invalid(format!(
                "mean photon number must be finite and non-negative, got {energy}"
            )));
        }
        if !eta.is_finite() || eta <= 0.0 || eta > 1.0 {
            return Err(Error::invalid(format!(
                "transmissivity must lie in (0, 1], got {eta}"
            )));
        }
        let effective = eta * energy;
        let clamped = effective > MAX_EFFECTIVE_ENERGY;
        let overlap = if clamped {
            0.0
        } else {
            (-2.0 * effective).exp()
        };
        Ok(Self {
            energy,
            eta,
            overlap,
            clamped,
        })
    }

    /// Unit-transmissivity channel.
    pub fn with_energy(energy: f64) -> Result<Self> {
        Self::new(energy, 1.0)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Received energy `ηE`.
    pub fn effective_energy(&self) -> f64 {
        self.eta * self.energy
    }

    /// Amplitude overlap `γ = ⟨ψ₀|ψ₁⟩ = e^{-2ηE}`, in `(0, 1]`, equal to 1
    /// iff `ηE = 0`; clamped to 0 above [`MAX_EFFECTIVE_ENERGY`].
    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    /// Channel fidelity `F = γ² = e^{-4ηE}`.
    pub fn fidelity(&self) -> f64 {
        self.overlap * self.overlap
    }

    /// True when the energy exceeded the clamp threshold; callers that
    /// surface warnings should check this.
    pub fn overlap_clamped(&self) -> bool {
        self.clamped
    }

    pub fn embedding(&self) -> QubitEmbedding {
        QubitEmbedding::from_overlap(self.overlap)
            .expect("channel overlap is always a valid embedding parameter")
    }
}

/// Per-symbol embedding of `{|ψ₀⟩, |ψ₁⟩}` into `R²` along the symmetric and
/// antisymmetric combinations: bit 0 ↦ `(c, +s)`, bit 1 ↦ `(c, −s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitEmbedding {
    c: f64,
    s: f64,
    overlap: f64,
}

impl QubitEmbedding {
    pub fn from_overlap(overlap: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap) {
            return Err(Error::invalid(format!(
                "amplitude overlap must lie in [0, 1], got {overlap}"
            )));
        }
        Ok(Self {
            c: ((1.0 + overlap) / 2.0).sqrt(),
            s: ((1.0 - overlap) / 2.0).sqrt(),
            overlap,
        })
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn symmetric_amplitude(&self) -> f64 {
        self.c
    }

    pub fn antisymmetric_amplitude(&self) -> f64 {
        self.s
    }

    /// The embedded symbol state, unit norm by construction.
    pub fn embed_symbol(&self, bit: u8) -> [f64; 2] {
        debug_assert!(bit <= 1);
        if bit == 0 {
            [self.c, self.s]
        } else {
            [self.c, -self.s]
        }
    }
}

/// Real unit vector in the `2^N`-dimensional embedded codeword space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<f64>,
    symbols: usize,
}

impl StateVector {
    /// Tensor product of the per-symbol embedded states for the codeword
    /// `bits`; the first symbol occupies the most significant index bit.
    /// The length must be a power of two.
    pub fn codeword(bits: &[u8], embedding: &QubitEmbedding) -> Result<Self> {
        if bits.is_empty() || !bits.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "codeword length must be a power of two, got {}",
                bits.len()
            )));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::invalid(format!("codeword symbol {b} is not a bit")));
        }
        let mut amps = vec![1.0];
        for &bit in bits {
            let sym = embedding.embed_symbol(bit);
            let mut next = Vec::with_capacity(amps.len() * 2);
            for &a in &amps {
                next.push(a * sym[0]);
                next.push(a * sym[1]);
            }
            amps = next;
        }
        Ok(Self {
            amplitudes: amps,
            symbols: bits.len(),
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<f64>, symbols: usize) -> Result<Self> {
        if amplitudes.len() != 1usize << symbols {
            return Err(Error::invalid(format!(
                "amplitude vector of length {} does not match {} symbols",
                amplitudes.len(),
                symbols
            )));
        }
        Ok(Self {
            amplitudes,
            symbols,
        })
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}
