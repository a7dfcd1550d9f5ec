//! Code construction: per-channel fidelity figures (exact at small `N`,
//! surrogate recursion at large `N`), information-set selection, and the
//! sequential-decoding error bound.
//!
//! Channel indexing is 0-based. Reading the binary expansion of a channel
//! index MSB→LSB gives the order in which the two polarization branches
//! were applied starting from the raw channel: bit 0 selects the minus
//! (worsened) branch, bit 1 the plus (squared) branch. Index `N−1` is the
//! all-plus channel.

use crate::channel::{QubitEmbedding, StateVector};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::report::fmt_f64;
use crate::rng::CounterRng;
use crate::transform;
use rayon::prelude::*;

/// Default block-length ceiling for the exact route; the density matrices
/// are `2^N`-dimensional, so eigensolve cost grows as `2^{3N}`.
pub const N_EXACT_DEFAULT: usize = 8;
/// Hard ceiling on the exact-route block length (1024-dimensional
/// matrices at `N = 10`).
pub const N_EXACT_MAX: usize = 10;
/// Default ceiling on the number of information bits enumerated by exact
/// block-error evaluation.
pub const K_EXACT_DEFAULT: usize = 12;

/// How the `sqrt_f` entries of a profile were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMode {
    /// Direct evaluation of the split-channel definition; only feasible
    /// for `N` up to the exact ceiling.
    Exact,
    /// Deterministic branch recursion producing per-index upper bounds.
    SurrogateUpper,
}

impl ProfileMode {
    pub fn label(&self) -> &'static str {
        match self {
            ProfileMode::Exact => "EXACT",
            ProfileMode::SurrogateUpper => "SURROGATE_UPPER",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "EXACT" => Ok(ProfileMode::Exact),
            "SURROGATE_UPPER" => Ok(ProfileMode::SurrogateUpper),
            other => Err(Error::CodeFormat(format!("unknown profile mode '{other}'"))),
        }
    }
}

/// Per-synthesized-channel `√F` figures for one block length.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityProfile {
    sqrt_f: Vec<f64>,
    mode: ProfileMode,
}

impl FidelityProfile {
    pub fn new(sqrt_f: Vec<f64>, mode: ProfileMode) -> Result<Self> {
        if sqrt_f.is_empty() || !sqrt_f.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "profile length must be a power of two, got {}",
                sqrt_f.len()
            )));
        }
        if let Some(v) = sqrt_f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!(
                "profile entry {v} outside [0, 1]"
            )));
        }
        Ok(Self { sqrt_f, mode })
    }

    pub fn len(&self) -> usize {
        self.sqrt_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sqrt_f.is_empty()
    }

    pub fn mode(&self) -> ProfileMode {
        self.mode
    }

    pub fn sqrt_f(&self) -> &[f64] {
        &self.sqrt_f
    }

    /// Fraction of channels with `√F < 2^{−N^β}`.
    pub fn polarized_fraction(&self, beta: f64) -> Result<f64> {
        polarized_fraction(self, beta)
    }
}

/// Surrogate profile: `n` doubling rounds from the raw-channel figure
/// `sqrt_f0`, minus branch `f ← min(1, 2f − f²)`, plus branch `f ← f²`.
/// Entries are upper bounds on the exact `√F` values.
pub fn surrogate_profile(n: usize, sqrt_f0: f64) -> Result<FidelityProfile> {
    transform::block_levels(n)?;
    if !(0.0..=1.0).contains(&sqrt_f0) {
        return Err(Error::invalid(format!(
            "initial sqrt-fidelity {sqrt_f0} outside [0, 1]"
        )));
    }
    let mut vals = vec![sqrt_f0];
    while vals.len() < n {
        let mut next = Vec::with_capacity(vals.len() * 2);
        for &f in &vals {
            next.push((2.0 * f - f * f).min(1.0));
            next.push(f * f);
        }
        vals = next;
    }
    FidelityProfile::new(vals, ProfileMode::SurrogateUpper)
}

pub(crate) fn check_exact_guard(n: usize, n_exact: usize) -> Result<u32> {
    let levels = transform::block_levels(n)?;
    if n_exact > N_EXACT_MAX {
        return Err(Error::guard(format!(
            "exact ceiling {n_exact} exceeds hard maximum {N_EXACT_MAX}"
        )));
    }
    if n > n_exact {
        return Err(Error::guard(format!(
            "block length {n} exceeds exact-construction ceiling {n_exact} \
             (the embedded space is 2^N-dimensional)",
        )));
    }
    Ok(levels)
}

fn check_prefix(prefix: &[u8]) -> Result<()> {
    if let Some(b) = prefix.iter().find(|&&b| b > 1) {
        return Err(Error::invalid(format!("prefix value {b} is not a bit")));
    }
    Ok(())
}

/// The averaged conditional state: uniform mixture over all completions of
/// the given input prefix, each encoded and embedded. `prefix` may be
/// empty (the full-codeword average).
pub fn exact_averaged_state(
    prefix: &[u8],
    n: usize,
    embedding: &QubitEmbedding,
    n_exact: usize,
) -> Result<DensityMatrix> {
    check_exact_guard(n, n_exact)?;
    check_prefix(prefix)?;
    let i = prefix.len();
    if i > n {
        return Err(Error::invalid(format!(
            "prefix of length {i} for block length {n}"
        )));
    }
    let suffixes = 1usize << (n - i);
    let mut states = Vec::with_capacity(suffixes);
    let mut u = vec![0u8; n];
    u[..i].copy_from_slice(prefix);
    for s in 0..suffixes {
        for t in 0..(n - i) {
            u[i + t] = ((s >> (n - i - 1 - t)) & 1) as u8;
        }
        let x = transform::encode(&u)?;
        states.push(StateVector::codeword(&x, embedding)?);
    }
    DensityMatrix::uniform_mixture(&states)
}

/// Averaged conditional state with frozen suffix positions pinned to the
/// code's frozen values instead of randomized. This is the alternative
/// conditioning exposed behind [`crate::decoder::DecoderConfig`]; the
/// default decoder never uses it.
pub fn conditioned_averaged_state(
    prefix: &[u8],
    code: &PolarCode,
    embedding: &QubitEmbedding,
    n_exact: usize,
) -> Result<DensityMatrix> {
    let n = code.n();
    check_exact_guard(n, n_exact)?;
    check_prefix(prefix)?;
    let i = prefix.len();
    if i > n {
        return Err(Error::invalid(format!(
            "prefix of length {i} for block length {n}"
        )));
    }
    let free: Vec<usize> = (i..n).filter(|&p| code.is_info(p)).collect();
    let mut u = code.u_template().to_vec();
    u[..i].copy_from_slice(prefix);
    let mut states = Vec::with_capacity(1usize << free.len());
    for s in 0..(1usize << free.len()) {
        for (t, &pos) in free.iter().enumerate() {
            u[pos] = ((s >> (free.len() - 1 - t)) & 1) as u8;
        }
        let x = transform::encode(&u)?;
        states.push(StateVector::codeword(&x, embedding)?);
    }
    DensityMatrix::uniform_mixture(&states)
}

fn prefix_bits(value: usize, len: usize) -> Vec<u8> {
    (0..len)
        .map(|t| ((value >> (len - 1 - t)) & 1) as u8)
        .collect()
}

/// Exact `√F` of synthesized channel `index` (0-based): the prefix-averaged
/// mixed-state fidelity between the two conditional states that extend the
/// prefix by 0 and by 1.
pub fn exact_split_sqrt_fidelity(
    n: usize,
    index: usize,
    embedding: &QubitEmbedding,
    n_exact: usize,
) -> Result<f64> {
    check_exact_guard(n, n_exact)?;
    if index >= n {
        return Err(Error::invalid(format!(
            "channel index {index} out of range for N={n}"
        )));
    }
    let prefixes = 1usize << index;
    let terms: Result<Vec<f64>> = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut pb = prefix_bits(p, index);
            pb.push(0);
            let rho0 = exact_averaged_state(&pb, n, embedding, n_exact)?;
            *pb.last_mut().unwrap() = 1;
            let rho1 = exact_averaged_state(&pb, n, embedding, n_exact)?;
            rho0.sqrt_fidelity(&rho1)
        })
        .collect();
    // summation order fixed by prefix index regardless of thread schedule
    Ok((terms?.iter().sum::<f64>() / prefixes as f64).min(1.0))
}

/// Exact profile over all `N` synthesized channels.
pub fn exact_profile(
    n: usize,
    embedding: &QubitEmbedding,
    n_exact: usize,
) -> Result<FidelityProfile> {
    let sqrt_f: Result<Vec<f64>> = (0..n)
        .map(|i| exact_split_sqrt_fidelity(n, i, embedding, n_exact))
        .collect();
    FidelityProfile::new(sqrt_f?, ProfileMode::Exact)
}

/// Holevo information of synthesized channel `index`, via von Neumann
/// entropies of the conditional averaged states. Summed over all indices
/// this telescopes to `N` times the raw-channel Holevo information.
pub fn split_holevo_information(
    n: usize,
    index: usize,
    embedding: &QubitEmbedding,
    n_exact: usize,
) -> Result<f64> {
    check_exact_guard(n, n_exact)?;
    if index >= n {
        return Err(Error::invalid(format!(
            "channel index {index} out of range for N={n}"
        )));
    }
    let prefixes = 1usize << index;
    let terms: Result<Vec<f64>> = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut pb = prefix_bits(p, index);
            pb.push(0);
            let rho0 = exact_averaged_state(&pb, n, embedding, n_exact)?;
            *pb.last_mut().unwrap() = 1;
            let rho1 = exact_averaged_state(&pb, n, embedding, n_exact)?;
            let mixed = rho0.average(&rho1);
            Ok(mixed.von_neumann_entropy()?
                - 0.5 * rho0.von_neumann_entropy()?
                - 0.5 * rho1.von_neumann_entropy()?)
        })
        .collect();
    Ok(terms?.iter().sum::<f64>() / prefixes as f64)
}

/// Fraction of profile entries below the polarization threshold
/// `2^{−N^β}`, `β ∈ (0, 1/2)`.
pub fn polarized_fraction(profile: &FidelityProfile, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::invalid(format!(
            "polarization exponent must lie in (0, 1/2), got {beta}"
        )));
    }
    let n = profile.len() as f64;
    let threshold = (-n.powf(beta)).exp2();
    let count = profile.sqrt_f().iter().filter(|&&v| v < threshold).count();
    Ok(count as f64 / n)
}

/// Information-set selection rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionRule {
    /// Keep exactly the channels with `√F < 2^{−N^β}`. May select nothing
    /// at small `N`; that is reported, not fatal.
    Threshold { beta: f64 },
    /// Keep the `k` channels with smallest `√F`, ties broken by lower
    /// index.
    TargetRate { k: usize },
}

/// A constructed code: block length, information set, frozen values and
/// the profile that chose them.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    info_set: Vec<usize>,
    info_mask: Vec<bool>,
    /// Full-length input template: frozen values at frozen positions,
    /// zero at information positions.
    u_template: Vec<u8>,
    profile: FidelityProfile,
}

impl PolarCode {
    /// Applies a selection rule to a profile; frozen bits default to zero.
    pub fn select(profile: FidelityProfile, rule: SelectionRule) -> Result<Self> {
        let n = profile.len();
        let info_set = match rule {
            SelectionRule::Threshold { beta } => {
                if !(beta > 0.0 && beta < 0.5) {
                    return Err(Error::invalid(format!(
                        "threshold exponent must lie in (0, 1/2), got {beta}"
                    )));
                }
                let threshold = (-(n as f64).powf(beta)).exp2();
                (0..n).filter(|&i| profile.sqrt_f()[i] < threshold).collect()
            }
            SelectionRule::TargetRate { k } => {
                if k > n {
                    return Err(Error::invalid(format!(
                        "target rate {k} exceeds block length {n}"
                    )));
                }
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| {
                    profile.sqrt_f()[a]
                        .partial_cmp(&profile.sqrt_f()[b])
                        .expect("profile entries are finite")
                        .then(a.cmp(&b))
                });
                let mut chosen: Vec<usize> = order[..k].to_vec();
                chosen.sort_unstable();
                chosen
            }
        };
        Self::from_parts(info_set, vec![0; n], profile)
    }

    /// Builds a code from an explicit information set.
    pub fn with_info_set(profile: FidelityProfile, info_set: Vec<usize>) -> Result<Self> {
        let n = profile.len();
        Self::from_parts(info_set, vec![0; n], profile)
    }

    fn from_parts(
        info_set: Vec<usize>,
        zero_template: Vec<u8>,
        profile: FidelityProfile,
    ) -> Result<Self> {
        let n = profile.len();
        let mut mask = vec![false; n];
        let mut prev: Option<usize> = None;
        for &i in &info_set {
            if i >= n {
                return Err(Error::invalid(format!(
                    "information index {i} out of range for N={n}"
                )));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(Error::invalid(
                    "information set must be strictly increasing".to_string(),
                ));
            }
            prev = Some(i);
            mask[i] = true;
        }
        debug_assert_eq!(zero_template.len(), n);
        Ok(Self {
            info_set,
            info_mask: mask,
            u_template: zero_template,
            profile,
        })
    }

    /// Replaces the frozen values, given in frozen-position (ascending
    /// index) order.
    pub fn with_frozen_values(mut self, values: &[u8]) -> Result<Self> {
        let frozen_len = self.n() - self.k();
        if values.len() != frozen_len {
            return Err(Error::invalid(format!(
                "expected {frozen_len} frozen values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|&b| b > 1) {
            return Err(Error::invalid("frozen values must be bits".to_string()));
        }
        let mut it = values.iter();
        for pos in 0..self.n() {
            if !self.info_mask[pos] {
                self.u_template[pos] = *it.next().unwrap();
            }
        }
        Ok(self)
    }

    /// Seeded random frozen values.
    pub fn with_random_frozen(self, seed: u64) -> Result<Self> {
        let mut rng = CounterRng::new(seed, u64::MAX);
        let mut vals = vec![0u8; self.n() - self.k()];
        rng.fill_bits(&mut vals);
        self.with_frozen_values(&vals)
    }

    pub fn n(&self) -> usize {
        self.profile.len()
    }

    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn is_info(&self, pos: usize) -> bool {
        self.info_mask[pos]
    }

    pub fn profile(&self) -> &FidelityProfile {
        &self.profile
    }

    /// Frozen values in frozen-position order.
    pub fn frozen_values(&self) -> Vec<u8> {
        (0..self.n())
            .filter(|&p| !self.info_mask[p])
            .map(|p| self.u_template[p])
            .collect()
    }

    pub(crate) fn u_template(&self) -> &[u8] {
        &self.u_template
    }

    /// Frozen value at a frozen position (0 for information positions).
    pub fn frozen_value_at(&self, pos: usize) -> u8 {
        self.u_template[pos]
    }

    /// Assembles the full input block from `k` message bits.
    pub fn assemble(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k() {
            return Err(Error::invalid(format!(
                "message length {} does not match K={}",
                message.len(),
                self.k()
            )));
        }
        if message.iter().any(|&b| b > 1) {
            return Err(Error::invalid("message values must be bits".to_string()));
        }
        let mut u = self.u_template.clone();
        for (&pos, &bit) in self.info_set.iter().zip(message) {
            u[pos] = bit;
        }
        Ok(u)
    }

    /// Extracts the information bits of a full input block.
    pub fn extract_message(&self, u: &[u8]) -> Vec<u8> {
        self.info_set.iter().map(|&i| u[i]).collect()
    }

    /// The sequential-decoding error bound `2·√(Σ_{i∈A} √F_i / 2)`,
    /// returned as `(clamped to [0,1], raw)`.
    pub fn proposition1_bound(&self) -> (f64, f64) {
        let sum: f64 = self
            .info_set
            .iter()
            .map(|&i| 0.5 * self.profile.sqrt_f()[i])
            .sum();
        let raw = 2.0 * sum.sqrt();
        (raw.min(1.0), raw)
    }

    /// Serializes to the line-oriented code file format. Floats carry 17
    /// significant digits so parsing restores them exactly.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("N={}\n", self.n()));
        out.push_str(&format!("K={}\n", self.k()));
        out.push_str(&format!("mode={}\n", self.profile.mode().label()));
        let a: Vec<String> = self.info_set.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("A={}\n", a.join(",")));
        let frozen: String = self
            .frozen_values()
            .iter()
            .map(|b| char::from(b'0' + b))
            .collect();
        out.push_str(&format!("frozen={frozen}\n"));
        let sf: Vec<String> = self.profile.sqrt_f().iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&format!("sqrt_f={}\n", sf.join(",")));
        out
    }

    /// Parses the code file format; `#` lines and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut k: Option<usize> = None;
        let mut mode: Option<ProfileMode> = None;
        let mut a: Option<Vec<usize>> = None;
        let mut frozen: Option<Vec<u8>> = None;
        let mut sqrt_f: Option<Vec<f64>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::CodeFormat(format!("line {}: expected key=value", lineno + 1))
            })?;
            let bad = |what: &str| {
                Error::CodeFormat(format!("line {}: bad {what}: '{value}'", lineno + 1))
            };
            match key {
                "N" => n = Some(value.parse().map_err(|_| bad("block length"))?),
                "K" => k = Some(value.parse().map_err(|_| bad("info count"))?),
                "mode" => mode = Some(ProfileMode::parse(value)?),
                "A" => {
                    let set = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|t| t.trim().parse::<usize>().map_err(|_| bad("index")))
                            .collect::<Result<Vec<usize>>>()?
                    };
                    a = Some(set);
                }
                "frozen" => {
                    let bits = value
                        .chars()
                        .map(|c| match c {
                            '0' => Ok(0u8),
                            '1' => Ok(1u8),
                            _ => Err(bad("frozen bitstring")),
                        })
                        .collect::<Result<Vec<u8>>>()?;
                    frozen = Some(bits);
                }
                "sqrt_f" => {
                    let vals = value
                        .split(',')
                        .map(|t| t.trim().parse::<f64>().map_err(|_| bad("profile entry")))
                        .collect::<Result<Vec<f64>>>()?;
                    sqrt_f = Some(vals);
                }
                other => {
                    return Err(Error::CodeFormat(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        let n = n.ok_or_else(|| Error::CodeFormat("missing N".to_string()))?;
        let k = k.ok_or_else(|| Error::CodeFormat("missing K".to_string()))?;
        let mode = mode.ok_or_else(|| Error::CodeFormat("missing mode".to_string()))?;
        let a = a.ok_or_else(|| Error::CodeFormat("missing A".to_string()))?;
        let frozen = frozen.ok_or_else(|| Error::CodeFormat("missing frozen".to_string()))?;
        let sqrt_f = sqrt_f.ok_or_else(|| Error::CodeFormat("missing sqrt_f".to_string()))?;
        if sqrt_f.len() != n {
            return Err(Error::CodeFormat(format!(
                "sqrt_f has {} entries for N={n}",
                sqrt_f.len()
            )));
        }
        if a.len() != k {
            return Err(Error::CodeFormat(format!(
                "A has {} indices for K={k}",
                a.len()
            )));
        }
        if frozen.len() != n - k {
            return Err(Error::CodeFormat(format!(
                "frozen bitstring has {} bits, expected {}",
                frozen.len(),
                n - k
            )));
        }
        let profile =
            FidelityProfile::new(sqrt_f, mode).map_err(|e| Error::CodeFormat(e.to_string()))?;
        let code = Self::with_info_set(profile, a).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::CodeFormat(m),
            other => other,
        })?;
        code.with_frozen_values(&frozen)
            .map_err(|e| Error::CodeFormat(e.to_string()))
    }
}
