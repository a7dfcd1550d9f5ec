//! Capacity and error-probability figures for every receiver chain the
//! laboratory compares: conventional single-symbol receivers (Dolinar,
//! homodyne, Kennedy direct detection), the collective-measurement limits
//! of the BPSK/OOK/PPM alphabets, and the unrestricted-modulation limit
//! `g(E)`.
//!
//! Entropies are in bits with the `0·log 0 = 0` convention; photon
//! efficiencies are reported in both bits/photon and nats/photon since the
//! asymptotic expansions are conventionally quoted in nats.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Lower bracket end for prior optimization; priors below this contribute
/// capacity indistinguishable from zero at double precision.
const PRIOR_MIN: f64 = 1e-9;
/// Golden-section interval tolerance.
const PRIOR_TOL: f64 = 1e-10;

/// Binary entropy in bits, `0·log 0 = 0`. Callers are expected to pass
/// `p ∈ [0, 1]`; values nudged outside by rounding are clamped.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (1.0 - p).log2();
    }
    h
}

/// `g(x) = (1+x)·log2(1+x) − x·log2(x)` bits, continuous at 0. This is the
/// unrestricted-modulation capacity at mean photon number `x`.
pub fn g(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!(
            "g(x) requires finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 + x) * (1.0 + x).log2() - x * x.log2())
}

fn check_energy(e: f64) -> Result<f64> {
    if !e.is_finite() || e < 0.0 {
        return Err(Error::invalid(format!(
            "mean photon number must be finite and non-negative, got {e}"
        )));
    }
    Ok(e)
}

/// Minimum error probability for discriminating the two BPSK pulses,
/// `[1 − √(1 − e^{−4E})]/2`, attained by the Dolinar receiver.
pub fn dolinar_pe(e: f64) -> Result<f64> {
    let e = check_energy(e)?;
    Ok((1.0 - (1.0 - (-4.0 * e).exp()).max(0.0).sqrt()) / 2.0)
}

/// Ideal homodyne error probability `erfc(√(2E))/2`.
pub fn homodyne_pe(e: f64) -> Result<f64> {
    let e = check_energy(e)?;
    Ok(statrs::function::erf::erfc((2.0 * e).sqrt()) / 2.0)
}

/// Crossover probability of the Z-channel induced by the Kennedy receiver
/// (coherent displacement to `{|2√E⟩, |0⟩}` then direct detection):
/// `e^{−4E}`, the no-click probability of the displaced pulse.
pub fn kennedy_crossover(e: f64) -> Result<f64> {
    let e = check_energy(e)?;
    Ok((-4.0 * e).exp())
}

/// Kennedy receiver error probability `e^{−4E}/2`.
pub fn kennedy_pe(e: f64) -> Result<f64> {
    Ok(kennedy_crossover(e)? / 2.0)
}

fn check_probability(label: &str, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "{label} must lie in [0, 1], got {p}"
        )));
    }
    Ok(p)
}

/// BSC capacity `1 − H₂(p)`.
pub fn bsc_capacity(p: f64) -> Result<f64> {
    let p = check_probability("crossover", p)?;
    Ok(1.0 - binary_entropy(p))
}

/// Mutual information of the Z-channel (input 1 flips to 0 with the given
/// crossover, input 0 is noiseless) at a given prior on input 1; with
/// `prior = None` the prior is optimized by golden-section search.
pub fn z_channel_capacity(crossover: f64, prior: Option<f64>) -> Result<f64> {
    let c = check_probability("crossover", crossover)?;
    match prior {
        Some(p) => {
            let p = check_probability("prior", p)?;
            Ok(z_mutual_information(p, c))
        }
        None => Ok(z_channel_optimum(c)?.0),
    }
}

/// Optimized Z-channel capacity together with the maximizing prior.
pub fn z_channel_optimum(crossover: f64) -> Result<(f64, f64)> {
    let c = check_probability("crossover", crossover)?;
    let (p, v) = golden_max(|p| z_mutual_information(p, c), PRIOR_MIN, 0.5);
    Ok((v, p))
}

fn z_mutual_information(p: f64, c: f64) -> f64 {
    binary_entropy(p * (1.0 - c)) - p * binary_entropy(c)
}

/// Collective-measurement (Holevo) capacity of the equiprobable BPSK
/// alphabet: `H₂[(1 + e^{−2E})/2]`.
pub fn holevo_bpsk(e: f64) -> Result<f64> {
    let e = check_energy(e)?;
    Ok(binary_entropy((1.0 + (-2.0 * e).exp()) / 2.0))
}

/// Holevo information of a binary pure-state ensemble with prior `p` and
/// amplitude overlap `gamma`: the von Neumann entropy of the 2×2 averaged
/// state, whose eigenvalues are `1/2 ± √(1/4 − p(1−p)(1−γ²))`.
pub fn holevo_binary_ensemble(p: f64, gamma: f64) -> Result<f64> {
    let p = check_probability("prior", p)?;
    let gamma = check_probability("overlap", gamma)?;
    let disc = (0.25 - p * (1.0 - p) * (1.0 - gamma * gamma)).max(0.0);
    Ok(binary_entropy(0.5 + disc.sqrt()))
}

/// On-off keying with symbol-by-symbol direct detection: prior-optimized
/// Z-channel capacity where the on pulse carries `E₀ = E/p` so the mean
/// energy stays `E`, and the no-click crossover is `e^{−E₀}`.
pub fn ook_dd_capacity(e: f64) -> Result<f64> {
    Ok(ook_dd_optimum(e)?.0)
}

/// OOK direct-detection capacity with the maximizing pulse prior.
pub fn ook_dd_optimum(e: f64) -> Result<(f64, f64)> {
    let e = check_energy(e)?;
    if e == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (p, v) = golden_max(
        |p| z_mutual_information(p, (-e / p).exp()),
        PRIOR_MIN,
        0.5,
    );
    Ok((v, p))
}

/// Holevo capacity of the OOK alphabet `{|0⟩, |√(E/p)⟩}` with mean energy
/// `E`, maximized over the pulse prior.
pub fn ook_holevo_capacity(e: f64) -> Result<f64> {
    Ok(ook_holevo_optimum(e)?.0)
}

/// OOK Holevo capacity with the maximizing pulse prior.
pub fn ook_holevo_optimum(e: f64) -> Result<(f64, f64)> {
    let e = check_energy(e)?;
    if e == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (p, v) = golden_max(
        |p| {
            // overlap of vacuum with the on pulse of energy E/p
            let gamma = (-e / (2.0 * p)).exp();
            holevo_binary_ensemble(p, gamma).unwrap_or(0.0)
        },
        PRIOR_MIN,
        0.5,
    );
    Ok((v, p))
}

fn check_ppm_order(q: usize) -> Result<()> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::invalid(format!(
            "PPM order must be a power of two >= 2, got {q}"
        )));
    }
    Ok(())
}

/// `q`-ary PPM with direct detection, bits per slot. Pulse energy is
/// `E_p = qE` so the per-slot mean stays `E`; an all-zero detection record
/// is treated as a pure erasure, giving `(1 − e^{−E_p})·log2(q)/q`.
pub fn ppm_dd_capacity(q: usize, e: f64) -> Result<f64> {
    check_ppm_order(q)?;
    let e = check_energy(e)?;
    let pulse = q as f64 * e;
    Ok((1.0 - (-pulse).exp()) * (q as f64).log2() / q as f64)
}

/// `q`-ary PPM Holevo capacity, bits per slot: entropy of the uniform
/// mixture of the `q` PPM states. Their Gram matrix has eigenvalue
/// `(1+(q−1)γ)/q` once and `(1−γ)/q` with multiplicity `q−1`, where
/// `γ = e^{−E_p}` is the pairwise codeword overlap.
pub fn ppm_holevo_capacity(q: usize, e: f64) -> Result<f64> {
    check_ppm_order(q)?;
    let e = check_energy(e)?;
    let qf = q as f64;
    let gamma = (-qf * e).exp();
    let lam_top = (1.0 + (qf - 1.0) * gamma) / qf;
    let lam_rest = (1.0 - gamma) / qf;
    let mut h = 0.0;
    if lam_top > 0.0 {
        h -= lam_top * lam_top.log2();
    }
    if lam_rest > 0.0 {
        h -= (qf - 1.0) * lam_rest * lam_rest.log2();
    }
    Ok(h / qf)
}

/// Golden-section maximization of a unimodal function on `[a, b]`; returns
/// `(argmax, max)`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > PRIOR_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// The capacity curves the laboratory compares. `KennedyP50` is the
/// Kennedy Z-channel at prior 1/2 next to the prior-optimized `Kennedy`;
/// both are emitted and labeled since either convention is defensible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Ult,
    BpskHolevo,
    BpskDolinar,
    BpskHomodyne,
    Kennedy,
    KennedyP50,
    OokDd,
    OokHolevo,
    PpmDd,
    PpmHolevo,
}

impl Scheme {
    pub const ALL: [Scheme; 10] = [
        Scheme::Ult,
        Scheme::BpskHolevo,
        Scheme::BpskDolinar,
        Scheme::BpskHomodyne,
        Scheme::Kennedy,
        Scheme::KennedyP50,
        Scheme::OokDd,
        Scheme::OokHolevo,
        Scheme::PpmDd,
        Scheme::PpmHolevo,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Ult => "ULT",
            Scheme::BpskHolevo => "BPSK_HOLEVO",
            Scheme::BpskDolinar => "BPSK_DOLINAR",
            Scheme::BpskHomodyne => "BPSK_HOMODYNE",
            Scheme::Kennedy => "KENNEDY",
            Scheme::KennedyP50 => "KENNEDY_P50",
            Scheme::OokDd => "OOK_DD",
            Scheme::OokHolevo => "OOK_HOLEVO",
            Scheme::PpmDd => "PPM_DD",
            Scheme::PpmHolevo => "PPM_HOLEVO",
        }
    }

    /// Capacity in bits/use at mean photon number `e`; `ppm_q` only
    /// matters for the PPM schemes.
    pub fn capacity(&self, e: f64, ppm_q: usize) -> Result<f64> {
        match self {
            Scheme::Ult => g(e),
            Scheme::BpskHolevo => holevo_bpsk(e),
            Scheme::BpskDolinar => bsc_capacity(dolinar_pe(e)?),
            Scheme::BpskHomodyne => bsc_capacity(homodyne_pe(e)?),
            Scheme::Kennedy => z_channel_capacity(kennedy_crossover(e)?, None),
            Scheme::KennedyP50 => z_channel_capacity(kennedy_crossover(e)?, Some(0.5)),
            Scheme::OokDd => ook_dd_capacity(e),
            Scheme::OokHolevo => ook_holevo_capacity(e),
            Scheme::PpmDd => ppm_dd_capacity(ppm_q, e),
            Scheme::PpmHolevo => ppm_holevo_capacity(ppm_q, e),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Scheme::ALL
            .iter()
            .copied()
            .find(|sch| sch.label() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown scheme '{s}'")))
    }
}

/// One row of the efficiency table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPoint {
    pub scheme: Scheme,
    pub energy: f64,
    pub bits_per_use: f64,
}

impl CapacityPoint {
    pub fn bits_per_photon(&self) -> f64 {
        self.bits_per_use / self.energy
    }

    pub fn nats_per_photon(&self) -> f64 {
        self.bits_per_photon() * std::f64::consts::LN_2
    }
}

/// Capacity and photon efficiency for each scheme over an energy grid.
/// Energies must be strictly positive (the efficiencies divide by `E`).
pub fn efficiency_table(
    energies: &[f64],
    schemes: &[Scheme],
    ppm_q: usize,
) -> Result<Vec<CapacityPoint>> {
    let mut rows = Vec::with_capacity(energies.len() * schemes.len());
    for &e in energies {
        if !(e > 0.0) {
            return Err(Error::invalid(format!(
                "efficiency table requires E > 0, got {e}"
            )));
        }
        for &scheme in schemes {
            rows.push(CapacityPoint {
                scheme,
                energy: e,
                bits_per_use: scheme.capacity(e, ppm_q)?,
            });
        }
    }
    Ok(rows)
}

/// Logarithmic or linear energy grid, inclusive of both endpoints.
pub fn energy_grid(e_min: f64, e_max: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if !(e_min.is_finite() && e_max.is_finite()) || e_min <= 0.0 && log || e_min < 0.0 {
        return Err(Error::invalid(format!(
            "invalid grid bounds [{e_min}, {e_max}]"
        )));
    }
    if e_max < e_min {
        return Err(Error::invalid("grid maximum below minimum".to_string()));
    }
    if points == 0 {
        return Err(Error::invalid("grid needs at least one point".to_string()));
    }
    if points == 1 {
        return Ok(vec![e_min]);
    }
    let mut grid = Vec::with_capacity(points);
    for k in 0..points {
        let t = k as f64 / (points - 1) as f64;
        let e = if log {
            (e_min.ln() + t * (e_max.ln() - e_min.ln())).exp()
        } else {
            e_min + t * (e_max - e_min)
        };
        grid.push(e);
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    // frozen high-precision evaluations
    const G_TENTH: f64 = 0.483_446_685_613_664_65;
    const DOLINAR_PE_QUARTER: f64 = 0.102_469_951_189_674_95;
    const HOMODYNE_PE_QUARTER: f64 = 0.158_655_253_931_457_05;
    const HOLEVO_QUARTER: f64 = 0.715_349_166_710_721_73;
    const C1_QUARTER: f64 = 0.523_223_389_566_805_49;
    const KENNEDY_OPT_QUARTER: f64 = 0.436_401_049_672_069_74;
    const KENNEDY_P50_QUARTER: f64 = 0.425_530_619_203_450_34;

    #[test]
    fn g_endpoints_and_values() {
        assert_eq!(g(0.0).unwrap(), 0.0);
        assert!((g(1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((g(0.1).unwrap() - G_TENTH).abs() < 1e-14);
        assert!(g(-0.5).is_err());
    }

    #[test]
    fn dolinar_limits_and_value() {
        assert_eq!(dolinar_pe(0.0).unwrap(), 0.5);
        assert!((dolinar_pe(0.25).unwrap() - DOLINAR_PE_QUARTER).abs() < 1e-15);
        assert!(dolinar_pe(200.0).unwrap() < 1e-15);
    }

    #[test]
    fn homodyne_and_kennedy_values() {
        assert!((homodyne_pe(0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((homodyne_pe(0.25).unwrap() - HOMODYNE_PE_QUARTER).abs() < 1e-12);
        assert_eq!(kennedy_crossover(0.0).unwrap(), 1.0);
        assert_eq!(kennedy_pe(0.0).unwrap(), 0.5);
        assert!((kennedy_crossover(0.25).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn bsc_capacity_endpoints() {
        assert_eq!(bsc_capacity(0.0).unwrap(), 1.0);
        assert_eq!(bsc_capacity(0.5).unwrap(), 0.0);
        assert!(bsc_capacity(1.5).is_err());
    }

    // Golden-section result against a brute-force prior grid with step 1e-5.
    #[test]
    fn z_channel_capacity_matches_grid_search() {
        for c in [0.1, 0.367879441171442, 0.5, 0.9] {
            let (cap, p_star) = z_channel_optimum(c).unwrap();
            let mut best = 0.0f64;
            let mut best_p = 0.0;
            for k in 1..50_000 {
                let p = k as f64 * 1e-5;
                let v = z_mutual_information(p, c);
                if v > best {
                    best = v;
                    best_p = p;
                }
            }
            assert!(cap >= best - 1e-12, "c={c}: {cap} < grid {best}");
            assert!((cap - best).abs() < 1e-8, "c={c}");
            assert!((p_star - best_p).abs() < 2e-5, "c={c}");
        }
        // the crossover-1/2 point has a known closed form log2(5/4)
        let (cap, p) = z_channel_optimum(0.5).unwrap();
        assert!((cap - 1.25f64.log2()).abs() < 1e-10);
        assert!((p - 0.4).abs() < 1e-6);
    }

    #[test]
    fn z_channel_optimized_beats_fixed_prior() {
        for c in [0.05, 0.2, 0.5, 0.8] {
            let opt = z_channel_capacity(c, None).unwrap();
            let half = z_channel_capacity(c, Some(0.5)).unwrap();
            assert!(opt >= half - 1e-12);
        }
    }

    #[test]
    fn kennedy_priors_at_quarter() {
        let opt = z_channel_capacity(kennedy_crossover(0.25).unwrap(), None).unwrap();
        let half = z_channel_capacity(kennedy_crossover(0.25).unwrap(), Some(0.5)).unwrap();
        assert!((opt - KENNEDY_OPT_QUARTER).abs() < 1e-9);
        assert!((half - KENNEDY_P50_QUARTER).abs() < 1e-12);
    }

    #[test]
    fn holevo_bpsk_limits_and_value() {
        assert_eq!(holevo_bpsk(0.0).unwrap(), 0.0);
        assert!((holevo_bpsk(0.25).unwrap() - HOLEVO_QUARTER).abs() < 1e-14);
        assert!((holevo_bpsk(100.0).unwrap() - 1.0).abs() < 1e-12);
    }

    // Eigenvalue identity against a numeric 2x2 eigendecomposition oracle.
    #[test]
    fn binary_ensemble_matches_gram_eigenvalues() {
        for &(p, gamma) in &[(0.5, 0.6), (0.3, 0.9), (0.12, 0.2), (0.5, 0.0)] {
            // averaged state in the symmetric/antisymmetric basis
            let c2 = (1.0 + gamma) / 2.0;
            let s2 = (1.0 - gamma) / 2.0;
            let off = (2.0 * p - 1.0) * (c2 * s2).sqrt();
            // rho = [[c2, off], [off, s2]] -- eigenvalues by quadratic formula
            let tr = c2 + s2;
            let det = c2 * s2 - off * off;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let lam = tr / 2.0 + disc;
            let oracle = binary_entropy(lam);
            let got = holevo_binary_ensemble(p, gamma).unwrap();
            assert!((got - oracle).abs() < 1e-12, "p={p} gamma={gamma}");
        }
    }

    #[test]
    fn binary_ensemble_edge_cases() {
        assert_eq!(holevo_binary_ensemble(0.0, 0.7).unwrap(), 0.0);
        assert_eq!(holevo_binary_ensemble(1.0, 0.7).unwrap(), 0.0);
        assert!((holevo_binary_ensemble(0.5, 0.0).unwrap() - 1.0).abs() < 1e-14);
        let e = 0.25f64;
        let a = holevo_binary_ensemble(0.5, (-2.0 * e).exp()).unwrap();
        assert!((a - holevo_bpsk(e).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn binary_ensemble_symmetric_and_concave_in_prior() {
        let gamma = 0.6065306597126334;
        let mut prev = -1.0;
        for k in 0..=50 {
            let p = k as f64 / 100.0;
            let v = holevo_binary_ensemble(p, gamma).unwrap();
            let v_mirror = holevo_binary_ensemble(1.0 - p, gamma).unwrap();
            assert!((v - v_mirror).abs() < 1e-13);
            assert!(v >= prev - 1e-13, "not nondecreasing toward 1/2 at p={p}");
            prev = v;
        }
    }

    #[test]
    fn ook_zero_energy_is_zero() {
        assert_eq!(ook_dd_capacity(0.0).unwrap(), 0.0);
        assert_eq!(ook_holevo_capacity(0.0).unwrap(), 0.0);
    }

    #[test]
    fn ook_optimizers_match_coarse_grid() {
        let e = 1e-3;
        let (dd, _) = ook_dd_optimum(e).unwrap();
        let (hol, _) = ook_holevo_optimum(e).unwrap();
        let mut dd_grid = 0.0f64;
        let mut hol_grid = 0.0f64;
        for k in 1..20_000 {
            let p = k as f64 * 2.5e-5;
            dd_grid = dd_grid.max(z_mutual_information(p, (-e / p).exp()));
            hol_grid =
                hol_grid.max(holevo_binary_ensemble(p, (-e / (2.0 * p)).exp()).unwrap());
        }
        assert!(dd >= dd_grid - 1e-12 && (dd - dd_grid).abs() < 1e-7);
        assert!(hol >= hol_grid - 1e-12 && (hol - hol_grid).abs() < 1e-7);
    }

    // Published low-energy expansions, used as validation targets only.
    #[test]
    fn ook_holevo_asymptotics_at_small_energy() {
        let e = 1e-3f64;
        let (cap, p_star) = ook_holevo_optimum(e).unwrap();
        let nats_per_photon = cap / e * std::f64::consts::LN_2;
        let target = -e.ln() + 1.0 + 2.0f64.sqrt() * e.sqrt() * e.ln();
        assert!(
            (nats_per_photon - target).abs() / target < 0.05,
            "PIE {nats_per_photon} vs {target}"
        );
        let p_ref = (e / 2.0).sqrt();
        assert!(p_star / p_ref < 2.0 && p_ref / p_star < 2.0, "p* {p_star}");
    }

    #[test]
    fn ppm_dd_saturates_and_rejects_bad_q() {
        assert!((ppm_dd_capacity(4, 1e3).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(ppm_dd_capacity(4, 0.0).unwrap(), 0.0);
        assert!(ppm_dd_capacity(3, 0.1).is_err());
        assert!(ppm_dd_capacity(1, 0.1).is_err());
    }

    #[test]
    fn ppm_holevo_vanishes_with_energy() {
        assert_eq!(ppm_holevo_capacity(8, 0.0).unwrap(), 0.0);
        assert!(ppm_holevo_capacity(8, 1e-9).unwrap() < 1e-6);
    }

    // q=2 cross-check: 4x4 Gram brute force via the two-mode embedding.
    #[test]
    fn ppm_holevo_matches_two_mode_brute_force() {
        let q = 2usize;
        let e_slot = 0.2;
        let pulse = q as f64 * e_slot;
        let ov = (-pulse / 2.0).exp();
        let vac = [1.0, 0.0];
        let pul = [ov, (1.0 - ov * ov).sqrt()];
        let kron = |a: [f64; 2], b: [f64; 2]| {
            [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
        };
        let s1 = kron(pul, vac);
        let s2 = kron(vac, pul);
        let mut rho = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = (s1[i] * s1[j] + s2[i] * s2[j]) / 2.0;
            }
        }
        let m = nalgebra::DMatrix::from_fn(4, 4, |i, j| rho[i][j]);
        let eig = m.symmetric_eigenvalues();
        let brute: f64 = eig
            .iter()
            .filter(|&&l| l > 1e-15)
            .map(|&l| -l * l.log2())
            .sum();
        let formula = ppm_holevo_capacity(q, e_slot).unwrap() * q as f64;
        assert!((formula - brute).abs() < 1e-10);
    }

    #[test]
    fn bpsk_single_symbol_efficiency_caps_at_two_nats() {
        let e = 1e-4;
        let c1 = bsc_capacity(dolinar_pe(e).unwrap()).unwrap();
        let nats = c1 / e * std::f64::consts::LN_2;
        assert!((nats - 2.0).abs() / 2.0 < 0.01, "{nats}");
    }

    #[test]
    fn bpsk_holevo_efficiency_matches_expansion() {
        let e = 1e-3f64;
        let pie = holevo_bpsk(e).unwrap() / e * std::f64::consts::LN_2;
        let target = -e.ln() + 1.0 + e * e.ln();
        assert!((pie - target).abs() / target < 0.005, "{pie} vs {target}");
    }

    #[test]
    fn capacity_ordering_on_log_grid() {
        for &e in energy_grid(1e-4, 1.0, 50, true).unwrap().iter() {
            let hom = Scheme::BpskHomodyne.capacity(e, 2).unwrap();
            let dol = Scheme::BpskDolinar.capacity(e, 2).unwrap();
            let hol = Scheme::BpskHolevo.capacity(e, 2).unwrap();
            let ult = Scheme::Ult.capacity(e, 2).unwrap();
            assert!(hom < dol && dol < hol && hol < ult, "E={e}");
        }
    }

    #[test]
    fn curves_nondecreasing_in_energy() {
        let grid = energy_grid(1e-5, 10.0, 40, true).unwrap();
        for scheme in Scheme::ALL {
            let mut prev = -1.0;
            for &e in &grid {
                let v = scheme.capacity(e, 4).unwrap();
                assert!(
                    v >= prev - 1e-9,
                    "{scheme} decreases at E={e}: {v} < {prev}"
                );
                prev = v;
            }
        }
    }

    #[test]
    fn efficiency_table_shape_and_units() {
        let grid = energy_grid(1e-4, 1.0, 50, true).unwrap();
        assert_eq!(grid.len(), 50);
        let rows = efficiency_table(&grid, &[Scheme::BpskHolevo, Scheme::Ult], 2).unwrap();
        assert_eq!(rows.len(), 100);
        for r in &rows {
            assert!((r.nats_per_photon() - r.bits_per_photon() * 2f64.ln()).abs() < 1e-12);
        }
        assert!(efficiency_table(&[0.0], &[Scheme::Ult], 2).is_err());
    }

    #[test]
    fn scheme_labels_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.label().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("bpsk-holevo".parse::<Scheme>().unwrap(), Scheme::BpskHolevo);
        assert!("warp-drive".parse::<Scheme>().is_err());
    }
}
