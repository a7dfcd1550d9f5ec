//! Classical polar coding over the DMC induced by symbol-by-symbol
//! detection: the comparison arm that tops out at the single-symbol
//! capacity no matter the block length.
//!
//! Dolinar and homodyne receivers induce BSCs; the Kennedy receiver
//! induces a Z-channel. The construction reuses the same branch recursion
//! as the quantum surrogate, seeded with the channel's Bhattacharyya
//! parameter. For the Dolinar BSC that seed equals the quantum channel's
//! `√F` identically, which is exactly why the interesting gap between the
//! arms is the capacity gap, not the construction.

use crate::capacity;
use crate::channel::BpskChannel;
use crate::construction::{surrogate_profile, FidelityProfile, PolarCode};
use crate::error::{Error, Result};
use crate::report::{bitstring, RunStats, TrialRecord};
use crate::rng::CounterRng;
use crate::transform;
use rayon::prelude::*;

/// LLR saturation. `tanh` is exactly 1.0 in doubles beyond ~19, and the
/// Z-channel's impossible transition needs a finite stand-in.
pub const LLR_CLAMP: f64 = 40.0;

/// Which physical receiver induces the DMC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverKind {
    Dolinar,
    Homodyne,
    Kennedy,
}

impl ReceiverKind {
    pub fn label(&self) -> &'static str {
        match self {
            ReceiverKind::Dolinar => "DOLINAR",
            ReceiverKind::Homodyne => "HOMODYNE",
            ReceiverKind::Kennedy => "KENNEDY",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DOLINAR" => Ok(ReceiverKind::Dolinar),
            "HOMODYNE" => Ok(ReceiverKind::Homodyne),
            "KENNEDY" => Ok(ReceiverKind::Kennedy),
            other => Err(Error::invalid(format!("unknown receiver '{other}'"))),
        }
    }
}

/// The induced binary-input DMC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DmcKind {
    /// Symmetric: either bit flips with the crossover probability.
    Bsc { crossover: f64 },
    /// Asymmetric: bit 0 maps to the pulse (click unless erased with the
    /// crossover probability), bit 1 maps to vacuum (never clicks).
    Z { crossover: f64 },
}

/// Detector-induced channel together with its Bhattacharyya parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InducedDmc {
    pub kind: DmcKind,
    pub source: ReceiverKind,
    pub bhattacharyya: f64,
}

/// Builds the DMC induced by running the given receiver on each BPSK
/// pulse.
pub fn induce_dmc(channel: &BpskChannel, receiver: ReceiverKind) -> Result<InducedDmc> {
    let e = channel.effective_energy();
    let (kind, z0) = match receiver {
        ReceiverKind::Dolinar => {
            let p = capacity::dolinar_pe(e)?;
            (DmcKind::Bsc { crossover: p }, 2.0 * (p * (1.0 - p)).sqrt())
        }
        ReceiverKind::Homodyne => {
            let p = capacity::homodyne_pe(e)?;
            (DmcKind::Bsc { crossover: p }, 2.0 * (p * (1.0 - p)).sqrt())
        }
        ReceiverKind::Kennedy => {
            let c = capacity::kennedy_crossover(e)?;
            // Z = Σ_y √(P(y|0)·P(y|1)) = √c for the Z-channel
            (DmcKind::Z { crossover: c }, c.sqrt())
        }
    };
    Ok(InducedDmc {
        kind,
        source: receiver,
        bhattacharyya: z0,
    })
}

impl InducedDmc {
    /// Shannon capacity of the induced channel in bits/use.
    pub fn capacity(&self) -> Result<f64> {
        match self.kind {
            DmcKind::Bsc { crossover } => capacity::bsc_capacity(crossover),
            DmcKind::Z { crossover } => capacity::z_channel_capacity(crossover, None),
        }
    }

    /// Samples the channel output for an input bit. Outputs are bits: for
    /// the Z-channel, 0 means "click" (certain pulse) and 1 "no click".
    pub fn transmit(&self, bit: u8, rng: &mut CounterRng) -> u8 {
        debug_assert!(bit <= 1);
        match self.kind {
            DmcKind::Bsc { crossover } => {
                if rng.next_bool(crossover) {
                    bit ^ 1
                } else {
                    bit
                }
            }
            DmcKind::Z { crossover } => {
                if bit == 0 {
                    // pulse: erased to "no click" with the crossover prob
                    if rng.next_bool(crossover) {
                        1
                    } else {
                        0
                    }
                } else {
                    1
                }
            }
        }
    }

    /// `ln P(y|0)/P(y|1)`, clamped to ±[`LLR_CLAMP`]. The Z-channel's
    /// click output certifies the pulse, so it saturates positive; its
    /// no-click output carries `ln(crossover)`.
    pub fn llr(&self, output: u8) -> f64 {
        debug_assert!(output <= 1);
        let raw = match self.kind {
            DmcKind::Bsc { crossover } => {
                let l = ((1.0 - crossover) / crossover).ln();
                if output == 0 {
                    l
                } else {
                    -l
                }
            }
            DmcKind::Z { crossover } => {
                if output == 0 {
                    f64::INFINITY
                } else {
                    crossover.ln()
                }
            }
        };
        raw.clamp(-LLR_CLAMP, LLR_CLAMP)
    }
}

/// Bhattacharyya profile: the same deterministic branch recursion as the
/// quantum surrogate, seeded with the DMC parameter `Z₀`.
pub fn bhattacharyya_profile(n: usize, z0: f64) -> Result<FidelityProfile> {
    surrogate_profile(n, z0)
}

/// Numerically stable check-node combine
/// `2·atanh(tanh(a/2)·tanh(b/2))`, evaluated in log form.
pub fn check_combine(a: f64, b: f64) -> f64 {
    let sign = a.signum() * b.signum();
    let (aa, ab) = (a.abs(), b.abs());
    let m = sign * aa.min(ab);
    // exact correction term; both logs stay in [-ln 2, 0]
    let corr = (1.0 + (-(aa + ab)).exp()).ln() - (1.0 + (-(aa - ab).abs()).exp()).ln();
    (m + corr).clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// Variable-node combine `b + (−1)^{x̂}·a`.
fn variable_combine(a: f64, b: f64, partial: u8) -> f64 {
    (b + if partial == 0 { a } else { -a }).clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// Successive-cancellation decoding over the factor graph of the encoder:
/// returns the full decoded input block `û`. Channel LLRs are given per
/// codeword position; frozen positions are forced to the code's values.
pub fn classical_sc_decode(llr: &[f64], code: &PolarCode) -> Result<Vec<u8>> {
    if llr.len() != code.n() {
        return Err(Error::invalid(format!(
            "LLR vector of length {} for N={}",
            llr.len(),
            code.n()
        )));
    }
    if llr.iter().any(|l| l.is_nan()) {
        return Err(Error::invalid("NaN in channel LLRs".to_string()));
    }
    let mut decoded = vec![0u8; code.n()];
    sc_recurse(llr, 0, code, &mut decoded);
    Ok(decoded)
}

/// Recursive SC step. The encoder satisfies
/// `enc(u) = interleave(enc(u_lo ⊕ u_hi), enc(u_hi))` with `u_lo`/`u_hi`
/// the index halves, so even codeword positions feed the check combine and
/// odd ones the variable combine. Returns the re-encoded block `enc(û)`.
fn sc_recurse(llr: &[f64], base: usize, code: &PolarCode, decoded: &mut [u8]) -> Vec<u8> {
    let m = llr.len();
    if m == 1 {
        let bit = if code.is_info(base) {
            u8::from(llr[0] < 0.0)
        } else {
            code.frozen_value_at(base)
        };
        decoded[base] = bit;
        return vec![bit];
    }
    let half = m / 2;
    let left_llr: Vec<f64> = (0..half)
        .map(|j| check_combine(llr[2 * j], llr[2 * j + 1]))
        .collect();
    let x_left = sc_recurse(&left_llr, base, code, decoded);
    let right_llr: Vec<f64> = (0..half)
        .map(|j| variable_combine(llr[2 * j], llr[2 * j + 1], x_left[j]))
        .collect();
    let x_right = sc_recurse(&right_llr, base + half, code, decoded);
    let mut x = vec![0u8; m];
    for j in 0..half {
        x[2 * j] = x_left[j] ^ x_right[j];
        x[2 * j + 1] = x_right[j];
    }
    x
}

/// Monte Carlo run of the classical arm: encode, transmit through the
/// induced DMC, SC-decode. Per-trial randomness comes from independent
/// counter streams, so records reproduce under any thread count.
pub fn simulate_classical(
    channel: &BpskChannel,
    receiver: ReceiverKind,
    code: &PolarCode,
    trials: u64,
    seed: u64,
) -> Result<(RunStats, Vec<TrialRecord>)> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial".to_string()));
    }
    let dmc = induce_dmc(channel, receiver)?;
    let records: Result<Vec<TrialRecord>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = CounterRng::new(seed, t);
            let mut msg = vec![0u8; code.k()];
            rng.fill_bits(&mut msg);
            let u = code.assemble(&msg)?;
            let x = transform::encode(&u)?;
            let llr: Vec<f64> = x.iter().map(|&b| dmc.llr(dmc.transmit(b, &mut rng))).collect();
            let decoded_block = classical_sc_decode(&llr, code)?;
            let decoded = code.extract_message(&decoded_block);
            Ok(TrialRecord {
                trial: t,
                seed: rng.stream_key(),
                message: bitstring(&msg),
                decoded: bitstring(&decoded),
                success: decoded == msg,
                min_step_prob: None,
                anomaly: false,
            })
        })
        .collect();
    let records = records?;
    Ok((RunStats::from_records(&records), records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{FidelityProfile, ProfileMode, SelectionRule};

    fn code_with(n: usize, info: Vec<usize>) -> PolarCode {
        let profile = FidelityProfile::new(vec![0.5; n], ProfileMode::SurrogateUpper).unwrap();
        PolarCode::with_info_set(profile, info).unwrap()
    }

    #[test]
    fn dolinar_bsc_at_zero_energy_is_useless() {
        let ch = BpskChannel::with_energy(0.0).unwrap();
        let dmc = induce_dmc(&ch, ReceiverKind::Dolinar).unwrap();
        assert!(matches!(dmc.kind, DmcKind::Bsc { crossover } if crossover == 0.5));
        assert!((dmc.bhattacharyya - 1.0).abs() < 1e-15);
    }

    // Algebraic identity 4p(1−p) = e^{−4E} for the Dolinar BSC, so
    // Z₀ = e^{−2E} exactly; checked on a grid.
    #[test]
    fn dolinar_bhattacharyya_equals_state_overlap() {
        for k in 0..50 {
            let e = 0.02 + 0.1 * k as f64;
            let ch = BpskChannel::with_energy(e).unwrap();
            let dmc = induce_dmc(&ch, ReceiverKind::Dolinar).unwrap();
            assert!(
                (dmc.bhattacharyya - ch.overlap()).abs() < 1e-12,
                "E={e}: {} vs {}",
                dmc.bhattacharyya,
                ch.overlap()
            );
        }
    }

    #[test]
    fn kennedy_induces_z_channel() {
        let ch = BpskChannel::with_energy(0.25).unwrap();
        let dmc = induce_dmc(&ch, ReceiverKind::Kennedy).unwrap();
        let expect = (-1.0f64).exp();
        assert!(matches!(dmc.kind, DmcKind::Z { crossover } if (crossover - expect).abs() < 1e-15));
        assert!((dmc.bhattacharyya - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn bhattacharyya_profile_matches_quantum_surrogate() {
        // Z₀(Dolinar) = √F(W), so the profiles coincide entry by entry
        let e = 0.7;
        let ch = BpskChannel::with_energy(e).unwrap();
        let dmc = induce_dmc(&ch, ReceiverKind::Dolinar).unwrap();
        let zp = bhattacharyya_profile(64, dmc.bhattacharyya).unwrap();
        let fp = surrogate_profile(64, ch.overlap()).unwrap();
        for (a, b) in zp.sqrt_f().iter().zip(fp.sqrt_f()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn z_profile_two_entries() {
        let p = bhattacharyya_profile(2, 0.3).unwrap();
        assert_eq!(p.sqrt_f(), &[2.0 * 0.3 - 0.09, 0.09]);
        assert!(bhattacharyya_profile(4, 0.0)
            .unwrap()
            .sqrt_f()
            .iter()
            .all(|&z| z == 0.0));
    }

    #[test]
    fn check_combine_is_stable_and_sane() {
        for &(a, b) in &[
            (0.0, 0.0),
            (40.0, 40.0),
            (-40.0, 40.0),
            (1e-12, -40.0),
            (3.0, -2.0),
            (40.0, -40.0),
        ] {
            let v = check_combine(a, b);
            assert!(v.is_finite(), "f({a},{b}) = {v}");
            assert!(v.abs() <= LLR_CLAMP + 1e-12);
        }
        // against the textbook formula where tanh is far from saturation
        for &(a, b) in &[(0.5, 1.5), (-2.0, 3.0), (0.1, -0.2)] {
            let exact = 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
            assert!((check_combine(a, b) - exact).abs() < 1e-12);
        }
        // sign and magnitude behavior
        assert!(check_combine(5.0, 7.0) > 0.0);
        assert!(check_combine(-5.0, 7.0) < 0.0);
        assert!(check_combine(5.0, 7.0) < 5.0);
    }

    #[test]
    fn noiseless_llrs_recover_any_message() {
        let code = code_with(8, vec![1, 3, 5, 7]);
        let mut rng = CounterRng::new(1, 0);
        for _ in 0..32 {
            let mut msg = vec![0u8; 4];
            rng.fill_bits(&mut msg);
            let u = code.assemble(&msg).unwrap();
            let x = transform::encode(&u).unwrap();
            let llr: Vec<f64> = x
                .iter()
                .map(|&b| if b == 0 { LLR_CLAMP } else { -LLR_CLAMP })
                .collect();
            let decoded = classical_sc_decode(&llr, &code).unwrap();
            assert_eq!(code.extract_message(&decoded), msg);
        }
    }

    /// Brute-force maximum-likelihood oracle over all messages: the SC
    /// decision for a rate-1 factor graph must match ML when SC's greedy
    /// order happens to be information-lossless (N ≤ 4, K = N).
    #[test]
    fn matches_exhaustive_ml_on_hand_case() {
        // N=2, K=2, BSC LLRs chosen so SC and ML agree and are unambiguous
        let code = code_with(2, vec![0, 1]);
        let cases = [
            (vec![2.0, 3.0], vec![0u8, 0]),
            (vec![-2.0, 3.0], vec![1, 0]),
            (vec![2.0, -3.0], vec![1, 1]),
            (vec![-2.0, -3.0], vec![0, 1]),
        ];
        for (llr, expect_u) in cases {
            // ML over the 4 codewords
            let mut best = (f64::NEG_INFINITY, vec![0u8, 0]);
            for w in 0..4u8 {
                let u = vec![(w >> 1) & 1, w & 1];
                let x = transform::encode(&u).unwrap();
                let score: f64 = x
                    .iter()
                    .zip(&llr)
                    .map(|(&b, &l)| if b == 0 { l } else { -l })
                    .sum();
                if score > best.0 {
                    best = (score, u);
                }
            }
            assert_eq!(best.1, expect_u, "ML disagrees with the hand expectation");
            let dec = classical_sc_decode(&llr, &code).unwrap();
            assert_eq!(dec, expect_u, "llr {llr:?}");
        }
    }

    /// Brute-force sequential-marginal oracle: SC's decision for bit `i`
    /// given the decoded prefix is the sign of the exhaustive conditional
    /// LLR, summing channel likelihoods over every completion with the
    /// future bits uniform. Checked on random Z-channel outputs at N=4
    /// (the asymmetric-LLR case) and N=2.
    #[test]
    fn agrees_with_exhaustive_marginal_oracle() {
        // per-position likelihood ratio P(y|x=0)/P(y|x=1) = e^{llr};
        // score(u) = exp(Σ_{j: x_j = 0} llr_j) up to a common factor
        fn exhaustive_decode(llr: &[f64], code: &PolarCode) -> Option<Vec<u8>> {
            let n = code.n();
            let mut decoded = vec![0u8; n];
            for i in 0..n {
                if !code.is_info(i) {
                    decoded[i] = code.frozen_value_at(i);
                    continue;
                }
                let mut mass = [0.0f64; 2];
                for completion in 0..(1usize << (n - i - 1)) {
                    for (bit, m) in mass.iter_mut().enumerate() {
                        let mut u = decoded.clone();
                        u[i] = bit as u8;
                        for t in 0..(n - i - 1) {
                            u[i + 1 + t] = ((completion >> (n - i - 2 - t)) & 1) as u8;
                        }
                        let x = transform::encode(&u).unwrap();
                        let logscore: f64 = x
                            .iter()
                            .zip(llr)
                            .filter(|(&b, _)| b == 0)
                            .map(|(_, &l)| l)
                            .sum();
                        *m += logscore.exp();
                    }
                }
                let cond_llr = (mass[0] / mass[1]).ln();
                if cond_llr.abs() < 1e-9 {
                    return None; // tie, either decision defensible
                }
                decoded[i] = u8::from(cond_llr < 0.0);
            }
            Some(decoded)
        }

        let ch = BpskChannel::with_energy(0.4).unwrap();
        let dmc = induce_dmc(&ch, ReceiverKind::Kennedy).unwrap();
        for (n, info) in [(2usize, vec![1usize]), (4, vec![1, 2, 3]), (4, vec![2, 3])] {
            let code = code_with(n, info);
            let mut rng = CounterRng::new(3, 1);
            let mut checked = 0;
            for _ in 0..300 {
                let mut msg = vec![0u8; code.k()];
                rng.fill_bits(&mut msg);
                let u = code.assemble(&msg).unwrap();
                let x = transform::encode(&u).unwrap();
                let y: Vec<u8> = x.iter().map(|&b| dmc.transmit(b, &mut rng)).collect();
                let llr: Vec<f64> = y.iter().map(|&o| dmc.llr(o)).collect();
                let Some(oracle) = exhaustive_decode(&llr, &code) else {
                    continue;
                };
                let sc = classical_sc_decode(&llr, &code).unwrap();
                assert_eq!(sc, oracle, "N={n} llr {llr:?}");
                checked += 1;
            }
            assert!(checked > 100, "too few unambiguous cases: {checked}");
        }
    }

    #[test]
    fn noiseless_channel_never_errs() {
        let ch = BpskChannel::with_energy(12.0).unwrap(); // crossover ~ 1e-21
        let profile = bhattacharyya_profile(8, 1e-10).unwrap();
        let code = PolarCode::select(profile, SelectionRule::TargetRate { k: 4 }).unwrap();
        let (stats, _) = simulate_classical(&ch, ReceiverKind::Dolinar, &code, 500, 3).unwrap();
        assert_eq!(stats.failures, 0);
    }

    #[test]
    fn useless_channel_is_random_guessing() {
        let ch = BpskChannel::with_energy(0.0).unwrap(); // BSC(1/2)
        for k in [1usize, 3] {
            let profile = bhattacharyya_profile(8, 1.0).unwrap();
            let code = PolarCode::select(profile, SelectionRule::TargetRate { k }).unwrap();
            let trials = 20_000u64;
            let (stats, _) =
                simulate_classical(&ch, ReceiverKind::Dolinar, &code, trials, 11).unwrap();
            let expect = 1.0 - 0.5f64.powi(k as i32);
            let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
            assert!(
                (stats.block_error_rate() - expect).abs() < 3.0 * sigma,
                "K={k}: {} vs {expect}",
                stats.block_error_rate()
            );
        }
    }

    #[test]
    fn block_error_respects_bhattacharyya_union_bound() {
        let p = 0.05;
        let e = {
            // invert P_e,min = p for a BSC(0.05)-inducing energy
            let s = 1.0 - 2.0 * p;
            -(1.0 - s * s).ln() / 4.0
        };
        let ch = BpskChannel::with_energy(e).unwrap();
        let dmc = induce_dmc(&ch, ReceiverKind::Dolinar).unwrap();
        assert!(
            matches!(dmc.kind, DmcKind::Bsc { crossover } if (crossover - p).abs() < 1e-12)
        );
        let profile = bhattacharyya_profile(8, dmc.bhattacharyya).unwrap();
        let code = PolarCode::select(profile, SelectionRule::TargetRate { k: 4 }).unwrap();
        let union_bound: f64 = code
            .info_set()
            .iter()
            .map(|&i| code.profile().sqrt_f()[i])
            .sum();
        let trials = 20_000u64;
        let (stats, _) = simulate_classical(&ch, ReceiverKind::Dolinar, &code, trials, 5).unwrap();
        assert!(
            stats.block_error_rate() <= union_bound,
            "{} > {union_bound}",
            stats.block_error_rate()
        );
    }

    #[test]
    fn classical_records_identical_across_thread_counts() {
        let ch = BpskChannel::with_energy(0.25).unwrap();
        let profile = bhattacharyya_profile(8, 0.6).unwrap();
        let code = PolarCode::select(profile, SelectionRule::TargetRate { k: 4 }).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                simulate_classical(&ch, ReceiverKind::Dolinar, &code, 300, 17)
                    .unwrap()
                    .1
            })
        };
        assert_eq!(run(1), run(3));
    }
}
