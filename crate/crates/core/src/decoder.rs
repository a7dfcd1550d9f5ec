//! Exact simulation of the quantum successive-cancellation decoder.
//!
//! Each information bit is decided by a binary projective measurement: the
//! projector onto the nonnegative eigenspace of the difference between the
//! two averaged conditional states that extend the decoded prefix. Frozen
//! bits pass through as identity. The decoder tracks the quantum
//! back-action by replacing the state with its normalized projection after
//! every measurement, so block error probabilities, measurement records
//! and Monte Carlo trials are all exact within floating point.
//!
//! The classical prefix register never materializes as a tensor factor:
//! the full decision operators are block-diagonal over prefixes, and only
//! the block matching the decoded prefix acts on the state.

use crate::channel::{BpskChannel, QubitEmbedding, StateVector};
use crate::construction::{self, PolarCode};
use crate::density::{symmetric_eigen, DensityMatrix};
use crate::error::{Error, Result};
use crate::report::{bitstring, RunStats, TrialRecord};
use crate::rng::CounterRng;
use crate::transform;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Squared norms below this abort a trial: the sampled branch had
/// probability indistinguishable from zero and the state cannot be
/// renormalized meaningfully.
const ZERO_NORM_EPS: f64 = 1e-30;

/// Resource guards and knobs for the exact decoder.
#[derive(Debug, Clone, Copy)]
pub struct DecoderConfig {
    /// Maximum block length (the state space is `2^N`-dimensional).
    pub n_exact: usize,
    /// Maximum number of information bits enumerated by exact block-error
    /// evaluation (`2^K` terms).
    pub k_exact: usize,
    /// Bounded LRU capacity for decision projectors keyed by
    /// `(index, prefix)`.
    pub cache_capacity: usize,
    /// Condition averaged states on the known frozen values instead of
    /// randomizing every future bit. Exploratory alternative; off by
    /// default.
    pub condition_on_frozen: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            n_exact: construction::N_EXACT_DEFAULT,
            k_exact: construction::K_EXACT_DEFAULT,
            cache_capacity: 2048,
            condition_on_frozen: false,
        }
    }
}

/// Projector onto the span of the stored orthonormal basis columns.
#[derive(Debug, Clone)]
pub struct HelstromProjector {
    basis: DMatrix<f64>,
}

impl HelstromProjector {
    fn from_basis(basis: DMatrix<f64>) -> Self {
        Self { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Dense `P = B Bᵀ`.
    pub fn matrix(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// `P v`.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// `⟨v|P|v⟩ = ‖Bᵀ v‖²`, non-negative by construction.
    pub fn expectation(&self, v: &DVector<f64>) -> f64 {
        (self.basis.transpose() * v).norm_squared()
    }
}

/// The binary Helstrom measurement for distinguishing `rho0` from `rho1`:
/// the projector onto the eigenspace of `rho0 − rho1` with eigenvalue
/// `≥ −tol`, plus its complement. Boundary (zero) eigenvalues land on the
/// "0" outcome; the tie tolerance scales with the matrix magnitude.
pub fn helstrom(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
) -> Result<(HelstromProjector, HelstromProjector)> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::invalid(
            "Helstrom test needs states of equal dimension".to_string(),
        ));
    }
    let diff = rho0.matrix() - rho1.matrix();
    let tol = 1e-10 * diff.amax();
    let (vals, vecs) = symmetric_eigen(diff)?;
    let dim = vals.len();
    let pos_idx: Vec<usize> = (0..dim).filter(|&j| vals[j] >= -tol).collect();
    let neg_idx: Vec<usize> = (0..dim).filter(|&j| vals[j] < -tol).collect();
    let gather = |idx: &[usize]| {
        let mut b = DMatrix::zeros(dim, idx.len());
        for (c, &j) in idx.iter().enumerate() {
            b.set_column(c, &vecs.column(j));
        }
        HelstromProjector::from_basis(b)
    };
    Ok((gather(&pos_idx), gather(&neg_idx)))
}

type ProjectorPair = (HelstromProjector, HelstromProjector);
type CacheKey = (usize, u64);

/// Bounded LRU keyed by `(bit index, packed prefix)`. Values are shared:
/// Monte Carlo trials revisit the same prefixes constantly at small `N`.
struct ProjectorCache {
    capacity: usize,
    inner: Mutex<CacheInner>,
}

struct CacheInner {
    map: HashMap<CacheKey, (u64, Arc<ProjectorPair>)>,
    tick: u64,
}

impl ProjectorCache {
    fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            inner: Mutex::new(CacheInner {
                map: HashMap::new(),
                tick: 0,
            }),
        }
    }

    fn get(&self, key: CacheKey) -> Option<Arc<ProjectorPair>> {
        let mut inner = self.inner.lock().unwrap();
        inner.tick += 1;
        let tick = inner.tick;
        inner.map.get_mut(&key).map(|slot| {
            slot.0 = tick;
            slot.1.clone()
        })
    }

    fn insert(&self, key: CacheKey, value: Arc<ProjectorPair>) {
        let mut inner = self.inner.lock().unwrap();
        if inner.map.len() >= self.capacity {
            if let Some((&oldest, _)) = inner.map.iter().min_by_key(|(_, (t, _))| *t) {
                inner.map.remove(&oldest);
            }
        }
        inner.tick += 1;
        let tick = inner.tick;
        inner.map.insert(key, (tick, value));
    }
}

fn pack_prefix(prefix: &[u8]) -> u64 {
    prefix.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

/// Full record of one decode: decoded block, per-step outcome
/// probabilities and post-measurement norms (before renormalization).
#[derive(Debug, Clone)]
pub struct DecodeTrace {
    pub decoded: Vec<u8>,
    pub step_probs: Vec<f64>,
    pub post_norms: Vec<f64>,
    pub anomaly: bool,
}

impl DecodeTrace {
    /// The decoded information bits for the given code; empty if the trial
    /// aborted.
    pub fn info_bits(&self, code: &PolarCode) -> Vec<u8> {
        if self.anomaly {
            return Vec::new();
        }
        code.extract_message(&self.decoded)
    }
}

/// How frozen bits enter exact block-error evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrozenMode {
    /// Use the code's stored frozen values.
    Fixed,
    /// Average over all `2^{N−K}` frozen assignments (the setting of the
    /// sequential-decoding bound).
    AveragedAll,
    /// Average over seeded random frozen assignments.
    AveragedSampled { count: usize, seed: u64 },
}

/// Exact quantum successive-cancellation decoder for one code on one
/// channel. Shareable across threads; the projector cache synchronizes
/// internally and every cached value is a deterministic function of its
/// key.
pub struct ScDecoder {
    code: PolarCode,
    embedding: QubitEmbedding,
    config: DecoderConfig,
    cache: ProjectorCache,
}

impl ScDecoder {
    pub fn new(code: PolarCode, channel: &BpskChannel, config: DecoderConfig) -> Result<Self> {
        construction::check_exact_guard(code.n(), config.n_exact)?;
        Ok(Self {
            code,
            embedding: channel.embedding(),
            config,
            cache: ProjectorCache::new(config.cache_capacity),
        })
    }

    pub fn code(&self) -> &PolarCode {
        &self.code
    }

    pub fn config(&self) -> DecoderConfig {
        self.config
    }

    /// The codeword state the channel delivers for input block `u`.
    pub fn channel_output(&self, u: &[u8]) -> Result<StateVector> {
        let x = transform::encode(u)?;
        StateVector::codeword(&x, &self.embedding)
    }

    /// Decision projectors for bit `index` given the decoded prefix:
    /// `(Π_{prefix·0}, Π_{prefix·1})`, cached.
    pub fn decision_projectors(
        &self,
        index: usize,
        prefix: &[u8],
    ) -> Result<Arc<ProjectorPair>> {
        debug_assert_eq!(prefix.len(), index);
        let key = (index, pack_prefix(prefix));
        if let Some(hit) = self.cache.get(key) {
            return Ok(hit);
        }
        let n = self.code.n();
        let mut pb = prefix.to_vec();
        pb.push(0);
        let rho0 = self.averaged_state(&pb, n)?;
        *pb.last_mut().unwrap() = 1;
        let rho1 = self.averaged_state(&pb, n)?;
        let pair = Arc::new(helstrom(&rho0, &rho1)?);
        self.cache.insert(key, pair.clone());
        Ok(pair)
    }

    fn averaged_state(&self, prefix: &[u8], n: usize) -> Result<DensityMatrix> {
        if self.config.condition_on_frozen {
            construction::conditioned_averaged_state(
                prefix,
                &self.code,
                &self.embedding,
                self.config.n_exact,
            )
        } else {
            construction::exact_averaged_state(prefix, n, &self.embedding, self.config.n_exact)
        }
    }

    /// Runs the measurement sequence on a received codeword state,
    /// sampling outcomes and applying back-action. Frozen indices pass
    /// through with step probability 1.
    pub fn sc_decode(&self, received: &StateVector, rng: &mut CounterRng) -> Result<DecodeTrace> {
        let n = self.code.n();
        if received.symbols() != n {
            return Err(Error::invalid(format!(
                "received state has {} symbols, code expects {n}",
                received.symbols()
            )));
        }
        let mut phi = DVector::from_column_slice(received.amplitudes());
        let mut trace = DecodeTrace {
            decoded: Vec::with_capacity(n),
            step_probs: Vec::with_capacity(n),
            post_norms: Vec::with_capacity(n),
            anomaly: false,
        };
        for i in 0..n {
            if !self.code.is_info(i) {
                trace.decoded.push(self.code.frozen_value_at(i));
                trace.step_probs.push(1.0);
                trace.post_norms.push(phi.norm());
                continue;
            }
            let pair = self.decision_projectors(i, &trace.decoded)?;
            let p0 = pair.0.expectation(&phi);
            let outcome = if rng.next_f64() < p0 { 0u8 } else { 1 };
            let proj = if outcome == 0 { &pair.0 } else { &pair.1 };
            let p_out = if outcome == 0 {
                p0
            } else {
                pair.1.expectation(&phi)
            };
            let projected = proj.apply(&phi);
            let norm2 = projected.norm_squared();
            if norm2 < ZERO_NORM_EPS {
                trace.anomaly = true;
                return Ok(trace);
            }
            phi = projected / norm2.sqrt();
            trace.decoded.push(outcome);
            trace.step_probs.push(p_out);
            trace.post_norms.push(norm2.sqrt());
        }
        Ok(trace)
    }

    /// `‖Π_(N) ⋯ Π_(1) |state⟩‖²`: the weight of the measurement record
    /// that reproduces `u` exactly, starting from an arbitrary pure state.
    pub fn sequential_weight(&self, u: &[u8], state: &StateVector) -> Result<f64> {
        let n = self.code.n();
        if u.len() != n {
            return Err(Error::invalid(format!(
                "input block of length {} for N={n}",
                u.len()
            )));
        }
        let mut phi = DVector::from_column_slice(state.amplitudes());
        for i in 0..n {
            if !self.code.is_info(i) {
                continue;
            }
            let pair = self.decision_projectors(i, &u[..i])?;
            let proj = if u[i] == 0 { &pair.0 } else { &pair.1 };
            phi = proj.apply(&phi);
        }
        Ok(phi.norm_squared())
    }

    /// POVM element weight `Tr{Λ_u σ}` for a mixed state.
    pub fn povm_weight(&self, u: &[u8], sigma: &DensityMatrix) -> Result<f64> {
        let n = self.code.n();
        if u.len() != n {
            return Err(Error::invalid(format!(
                "input block of length {} for N={n}",
                u.len()
            )));
        }
        // M σ Mᵀ with M the reverse-ordered projector product
        let mut a = sigma.matrix().clone();
        for i in 0..n {
            if !self.code.is_info(i) {
                continue;
            }
            let pair = self.decision_projectors(i, &u[..i])?;
            let p = if u[i] == 0 { &pair.0 } else { &pair.1 };
            let pm = p.matrix();
            a = &pm * a * &pm;
        }
        Ok(a.trace())
    }

    /// Exact success probability of the correct-bit measurement path for
    /// input block `u`: the channel output is pure, so this is the squared
    /// norm of the sequential projection of the codeword state.
    pub fn exact_success_prob(&self, u: &[u8]) -> Result<f64> {
        let state = self.channel_output(u)?;
        self.sequential_weight(u, &state)
    }

    /// Exact block error: `1 − 2^{−K} Σ_msgs success(msg)`, optionally
    /// averaged over frozen assignments.
    pub fn exact_block_error(&self, mode: FrozenMode) -> Result<f64> {
        let n = self.code.n();
        let k = self.code.k();
        if k > self.config.k_exact {
            return Err(Error::guard(format!(
                "K={k} exceeds exact enumeration ceiling {} (2^K terms)",
                self.config.k_exact
            )));
        }
        if self.config.condition_on_frozen && mode != FrozenMode::Fixed {
            return Err(Error::guard(
                "frozen-averaged evaluation is incompatible with conditioning on frozen values"
                    .to_string(),
            ));
        }
        let frozen_positions: Vec<usize> = (0..n).filter(|&p| !self.code.is_info(p)).collect();
        let frozen_sets: Vec<Vec<u8>> = match mode {
            FrozenMode::Fixed => vec![self.code.frozen_values()],
            FrozenMode::AveragedAll => {
                let m = frozen_positions.len();
                (0..1usize << m)
                    .map(|pat| {
                        (0..m)
                            .map(|t| ((pat >> (m - 1 - t)) & 1) as u8)
                            .collect()
                    })
                    .collect()
            }
            FrozenMode::AveragedSampled { count, seed } => {
                let mut rng = CounterRng::new(seed, u64::MAX - 1);
                (0..count.max(1))
                    .map(|_| {
                        let mut v = vec![0u8; frozen_positions.len()];
                        rng.fill_bits(&mut v);
                        v
                    })
                    .collect()
            }
        };
        let messages = 1usize << k;
        let cases: Vec<(usize, usize)> = (0..frozen_sets.len())
            .flat_map(|f| (0..messages).map(move |m| (f, m)))
            .collect();
        let weights: Result<Vec<f64>> = cases
            .par_iter()
            .map(|&(f, m)| {
                let mut u = vec![0u8; n];
                for (t, &pos) in frozen_positions.iter().enumerate() {
                    u[pos] = frozen_sets[f][t];
                }
                for (t, &pos) in self.code.info_set().iter().enumerate() {
                    u[pos] = ((m >> (k - 1 - t)) & 1) as u8;
                }
                self.exact_success_prob(&u)
            })
            .collect();
        let weights = weights?;
        // fixed summation order: cases are enumerated deterministically
        let mean = weights.iter().sum::<f64>() / weights.len() as f64;
        Ok((1.0 - mean).clamp(0.0, 1.0))
    }

    /// Monte Carlo trials: sample a message, transmit, decode with
    /// measurement sampling. Trials are independent streams of the run
    /// seed, so records are byte-identical under any thread count.
    pub fn simulate(&self, trials: u64, seed: u64) -> Result<(RunStats, Vec<TrialRecord>)> {
        let records: Result<Vec<TrialRecord>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = CounterRng::new(seed, t);
                let mut msg = vec![0u8; self.code.k()];
                rng.fill_bits(&mut msg);
                let u = self.code.assemble(&msg)?;
                let received = self.channel_output(&u)?;
                let trace = self.sc_decode(&received, &mut rng)?;
                let decoded = trace.info_bits(&self.code);
                let min_step = trace
                    .step_probs
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                Ok(TrialRecord {
                    trial: t,
                    seed: rng.stream_key(),
                    message: bitstring(&msg),
                    decoded: bitstring(&decoded),
                    success: !trace.anomaly && decoded == msg,
                    min_step_prob: if trace.anomaly || trace.step_probs.is_empty() {
                        None
                    } else {
                        Some(min_step)
                    },
                    anomaly: trace.anomaly,
                })
            })
            .collect();
        let records = records?;
        Ok((RunStats::from_records(&records), records))
    }
}
