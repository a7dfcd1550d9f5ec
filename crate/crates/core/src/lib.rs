//! Numerical laboratory for polar coding over the BPSK coherent-state
//! optical channel.
//!
//! The crate covers three layers:
//!
//! * closed-form and optimized capacity figures for the common receiver
//!   chains (Dolinar, homodyne, Kennedy direct detection) next to the
//!   collective-measurement limits of the BPSK/OOK/PPM alphabets
//!   ([`capacity`]);
//! * polar-code machinery: the `O(N log N)` encoder ([`transform`]),
//!   fidelity-based code construction with both an exact small-`N` route
//!   and a surrogate recursion for large `N` ([`construction`]);
//! * decoders: an exact quantum successive-cancellation decoder built from
//!   Helstrom projectors on explicitly embedded codeword states
//!   ([`decoder`]), and the classical LLR successive-cancellation baseline
//!   over the detector-induced DMC ([`classical`]).
//!
//! Everything is deterministic under a fixed seed: random choices go
//! through the counter-based generator in [`rng`], so results do not
//! depend on thread scheduling.

pub mod capacity;
pub mod channel;
pub mod classical;
pub mod construction;
pub mod decoder;
pub mod density;
pub mod error;
pub mod report;
pub mod rng;
pub mod transform;

pub use channel::{BpskChannel, QubitEmbedding, StateVector};
pub use construction::{FidelityProfile, PolarCode, ProfileMode, SelectionRule};
pub use density::DensityMatrix;
pub use error::{Error, Result};
