//! Coverage-range characterization of a STAR-RIS aided two-user downlink.
//!
//! An access point serves a transmission-side user (T) and a
//! reflection-side user (R) through one simultaneously transmitting and
//! reflecting surface. Given QoS targets and coverage priorities, the
//! solvers find the largest total range `D0 = D_t + D_r` at which both
//! users can still be served, under NOMA ([`noma`]) and OMA ([`oma`]), and
//! for a benchmark pair of conventional single-mode surfaces ([`baseline`]).
//!
//! [`oracle`] holds brute-force grid optimizers over the untransformed
//! problems, and [`experiments`] the Monte Carlo harness that produces the
//! coverage sweeps.

pub mod baseline;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod noma;
pub mod oma;
pub mod oracle;
pub mod rates;
pub mod search;
pub mod selftest;
pub mod solution;
pub mod units;

pub use channel::{effective_gain, generate_channel, ChannelRealization, EffectiveGains, User};
pub use error::{Error, Result};
pub use rates::{Allocation, DecodingOrder, GainOrdering, Surface};
pub use solution::{Access, CoverageSolution, Residuals};
pub use units::SystemParams;
