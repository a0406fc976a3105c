//! Error-probability bounds and retrieved information for reading a binary
//! optical memory (identity channel vs. thermal replacement) with
//! non-Gaussian entangled light, checked against truncated Fock-space
//! constructions.

pub mod channel;
pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod logprob;
pub mod metrics;
pub mod search;
pub mod states;

pub use channel::{apply_bit, channel_pair, lossy_channel, Bit, ChannelOutputs, ChannelSpec};
pub use discrimination::{
    bound_report, classical_lb_noiseless, classical_lb_noisy, classical_lb_noisy_ln, fock_qcb_closed, helstrom,
    mm_qcb_closed, psi_qcb_numeric, psi_qcb_quoted, qcb_numeric, qcb_pure, s_overlap, BoundReport, PerCopy,
    ReadoutScenario, ReportOptions,
};
pub use error::{Error, Result};
pub use linalg::{fidelity_pure, fractional_power, partial_trace, tensor, trace_norm, ModeSpace, Operator, StateVector, C64};
pub use logprob::LnProb;
pub use metrics::{binary_entropy, info_report, info_retrieved, InfoReport};
pub use states::{StateFactory, Transmitter, TruncationPolicy};
