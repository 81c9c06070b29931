//! Number-basis multimode engine. Each atom-number partition `(n_a, n_b)`
//! carries its own pair of mode functions and an action phase; the state is
//! `Σ_k d_k e^{-i A_k} |n_a = k, n_b = N - k; φ_{a,k}, φ_{b,k}>`.
//!
//! Components are indexed by `k = n_a`; the spin label is `m = k - N/2`.

mod moments;
mod overlap;
mod snapshot;
mod state;

pub use moments::{assemble_moments, decompose, f012, qfi_multimode, Decomposition, MomentSet};
pub use overlap::{overlap_order, overlaps, OverlapTable, Species};
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use state::{apply_pi_pulse, init_state, step_all, InteractionParams, MultimodeState, NumberComponent, StepSummary};
