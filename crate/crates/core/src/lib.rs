//! Optimal one-shot singlet fraction of qubit channels.
//!
//! For a channel `Λ` the crate computes `F(Λ) = λ_max` of the Choi state, the
//! optimal input (top eigenvector of the dual Choi state), negativities, the
//! TP-LOCC fidelity `F*` and brute-force oracles for each of them.
//!
//! Basis ordering is `|00⟩, |01⟩, |10⟩, |11⟩` throughout; the channel acts on
//! the second qubit.

pub mod audit;
pub mod channel;
pub mod choi;
pub mod entmetrics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod locc;
pub mod oneshot;
pub mod optimize;
pub mod sampling;
pub mod sweep;
pub mod tolerances;

pub use channel::{KrausChannel, ValidationReport};
pub use choi::{choi, dual_choi, ChoiState};
pub use entmetrics::{DensityMatrix, PureState, SchmidtData};
pub use error::{Error, Result};
pub use io::ChannelSpec;
pub use locc::{fstar, fstar_filter_oracle, FilterProtocol};
pub use oneshot::{report, ChannelReport, NegativitySearch};
