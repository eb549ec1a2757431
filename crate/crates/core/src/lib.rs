//! Trace-norm geometric discord of two-qubit states.
//!
//! [`discord::discord_d1`] evaluates the closed form from the Bloch data;
//! [`oracle`] minimises the trace norm over measurement axes numerically and
//! certifies the two against each other.
//!
//! ```
//! use qdiscord::{discord_d1, families};
//!
//! let state = families::werner(-0.7).unwrap();
//! let r = discord_d1(&state.bloch());
//! assert!((r.d1_value - 0.7).abs() < 1e-10);
//! ```

pub mod bloch;
pub mod discord;
pub mod disturbance;
pub mod error;
pub mod exec;
pub mod families;
pub mod grid;
pub mod linalg;
pub mod oracle;
pub mod sampling;

pub use bloch::{
    apply_local_rotation, diagonalize_correlation, from_bloch, to_bloch, validate_state, BlochForm,
    LocalFrame, TwoQubitState,
};
pub use discord::{
    discord_d1, discord_d1_with, discord_d2, discord_lower_bound, eigenframe, Branch, DiscordOptions,
    DiscordResult, EigenFrame,
};
pub use disturbance::{trace_norm_closed, trace_norm_direct, DisturbanceReport, MeasurementAxis};
pub use error::{Error, Result};
pub use exec::Execution;
pub use families::{Family, FamilySpec};
pub use oracle::{certify, minimize_grid, CertifyOptions, CertifyReport, OracleOptions, OracleResult};
