//! Simulator for the bipartite entanglement two emitting atoms acquire
//! when their photons (plus ancilla photons) pass linear-optical networks
//! and are post-selected on detector coincidences.
//!
//! The crate is organized around five subsystems:
//!
//! - [`optics`]: port bases, beam splitters / phase shifters /
//!   attenuators, network composition, and the triangular decomposition
//!   of unitaries into elementary components.
//! - [`postselect`]: matrix permanents (Ryser plus a brute-force
//!   permutation oracle) and the coincidence projections that produce the
//!   atoms' joint amplitude matrix.
//! - [`schmidt`]: Schmidt decomposition, entanglement entropy in ebits,
//!   bound checks and the spectrum-equalizing local filter.
//! - [`etpd`]: the continuous-momentum two-photon-detector kernel on a
//!   quadrature grid, with an analytic geometric-spectrum oracle for the
//!   Gaussian case.
//! - [`protocol`]: canned experiments: single detection, two photons
//!   through arbitrary networks, the symmetric N-detector ring, and the
//!   attenuator construction that saturates the log2(N)-ebit bound.
//!
//! Everything numerical is generic over the real scalar via
//! [`scalar::Real`]; the aliases below fix the production `f64`
//! instantiation. All stated tolerances assume `f64`.

pub mod error;
pub mod etpd;
pub mod json;
pub mod linalg;
pub mod optics;
pub mod postselect;
pub mod protocol;
pub mod scalar;
pub mod schmidt;

pub use error::{Error, Result};
pub use scalar::Real;

/// Production scalar type.
pub type Scalar = f64;
/// Dense complex matrix at the production scalar.
pub type ComplexMatrix = linalg::CMatrix<Scalar>;
/// Dense complex vector at the production scalar.
pub type ComplexVector = linalg::CVector<Scalar>;
/// Optical network element at the production scalar.
pub type NetworkElement = optics::NetworkElement<Scalar>;
/// Linear-optical network at the production scalar.
pub type LinearNetwork = optics::LinearNetwork<Scalar>;
/// Photon ensemble at the production scalar.
pub type PhotonEnsemble = postselect::PhotonEnsemble<Scalar>;
/// Post-selected bipartite amplitude at the production scalar.
pub type BipartiteAmplitude = postselect::BipartiteAmplitude<Scalar>;
/// Schmidt report at the production scalar.
pub type SchmidtReport = schmidt::SchmidtReport<Scalar>;
/// Momentum grid at the production scalar.
pub type MomentumGrid = etpd::MomentumGrid<Scalar>;
/// Protocol specification at the production scalar.
pub type ProtocolSpec = protocol::ProtocolSpec<Scalar>;
/// Protocol kind at the production scalar.
pub type ProtocolKind = protocol::ProtocolKind<Scalar>;
/// Protocol outcome at the production scalar.
pub type ProtocolOutcome = protocol::ProtocolOutcome<Scalar>;
