//! Coherent-state integral quantization of a particle confined to an interval
//! or a half-line.
//!
//! The window profile [`window::Window`] is the building block: every
//! modified operator, the induced position-dependent mass and potentials, the
//! commutator function and the semi-classical dynamics are expressed through
//! it and its first two derivatives.

pub mod banded;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod operators;
pub mod quadrature;
pub mod quantizer;
pub mod special;
pub mod states;
pub mod window;

pub use banded::BandedOperator;
pub use dynamics::{MechanicalSystem, SemiClassical, Trajectory};
pub use error::{Error, Result};
pub use grid::{Grid, WaveFunction};
pub use operators::{OrderingChoice, PotentialSign};
pub use quantizer::{ObservableKind, ObservableSpec, PhaseState, PortraitMethod};
pub use states::GaussianProbe;
pub use window::{Geometry, QuantizationParams, Window};
