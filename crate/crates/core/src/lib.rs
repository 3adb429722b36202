//! Thermofield dynamics in a truncated doubled Fock space.
//!
//! The crate builds thermal vacua of bosonic and fermionic oscillators as pure
//! states of a hat/tilde doubled space, realises the Bogoliubov transformation
//! that generates them, and runs parametric down conversion of a bosonic
//! thermal pump under the Liouvillian `L̄ = Ĥ − H̃`.
//!
//! Modules, bottom up:
//!
//! * [`fock`]: mode labels, mixed-radix basis, dense state vectors
//! * [`operator`] and [`expr`]: sparse ladder algebra and tilde conjugation
//! * [`expm`]: remainder-controlled action of `exp(−itH)`
//! * [`thermofield`]: thermal vacua, mixing angles, Bogoliubov transform
//! * [`liouville`]: PDC Hamiltonian, Liouvillian and time evolution
//! * [`pdc`] and [`schmidt`]: the down-conversion experiment and separability

pub mod error;
pub mod expm;
pub mod expr;
pub mod fock;
pub mod liouville;
pub mod operator;
pub mod pdc;
pub mod schmidt;
pub mod thermofield;

pub use error::{Result, TfdError};
pub use fock::{BasisDescriptor, ModeId, Occupations, StateVector};
pub use num_complex::Complex64 as C64;
pub use operator::SparseOperator;
