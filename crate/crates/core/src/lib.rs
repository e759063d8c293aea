//! Two-atom dimer coupled to a photonic-crystal waveguide near its band edge.
//!
//! The crate covers the single-excitation effective Hamiltonian, photon
//! transmission and reflection, free decay dynamics, weak-drive photon
//! correlations of the reflected field and the effect of small imperfections
//! in spacing and coupling.

pub mod correlation;
pub mod dynamics;
pub mod error;
pub mod imperfections;
pub mod linalg;
pub mod model;
pub mod params;
pub mod scattering;
pub mod signal;

pub use correlation::{
    g2_master_equation_oracle, g2_reflected, steady_state_hierarchy, CorrelationTrace,
    TwoExcitationState,
};
pub use dynamics::{
    closed_form_populations, evolve, propagator, Case, InitialState, Populations, TimeSeries,
};
pub use error::{Error, Result};
pub use imperfections::{
    asymmetric_bragg_dynamics, asymmetric_dressed_basis, deviation_dynamics, fano_scan,
    AsymmetricDynamics, AsymmetryParams, DeviationDynamics, DeviationParams, FanoAsymmetry,
    FanoFeature, FanoScan,
};
pub use linalg::{Mat2, Vec2, C64};
pub use model::{
    build_hamiltonian, bound_state_length, closed_form_eigenvalues, dressed_scheme, eigensolve,
    eigensolve_matrix, DressedLevelScheme, EffectiveHamiltonian, EigenSystem,
};
pub use params::{BandEdgeParams, SystemParams, ANTI_BRAGG_KAD, BRAGG_KAD};
pub use scattering::{
    peak_analysis, scatter_amplitudes, scatter_via_steady_state, spectrum, ScatterPoint,
    SpectrumGrid,
};
pub use signal::Peak;
