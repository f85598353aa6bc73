//! Negative-imaginary systems: frequency-domain classification, LMI
//! certificate checking, the Riccati form of the NI lemma and the DC-gain
//! stability test for NI/SNI positive-feedback loops.

mod error;
mod frequency;
mod grid;
mod lmi;
mod poles;
mod riccati;
mod stability;
mod system;
mod verdict;

pub use error::NiError;
pub use frequency::{ni_frequency_oracle, ni_frequency_oracle_with, sni_check, sni_check_with};
pub use grid::{FrequencyGrid, DEFAULT_GRID_COUNT, DEFAULT_GRID_HI, DEFAULT_GRID_LO};
pub use lmi::{verify_lmi_certificate, NiCertificate};
pub use riccati::{
    ni_riccati_data, ni_riccati_residual, residual_scale, ni_riccati_test, ni_riccati_test_with, NiRiccatiData,
};
pub use stability::{
    interconnection_stability, interconnection_stability_with, positive_feedback_matrix, StabilityReport,
};
pub use system::{MinimalityReport, RealStateSpace};
pub use verdict::{
    GridDiagnostics, NiClass, NiVerdict, PoleKind, ResidueReport, RiccatiDiagnostics, Witness,
};
