use num_complex::Complex64;

use crate::numlin::{CMat, RMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiClass {
    Ni,
    Sni,
    NotNi,
    /// NI (or at least not shown otherwise) but the strict conditions fail.
    NotSni,
    Indeterminate,
}

impl NiClass {
    pub fn label(self) -> &'static str {
        match self {
            NiClass::Ni => "NI",
            NiClass::Sni => "SNI",
            NiClass::NotNi => "NotNI",
            NiClass::NotSni => "NotSNI",
            NiClass::Indeterminate => "Indeterminate",
        }
    }
}

/// Evidence for a negative classification.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Pole in the open right half plane (or on the axis, for SNI).
    Pole(Complex64),
    /// Grid frequency where `j(M - M^H)` has a negative (or, for SNI,
    /// non-positive) eigenvalue.
    Frequency { omega: f64, min_eigenvalue: f64 },
    /// Axis pole whose residue matrix is not Hermitian PSD.
    Residue { pole: Complex64, min_eigenvalue: f64, asymmetry: f64 },
    /// `D != D^T`.
    Feedthrough { asymmetry: f64 },
    /// Maximal Riccati solution is not PSD, so no solution is.
    RiccatiSolution { min_eigenvalue: f64 },
    /// The Riccati Hamiltonian has a simple (odd-multiplicity) eigenvalue at
    /// `j * frequency`, so the equation has no symmetric solution at all.
    HamiltonianAxis { frequency: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleKind {
    Axis,
    Origin,
}

/// Residue data at an imaginary-axis pole. For `PoleKind::Axis` the matrix
/// is `K = lim (s - jw0) j M(s)`; for the origin it is `lim s^2 M(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueReport {
    pub pole: Complex64,
    pub kind: PoleKind,
    /// Order of the pole of the transfer function (0 if cancelled).
    pub order: usize,
    pub residue: CMat,
    pub psd: bool,
    /// `|K - K^H|_F / |K|_F`.
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridDiagnostics {
    pub lo: f64,
    pub hi: f64,
    pub base_points: usize,
    pub refined_points: usize,
    /// Grid points skipped because they coincide with a pole.
    pub skipped: usize,
    /// Smallest eigenvalue of `j(M - M^H)` seen, and where.
    pub min_eigenvalue: f64,
    pub argmin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiDiagnostics {
    pub r: RMat,
    /// Residual of the original (unflipped) equation for the maximal solution.
    pub residual: f64,
    /// Residual divided by `max(1, |Q|, 2 |P A0|, |P G P|)`.
    pub relative_residual: f64,
    pub min_eigenvalue: f64,
    pub axis_eigenvalues: usize,
    /// Smallest eigenvalue of the minimal solution, when it exists.
    pub anti_stabilizing_min_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NiVerdict {
    pub classification: NiClass,
    pub witness: Option<Witness>,
    /// `P` from the Riccati test.
    pub certificate: Option<RMat>,
    pub residues: Vec<ResidueReport>,
    pub grid: Option<GridDiagnostics>,
    pub riccati: Option<RiccatiDiagnostics>,
    pub warnings: Vec<String>,
}

impl NiVerdict {
    pub(crate) fn new(classification: NiClass) -> Self {
        Self {
            classification,
            witness: None,
            certificate: None,
            residues: Vec::new(),
            grid: None,
            riccati: None,
            warnings: Vec::new(),
        }
    }

    pub fn is_ni(&self) -> bool {
        matches!(self.classification, NiClass::Ni | NiClass::Sni)
    }

    pub fn has_origin_pole(&self) -> bool {
        self.residues.iter().any(|r| r.kind == PoleKind::Origin && r.order > 0)
    }
}
