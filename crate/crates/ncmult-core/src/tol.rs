//! Numerical tolerances shared by the library and its tests.

/// Off-diagonal Frobenius mass (relative) at which Jacobi sweeps stop.
pub const JACOBI_OFFDIAG: f64 = 1e-13;
/// Largest dimension accepted by the dense eigensolvers.
pub const MAX_DENSE_DIM: usize = 256;
/// Negative eigenvalues above `-PSD_CLIP * max(1, |A|)` are treated as zero.
pub const PSD_CLIP: f64 = 1e-10;
/// Relative singular value below which a direction is treated as kernel.
pub const RANK_CUTOFF: f64 = 1e-13;
/// Hermitian symmetry check (relative to the Frobenius norm).
pub const HERMITIAN: f64 = 1e-10;

pub const THEOREM_B_SLACK: f64 = -1e-8;
pub const LEMMA11_QUADRATURE: f64 = 1e-6;
pub const LEMMA11_SLACK: f64 = -1e-9;
pub const POWERS_STORMER_SLACK: f64 = -1e-9;
pub const COROLLARY_SLACK: f64 = -1e-8;
pub const PLANCHEREL: f64 = 1e-12;
pub const RESTRICTION_RATIO: f64 = 1.02;
pub const ISOMETRY: f64 = 1e-10;
pub const PROJECTION: f64 = 1e-12;
pub const INTERTWINING: f64 = 1e-10;
pub const PERIODIZATION_RATIO: f64 = 1.02;
pub const WINDOW_ISOMETRY: f64 = 1e-12;
pub const FELL_P2: f64 = 1e-10;
pub const FELL_OPERATOR: f64 = 1e-8;
pub const CB_NORM: f64 = 1e-6;
pub const FACTORIZATION: f64 = 1e-7;
pub const SECTION_SLACK: f64 = 0.01;
pub const TRANSFERENCE: f64 = 0.02;
pub const LATTICE_DEFECT: f64 = 1e-3;
pub const LATTICE_RIPPLE: f64 = 0.10;
/// Agreement of the Jodeit extension with its symbol at lattice points.
pub const JODEIT: f64 = 1e-12;
