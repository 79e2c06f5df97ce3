/// Numerical thresholds shared by the library. All values are relative to a
/// scale chosen by the operation that consumes them (usually a Frobenius norm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Block-circulant structure check in `bcirc_inv`.
    pub structure: f64,
    /// Round-trip accuracy of the tube DFT.
    pub fft: f64,
    /// Residual accepted from linear solves.
    pub solve: f64,
    /// Structural predicates (unitary, Hermitian, triangular).
    pub predicate: f64,
    /// Singular values below `rank * sigma_max` count as zero.
    pub rank: f64,
    /// Eigenvalue clustering level, read as a relative backward error: an
    /// `s`-fold cluster may spread up to `cluster^(1/s)` times the block scale.
    pub cluster: f64,
    /// Relative reconstruction error accepted for a Jordan factorization.
    pub jordan: f64,
    /// `||a^s|| <= nil * ||a||^s` declares `a^s` zero.
    pub nil: f64,
    /// Generalized-inverse defining equations.
    pub ginv: f64,
    /// Factorization reconstruction.
    pub decomp: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        structure: 1e-12,
        fft: 1e-11,
        solve: 1e-9,
        predicate: 1e-9,
        rank: 1e-10,
        cluster: 1e-6,
        jordan: 1e-7,
        nil: 1e-10,
        ginv: 1e-8,
        decomp: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
