/// Tolerance for approximate comparisons.
///
/// One knob for the whole pipeline: corner-constraint checks, support
/// pruning, unitarity and covariance validation, and zero tests in norm
/// formulas all go through the same value, so a run is reproducible from
/// its configuration alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol(pub f64);

impl Tol {
    pub const DEFAULT: f64 = 1e-10;

    pub fn new(tol: f64) -> Self {
        assert!(tol >= 0.0, "tolerance must be nonnegative");
        Tol(tol)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// True when `x` is negligible.
    #[inline]
    pub fn is_zero(self, x: f64) -> bool {
        x.abs() <= self.0
    }

    /// True when `a` and `b` agree up to the tolerance.
    #[inline]
    pub fn close(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.0
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol(Self::DEFAULT)
    }
}

impl From<f64> for Tol {
    fn from(t: f64) -> Self {
        Tol::new(t)
    }
}
