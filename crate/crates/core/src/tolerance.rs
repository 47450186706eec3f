/// Scale-relative geometric tolerance.
///
/// One relative epsilon governs coplanarity, point-on-plane and closedness
/// tests. Absolute thresholds are obtained by multiplying with a length scale
/// of the object at hand (usually its diameter).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
}

impl Tolerance {
    pub const DEFAULT_RELATIVE: f64 = 1e-9;

    pub fn new(relative: f64) -> Self {
        assert!(
            relative > 0.0 && relative.is_finite(),
            "tolerance must be positive"
        );
        Self { relative }
    }

    /// Absolute threshold for an object of the given length scale.
    #[inline]
    pub fn absolute(&self, scale: f64) -> f64 {
        self.relative * scale.abs().max(f64::MIN_POSITIVE)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            relative: Self::DEFAULT_RELATIVE,
        }
    }
}
