use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

/// A real number or `+inf`. Never `-inf`, never NaN.
///
/// `+inf` is stored as `f64::INFINITY`, which no finite value can equal.
/// Addition saturates at `+inf`, and the order is total with `+inf` greatest.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Panics unless `v` is finite.
    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "ExtReal::finite called with {v}");
        ExtReal(v)
    }

    /// `Some` for finite values and `+inf`; `None` for NaN and `-inf`.
    pub fn new(v: f64) -> Option<Self> {
        if v.is_nan() || v == f64::NEG_INFINITY {
            None
        } else {
            Some(ExtReal(v))
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        !self.0.is_finite()
    }

    /// The raw value; `f64::INFINITY` for `+inf`.
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// `self - x` for a finite `x`; `+inf` stays `+inf`.
    pub fn sub_finite(self, x: f64) -> Self {
        debug_assert!(x.is_finite());
        if self.is_finite() {
            ExtReal(self.0 - x)
        } else {
            self
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        if self.is_infinite() || rhs.is_infinite() {
            ExtReal::INFINITY
        } else {
            ExtReal(self.0 + rhs.0)
        }
    }
}

impl TryFrom<f64> for ExtReal {
    type Error = f64;

    fn try_from(v: f64) -> Result<Self, f64> {
        ExtReal::new(v).ok_or(v)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}
