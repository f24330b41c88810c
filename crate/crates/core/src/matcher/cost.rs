use core::cmp::Ordering;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};

/// Path cost split into a count of capped (`big`) edges and a finite remainder.
///
/// With `big` larger than any sum of finite weights, ordering by
/// `(saturated, finite)` is the same as ordering by `saturated * big + finite`,
/// but the finite part never loses precision against the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost {
    pub saturated: i64,
    pub finite: f64,
}

impl Cost {
    pub const ZERO: Cost = Cost {
        saturated: 0,
        finite: 0.0,
    };

    pub(crate) const INFINITE: Cost = Cost {
        saturated: i64::MAX / 4,
        finite: 0.0,
    };

    pub fn of_weight(weight: f64, big: f64) -> Cost {
        if weight >= big {
            Cost {
                saturated: 1,
                finite: 0.0,
            }
        } else {
            Cost {
                saturated: 0,
                finite: weight,
            }
        }
    }

    /// Collapse back to a single number, `saturated * big + finite`.
    pub fn total(&self, big: f64) -> f64 {
        self.saturated as f64 * big + self.finite
    }

    /// Same number of capped edges and finite parts within `tol`.
    pub fn approx_eq(&self, other: &Cost, tol: f64) -> bool {
        self.saturated == other.saturated && (self.finite - other.finite).abs() <= tol
    }

    pub(crate) fn scale(self, k: i64) -> Cost {
        Cost {
            saturated: self.saturated * k,
            finite: self.finite * k as f64,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.saturated.cmp(&other.saturated) {
            Ordering::Equal => self.finite.partial_cmp(&other.finite),
            o => Some(o),
        }
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost {
            saturated: self.saturated + rhs.saturated,
            finite: self.finite + rhs.finite,
        }
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost {
            saturated: self.saturated - rhs.saturated,
            finite: self.finite - rhs.finite,
        }
    }
}

impl Neg for Cost {
    type Output = Cost;
    fn neg(self) -> Cost {
        Cost {
            saturated: -self.saturated,
            finite: -self.finite,
        }
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        *self = *self + rhs;
    }
}

impl SubAssign for Cost {
    fn sub_assign(&mut self, rhs: Cost) {
        *self = *self - rhs;
    }
}

impl core::iter::Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}
