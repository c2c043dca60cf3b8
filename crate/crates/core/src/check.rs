use serde::Serialize;

/// Outcome of one numerical check: the measured value, the tolerance it
/// was held to and the identity it tests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity or inequality under test, as a formula.
    pub anchor: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    bound: Bound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Bound {
    Upper,
    Lower,
    Around(f64),
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, anchor: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            value,
            tolerance,
            pass: value <= tolerance,
            bound: Bound::Upper,
        }
    }

    /// Passes when `value ≥ tolerance`.
    pub fn at_least(name: impl Into<String>, anchor: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            value,
            tolerance,
            pass: value >= tolerance,
            bound: Bound::Lower,
        }
    }

    /// Passes when `lo ≤ value ≤ hi`; the tolerance records the half-width.
    pub fn within(name: impl Into<String>, anchor: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            value,
            tolerance: 0.5 * (hi - lo),
            pass: value >= lo && value <= hi,
            bound: Bound::Around(0.5 * (lo + hi)),
        }
    }

    /// The same check held to a different tolerance. For a range check the
    /// new tolerance is the half-width around the old midpoint.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        let v = self.value;
        let pass = match self.bound {
            Bound::Upper => v <= tolerance,
            Bound::Lower => v >= tolerance,
            Bound::Around(mid) => v >= mid - tolerance && v <= mid + tolerance,
        };
        Check {
            tolerance,
            pass,
            ..self.clone()
        }
    }
}
