//! Published high-frequency, high-wavenumber spectral slopes from seven
//! deep-ocean experiments, and their position in the `(x, y)` plane.

use serde::{Deserialize, Serialize};

use crate::spectral::action_exponents;

/// A published exponent: a single value or a quoted range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Value(f64),
    Interval { lo: f64, hi: f64 },
}

impl Exponent {
    /// Range from two endpoints in either order; equal endpoints give a value.
    pub fn between(a: f64, b: f64) -> Self {
        if a == b {
            Exponent::Value(a)
        } else {
            Exponent::Interval { lo: a.min(b), hi: a.max(b) }
        }
    }

    pub fn lo(self) -> f64 {
        match self {
            Exponent::Value(v) => v,
            Exponent::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(self) -> f64 {
        match self {
            Exponent::Value(v) => v,
            Exponent::Interval { hi, .. } => hi,
        }
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo() + self.hi())
    }

    pub fn is_interval(self) -> bool {
        matches!(self, Exponent::Interval { .. })
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Value(v) => write!(f, "{v}"),
            Exponent::Interval { lo, hi } => write!(f, "{lo}..{hi}"),
        }
    }
}

/// Which wavenumber the published energy spectrum was measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WavenumberBasis {
    Vertical,
    Horizontal,
}

/// One experiment's energy spectrum `E ~ omega^-a m^-b` and its `(x, y)`.
///
/// For a `HORIZONTAL` record `vertical_exponent` holds the published
/// horizontal-wavenumber exponent instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub name: String,
    pub omega_exponent: Exponent,
    pub vertical_exponent: Exponent,
    pub wavenumber_basis: WavenumberBasis,
    pub derived_x: Exponent,
    pub derived_y: Exponent,
    pub notes: String,
}

impl ObservationRecord {
    /// Record with `(x, y)` derived from the published exponents.
    pub fn new(name: &str, a: Exponent, b: Exponent, basis: WavenumberBasis, notes: &str) -> Self {
        let ((x0, y0), (x1, y1)) = derive_segment(a, b, basis);
        Self {
            name: name.to_string(),
            omega_exponent: a,
            vertical_exponent: b,
            wavenumber_basis: basis,
            derived_x: Exponent::between(x0, x1),
            derived_y: Exponent::between(y0, y1),
            notes: notes.to_string(),
        }
    }

    /// The `(x, y)` images of the low and high ends of the published ranges;
    /// equal for single-valued records.
    pub fn segment(&self) -> ((f64, f64), (f64, f64)) {
        derive_segment(self.omega_exponent, self.vertical_exponent, self.wavenumber_basis)
    }

    pub fn midpoint(&self) -> (f64, f64) {
        (self.derived_x.mid(), self.derived_y.mid())
    }

    pub fn is_point(&self) -> bool {
        let (a, b) = self.segment();
        a == b
    }
}

/// Vertical basis: `x = a + 2`, `y = b - a`. Horizontal basis: the
/// wavenumber exponent is taken as `x`, and `y = c - a` as for the vertical
/// basis.
fn derive_segment(a: Exponent, b: Exponent, basis: WavenumberBasis) -> ((f64, f64), (f64, f64)) {
    let at = |a: f64, b: f64| match basis {
        WavenumberBasis::Vertical => {
            let s = action_exponents(a, b);
            (s.x, s.y)
        }
        WavenumberBasis::Horizontal => (b, b - a),
    };
    (at(a.lo(), b.lo()), at(a.hi(), b.hi()))
}

/// The seven embedded records, in chronological order.
pub fn builtin_observations() -> Vec<ObservationRecord> {
    use Exponent::Value;
    use WavenumberBasis::{Horizontal, Vertical};
    vec![
        ObservationRecord::new(
            "MODE",
            Value(1.6),
            Value(2.25),
            Vertical,
            "Sargasso Sea, 26d00'N 69d40'W; March-July 1973; L76",
        ),
        ObservationRecord::new(
            "IWEX",
            Value(1.75),
            Exponent::between(2.0, 2.8),
            Horizontal,
            "Sargasso Sea thermocline, 27d44'N 69d51'W; November-December 1973; M78; \
             horizontal-wavenumber slope 2.4 +- 0.4",
        ),
        ObservationRecord::new(
            "AIWEX",
            Value(1.2),
            Value(2.15),
            Vertical,
            "Canada Basin thermocline, 74dN 143-146dW; March-May 1985; Letal87, DandM91",
        ),
        ObservationRecord::new(
            "FASINEX",
            Value(1.75),
            Exponent::between(1.9, 2.0),
            Vertical,
            "Sargasso Sea thermocline, 27dN 70dW; January-June 1986; WandME, Eetal91",
        ),
        ObservationRecord::new(
            "PATCHEX",
            Exponent::between(1.65, 2.0),
            Value(1.75),
            Vertical,
            "eastern subtropical North Pacific, 34dN 127dW; October 1986; SandP91",
        ),
        ObservationRecord::new(
            "SWAPP",
            Value(2.0),
            Value(1.9),
            Vertical,
            "eastern subtropical North Pacific thermocline, 35dN 127dW; March 1990; A92",
        ),
        ObservationRecord::new(
            "NATRE",
            Value(0.6),
            Value(2.75),
            Vertical,
            "eastern subtropical North Atlantic thermocline, 26dN 29dW; February-October 1992; \
             P03; fit for 1 < omega < 6 cpd",
        ),
    ]
}
