//! Dispersion relation, power-law action spectrum, interaction matrix
//! elements and the occupation-number combination of the kinetic equation.
//!
//! Everything here is nondimensional: frequencies are `N k / |m|` with the
//! buoyancy frequency `N` and gravity `g` carried in [`PhysicalConstants`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A wavenumber `p = (k, m)`: horizontal modulus and signed vertical component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavenumber {
    pub k: f64,
    pub m: f64,
}

impl Wavenumber {
    pub fn new(k: f64, m: f64) -> Result<Self> {
        if !(k.is_finite() && m.is_finite()) || k < 0.0 {
            return Err(Error::InvalidWavenumber { k, m });
        }
        if m == 0.0 {
            return Err(Error::InvalidWavenumber { k, m });
        }
        Ok(Self { k, m })
    }

    /// Same wavenumber with `|m|`; the spectrum and dispersion are even in `m`.
    pub fn upper(self) -> Self {
        Self { k: self.k, m: self.m.abs() }
    }
}

/// Exponents of the isotropic action spectrum `n = n0 k^-x |m|^-y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralExponents {
    pub x: f64,
    pub y: f64,
    pub n0: f64,
}

impl SpectralExponents {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, n0: 1.0 }
    }

    pub fn with_amplitude(x: f64, y: f64, n0: f64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidAmplitude(n0));
        }
        Ok(Self { x, y, n0 })
    }

    /// Thermodynamic equilibrium `n = 1/omega` under `omega = k/|m|`.
    pub fn equipartition() -> Self {
        Self::new(1.0, -1.0)
    }
}

/// Buoyancy frequency and gravity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub buoyancy: f64,
    pub gravity: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { buoyancy: 1.0, gravity: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(buoyancy: f64, gravity: f64) -> Result<Self> {
        if !(buoyancy > 0.0 && gravity > 0.0 && buoyancy.is_finite() && gravity.is_finite()) {
            return Err(Error::InvalidConstants { buoyancy, gravity });
        }
        Ok(Self { buoyancy, gravity })
    }

    /// `N / (4 sqrt(2 g))`, the common prefactor of every `U` term.
    #[inline]
    pub fn coupling(&self) -> f64 {
        self.buoyancy / (4.0 * (2.0 * self.gravity).sqrt())
    }
}

fn check(p: Wavenumber) -> Result<()> {
    if p.k < 0.0 || p.m == 0.0 || !p.k.is_finite() || !p.m.is_finite() {
        Err(Error::InvalidWavenumber { k: p.k, m: p.m })
    } else {
        Ok(())
    }
}

/// Linear internal-wave frequency `N k / |m|`.
pub fn frequency(p: Wavenumber, c: &PhysicalConstants) -> Result<f64> {
    check(p)?;
    Ok(c.buoyancy * p.k / p.m.abs())
}

/// Action density `n0 k^-x |m|^-y`.
pub fn action(p: Wavenumber, s: &SpectralExponents) -> Result<f64> {
    check(p)?;
    if p.k == 0.0 {
        return Err(Error::ZeroHorizontalWavenumber);
    }
    Ok(action_unchecked(p.k, p.m, s))
}

#[inline]
pub(crate) fn action_unchecked(k: f64, m: f64, s: &SpectralExponents) -> f64 {
    s.n0 * k.powf(-s.x) * m.abs().powf(-s.y)
}

/// One `U` term of the interaction coefficient.
///
/// `pa` is the superscript wavenumber (it supplies the leading horizontal
/// modulus and the denominator frequency); `pb`, `pc` are the subscripts
/// and `cos_bc` the cosine between their horizontal wavevectors.
pub fn matrix_element_u(
    pa: Wavenumber,
    pb: Wavenumber,
    pc: Wavenumber,
    cos_bc: f64,
    c: &PhysicalConstants,
) -> Result<f64> {
    if !(-1.0..=1.0).contains(&cos_bc) {
        return Err(Error::CosineOutOfRange(cos_bc));
    }
    let wa = frequency(pa, c)?;
    let wb = frequency(pb, c)?;
    let wc = frequency(pc, c)?;
    if wa == 0.0 {
        return Err(Error::InvalidWavenumber { k: pa.k, m: pa.m });
    }
    Ok(u_term(wa, wb, wc, pa.k, cos_bc, c.coupling()))
}

#[inline]
pub(crate) fn u_term(wa: f64, wb: f64, wc: f64, ka: f64, cos_bc: f64, coupling: f64) -> f64 {
    -coupling * cos_bc * (wb * wc / wa).sqrt() * ka
}

/// Pairwise cosines of a closed horizontal triangle `k = k1 + k2`.
///
/// `k1_k2` is the cosine between the two subscript vectors, `k_k1` and
/// `k_k2` those between the sum vector and each subscript vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriadCosines {
    pub k1_k2: f64,
    pub k_k1: f64,
    pub k_k2: f64,
}

impl TriadCosines {
    pub fn swapped(self) -> Self {
        Self { k1_k2: self.k1_k2, k_k1: self.k_k2, k_k2: self.k_k1 }
    }
}

/// Symmetrised interaction coefficient `V^p_{p1 p2} = U^p_{p1p2} + U^{p1}_{p p2} + U^{p2}_{p p1}`.
pub fn matrix_element_v(
    p: Wavenumber,
    p1: Wavenumber,
    p2: Wavenumber,
    cosines: TriadCosines,
    c: &PhysicalConstants,
) -> Result<f64> {
    // grouped so that exchanging p1 and p2 is bitwise symmetric
    Ok(matrix_element_u(p, p1, p2, cosines.k1_k2, c)?
        + (matrix_element_u(p1, p, p2, cosines.k_k2, c)? + matrix_element_u(p2, p, p1, cosines.k_k1, c)?))
}

/// `n1 n2 - n (n1 + n2)`.
#[inline]
pub fn f_term(n: f64, n1: f64, n2: f64) -> f64 {
    n1 * n2 - n * (n1 + n2)
}

/// Energy-spectrum exponents `(a, b)` with `E(m, omega) ~ omega^-a m^-b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyExponents {
    pub a: f64,
    pub b: f64,
}

/// Action exponents to energy exponents: `a = x - 2`, `b = x + y - 2`.
pub fn energy_exponents(s: &SpectralExponents) -> EnergyExponents {
    EnergyExponents { a: s.x - 2.0, b: s.x + s.y - 2.0 }
}

/// Inverse of [`energy_exponents`]: `x = a + 2`, `y = b - a`.
pub fn action_exponents(a: f64, b: f64) -> SpectralExponents {
    SpectralExponents::new(a + 2.0, b - a)
}
