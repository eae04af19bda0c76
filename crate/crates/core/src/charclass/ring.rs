use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::expr::num::fmt_rational;
use crate::expr::Rational;

use super::CharClassError;

/// `Q[t]/(t^{top+1})` with `t` in real degree 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohomRing {
    generator: String,
    top: usize,
}

impl CohomRing {
    pub fn new(generator: &str, top: usize) -> Arc<CohomRing> {
        Arc::new(CohomRing {
            generator: generator.to_string(),
            top,
        })
    }

    /// The real cohomology of complex projective space of complex dimension m.
    pub fn projective(m: usize) -> Arc<CohomRing> {
        CohomRing::new("t", m)
    }

    pub fn generator(&self) -> &str {
        &self.generator
    }

    pub fn top(&self) -> usize {
        self.top
    }
}

impl fmt::Display for CohomRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[{g}]/({g}^{})", self.top + 1, g = self.generator)
    }
}

/// Element `Σ c_j t^j`, `j <= top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomElement {
    ring: Arc<CohomRing>,
    coeffs: Vec<Rational>,
}

impl CohomElement {
    pub fn zero(ring: &Arc<CohomRing>) -> Self {
        CohomElement {
            ring: ring.clone(),
            coeffs: vec![Rational::zero(); ring.top + 1],
        }
    }

    pub fn one(ring: &Arc<CohomRing>) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Arc<CohomRing>, c: Rational) -> Self {
        let mut e = Self::zero(ring);
        e.coeffs[0] = c;
        e
    }

    /// `c·t^j` (zero when j exceeds the truncation).
    pub fn monomial(ring: &Arc<CohomRing>, c: Rational, j: usize) -> Self {
        let mut e = Self::zero(ring);
        if j <= ring.top {
            e.coeffs[j] = c;
        }
        e
    }

    pub fn generator(ring: &Arc<CohomRing>) -> Self {
        Self::monomial(ring, Rational::one(), 1)
    }

    /// Coefficients beyond the truncation are dropped.
    pub fn from_coeffs(ring: &Arc<CohomRing>, coeffs: &[Rational]) -> Self {
        let mut e = Self::zero(ring);
        for (j, c) in coeffs.iter().enumerate().take(ring.top + 1) {
            e.coeffs[j] = c.clone();
        }
        e
    }

    pub fn ring(&self) -> &Arc<CohomRing> {
        &self.ring
    }

    /// Coefficient of `t^j` (zero beyond the truncation).
    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Homogeneous part `c_j t^j`.
    pub fn part(&self, j: usize) -> Self {
        Self::monomial(&self.ring, self.coeff(j), j)
    }

    fn check(&self, other: &Self) -> Result<(), CharClassError> {
        if self.ring != other.ring {
            return Err(CharClassError::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CharClassError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CohomElement {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CharClassError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CohomElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self, CharClassError> {
        self.check(other)?;
        let top = self.ring.top;
        let mut out = Self::zero(&self.ring);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(top + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Inverse of an element with invertible constant term, as a truncated
    /// power series.
    pub fn inverse(&self) -> Result<Self, CharClassError> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return Err(CharClassError::NotUnit(self.to_string()));
        }
        let inv0 = Rational::one() / &c0;
        let mut out = Self::zero(&self.ring);
        out.coeffs[0] = inv0.clone();
        for k in 1..=self.ring.top {
            let mut s = Rational::zero();
            for j in 1..=k {
                s += &self.coeffs[j] * &out.coeffs[k - j];
            }
            out.coeffs[k] = -s * &inv0;
        }
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self, CharClassError> {
        self.mul(&other.inverse()?)
    }

    /// Substitutes `t ↦ -t` on degree-j parts with sign `(-1)^j`.
    pub fn alternate(&self) -> Self {
        CohomElement {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| if j % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }
}

impl fmt::Display for CohomElement {
    /// Ascending powers: `1 + 6t + 15t^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.ring.generator;
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = *c < Rational::zero();
            let abs = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coef = fmt_rational(&abs);
            match j {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{coef}")?;
                    }
                    write!(f, "{g}")?;
                    if j > 1 {
                        write!(f, "^{j}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::num::int;

    #[test]
    fn truncated_arithmetic() {
        let r1 = CohomRing::new("t", 1);
        let t = CohomElement::generator(&r1);
        let one = CohomElement::one(&r1);
        assert_eq!(one.add(&t).unwrap().mul(&one.sub(&t).unwrap()).unwrap(), one);

        let r3 = CohomRing::new("t", 3);
        let t = CohomElement::generator(&r3);
        assert!(t.pow(3).mul(&t).unwrap().is_zero());

        let r5 = CohomRing::new("t", 5);
        let p = CohomElement::one(&r5).add(&CohomElement::generator(&r5)).unwrap().pow(6);
        assert_eq!(p.to_string(), "1 + 6t + 15t^2 + 20t^3 + 15t^4 + 6t^5");
    }

    #[test]
    fn unit_inverse() {
        let r = CohomRing::new("t", 5);
        let u = CohomElement::from_coeffs(&r, &[int(1), int(2)]);
        let inv = u.inverse().unwrap();
        assert_eq!(inv.to_string(), "1 - 2t + 4t^2 - 8t^3 + 16t^4 - 32t^5");
        assert_eq!(u.mul(&inv).unwrap(), CohomElement::one(&r));
        assert!(CohomElement::generator(&r).inverse().is_err());
    }

    #[test]
    fn mismatched_rings() {
        let a = CohomElement::one(&CohomRing::new("t", 2));
        let b = CohomElement::one(&CohomRing::new("t", 3));
        assert!(matches!(a.mul(&b), Err(CharClassError::RingMismatch { .. })));
    }
}
