use std::sync::Arc;

use num_traits::{One, Zero};

use crate::expr::Rational;

use super::{CharClassError, CohomElement, CohomRing};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleKind {
    Complex,
    Real,
}

impl BundleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BundleKind::Complex => "complex",
            BundleKind::Real => "real",
        }
    }
}

/// A vector bundle known through its characteristic classes: the total
/// Chern class for complex bundles, the total Pontryagin class and an
/// optional Euler class for real ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleDescriptor {
    kind: BundleKind,
    rank: usize,
    total: CohomElement,
    euler: Option<CohomElement>,
}

impl BundleDescriptor {
    /// `chern` must start with 1 and have `c_i = 0` for `i > rank`.
    pub fn complex(rank: usize, chern: CohomElement) -> Result<Self, CharClassError> {
        if !chern.coeff(0).is_one() {
            return Err(CharClassError::InvalidTotalClass(format!("total Chern class {chern} must start with 1")));
        }
        if let Some(j) = (rank + 1..=chern.ring().top()).find(|&j| !chern.coeff(j).is_zero()) {
            return Err(CharClassError::InvalidTotalClass(format!(
                "c_{j} is nonzero on a bundle of complex rank {rank}"
            )));
        }
        Ok(BundleDescriptor {
            kind: BundleKind::Complex,
            rank,
            total: chern,
            euler: None,
        })
    }

    /// `pontryagin` must start with 1, live in degrees `4i` (even powers of
    /// the generator) and have `p_i = 0` for `2i > rank`.
    pub fn real(rank: usize, pontryagin: CohomElement, euler: Option<CohomElement>) -> Result<Self, CharClassError> {
        let top = pontryagin.ring().top();
        if !pontryagin.coeff(0).is_one() {
            return Err(CharClassError::InvalidTotalClass(format!(
                "total Pontryagin class {pontryagin} must start with 1"
            )));
        }
        if let Some(j) = (1..=top).find(|&j| !pontryagin.coeff(j).is_zero() && (j % 2 == 1 || j > rank)) {
            return Err(CharClassError::InvalidTotalClass(format!(
                "t^{j} term of the Pontryagin class is not allowed for real rank {rank}"
            )));
        }
        if let Some(e) = &euler {
            if e.ring() != pontryagin.ring() {
                return Err(CharClassError::RingMismatch {
                    left: pontryagin.ring().to_string(),
                    right: e.ring().to_string(),
                });
            }
            let homogeneous = (0..=top).all(|j| 2 * j == rank || e.coeff(j).is_zero());
            if rank % 2 == 1 || !homogeneous {
                return Err(CharClassError::InvalidTotalClass(format!(
                    "Euler class {e} must be homogeneous of degree {rank}"
                )));
            }
        }
        Ok(BundleDescriptor {
            kind: BundleKind::Real,
            rank,
            total: pontryagin,
            euler,
        })
    }

    pub fn trivial(ring: &Arc<CohomRing>, kind: BundleKind, rank: usize) -> Self {
        let one = CohomElement::one(ring);
        match kind {
            BundleKind::Complex => BundleDescriptor::complex(rank, one).expect("valid"),
            BundleKind::Real => {
                let e = (rank > 0 && rank % 2 == 0).then(|| CohomElement::zero(ring));
                BundleDescriptor::real(rank, one, e).expect("valid")
            }
        }
    }

    /// Complex line bundle with first Chern class `c1·t`.
    pub fn line(ring: &Arc<CohomRing>, c1: Rational) -> Self {
        let total = CohomElement::one(ring).add(&CohomElement::monomial(ring, c1, 1)).expect("same ring");
        BundleDescriptor::complex(1, total).expect("valid line bundle")
    }

    pub fn kind(&self) -> BundleKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ring(&self) -> &Arc<CohomRing> {
        self.total.ring()
    }

    /// Total Chern class (complex) or total Pontryagin class (real).
    pub fn total_class(&self) -> &CohomElement {
        &self.total
    }

    fn require(&self, kind: BundleKind) -> Result<(), CharClassError> {
        if self.kind != kind {
            return Err(CharClassError::KindMismatch {
                expected: kind.as_str(),
                found: self.kind.as_str(),
            });
        }
        Ok(())
    }

    pub fn chern(&self) -> Result<&CohomElement, CharClassError> {
        self.require(BundleKind::Complex)?;
        Ok(&self.total)
    }

    /// `c_i`.
    pub fn chern_class(&self, i: usize) -> Result<CohomElement, CharClassError> {
        Ok(self.chern()?.part(i))
    }

    /// The Euler class: `c_top` for complex bundles, the stored slot for
    /// real ones.
    pub fn euler(&self) -> Option<CohomElement> {
        match self.kind {
            BundleKind::Complex => Some(self.total.part(self.rank)),
            BundleKind::Real => self.euler.clone(),
        }
    }

    /// Total Pontryagin class, realifying complex bundles first.
    pub fn pontryagin(&self) -> CohomElement {
        match self.kind {
            BundleKind::Real => self.total.clone(),
            BundleKind::Complex => pontryagin_from_chern(self).expect("complex").total,
        }
    }

    /// `p_i`, the part in real degree `4i`.
    pub fn pontryagin_class(&self, i: usize) -> CohomElement {
        self.pontryagin().part(2 * i)
    }

    pub fn is_line(&self) -> bool {
        self.kind == BundleKind::Complex && self.rank == 1
    }

    fn require_line(&self) -> Result<Rational, CharClassError> {
        if !self.is_line() {
            return Err(CharClassError::NotLine {
                kind: self.kind.as_str(),
                rank: self.rank,
            });
        }
        Ok(self.total.coeff(1))
    }

    pub fn c1(&self) -> Result<Rational, CharClassError> {
        self.require_line()
    }
}

/// `c(E ⊕ F) = c(E) c(F)`; Euler classes multiply when both are known.
pub fn whitney_sum(e: &BundleDescriptor, f: &BundleDescriptor) -> Result<BundleDescriptor, CharClassError> {
    if e.kind != f.kind {
        return Err(CharClassError::KindMismatch {
            expected: e.kind.as_str(),
            found: f.kind.as_str(),
        });
    }
    let total = e.total.mul(&f.total)?;
    let euler = match (e.kind, &e.euler, &f.euler) {
        (BundleKind::Real, Some(a), Some(b)) => Some(a.mul(b)?),
        (BundleKind::Real, None, _) if e.rank == 0 => f.euler.clone(),
        (BundleKind::Real, _, None) if f.rank == 0 => e.euler.clone(),
        _ => None,
    };
    Ok(BundleDescriptor {
        kind: e.kind,
        rank: e.rank + f.rank,
        total,
        euler,
    })
}

/// Quotient `E / F` for `E = F ⊕ G` with known `E` and `F`.
pub fn whitney_quotient(e: &BundleDescriptor, f: &BundleDescriptor) -> Result<BundleDescriptor, CharClassError> {
    e.require(f.kind)?;
    if f.rank > e.rank {
        return Err(CharClassError::InvalidTotalClass(format!(
            "cannot split a rank {} bundle off a rank {} bundle",
            f.rank, e.rank
        )));
    }
    let total = e.total.div(&f.total)?;
    match e.kind {
        BundleKind::Complex => BundleDescriptor::complex(e.rank - f.rank, total),
        BundleKind::Real => BundleDescriptor::real(e.rank - f.rank, total, None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOp {
    Dual,
    Power(i64),
}

/// Dual negates `c_1`; the k-th tensor power multiplies it by k.
pub fn line_op(l: &BundleDescriptor, op: LineOp) -> Result<BundleDescriptor, CharClassError> {
    let c1 = l.require_line()?;
    let c1 = match op {
        LineOp::Dual => -c1,
        LineOp::Power(k) => c1 * Rational::from_integer(k.into()),
    };
    Ok(BundleDescriptor::line(l.ring(), c1))
}

/// Conjugate bundle: `c_i(Ē) = (-1)^i c_i(E)`.
pub fn conjugate(e: &BundleDescriptor) -> Result<BundleDescriptor, CharClassError> {
    e.require(BundleKind::Complex)?;
    BundleDescriptor::complex(e.rank, e.total.alternate())
}

/// `L ⊗ E` for a line bundle `L` and a complex bundle `E` of rank r:
/// `c(L ⊗ E) = Σ_i c_i(E) (1 + c_1(L))^{r-i}`. For two lines this is the
/// additivity of `c_1`.
pub fn tensor_with_line(l: &BundleDescriptor, e: &BundleDescriptor) -> Result<BundleDescriptor, CharClassError> {
    let c1 = l.require_line()?;
    e.require(BundleKind::Complex)?;
    let ring = e.ring();
    if l.ring() != ring {
        return Err(CharClassError::RingMismatch {
            left: l.ring().to_string(),
            right: ring.to_string(),
        });
    }
    let base = CohomElement::one(ring).add(&CohomElement::monomial(ring, c1, 1))?;
    let mut total = CohomElement::zero(ring);
    for i in 0..=e.rank.min(ring.top()) {
        let term = e.total.part(i).mul(&base.pow(e.rank - i))?;
        total = total.add(&term)?;
    }
    BundleDescriptor::complex(e.rank, total)
}

/// `E ⊗ ℂ ≅ E ⊕ Ē` as a complex bundle of rank `2r`.
pub fn complexification(e: &BundleDescriptor) -> Result<BundleDescriptor, CharClassError> {
    whitney_sum(e, &conjugate(e)?)
}

/// Underlying real bundle: `p_i = (-1)^i c_{2i}(E ⊗ ℂ)` and Euler class
/// `c_top(E)`.
pub fn pontryagin_from_chern(e: &BundleDescriptor) -> Result<BundleDescriptor, CharClassError> {
    e.require(BundleKind::Complex)?;
    let cc = complexification(e)?;
    let ring = e.ring();
    let mut p = CohomElement::zero(ring);
    for i in 0..=ring.top() / 2 {
        let c2i = cc.total.coeff(2 * i);
        let sign = if i % 2 == 1 { -Rational::one() } else { Rational::one() };
        p = p.add(&CohomElement::monomial(ring, c2i * sign, 2 * i))?;
    }
    BundleDescriptor::real(2 * e.rank, p, Some(e.total.part(e.rank)))
}

/// Euler class of the complexification of the underlying real bundle of
/// `E` (real rank 2r), oriented as `(-1)^r c_{2r}` so that
/// `e(E)^2 = e(E ⊗ ℂ)`.
pub fn euler_of_complexification(e: &BundleDescriptor) -> Result<CohomElement, CharClassError> {
    e.require(BundleKind::Complex)?;
    let r = e.rank;
    let top = complexification(e)?.total.part(2 * r);
    Ok(if r % 2 == 1 { top.neg() } else { top })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::num::int;

    #[test]
    fn line_bundles_on_projective_space() {
        let ring = CohomRing::projective(5);
        let taut = BundleDescriptor::line(&ring, int(-1));
        let o1 = line_op(&taut, LineOp::Dual).unwrap();
        assert_eq!(o1.c1().unwrap(), int(1));
        let o2 = tensor_with_line(&o1, &o1).unwrap();
        assert_eq!(o2.c1().unwrap(), int(2));
        assert_eq!(line_op(&o1, LineOp::Power(2)).unwrap(), o2);
        assert_eq!(line_op(&line_op(&o2, LineOp::Dual).unwrap(), LineOp::Dual).unwrap(), o2);

        let real = pontryagin_from_chern(&o2).unwrap();
        assert_eq!(real.pontryagin_class(1).to_string(), "4t^2");
        assert_eq!(real.euler().unwrap().to_string(), "2t");
        let e = o2.euler().unwrap();
        assert_eq!(e.mul(&e).unwrap(), euler_of_complexification(&o2).unwrap());
    }

    #[test]
    fn tautological_splitting() {
        let n = 3;
        let ring = CohomRing::projective(2 * n - 1);
        let taut = BundleDescriptor::line(&ring, int(-1));
        let trivial = BundleDescriptor::trivial(&ring, BundleKind::Complex, 2 * n);
        let perp = whitney_quotient(&trivial, &taut).unwrap();
        assert_eq!(whitney_sum(&taut, &perp).unwrap(), trivial);
        let tangent = tensor_with_line(&line_op(&taut, LineOp::Dual).unwrap(), &perp).unwrap();
        let expected = CohomElement::one(&ring).add(&CohomElement::generator(&ring)).unwrap().pow(2 * n);
        assert_eq!(tangent.chern().unwrap(), &expected);
    }

    #[test]
    fn validation() {
        let ring = CohomRing::projective(3);
        let t = CohomElement::generator(&ring);
        assert!(BundleDescriptor::complex(1, t.clone()).is_err());
        let bad = CohomElement::one(&ring).add(&t.pow(2)).unwrap();
        assert!(BundleDescriptor::complex(1, bad.clone()).is_err());
        assert!(BundleDescriptor::real(1, bad, None).is_err());
        let e = BundleDescriptor::trivial(&ring, BundleKind::Real, 2);
        assert!(line_op(&e, LineOp::Dual).is_err());
        let z = BundleDescriptor::trivial(&ring, BundleKind::Complex, 0);
        let l = BundleDescriptor::line(&ring, int(3));
        assert_eq!(whitney_sum(&l, &z).unwrap(), l);
        assert!(whitney_sum(&l, &e).is_err());
    }
}
