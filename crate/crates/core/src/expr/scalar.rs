//! Multivariate polynomials with exact rational coefficients over a chart.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic, so iteration order (and hence printing) is
//! deterministic. Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::num::{fmt_rational, Numeric, Rational};
use super::{Chart, ExprError};

/// Exponent vector, one entry per chart coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial coefficient function on a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Scalar {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        Scalar {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::constant(chart, Rational::one())
    }

    pub fn constant(chart: &Arc<Chart>, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(chart.dim()), c);
        }
        Scalar {
            chart: chart.clone(),
            terms,
        }
    }

    pub fn var(chart: &Arc<Chart>, i: usize) -> Self {
        assert!(i < chart.dim(), "coordinate index {i} out of range");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(chart.dim(), i), Rational::one());
        Scalar {
            chart: chart.clone(),
            terms,
        }
    }

    pub fn var_named(chart: &Arc<Chart>, name: &str) -> Result<Self, ExprError> {
        let i = chart
            .index_of(name)
            .ok_or_else(|| ExprError::UnknownCoordinate {
                chart: chart.name().to_string(),
                coord: name.to_string(),
            })?;
        Ok(Self::var(chart, i))
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(chart: &Arc<Chart>, terms: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut out = Scalar::zero(chart);
        for (e, c) in terms {
            if e.len() != chart.dim() {
                return Err(ExprError::ExponentLength {
                    expected: chart.dim(),
                    found: e.len(),
                });
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    fn check_chart(&self, other: &Scalar) -> Result<(), ExprError> {
        if self.chart == other.chart {
            Ok(())
        } else {
            Err(ExprError::ChartMismatch {
                left: self.chart.name().to_string(),
                right: other.chart.name().to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ExprError> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ExprError> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ExprError> {
        self.check_chart(other)?;
        let mut out = Scalar::zero(&self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero(&self.chart);
        }
        Scalar {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one(&self.chart);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative along coordinate `i`.
    pub fn partial(&self, i: usize) -> Scalar {
        let mut out = Scalar::zero(&self.chart);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut ex = m.0.clone();
            ex[i] -= 1;
            out.add_term(Monomial(ex), c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn partial_by_name(&self, coord: &str) -> Result<Scalar, ExprError> {
        let i = self
            .chart
            .index_of(coord)
            .ok_or_else(|| ExprError::UnknownCoordinate {
                chart: self.chart.name().to_string(),
                coord: coord.to_string(),
            })?;
        Ok(self.partial(i))
    }

    /// Evaluates at a point given in any [`Numeric`] type.
    pub fn eval<T: Numeric>(&self, point: &[T]) -> T {
        debug_assert_eq!(point.len(), self.chart.dim());
        let mut acc = T::zero_value();
        for (m, c) in &self.terms {
            let mut v = T::from_rational(c);
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = v * x.powu(e);
                }
            }
            acc = acc + v;
        }
        acc
    }

    /// Substitutes `subs[i]` for the i-th coordinate; the result lives on the
    /// chart of the substituted polynomials.
    pub fn compose(&self, subs: &[Scalar], target: &Arc<Chart>) -> Result<Scalar, ExprError> {
        if subs.len() != self.chart.dim() {
            return Err(ExprError::ExponentLength {
                expected: self.chart.dim(),
                found: subs.len(),
            });
        }
        if let Some(bad) = subs.iter().find(|s| &s.chart != target) {
            return Err(ExprError::ChartMismatch {
                left: target.name().to_string(),
                right: bad.chart.name().to_string(),
            });
        }
        // cache powers of each substitution
        let mut powers: Vec<Vec<Scalar>> = subs.iter().map(|s| vec![Scalar::one(target), s.clone()]).collect();
        let mut out = Scalar::zero(target);
        for (m, c) in &self.terms {
            let mut v = Scalar::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                v = &v * &powers[i][e as usize];
            }
            out = &out + &v;
        }
        Ok(out)
    }

    /// Same polynomial viewed on another chart of equal dimension.
    pub fn rebase(&self, chart: &Arc<Chart>) -> Result<Scalar, ExprError> {
        if chart.dim() != self.chart.dim() {
            return Err(ExprError::ChartMismatch {
                left: self.chart.name().to_string(),
                right: chart.name().to_string(),
            });
        }
        Ok(Scalar {
            chart: chart.clone(),
            terms: self.terms.clone(),
        })
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    /// Panics on chart mismatch; use [`Scalar::checked_add`] to get an error.
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("scalar chart mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.checked_sub(rhs).expect("scalar chart mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("scalar chart mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Scalar {
    /// Highest monomial first, e.g. `x1^2*x2 - 1/2*x3 + 4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.chart.coord(i).to_string()
                    } else {
                        format!("{}^{}", self.chart.coord(i), e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::num::{int, rat};

    fn r2() -> Arc<Chart> {
        Chart::new("R2", vec!["x".into(), "y".into()]).unwrap()
    }

    #[test]
    fn sum_and_product() {
        let c = r2();
        let x = Scalar::var(&c, 0);
        let y = Scalar::var(&c, 1);
        let one = Scalar::one(&c);
        assert_eq!(&(&x + &one) + &(&x - &one), x.scale(&int(2)));
        let prod = &(&x + &y) * &(&x - &y);
        assert_eq!(prod, &x.pow(2) - &y.pow(2));
        assert_eq!(prod.to_string(), "x^2 - y^2");
    }

    #[test]
    fn derivatives() {
        let c = r2();
        let x = Scalar::var(&c, 0);
        let y = Scalar::var(&c, 1);
        let p = &x.pow(2) * &y;
        assert_eq!(p.partial(0), (&x * &y).scale(&int(2)));
        assert!(x.pow(2).partial(1).is_zero());
        assert!(p.partial_by_name("w").is_err());
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        let a = Scalar::one(&r2());
        let b = Scalar::one(&Chart::numbered("Q", "q", 2));
        assert!(matches!(a.checked_add(&b), Err(ExprError::ChartMismatch { .. })));
    }

    #[test]
    fn printing_and_constants() {
        let c = r2();
        let p = Scalar::from_terms(&c, vec![(vec![0, 0], rat(-1, 2)), (vec![1, 0], int(3))]).unwrap();
        assert_eq!(p.to_string(), "3*x - 1/2");
        assert_eq!(Scalar::constant(&c, rat(2, 3)).as_constant(), Some(rat(2, 3)));
        assert_eq!(p.as_constant(), None);
        assert_eq!(Scalar::zero(&c).to_string(), "0");
    }

    #[test]
    fn evaluation_and_composition() {
        let c = r2();
        let x = Scalar::var(&c, 0);
        let y = Scalar::var(&c, 1);
        let p = &(&x * &y) + &Scalar::one(&c);
        assert_eq!(p.eval(&[int(2), rat(1, 2)]), int(2));
        assert_eq!(p.eval(&[2.0, 0.5]), 2.0);
        // x -> x + y, y -> y
        let q = p.compose(&[&x + &y, y.clone()], &c).unwrap();
        assert_eq!(q, &(&(&x * &y) + &y.pow(2)) + &Scalar::one(&c));
    }
}
