use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use crate::expr::{Chart, Numeric, Rational, Scalar};

use super::CartanError;

/// Marker distinguishing differential forms from multivector fields.
pub trait Kind: Clone + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    /// Prefix of a basis element in the DSL (`dx` or `e`).
    const BASIS: &'static str;
    const NAME: &'static str;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VectorKind;

impl Kind for FormKind {
    const BASIS: &'static str = "dx";
    const NAME: &'static str = "form";
}

impl Kind for VectorKind {
    const BASIS: &'static str = "e";
    const NAME: &'static str = "multivector";
}

/// Alternating tensor with polynomial coefficients, stored on strictly
/// increasing index tuples (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graded<K: Kind> {
    chart: Arc<Chart>,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Scalar>,
    _kind: PhantomData<K>,
}

pub type DiffForm = Graded<FormKind>;
pub type Multivector = Graded<VectorKind>;

/// Sorts `idx` in place and returns the permutation sign, or `None` when an
/// index repeats (the alternating product vanishes).
pub(crate) fn sort_with_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl<K: Kind> Graded<K> {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        Graded {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// Degree-0 element.
    pub fn scalar(s: Scalar) -> Self {
        let mut out = Self::zero(s.chart(), 0);
        if !s.is_zero() {
            out.comps.insert(Vec::new(), s);
        }
        out
    }

    /// The basis element on the given (0-based, any order) indices.
    pub fn basis(chart: &Arc<Chart>, indices: &[usize]) -> Result<Self, CartanError> {
        let one = Scalar::one(chart);
        Self::from_terms(chart, indices.len(), [(indices.to_vec(), one)])
    }

    /// Accumulates terms on arbitrary index tuples, applying alternation.
    pub fn from_terms<I>(chart: &Arc<Chart>, degree: usize, terms: I) -> Result<Self, CartanError>
    where
        I: IntoIterator<Item = (Vec<usize>, Scalar)>,
    {
        let mut out = Self::zero(chart, degree);
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return Err(CartanError::DegreeMismatch {
                    expected: degree,
                    found: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= chart.dim()) {
                return Err(CartanError::IndexOutOfRange {
                    index: bad + 1,
                    dim: chart.dim(),
                });
            }
            if c.chart() != chart {
                return Err(CartanError::ChartMismatch {
                    left: chart.name().to_string(),
                    right: c.chart().name().to_string(),
                });
            }
            if let Some(sign) = sort_with_sign(&mut idx) {
                let c = if sign < 0 { -&c } else { c };
                out.accumulate(idx, c);
            }
        }
        Ok(out)
    }

    fn accumulate(&mut self, idx: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.comps.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.comps.iter()
    }

    pub fn num_comps(&self) -> usize {
        self.comps.len()
    }

    /// Component on an arbitrary index tuple, with alternation sign.
    pub fn component(&self, indices: &[usize]) -> Scalar {
        let mut idx = indices.to_vec();
        match sort_with_sign(&mut idx) {
            None => Scalar::zero(&self.chart),
            Some(sign) => match self.comps.get(&idx) {
                None => Scalar::zero(&self.chart),
                Some(c) if sign < 0 => -c,
                Some(c) => c.clone(),
            },
        }
    }

    /// For a degree-0 element, the underlying scalar.
    pub fn as_scalar(&self) -> Option<Scalar> {
        (self.degree == 0).then(|| self.component(&[]))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<(), CartanError> {
        if self.chart != other.chart {
            return Err(CartanError::ChartMismatch {
                left: self.chart.name().to_string(),
                right: other.chart.name().to_string(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CartanError> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(CartanError::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        let mut out = self.clone();
        for (i, c) in &other.comps {
            out.accumulate(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CartanError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_coeffs(|s| s.scale(c))
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_scalar(&self, f: &Scalar) -> Result<Self, CartanError> {
        if f.chart() != &self.chart {
            return Err(CartanError::ChartMismatch {
                left: self.chart.name().to_string(),
                right: f.chart().name().to_string(),
            });
        }
        Ok(self.map_coeffs(|c| c * f))
    }

    fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (i, c) in &self.comps {
            out.accumulate(i.clone(), f(c));
        }
        out
    }

    /// Graded-commutative product. When the total degree exceeds the chart
    /// dimension the result is the zero element of that degree.
    pub fn wedge(&self, other: &Self) -> Result<Self, CartanError> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(&self.chart, degree);
        if degree > self.dim() {
            return Ok(out);
        }
        for (ia, ca) in &self.comps {
            for (ib, cb) in &other.comps {
                let mut idx: Vec<usize> = ia.iter().chain(ib).copied().collect();
                if let Some(sign) = sort_with_sign(&mut idx) {
                    let prod = ca * cb;
                    out.accumulate(idx, if sign < 0 { -&prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// Dense coefficient values at a point, in storage order of `index_tuples`.
    pub fn eval_at<T: Numeric>(&self, point: &[T]) -> BTreeMap<Vec<usize>, T> {
        self.comps
            .iter()
            .map(|(i, c)| (i.clone(), c.eval(point)))
            .collect()
    }

    /// Applies `f` to each coefficient, moving the result onto `chart`.
    pub fn map_to_chart(
        &self,
        chart: &Arc<Chart>,
        f: impl Fn(&Scalar) -> Result<Scalar, CartanError>,
    ) -> Result<Self, CartanError> {
        let mut out = Self::zero(chart, self.degree);
        for (i, c) in &self.comps {
            out.accumulate(i.clone(), f(c)?);
        }
        Ok(out)
    }
}

impl<K: Kind> fmt::Display for Graded<K> {
    /// DSL form: `(poly)*dx1^dx2 + ...`. The zero element keeps its degree by
    /// printing a zero coefficient on the first basis tuple.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = |idx: &[usize]| -> String {
            idx.iter()
                .map(|i| format!("{}{}", K::BASIS, i + 1))
                .collect::<Vec<_>>()
                .join("^")
        };
        if self.comps.is_empty() {
            if self.degree == 0 {
                return write!(f, "(0)");
            }
            let idx: Vec<usize> = (0..self.degree).collect();
            return write!(f, "(0)*{}", basis(&idx));
        }
        let mut first = true;
        for (idx, c) in &self.comps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if idx.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", basis(idx))?;
            }
        }
        Ok(())
    }
}
