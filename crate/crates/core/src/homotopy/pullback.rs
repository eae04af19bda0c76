use std::sync::Arc;

use crate::cartan::{exterior_derivative, DiffForm};
use crate::expr::{Chart, Numeric, Rational, Scalar};
use crate::linalg::Matrix;

use super::HomotopyError;

/// Polynomial map `g: source → target`, one component per target
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    source: Arc<Chart>,
    target: Arc<Chart>,
    comps: Vec<Scalar>,
}

impl PolyMap {
    pub fn new(source: &Arc<Chart>, target: &Arc<Chart>, comps: Vec<Scalar>) -> Result<Self, HomotopyError> {
        if comps.len() != target.dim() {
            return Err(HomotopyError::Map(format!(
                "{} components given for a target of dimension {}",
                comps.len(),
                target.dim()
            )));
        }
        if let Some(c) = comps.iter().find(|c| c.chart() != source) {
            return Err(HomotopyError::Map(format!(
                "component lives on chart {}, expected {}",
                c.chart().name(),
                source.name()
            )));
        }
        Ok(PolyMap {
            source: source.clone(),
            target: target.clone(),
            comps,
        })
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        PolyMap {
            source: chart.clone(),
            target: chart.clone(),
            comps: (0..chart.dim()).map(|i| Scalar::var(chart, i)).collect(),
        }
    }

    /// `x_i ↦ factors[i]·x_i`.
    pub fn scaling(chart: &Arc<Chart>, factors: &[Rational]) -> Self {
        PolyMap {
            source: chart.clone(),
            target: chart.clone(),
            comps: (0..chart.dim()).map(|i| Scalar::var(chart, i).scale(&factors[i])).collect(),
        }
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn comps(&self) -> &[Scalar] {
        &self.comps
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap, HomotopyError> {
        if inner.target != self.source {
            return Err(HomotopyError::Map(format!(
                "cannot compose: {} does not map into {}",
                inner.source.name(),
                self.source.name()
            )));
        }
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose(&inner.comps, &inner.source))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| HomotopyError::Map(e.to_string()))?;
        Ok(PolyMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            comps,
        })
    }

    pub fn eval<T: Numeric>(&self, x: &[T]) -> Vec<T> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    /// `J[i][j] = ∂g_i/∂x_j`.
    pub fn jacobian(&self) -> Matrix<Scalar> {
        self.comps
            .iter()
            .map(|c| (0..self.source.dim()).map(|j| c.partial(j)).collect())
            .collect()
    }

    /// `g^*a`, with `g^*(f dx_I) = (f∘g) dg_{i1} ∧ ... ∧ dg_{ip}`.
    pub fn pullback(&self, a: &DiffForm) -> Result<DiffForm, HomotopyError> {
        if a.chart() != &self.target {
            return Err(HomotopyError::Map(format!(
                "form lives on chart {}, map targets {}",
                a.chart().name(),
                self.target.name()
            )));
        }
        let dg: Vec<DiffForm> = self
            .comps
            .iter()
            .map(|c| exterior_derivative(&DiffForm::scalar(c.clone())))
            .collect();
        let mut out = DiffForm::zero(&self.source, a.degree());
        for (idx, f) in a.comps() {
            let fg = f
                .compose(&self.comps, &self.source)
                .map_err(|e| HomotopyError::Map(e.to_string()))?;
            let mut term = DiffForm::scalar(fg);
            for &i in idx {
                term = term.wedge(&dg[i])?;
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::num::rat;

    #[test]
    fn pullback_examples() {
        let c = Chart::numbered("R2", "x", 2);
        let a = DiffForm::basis(&c, &[0]).unwrap();
        assert_eq!(PolyMap::identity(&c).pullback(&a).unwrap(), a);
        let g = PolyMap::scaling(&c, &[rat(3, 2), rat(1, 1)]);
        assert_eq!(g.pullback(&a).unwrap(), a.scale(&rat(3, 2)));
        // polar-like map (x, y) -> (x y, x^2): d(xy) ^ d(x^2) = -2x^2 dx^dy
        let x = Scalar::var(&c, 0);
        let y = Scalar::var(&c, 1);
        let g = PolyMap::new(&c, &c, vec![&x * &y, x.pow(2)]).unwrap();
        let w = DiffForm::basis(&c, &[0, 1]).unwrap();
        assert_eq!(g.pullback(&w).unwrap(), w.mul_scalar(&x.pow(2).scale(&rat(-2, 1))).unwrap());
    }
}
