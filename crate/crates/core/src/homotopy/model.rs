use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::expr::num::{int, rat};
use crate::expr::{Chart, ManifoldSpec, Numeric, Rational};

use super::pullback::PolyMap;
use super::HomotopyError;

/// An open model manifold in one chart, its core `A`, and the radial
/// compression `g_s` that scales the coordinates normal to `A` by
/// `λ(s) = 1 - s + s·λ₁`.
///
/// - euclidean n: `A` is the origin.
/// - sphere-minus-point n: stereographic chart centred at the antipode of
///   the removed point; `A` is that antipode.
/// - product-line B: last coordinate is the line factor; `A = B × {0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelManifold {
    spec: ManifoldSpec,
    chart: Arc<Chart>,
    normal: Vec<usize>,
    rho: Rational,
    lambda1: Rational,
}

impl ModelManifold {
    /// `box_bound` bounds the absolute value of every coordinate the engine
    /// will evaluate at (grid box and probe points); `λ₁` is chosen so that
    /// `g_1` maps that cube into `U_{ρ/2}`.
    pub fn new(spec: &ManifoldSpec, chart: &Arc<Chart>, rho: &Rational, box_bound: &Rational) -> Result<Self, HomotopyError> {
        if spec.dim() != chart.dim() {
            return Err(HomotopyError::invalid(
                "manifold dimension does not match chart",
                format!("{spec} has dimension {}, chart {} has {}", spec.dim(), chart.name(), chart.dim()),
            ));
        }
        if !rho.is_positive() {
            return Err(HomotopyError::invalid("rho not positive", format!("rho = {rho}")));
        }
        let n = chart.dim();
        let normal: Vec<usize> = match spec {
            ManifoldSpec::Euclidean(_) | ManifoldSpec::SphereMinusPoint(_) => (0..n).collect(),
            ManifoldSpec::ProductWithLine(_) => vec![n - 1],
            ManifoldSpec::Sphere(_) => {
                return Err(HomotopyError::invalid(
                    "manifold not open",
                    format!("{spec} is closed and has no compression"),
                ))
            }
        };
        let m = box_bound.abs().max(int(2));
        let lambda1 = rho / (int(4) * int(normal.len() as i64) * m);
        Ok(ModelManifold {
            spec: spec.clone(),
            chart: chart.clone(),
            normal,
            rho: rho.clone(),
            lambda1,
        })
    }

    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn lambda1(&self) -> &Rational {
        &self.lambda1
    }

    /// Coordinates normal to the core, the ones the compression scales.
    pub fn normal_coords(&self) -> &[usize] {
        &self.normal
    }

    /// Squared distance to the core in chart coordinates.
    pub fn dist2<T: Numeric>(&self, x: &[T]) -> T {
        self.normal
            .iter()
            .fold(T::zero_value(), |acc, &i| acc + x[i].clone() * x[i].clone())
    }

    pub fn in_u(&self, x: &[Rational], radius: &Rational) -> bool {
        self.dist2(x) < radius * radius
    }

    pub fn lambda(&self, s: &Rational) -> Rational {
        Rational::one() - s + s * &self.lambda1
    }

    /// Per-coordinate scale factors of `g_s`.
    pub fn factors(&self, s: &Rational) -> Vec<Rational> {
        let l = self.lambda(s);
        (0..self.chart.dim())
            .map(|i| if self.normal.contains(&i) { l.clone() } else { Rational::one() })
            .collect()
    }

    pub fn compression(&self, s: &Rational) -> PolyMap {
        PolyMap::scaling(&self.chart, &self.factors(s))
    }

    /// Projection onto the core.
    pub fn core_point(&self, x: &[Rational]) -> Vec<Rational> {
        let mut p = x.to_vec();
        for &i in &self.normal {
            p[i] = Rational::zero();
        }
        p
    }
}

/// `χ` as a function of the squared distance `r²` to the core: 1 on
/// `r < ρ/2`, 0 on `r >= ρ`, and a smooth step in between.
#[derive(Debug, Clone, PartialEq)]
pub enum CutoffValue {
    One,
    Zero,
    Collar(f64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cutoff {
    rho: Rational,
}

impl Cutoff {
    pub fn new(rho: &Rational) -> Self {
        Cutoff { rho: rho.clone() }
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    /// Plateau tests are done in `T`, exactly for rationals.
    pub fn eval<T: Numeric + PartialOrd>(&self, r2: &T) -> CutoffValue {
        let outer = &self.rho * &self.rho;
        let inner = &outer / int(4);
        if *r2 <= T::from_rational(&inner) {
            CutoffValue::One
        } else if *r2 >= T::from_rational(&outer) {
            CutoffValue::Zero
        } else {
            let o = outer.as_f64();
            let i = inner.as_f64();
            CutoffValue::Collar(smooth_step((o - r2.as_f64()) / (o - i)))
        }
    }
}

fn flat(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth monotone step from 0 (x <= 0) to 1 (x >= 1), flat at both ends.
pub fn smooth_step(x: f64) -> f64 {
    let a = flat(x);
    let b = flat(1.0 - x);
    if a + b == 0.0 {
        return if x >= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Reparameterization with `σ' = 0` at 0, ½ and 1: the quintic smoothstep
/// `6x⁵ - 15x⁴ + 10x³` on each half.
pub fn sigma(tau: &Rational) -> Rational {
    let half = rat(1, 2);
    let step = |x: Rational| -> Rational {
        let x3 = &x * &x * &x;
        &x3 * (int(6) * &x * &x - int(15) * &x + int(10))
    };
    if *tau <= half {
        &half * step(tau * int(2))
    } else {
        &half + &half * step(tau * int(2) - int(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_fixes_junctions() {
        assert_eq!(sigma(&rat(0, 1)), rat(0, 1));
        assert_eq!(sigma(&rat(1, 2)), rat(1, 2));
        assert_eq!(sigma(&rat(1, 1)), rat(1, 1));
        assert_eq!(sigma(&rat(1, 4)), rat(1, 4));
        // one-sided difference quotients shrink quadratically near 0
        let h = rat(1, 1000);
        assert!(sigma(&h) / &h < rat(1, 10000));
    }

    #[test]
    fn cutoff_plateaus() {
        let c = Cutoff::new(&rat(1, 2));
        assert_eq!(c.eval(&rat(1, 16)), CutoffValue::One);
        assert_eq!(c.eval(&rat(1, 4)), CutoffValue::Zero);
        match c.eval(&rat(1, 8)) {
            CutoffValue::Collar(v) => assert!(v > 0.0 && v < 1.0),
            other => panic!("{other:?}"),
        }
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn compression_reaches_half_neighbourhood() {
        let c = Chart::numbered("R3", "x", 3);
        let m = ModelManifold::new(&ManifoldSpec::Euclidean(3), &c, &rat(1, 2), &int(1)).unwrap();
        assert_eq!(m.compression(&rat(0, 1)), PolyMap::identity(&c));
        let g1 = m.compression(&rat(1, 1));
        let corner = vec![int(-2), int(2), int(2)];
        assert!(m.in_u(&g1.eval(&corner), &rat(1, 4)));
        assert!(ModelManifold::new(&ManifoldSpec::Sphere(3), &c, &rat(1, 2), &int(1)).is_err());
    }
}
