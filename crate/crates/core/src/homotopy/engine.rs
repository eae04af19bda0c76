use num_traits::{One, Zero};

use crate::cartan::DiffForm;
use crate::expr::num::{int, rat};
use crate::expr::{Numeric, Rational, Scalar};
use crate::linalg::{self, RingElem};

use super::model::{Cutoff, CutoffValue};
use super::scenario::Scenario;
use super::HomotopyError;

/// Scalars the path can be evaluated in. Exact rationals cannot represent
/// the cutoff inside its collar, so evaluation there yields `None`.
pub trait PathNum: Numeric + PartialOrd + RingElem {
    fn collar(v: f64) -> Option<Self>;
}

impl PathNum for Rational {
    fn collar(_: f64) -> Option<Self> {
        None
    }
}

impl PathNum for f64 {
    fn collar(v: f64) -> Option<Self> {
        Some(v)
    }
}

/// Coefficients of a 2-form in the order of `linalg::subsets(n, 2)`.
pub(crate) fn dense_form(a: &DiffForm) -> Vec<Scalar> {
    linalg::subsets(a.dim(), 2)
        .iter()
        .map(|idx| a.component(idx))
        .collect()
}

/// Pfaffian of the Gram matrix `G_ab = w(Y_a, Y_b)` of a dense 2-form on a
/// frame; zero when the frame has odd length.
pub(crate) fn leaf_pfaffian<T: Numeric + RingElem>(frame: &[Vec<T>], w: &[T], n: usize) -> T {
    let g = gram(frame, w, n);
    linalg::pfaffian(&g, &T::zero_value())
}

pub(crate) fn gram<T: Numeric>(frame: &[Vec<T>], w: &[T], n: usize) -> Vec<Vec<T>> {
    let idx = linalg::subsets(n, 2);
    let k = frame.len();
    let mut g = vec![vec![T::zero_value(); k]; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let mut s = T::zero_value();
            for (c, ij) in w.iter().zip(&idx) {
                if c.is_exact_zero() {
                    continue;
                }
                let (i, j) = (ij[0], ij[1]);
                let m = frame[a][i].clone() * frame[b][j].clone() - frame[a][j].clone() * frame[b][i].clone();
                s = s + c.clone() * m;
            }
            g[b][a] = -s.clone();
            g[a][b] = s;
        }
    }
    g
}

/// The concatenated path `t ↦ (F(t), ω(t))`:
///
/// - `t ∈ [0, ½]`: `F(t) = F₀`, `ω(t) = ω₀ + 2t(φ - ω₀)χ`;
/// - `t ∈ [½, 1]`: `F(t) = g_s^*F₀`, `ω(t) = g_s^*ω(½)` with `s = 2t - 1`.
///
/// All values are the polynomial parts; the scenario density multiplies
/// them and is invariant under the compression.
pub struct Homotopy<'a> {
    sc: &'a Scenario,
    cutoff: Cutoff,
    idx2: Vec<Vec<usize>>,
    omega0: Vec<Scalar>,
    phi: Vec<Scalar>,
    coframe: Vec<Vec<Scalar>>,
}

impl<'a> Homotopy<'a> {
    pub fn new(sc: &'a Scenario) -> Self {
        let n = sc.dim();
        Homotopy {
            sc,
            cutoff: Cutoff::new(sc.model.rho()),
            idx2: linalg::subsets(n, 2),
            omega0: dense_form(&sc.omega0),
            phi: dense_form(&sc.phi),
            coframe: sc
                .coframe
                .iter()
                .map(|a| (0..n).map(|i| a.component(&[i])).collect())
                .collect(),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        self.sc
    }

    /// Index order of the dense 2-form values.
    pub fn indices(&self) -> &[Vec<usize>] {
        &self.idx2
    }

    pub fn cutoff_at<T: PathNum>(&self, x: &[T]) -> CutoffValue {
        self.cutoff.eval(&self.sc.model.dist2(x))
    }

    /// `ω(t)` for `t ∈ [0, ½]`.
    pub fn stage_one<T: PathNum>(&self, t: &Rational, x: &[T]) -> Option<Vec<T>> {
        let two_t = t * int(2);
        let c = if two_t.is_zero() {
            T::zero_value()
        } else {
            match self.cutoff_at(x) {
                CutoffValue::Zero => T::zero_value(),
                CutoffValue::One => T::from_rational(&two_t),
                CutoffValue::Collar(v) => T::collar(two_t.as_f64() * v)?,
            }
        };
        Some(
            self.omega0
                .iter()
                .zip(&self.phi)
                .map(|(w, p)| {
                    let w = w.eval(x);
                    if c.is_exact_zero() {
                        w
                    } else {
                        w.clone() + c.clone() * (p.eval(x) - w)
                    }
                })
                .collect(),
        )
    }

    /// `ω(t)` for `t ∈ [½, 1]`: the stage-one endpoint at `g_s(x)`, times the
    /// 2×2 minors of the diagonal Jacobian.
    pub fn stage_two<T: PathNum>(&self, t: &Rational, x: &[T]) -> Option<Vec<T>> {
        let s = t * int(2) - Rational::one();
        let f = self.sc.model.factors(&s);
        let y: Vec<T> = x.iter().zip(&f).map(|(v, l)| v.clone() * T::from_rational(l)).collect();
        let w = self.stage_one(&rat(1, 2), &y)?;
        Some(
            w.into_iter()
                .zip(&self.idx2)
                .map(|(c, ij)| c * T::from_rational(&(&f[ij[0]] * &f[ij[1]])))
                .collect(),
        )
    }

    pub fn omega<T: PathNum>(&self, t: &Rational, x: &[T]) -> Option<Vec<T>> {
        if *t <= rat(1, 2) {
            self.stage_one(t, x)
        } else {
            self.stage_two(t, x)
        }
    }

    /// Rows of the coframe of `F(t)` at `x`.
    pub fn coframe<T: PathNum>(&self, t: &Rational, x: &[T]) -> Vec<Vec<T>> {
        if *t <= rat(1, 2) {
            return self
                .coframe
                .iter()
                .map(|r| r.iter().map(|s| s.eval(x)).collect())
                .collect();
        }
        self.pulled_coframe(&(t * int(2) - Rational::one()), x)
    }

    /// Rows of `g_s^*F₀` at `x`.
    pub fn pulled_coframe<T: PathNum>(&self, s: &Rational, x: &[T]) -> Vec<Vec<T>> {
        let f = self.sc.model.factors(s);
        let y: Vec<T> = x.iter().zip(&f).map(|(v, l)| v.clone() * T::from_rational(l)).collect();
        self.coframe
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&f)
                    .map(|(a, l)| a.eval(&y) * T::from_rational(l))
                    .collect()
            })
            .collect()
    }

    /// Leafwise pfaffian of the density-weighted `ω(t)` on the reduced
    /// kernel frame of `F(t)`, together with that frame.
    pub fn leaf_pfaffian(&self, t: &Rational, x: &[f64]) -> (f64, Vec<Vec<f64>>, Vec<f64>) {
        let n = self.sc.dim();
        let d = self.sc.density.value(x);
        let w: Vec<f64> = self
            .omega(t, x)
            .expect("f64 evaluation is total")
            .into_iter()
            .map(|c| c * d)
            .collect();
        let frame = linalg::kernel_f64(&self.coframe(t, x), n, 1e-12);
        (leaf_pfaffian(&frame, &w, n), frame, w)
    }

    /// Symbolic `ω(t)` on a cutoff plateau.
    pub fn stage_one_symbolic(&self, t: &Rational, plateau: &CutoffValue) -> Result<DiffForm, HomotopyError> {
        let sc = self.sc;
        match plateau {
            CutoffValue::Zero => Ok(sc.omega0.clone()),
            CutoffValue::One => Ok(sc.omega0.checked_add(&sc.phi.checked_sub(&sc.omega0)?.scale(&(t * int(2))))?),
            CutoffValue::Collar(_) => Err(HomotopyError::Map("the collar has no symbolic value".to_string())),
        }
    }

    /// `ω(1) = g_1^*φ` on the region `g_1` maps into `U_{ρ/2}`.
    pub fn omega_one_symbolic(&self) -> Result<DiffForm, HomotopyError> {
        self.sc.model.compression(&Rational::one()).pullback(&self.sc.phi)
    }
}
