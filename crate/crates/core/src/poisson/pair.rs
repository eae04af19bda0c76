use rayon::prelude::*;

use crate::cartan::{contract, exterior_derivative, DiffForm, Multivector};
use crate::expr::{Rational, Scalar};
use crate::linalg::{self, Matrix};

use super::bivector::{bivector_matrix, poisson_check, rank_and_image, PoissonVerdict, RegularBivector, RegularityStatus};
use super::distribution::{involutivity_check, Distribution, InvolutivityVerdict};
use super::{CheckConfig, PoissonError};

/// A form on the leaves of a distribution, stored through an ambient
/// extension. Only contractions with frame vectors of `D` are meaningful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoliatedForm {
    dist: Distribution,
    extension: DiffForm,
}

impl FoliatedForm {
    pub fn new(dist: Distribution, extension: DiffForm) -> Result<Self, PoissonError> {
        if dist.chart() != extension.chart() {
            return Err(PoissonError::ChartMismatch {
                expected: dist.chart().name().to_string(),
                found: extension.chart().name().to_string(),
            });
        }
        Ok(FoliatedForm { dist, extension })
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn extension(&self) -> &DiffForm {
        &self.extension
    }

    pub fn degree(&self) -> usize {
        self.extension.degree()
    }
}

fn wedge_all(vs: &[&Multivector]) -> Result<Multivector, PoissonError> {
    let mut acc = Multivector::scalar(Scalar::one(vs[0].chart()));
    for v in vs {
        acc = acc.wedge(v)?;
    }
    Ok(acc)
}

/// `G_{ab} = ω̃(Y_a, Y_b)`.
pub fn gram_matrix(frame: &[Multivector], omega: &DiffForm) -> Result<Matrix<Scalar>, PoissonError> {
    let k = frame.len();
    let mut g = vec![vec![Scalar::zero(omega.chart()); k]; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let v = contract(&frame[a].wedge(&frame[b])?, omega)?.as_scalar().expect("degree zero");
            g[b][a] = -&v;
            g[a][b] = v;
        }
    }
    Ok(g)
}

/// The leafwise form `ω(π♯ξ, π♯η) = π(ξ, η)` on `D = im π♯`.
///
/// With the certified block (rows J, columns R) the frame is
/// `Y_a = π♯dx_{J[a]}` and `θ^a = Σ_{i∈R} (N^{-1})_{a,i} dx_i`, where
/// `N_{i,a} = π^{J[a], R[i]}`, is dual to it and kills `e_c` for `c ∉ R`.
/// The extension is `Σ_{a<b} π^{J[a] J[b]} θ^a ∧ θ^b`.
pub fn to_pair(rb: &RegularBivector) -> Result<(Distribution, FoliatedForm), PoissonError> {
    let cert = rb.certificate().ok_or_else(|| {
        PoissonError::Unsupported("no rank-sized block of [pi^ij] has constant nonzero determinant".into())
    })?;
    let pi = rb.pi();
    let chart = pi.chart();
    let zero = Scalar::zero(chart);
    let (rows, cols) = (&cert.rows, &cert.cols);
    let r = rows.len();
    let n_mat: Matrix<Scalar> = cols
        .iter()
        .map(|&i| rows.iter().map(|&j| pi.component(&[j, i])).collect())
        .collect();
    let n_inv = linalg::poly_inverse(&n_mat, &zero).expect("certified block is unimodular up to a constant");
    let theta: Vec<DiffForm> = (0..r)
        .map(|a| {
            DiffForm::from_terms(chart, 1, cols.iter().enumerate().map(|(ii, &i)| (vec![i], n_inv[a][ii].clone())))
                .expect("indices in range")
        })
        .collect();
    let mut omega = DiffForm::zero(chart, 2);
    for a in 0..r {
        for b in (a + 1)..r {
            let c = pi.component(&[rows[a], rows[b]]);
            if !c.is_zero() {
                omega = omega.checked_add(&theta[a].wedge(&theta[b])?.mul_scalar(&c)?)?;
            }
        }
    }
    let d = rb.image().clone();
    let form = FoliatedForm::new(d.clone(), omega)?;
    Ok((d, form))
}

/// The unique bivector with `im π♯ ⊆ D` and `ω(π♯ξ, π♯η) = π(ξ, η)`:
/// `π = Σ_{a<b} Q_{ab} Y_a ∧ Y_b` with `Q = -G^{-1}`. Requires the Gram
/// matrix on the frame to have constant nonzero Pfaffian.
pub fn from_pair(omega: &FoliatedForm, cfg: &CheckConfig) -> Result<Multivector, PoissonError> {
    let dist = omega.distribution();
    let chart = dist.chart();
    let zero = Scalar::zero(chart);
    let frame = dist.frame()?;
    if omega.degree() != 2 {
        return Err(PoissonError::DegreeMismatch { expected: 2, found: omega.degree() });
    }
    let g = gram_matrix(&frame, omega.extension())?;
    let pf = linalg::pfaffian(&g, &zero);
    let pts = cfg.probe_points(chart.dim());
    let bad = pts.par_iter().position_first(|p| pf.eval::<Rational>(p) == Rational::from_integer(0.into()));
    if let Some(i) = bad {
        return Err(PoissonError::Degenerate { point: pts[i].clone() });
    }
    let q_neg = linalg::poly_inverse(&g, &zero).ok_or_else(|| {
        PoissonError::Unsupported(format!(
            "leafwise Pfaffian {pf} is not constant; the inverse leaves the polynomial ring"
        ))
    })?;
    let k = frame.len();
    let mut pi = Multivector::zero(chart, 2);
    for a in 0..k {
        for b in (a + 1)..k {
            let q = -&q_neg[a][b];
            if !q.is_zero() {
                pi = pi.checked_add(&frame[a].wedge(&frame[b])?.mul_scalar(&q)?)?;
            }
        }
    }
    Ok(pi)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafwiseVerdict {
    Closed,
    /// Frame indices whose contraction with `dω̃` is nonzero, and its value.
    NotClosed { frame_indices: Vec<usize>, value: Scalar },
}

impl LeafwiseVerdict {
    pub fn is_closed(&self) -> bool {
        matches!(self, LeafwiseVerdict::Closed)
    }
}

/// `ω` is leafwise closed iff `dω̃` contracted with every (p+1)-tuple of
/// frame vectors vanishes.
pub fn leafwise_closed_check(dist: &Distribution, omega: &DiffForm) -> Result<LeafwiseVerdict, PoissonError> {
    if dist.chart() != omega.chart() {
        return Err(PoissonError::ChartMismatch {
            expected: dist.chart().name().to_string(),
            found: omega.chart().name().to_string(),
        });
    }
    let frame = dist.frame()?;
    let d_omega = exterior_derivative(omega);
    let p1 = d_omega.degree();
    if d_omega.is_zero() || p1 > frame.len() {
        return Ok(LeafwiseVerdict::Closed);
    }
    for idx in linalg::subsets(frame.len(), p1) {
        let vs: Vec<&Multivector> = idx.iter().map(|&i| &frame[i]).collect();
        let value = contract(&wedge_all(&vs)?, &d_omega)?.as_scalar().expect("degree zero");
        if !value.is_zero() {
            return Ok(LeafwiseVerdict::NotClosed { frame_indices: idx, value });
        }
    }
    Ok(LeafwiseVerdict::Closed)
}

/// Outcome of a route that may be undecidable in the exact layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route<T> {
    Decided(T),
    Undecidable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegularPoissonVerdict {
    RegularPoisson,
    NotPoisson,
    NotRegular,
    /// Poisson, but some required property could only be sampled.
    Undecided(String),
    /// The Schouten and foliation routes disagree.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularPoissonReport {
    pub regular: Result<RegularBivector, PoissonError>,
    pub schouten: PoissonVerdict,
    pub involutive: Route<InvolutivityVerdict>,
    pub leafwise: Route<LeafwiseVerdict>,
    pub verdict: RegularPoissonVerdict,
}

impl RegularPoissonReport {
    /// `involutive ∧ leafwise-closed`, when decidable.
    pub fn foliation_route(&self) -> Option<bool> {
        match &self.involutive {
            Route::Decided(v) if !v.is_involutive() => Some(false),
            Route::Decided(_) => match &self.leafwise {
                Route::Decided(l) => Some(l.is_closed()),
                Route::Undecidable(_) => None,
            },
            Route::Undecidable(_) => None,
        }
    }
}

fn undecidable<T>(e: PoissonError) -> Route<T> {
    Route::Undecidable(e.to_string())
}

/// Runs the rank, Schouten, Frobenius and leafwise-closedness checks and
/// cross-validates the two characterisations of regular Poisson structures.
pub fn regular_poisson_check(pi: &Multivector, cfg: &CheckConfig) -> Result<RegularPoissonReport, PoissonError> {
    let schouten = poisson_check(pi)?;
    let regular = rank_and_image(pi, cfg);
    let (involutive, leafwise) = match &regular {
        Err(e) => (undecidable(e.clone()), undecidable(e.clone())),
        Ok(rb) => {
            let inv = match involutivity_check(rb.image()) {
                Ok(v) => Route::Decided(v),
                Err(e) => undecidable(e),
            };
            let lw = match to_pair(rb).and_then(|(d, w)| leafwise_closed_check(&d, w.extension())) {
                Ok(v) => Route::Decided(v),
                Err(e) => undecidable(e),
            };
            (inv, lw)
        }
    };
    let mut report = RegularPoissonReport {
        regular,
        schouten,
        involutive,
        leafwise,
        verdict: RegularPoissonVerdict::Inconsistent,
    };
    let route = report.foliation_route();
    report.verdict = match (&report.regular, report.schouten.is_poisson(), route) {
        (Err(PoissonError::NotRegular { .. }), _, _) => RegularPoissonVerdict::NotRegular,
        (Err(e), _, _) => return Err(e.clone()),
        (Ok(_), s, Some(f)) if s != f => RegularPoissonVerdict::Inconsistent,
        (Ok(_), false, _) => RegularPoissonVerdict::NotPoisson,
        (Ok(rb), true, _) if rb.status() == RegularityStatus::Sampled => {
            RegularPoissonVerdict::Undecided("constant rank holds on probe points only".into())
        }
        (Ok(_), true, _) => RegularPoissonVerdict::RegularPoisson,
    };
    Ok(report)
}

/// Symbolic check of `ω̃(π♯dx_i, π♯dx_j) = π^{ij}` for all i < j.
pub fn defining_identity_holds(pi: &Multivector, omega: &DiffForm) -> Result<bool, PoissonError> {
    let chart = pi.chart();
    let m = bivector_matrix(pi);
    let sharps = (0..chart.dim())
        .map(|j| super::sharp_map(pi, &DiffForm::basis(chart, &[j]).expect("in range")))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..chart.dim() {
        for j in (i + 1)..chart.dim() {
            let v = contract(&sharps[i].wedge(&sharps[j])?, omega)?.as_scalar().expect("degree zero");
            if v != m[i][j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
