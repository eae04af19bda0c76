use std::sync::Arc;

use rayon::prelude::*;

use crate::cartan::{exterior_derivative, DiffForm, Multivector};
use crate::expr::{Chart, Rational, Scalar};
use crate::linalg::{self, Matrix};

use super::{CheckConfig, PoissonError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Presentation {
    Frame(Vec<Multivector>),
    /// `D` is the common kernel of these 1-forms.
    Coframe(Vec<DiffForm>),
}

/// A subbundle of the tangent bundle of one chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    chart: Arc<Chart>,
    rank: usize,
    presentation: Presentation,
}

pub(crate) fn eval_matrix(m: &Matrix<Scalar>, point: &[Rational]) -> Matrix<Rational> {
    m.iter().map(|row| row.iter().map(|s| s.eval(point)).collect()).collect()
}

/// `M[i][a]` is the `e_i` component of the a-th vector.
pub(crate) fn frame_matrix(chart: &Arc<Chart>, vs: &[Multivector]) -> Matrix<Scalar> {
    (0..chart.dim())
        .map(|i| vs.iter().map(|v| v.component(&[i])).collect())
        .collect()
}

/// `A[s][i]` is the `dx_i` coefficient of the s-th form.
pub(crate) fn coframe_matrix(chart: &Arc<Chart>, fs: &[DiffForm]) -> Matrix<Scalar> {
    fs.iter()
        .map(|f| (0..chart.dim()).map(|i| f.component(&[i])).collect())
        .collect()
}

/// First probe point where the rank of `m` differs from `expected`.
fn rank_failure(m: &Matrix<Scalar>, expected: usize, cfg: &CheckConfig, dim: usize) -> Option<(Vec<Rational>, usize)> {
    let pts = cfg.probe_points(dim);
    let ranks: Vec<usize> = pts
        .par_iter()
        .map(|p| linalg::rank_exact(&eval_matrix(m, p)))
        .collect();
    ranks
        .iter()
        .position(|&r| r != expected)
        .map(|i| (pts[i].clone(), ranks[i]))
}

/// A k×k minor of the given rows (k = number of columns) whose determinant
/// is a nonzero constant, with the inverse of that block.
pub(crate) fn constant_row_minor(m: &Matrix<Scalar>, zero: &Scalar) -> Option<(Vec<usize>, Matrix<Scalar>)> {
    let n = m.len();
    let k = m.first().map_or(0, |r| r.len());
    let cols: Vec<usize> = (0..k).collect();
    linalg::subsets(n, k).into_iter().find_map(|rows| {
        let block = linalg::submatrix(m, &rows, &cols);
        linalg::poly_inverse(&block, zero).map(|inv| (rows, inv))
    })
}

fn transpose<T: Clone>(m: &Matrix<T>) -> Matrix<T> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

impl Distribution {
    /// Span of the given vector fields, which must be independent at every
    /// probe point.
    pub fn from_frame(chart: &Arc<Chart>, frame: Vec<Multivector>, cfg: &CheckConfig) -> Result<Self, PoissonError> {
        for v in &frame {
            check_member(chart, v.chart(), v.degree())?;
        }
        let k = frame.len();
        if k > 0 {
            if let Some((point, found)) = rank_failure(&frame_matrix(chart, &frame), k, cfg, chart.dim()) {
                return Err(PoissonError::RankDeficient { expected: k, found, point });
            }
        }
        Ok(Distribution {
            chart: chart.clone(),
            rank: k,
            presentation: Presentation::Frame(frame),
        })
    }

    /// Common kernel of the given 1-forms, which must be independent at
    /// every probe point.
    pub fn from_coframe(chart: &Arc<Chart>, coframe: Vec<DiffForm>, cfg: &CheckConfig) -> Result<Self, PoissonError> {
        for f in &coframe {
            check_member(chart, f.chart(), f.degree())?;
        }
        let q = coframe.len();
        if q > chart.dim() {
            return Err(PoissonError::RankDeficient {
                expected: q,
                found: chart.dim(),
                point: vec![],
            });
        }
        if q > 0 {
            if let Some((point, found)) = rank_failure(&coframe_matrix(chart, &coframe), q, cfg, chart.dim()) {
                return Err(PoissonError::RankDeficient { expected: q, found, point });
            }
        }
        Ok(Distribution {
            chart: chart.clone(),
            rank: chart.dim() - q,
            presentation: Presentation::Coframe(coframe),
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn codim(&self) -> usize {
        self.chart.dim() - self.rank
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// A polynomial frame. From a coframe this needs a q×q minor of constant
    /// nonzero determinant; the frame is then `e_f - Σ_s (A_S^{-1} A_f)_s e_s`
    /// over the remaining coordinates f.
    pub fn frame(&self) -> Result<Vec<Multivector>, PoissonError> {
        let forms = match &self.presentation {
            Presentation::Frame(v) => return Ok(v.clone()),
            Presentation::Coframe(f) => f,
        };
        let chart = &self.chart;
        let zero = Scalar::zero(chart);
        if forms.is_empty() {
            return Ok((0..chart.dim())
                .map(|i| Multivector::basis(chart, &[i]).expect("in range"))
                .collect());
        }
        let a = coframe_matrix(chart, forms);
        let (cols, inv_t) = constant_row_minor(&transpose(&a), &zero).ok_or_else(|| {
            PoissonError::Unsupported("no coordinate block of the coframe has constant nonzero determinant".into())
        })?;
        // inv_t inverts A_S^T; A_S^{-1} = inv_t^T
        let inv = transpose(&inv_t);
        let mut out = Vec::new();
        for f in (0..chart.dim()).filter(|c| !cols.contains(c)) {
            let mut terms = vec![(vec![f], Scalar::one(chart))];
            for (si, &s) in cols.iter().enumerate() {
                let mut c = zero.clone();
                for (r, row) in a.iter().enumerate() {
                    c = &c + &(&inv[si][r] * &row[f]);
                }
                terms.push((vec![s], -&c));
            }
            out.push(Multivector::from_terms(chart, 1, terms)?);
        }
        Ok(out)
    }

    /// A polynomial annihilating coframe. From a frame this needs a k×k
    /// minor of constant nonzero determinant on rows R; then
    /// `α_c = dx_c - Σ_{i∈R} (P N^{-1})_{ci} dx_i` for the other coordinates c.
    pub fn coframe(&self) -> Result<Vec<DiffForm>, PoissonError> {
        let vs = match &self.presentation {
            Presentation::Coframe(f) => return Ok(f.clone()),
            Presentation::Frame(v) => v,
        };
        let chart = &self.chart;
        let zero = Scalar::zero(chart);
        if vs.is_empty() {
            return Ok((0..chart.dim())
                .map(|i| DiffForm::basis(chart, &[i]).expect("in range"))
                .collect());
        }
        let m = frame_matrix(chart, vs);
        let (rows, inv) = constant_row_minor(&m, &zero).ok_or_else(|| {
            PoissonError::Unsupported("no coordinate block of the frame has constant nonzero determinant".into())
        })?;
        let mut out = Vec::new();
        for c in (0..chart.dim()).filter(|i| !rows.contains(i)) {
            let mut terms = vec![(vec![c], Scalar::one(chart))];
            for (ii, &i) in rows.iter().enumerate() {
                // (P N^{-1})_{c, ii} = Σ_a M[c][a] inv[a][ii]
                let mut v = zero.clone();
                for (a, mca) in m[c].iter().enumerate() {
                    v = &v + &(mca * &inv[a][ii]);
                }
                terms.push((vec![i], -&v));
            }
            out.push(DiffForm::from_terms(chart, 1, terms)?);
        }
        Ok(out)
    }
}

fn check_member(chart: &Arc<Chart>, other: &Arc<Chart>, degree: usize) -> Result<(), PoissonError> {
    if other != chart {
        return Err(PoissonError::ChartMismatch {
            expected: chart.name().to_string(),
            found: other.name().to_string(),
        });
    }
    if degree != 1 {
        return Err(PoissonError::DegreeMismatch { expected: 1, found: degree });
    }
    Ok(())
}

/// Involutive distribution together with the coframe whose Frobenius
/// residuals vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Foliation {
    dist: Distribution,
    coframe: Vec<DiffForm>,
}

impl Foliation {
    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn coframe(&self) -> &[DiffForm] {
        &self.coframe
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvolutivityVerdict {
    Involutive(Foliation),
    /// First nonzero residual `dα_k ∧ α_1 ∧ ... ∧ α_q`.
    NotInvolutive { index: usize, residual: DiffForm },
}

impl InvolutivityVerdict {
    pub fn is_involutive(&self) -> bool {
        matches!(self, InvolutivityVerdict::Involutive(_))
    }
}

/// Frobenius test `dα_k ∧ α_1 ∧ ... ∧ α_q = 0` for every k.
pub fn involutivity_check(d: &Distribution) -> Result<InvolutivityVerdict, PoissonError> {
    let coframe = d.coframe()?;
    let chart = d.chart();
    let mut all = DiffForm::scalar(Scalar::one(chart));
    for a in &coframe {
        all = all.wedge(a)?;
    }
    for (k, a) in coframe.iter().enumerate() {
        let residual = exterior_derivative(a).wedge(&all)?;
        if !residual.is_zero() {
            return Ok(InvolutivityVerdict::NotInvolutive { index: k, residual });
        }
    }
    Ok(InvolutivityVerdict::Involutive(Foliation {
        dist: d.clone(),
        coframe,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::contract;

    fn r3() -> Arc<Chart> {
        Chart::new("R3", vec!["x".into(), "y".into(), "z".into()]).unwrap()
    }

    #[test]
    fn frobenius_examples() {
        let c = r3();
        let cfg = CheckConfig::default();
        let dz = DiffForm::basis(&c, &[2]).unwrap();
        let d = Distribution::from_coframe(&c, vec![dz.clone()], &cfg).unwrap();
        assert!(involutivity_check(&d).unwrap().is_involutive());

        let y = Scalar::var(&c, 1);
        let alpha = dz.checked_sub(&DiffForm::basis(&c, &[0]).unwrap().mul_scalar(&y).unwrap()).unwrap();
        let d = Distribution::from_coframe(&c, vec![alpha], &cfg).unwrap();
        match involutivity_check(&d).unwrap() {
            InvolutivityVerdict::NotInvolutive { residual, .. } => {
                assert_eq!(residual, DiffForm::basis(&c, &[0, 1, 2]).unwrap())
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn frame_and_coframe_conversions_annihilate() {
        let c = r3();
        let cfg = CheckConfig::default();
        let x = Scalar::var(&c, 0);
        // span(e_x, e_y + x e_z)
        let v1 = Multivector::basis(&c, &[0]).unwrap();
        let v2 = Multivector::basis(&c, &[1])
            .unwrap()
            .checked_add(&Multivector::basis(&c, &[2]).unwrap().mul_scalar(&x).unwrap())
            .unwrap();
        let d = Distribution::from_frame(&c, vec![v1.clone(), v2.clone()], &cfg).unwrap();
        let co = d.coframe().unwrap();
        assert_eq!(co.len(), 1);
        for v in [&v1, &v2] {
            assert!(contract(v, &co[0]).unwrap().is_zero());
        }
        let back = Distribution::from_coframe(&c, co, &cfg).unwrap().frame().unwrap();
        assert_eq!(back.len(), 2);
        for v in &back {
            for a in d.coframe().unwrap() {
                assert!(contract(v, &a).unwrap().is_zero());
            }
        }
        assert!(!involutivity_check(&d).unwrap().is_involutive());
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let c = r3();
        let x = Scalar::var(&c, 0);
        let v = Multivector::basis(&c, &[0]).unwrap().mul_scalar(&x).unwrap();
        let err = Distribution::from_frame(&c, vec![v], &CheckConfig::default()).unwrap_err();
        assert!(matches!(err, PoissonError::RankDeficient { expected: 1, found: 0, .. }));
    }

    #[test]
    fn unsupported_without_constant_block() {
        let c = r3();
        let x = Scalar::var(&c, 0);
        let one = Scalar::one(&c);
        // (1 + x^2) dz has no constant block
        let f = DiffForm::basis(&c, &[2]).unwrap().mul_scalar(&(&one + &x.pow(2))).unwrap();
        let d = Distribution::from_coframe(&c, vec![f], &CheckConfig::default()).unwrap();
        assert!(matches!(d.frame(), Err(PoissonError::Unsupported(_))));
        // the Frobenius test itself only needs the coframe
        assert!(involutivity_check(&d).unwrap().is_involutive());
    }
}
