use rayon::prelude::*;

use crate::cartan::{schouten_bracket, DiffForm, Multivector};
use crate::expr::{Rational, Scalar};
use crate::linalg::{self, Matrix};

use super::distribution::{eval_matrix, Distribution};
use super::{CheckConfig, PoissonError};

/// The skew matrix `[π^{ij}]`.
pub fn bivector_matrix(pi: &Multivector) -> Matrix<Scalar> {
    let n = pi.dim();
    (0..n)
        .map(|i| (0..n).map(|j| pi.component(&[i, j])).collect())
        .collect()
}

/// `π♯α = Σ_{i,j} α_j π^{ji} e_i`, so that `π(α, β) = ⟨β, π♯α⟩`.
pub fn sharp_map(pi: &Multivector, alpha: &DiffForm) -> Result<Multivector, PoissonError> {
    if pi.degree() != 2 {
        return Err(PoissonError::DegreeMismatch { expected: 2, found: pi.degree() });
    }
    if alpha.degree() != 1 {
        return Err(PoissonError::DegreeMismatch { expected: 1, found: alpha.degree() });
    }
    if pi.chart() != alpha.chart() {
        return Err(PoissonError::ChartMismatch {
            expected: pi.chart().name().to_string(),
            found: alpha.chart().name().to_string(),
        });
    }
    let chart = pi.chart();
    let mut terms = Vec::new();
    for (j, aj) in alpha.comps() {
        for i in 0..chart.dim() {
            let p = pi.component(&[j[0], i]);
            if !p.is_zero() {
                terms.push((vec![i], aj * &p));
            }
        }
    }
    Ok(Multivector::from_terms(chart, 1, terms)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityStatus {
    /// A rank-r minor is a nonzero constant and every (r+2)-Pfaffian
    /// vanishes identically.
    Certified,
    /// Rank is constant on the probe points only.
    Sampled,
}

impl RegularityStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegularityStatus::Certified => "certified",
            RegularityStatus::Sampled => "sampled",
        }
    }
}

/// Rows J and columns R of `[π^{ij}]` whose r×r block has constant nonzero
/// determinant; `Y_a = π♯dx_{J[a]}` is then a global frame of the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorCertificate {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// A bivector of constant rank on the probe points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularBivector {
    pi: Multivector,
    rank: usize,
    status: RegularityStatus,
    certificate: Option<MinorCertificate>,
    image: Distribution,
}

impl RegularBivector {
    pub fn pi(&self) -> &Multivector {
        &self.pi
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn status(&self) -> RegularityStatus {
        self.status
    }

    pub fn certificate(&self) -> Option<&MinorCertificate> {
        self.certificate.as_ref()
    }

    /// `D = im π♯`, presented by a frame.
    pub fn image(&self) -> &Distribution {
        &self.image
    }
}

fn find_constant_minor(m: &Matrix<Scalar>, r: usize, zero: &Scalar) -> Option<MinorCertificate> {
    let n = m.len();
    let sets = linalg::subsets(n, r);
    // principal blocks first: the Pfaffian is cheaper and R = J
    for j in &sets {
        let pf = linalg::pfaffian(&linalg::submatrix(m, j, j), zero);
        if pf.as_constant().is_some_and(|c| c != Rational::from_integer(0.into())) {
            return Some(MinorCertificate {
                rows: j.clone(),
                cols: j.clone(),
            });
        }
    }
    for rows in &sets {
        for cols in &sets {
            if rows == cols {
                continue;
            }
            let d = linalg::det(&linalg::submatrix(m, rows, cols), zero);
            if d.as_constant().is_some_and(|c| c != Rational::from_integer(0.into())) {
                return Some(MinorCertificate {
                    rows: rows.clone(),
                    cols: cols.clone(),
                });
            }
        }
    }
    None
}

fn higher_pfaffians_vanish(m: &Matrix<Scalar>, r: usize, zero: &Scalar) -> bool {
    let n = m.len();
    if r + 2 > n {
        return true;
    }
    linalg::subsets(n, r + 2)
        .into_iter()
        .all(|s| linalg::pfaffian(&linalg::submatrix(m, &s, &s), zero).is_zero())
}

/// Greedy row selection at a point: rows that raise the rank.
fn greedy_rows(m: &Matrix<Rational>) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rank = 0;
    for i in 0..m.len() {
        let mut trial: Vec<Vec<Rational>> = chosen.iter().map(|&c| m[c].clone()).collect();
        trial.push(m[i].clone());
        let r = linalg::rank_exact(&trial);
        if r > rank {
            chosen.push(i);
            rank = r;
        }
    }
    chosen
}

/// Rank at the probe points, image frame and regularity status.
pub fn rank_and_image(pi: &Multivector, cfg: &CheckConfig) -> Result<RegularBivector, PoissonError> {
    if pi.degree() != 2 {
        return Err(PoissonError::DegreeMismatch { expected: 2, found: pi.degree() });
    }
    let chart = pi.chart();
    let zero = Scalar::zero(chart);
    let m = bivector_matrix(pi);
    let pts = cfg.probe_points(chart.dim());
    let ranks: Vec<usize> = pts
        .par_iter()
        .map(|p| linalg::rank_exact(&eval_matrix(&m, p)))
        .collect();
    if let Some(i) = ranks.iter().position(|&r| r != ranks[0]) {
        return Err(PoissonError::NotRegular {
            first: (pts[0].clone(), ranks[0]),
            second: (pts[i].clone(), ranks[i]),
        });
    }
    let r = ranks[0];
    let certificate = find_constant_minor(&m, r, &zero);
    let status = if certificate.is_some() && higher_pfaffians_vanish(&m, r, &zero) {
        RegularityStatus::Certified
    } else {
        RegularityStatus::Sampled
    };
    let rows = match &certificate {
        Some(c) => c.rows.clone(),
        None => greedy_rows(&eval_matrix(&m, &pts[0])),
    };
    let frame = rows
        .iter()
        .map(|&j| sharp_map(pi, &DiffForm::basis(chart, &[j]).expect("in range")))
        .collect::<Result<Vec<_>, _>>()?;
    let image = Distribution::from_frame(chart, frame, cfg)?;
    Ok(RegularBivector {
        pi: pi.clone(),
        rank: r,
        status,
        certificate,
        image,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoissonVerdict {
    Poisson,
    /// First coordinate triple (i<j<k) where `[π,π]` has a nonzero
    /// component, with the Jacobiator `J(x_i,x_j,x_k)` (half the component).
    NotPoisson { triple: [usize; 3], jacobiator: Scalar },
}

impl PoissonVerdict {
    pub fn is_poisson(&self) -> bool {
        matches!(self, PoissonVerdict::Poisson)
    }
}

/// `[π,π] = 0`.
pub fn poisson_check(pi: &Multivector) -> Result<PoissonVerdict, PoissonError> {
    if pi.degree() != 2 {
        return Err(PoissonError::DegreeMismatch { expected: 2, found: pi.degree() });
    }
    let br = schouten_bracket(pi, pi)?;
    let verdict = match br.comps().next() {
        None => PoissonVerdict::Poisson,
        Some((idx, c)) => PoissonVerdict::NotPoisson {
            triple: [idx[0], idx[1], idx[2]],
            jacobiator: c.scale(&Rational::new(1.into(), 2.into())),
        },
    };
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_document, num::int};

    fn bivector(text: &str) -> Multivector {
        parse_document(text).unwrap().bivector(None).unwrap().1.clone()
    }

    #[test]
    fn sharp_examples() {
        let pi = bivector("chart R2 (x1 x2)\nbivector p: e1^e2");
        let c = pi.chart().clone();
        let s = sharp_map(&pi, &DiffForm::basis(&c, &[0]).unwrap()).unwrap();
        assert_eq!(s, Multivector::basis(&c, &[1]).unwrap());

        let pi = bivector("chart R4 (x1 x2 x3 x4)\nbivector p: e1^e2 + (x2)*e3^e4");
        let c = pi.chart().clone();
        let s = sharp_map(&pi, &DiffForm::basis(&c, &[2]).unwrap()).unwrap();
        assert_eq!(s, Multivector::basis(&c, &[3]).unwrap().mul_scalar(&Scalar::var(&c, 1)).unwrap());
    }

    #[test]
    fn regularity_examples() {
        let cfg = CheckConfig::default();
        let rb = rank_and_image(&bivector("chart R3 (x y z)\nbivector p: e1^e2"), &cfg).unwrap();
        assert_eq!((rb.rank(), rb.status()), (2, RegularityStatus::Certified));

        let rb = rank_and_image(&bivector("chart R3 (x y z)\nbivector p: e_x^e_y + (x)*e_y^e_z"), &cfg).unwrap();
        assert_eq!((rb.rank(), rb.status()), (2, RegularityStatus::Certified));

        let err = rank_and_image(&bivector("chart R4 (x1 x2 x3 x4)\nbivector p: e1^e2 + (x2)*e3^e4"), &cfg).unwrap_err();
        let PoissonError::NotRegular { first, second } = err else { panic!() };
        assert_eq!((first.0[1].clone(), first.1), (int(0), 2));
        assert_eq!((second.0[1].clone(), second.1), (int(1), 4));

        let rb = rank_and_image(&bivector("chart R2 (x y)\nbivector p: (1 + x^2)*e1^e2"), &cfg).unwrap();
        assert_eq!((rb.rank(), rb.status()), (2, RegularityStatus::Sampled));
    }

    #[test]
    fn poisson_examples() {
        let pi = bivector("chart R4 (x1 x2 x3 x4)\nbivector p: e1^e2 + (x2)*e3^e4");
        match poisson_check(&pi).unwrap() {
            PoissonVerdict::NotPoisson { triple, jacobiator } => {
                assert_eq!(triple, [0, 2, 3]);
                assert_eq!(jacobiator.as_constant(), Some(int(-1)));
            }
            v => panic!("{v:?}"),
        }
        let pi = bivector("chart R3 (x y z)\nbivector p: e_x^e_y + (x)*e_y^e_z");
        assert!(poisson_check(&pi).unwrap().is_poisson());
    }
}
