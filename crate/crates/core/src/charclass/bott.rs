use serde::Serialize;

use crate::expr::num::int;

use super::bundle::{
    euler_of_complexification, line_op, pontryagin_from_chern, tensor_with_line, whitney_quotient, whitney_sum,
    BundleDescriptor, BundleKind, LineOp,
};
use super::{CharClassError, CohomElement, CohomRing};

/// A spanning monomial of `Pont^k`: a product of generators with its value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PontMonomial {
    pub label: String,
    pub value: CohomElement,
}

/// Spanning monomials of the Pontryagin ring in one real degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PontPiece {
    pub degree: usize,
    pub monomials: Vec<PontMonomial>,
}

impl PontPiece {
    pub fn is_zero(&self) -> bool {
        self.monomials.iter().all(|m| m.value.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<&PontMonomial> {
        self.monomials.iter().find(|m| !m.value.is_zero())
    }
}

fn label(gens: &[(String, usize, CohomElement)], exps: &[usize]) -> String {
    let parts: Vec<String> = gens
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|((name, _, _), &e)| match name.as_str() {
            // the generator is e^2, so its powers are even powers of e
            "e" => format!("e^{}", 2 * e),
            _ if e == 1 => name.clone(),
            _ => format!("{name}^{e}"),
        })
        .collect();
    parts.join("*")
}

/// The subring generated by `p_i(E)` (degree 4i) and `e(E)^2` (degree
/// 2·rank), listed by real degree `k > 0` up to the top of the ring.
/// Generators that vanish are left out.
pub fn pontryagin_ring(e: &BundleDescriptor) -> Result<Vec<PontPiece>, CharClassError> {
    if e.kind() != BundleKind::Real {
        return Err(CharClassError::KindMismatch {
            expected: "real",
            found: e.kind().as_str(),
        });
    }
    let ring = e.ring().clone();
    let max_deg = 2 * ring.top();
    let mut gens: Vec<(String, usize, CohomElement)> = Vec::new();
    for i in 1..=e.rank() / 2 {
        let p = e.pontryagin_class(i);
        if !p.is_zero() {
            gens.push((format!("p{i}"), 4 * i, p));
        }
    }
    if let Some(eu) = e.euler() {
        let sq = eu.mul(&eu)?;
        if !sq.is_zero() {
            gens.push(("e".to_string(), 2 * e.rank(), sq));
        }
    }
    let mut pieces: Vec<PontPiece> = (1..=max_deg / 2)
        .map(|j| PontPiece {
            degree: 2 * j,
            monomials: Vec::new(),
        })
        .collect();
    // enumerate exponent vectors with total degree <= max_deg
    let mut exps = vec![0usize; gens.len()];
    fn rec(
        idx: usize,
        deg: usize,
        max_deg: usize,
        gens: &[(String, usize, CohomElement)],
        exps: &mut Vec<usize>,
        pieces: &mut Vec<PontPiece>,
        ring: &std::sync::Arc<CohomRing>,
    ) {
        if idx == gens.len() {
            if deg > 0 {
                let mut v = CohomElement::one(ring);
                for ((_, _, g), &e) in gens.iter().zip(exps.iter()) {
                    v = v.mul(&g.pow(e)).expect("same ring");
                }
                pieces[deg / 2 - 1].monomials.push(PontMonomial {
                    label: label(gens, exps),
                    value: v,
                });
            }
            return;
        }
        let step = gens[idx].1;
        let mut e = 0;
        while deg + e * step <= max_deg {
            exps[idx] = e;
            rec(idx + 1, deg + e * step, max_deg, gens, exps, pieces, ring);
            e += 1;
        }
        exps[idx] = 0;
    }
    rec(0, 0, max_deg, &gens, &mut exps, &mut pieces, &ring);
    for p in &mut pieces {
        p.monomials.sort_by(|a, b| a.label.cmp(&b.label));
    }
    Ok(pieces)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BottVerdict {
    /// `Pont^degree(E) ≠ 0` with `degree > 2q`: a distribution with this
    /// normal bundle is not homotopic to an involutive one.
    ObstructionNonzero { degree: usize, monomial: PontMonomial },
    /// No obstruction in range; this proves nothing about integrability.
    Silent,
}

impl BottVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            BottVerdict::ObstructionNonzero { .. } => "ObstructionNonzero",
            BottVerdict::Silent => "Silent",
        }
    }
}

/// First nonzero `Pont^k(ν)` with `k > 2q`.
pub fn bott_criterion(normal: &BundleDescriptor, q: usize) -> Result<BottVerdict, CharClassError> {
    let real = match normal.kind() {
        BundleKind::Real => normal.clone(),
        BundleKind::Complex => pontryagin_from_chern(normal)?,
    };
    for piece in pontryagin_ring(&real)? {
        if piece.degree > 2 * q {
            if let Some(m) = piece.first_nonzero() {
                return Ok(BottVerdict::ObstructionNonzero {
                    degree: piece.degree,
                    monomial: m.clone(),
                });
            }
        }
    }
    Ok(BottVerdict::Silent)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleRow {
    pub name: String,
    pub kind: String,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chern: Option<String>,
    pub pontryagin: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionRecord {
    pub verdict: String,
    pub q: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_monomial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_value: Option<String>,
}

/// Characteristic-class data of the codimension-2 distribution
/// `D = ker θ_*` on `ℂP^{2n-1}` with normal bundle `O(2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BottReport {
    pub n: usize,
    pub ring: String,
    pub bundles: Vec<BundleRow>,
    pub identities: Vec<IdentityCheck>,
    pub e_nu: String,
    pub e_d: String,
    pub e_product: String,
    pub e_tangent: String,
    pub p1_nu: String,
    pub criterion: CriterionRecord,
    pub pullback_note: String,
    pub verdict: String,
}

impl BottReport {
    pub fn identities_hold(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }
}

fn row(name: &str, b: &BundleDescriptor) -> BundleRow {
    BundleRow {
        name: name.to_string(),
        kind: b.kind().as_str().to_string(),
        rank: b.rank(),
        chern: b.chern().ok().map(|c| c.to_string()),
        pontryagin: b.pontryagin().to_string(),
        euler: b.euler().map(|e| e.to_string()),
    }
}

fn identity(name: &str, lhs: &CohomElement, rhs: &CohomElement) -> IdentityCheck {
    IdentityCheck {
        name: name.to_string(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs == rhs,
    }
}

/// Builds `ℂP^{2n-1}`, `O(-1)`, `O(1)`, `O(2)`, `O(-1)^⊥`, `T`, `D` and
/// `ν(D) = O(2)`, checks the Whitney and Euler identities and runs the
/// Bott criterion in real codimension `q`.
pub fn bott_example_pipeline(n: usize, q: usize) -> Result<BottReport, CharClassError> {
    if n < 2 {
        return Err(CharClassError::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let m = 2 * n - 1;
    let ring = CohomRing::projective(m);
    let one = CohomElement::one(&ring);
    let t = CohomElement::generator(&ring);

    let taut = BundleDescriptor::line(&ring, int(-1));
    let o1 = line_op(&taut, LineOp::Dual)?;
    let o2 = tensor_with_line(&o1, &o1)?;
    let trivial = BundleDescriptor::trivial(&ring, BundleKind::Complex, 2 * n);
    let perp = whitney_quotient(&trivial, &taut)?;
    let tangent = BundleDescriptor::complex(m, one.add(&t)?.pow(2 * n))?;
    let d = whitney_quotient(&tangent, &o2)?;
    let nu = o2.clone();

    let mut identities = vec![
        identity("c(D) c(nu(D)) = c(T)", &d.chern()?.mul(nu.chern()?)?, tangent.chern()?),
        identity(
            "c(O(-1)) c(O(-1)^perp) = c(C^2n)",
            whitney_sum(&taut, &perp)?.chern()?,
            trivial.chern()?,
        ),
        identity(
            "c(O(1) (x) O(-1)^perp) = c(T)",
            tensor_with_line(&o1, &perp)?.chern()?,
            tangent.chern()?,
        ),
    ];
    let e_nu = nu.euler().expect("complex");
    let e_d = d.euler().expect("complex");
    let e_t = tangent.euler().expect("complex");
    let product = e_d.mul(&e_nu)?;
    let expected = CohomElement::monomial(&ring, int(2 * n as i64), m);
    identities.push(identity("e(D) e(nu(D)) = e(T)", &product, &e_t));
    identities.push(identity("e(T) = 2n t^(2n-1)", &e_t, &expected));
    identities.push(identity(
        "e(nu(D))^2 = e(nu(D) (x) C)",
        &e_nu.mul(&e_nu)?,
        &euler_of_complexification(&nu)?,
    ));

    let nu_real = pontryagin_from_chern(&nu)?;
    let verdict = bott_criterion(&nu_real, q)?;
    let criterion = match &verdict {
        BottVerdict::ObstructionNonzero { degree, monomial } => CriterionRecord {
            verdict: verdict.name().to_string(),
            q,
            witness_degree: Some(*degree),
            witness_monomial: Some(monomial.label.clone()),
            witness_value: Some(monomial.value.to_string()),
        },
        BottVerdict::Silent => CriterionRecord {
            verdict: verdict.name().to_string(),
            q,
            witness_degree: None,
            witness_monomial: None,
            witness_value: None,
        },
    };
    let pullback_note = format!(
        "On V = CP^{m} x C the projection p induces an injection p^*: H(CP^{m}) -> H(V) which maps the Euler \
         class of nu(D) to that of p^*nu(D); D~ = p^*D + C has the same Pontryagin data, so the verdict \
         {} carries over to V.",
        verdict.name()
    );
    Ok(BottReport {
        n,
        ring: ring.to_string(),
        bundles: vec![
            row("O(-1)", &taut),
            row("O(1)", &o1),
            row("O(2)", &o2),
            row("O(-1)^perp", &perp),
            row("C^2n", &trivial),
            row("T", &tangent),
            row("D", &d),
            row("nu(D)", &nu),
            row("nu(D)_R", &nu_real),
        ],
        identities,
        e_nu: e_nu.to_string(),
        e_d: e_d.to_string(),
        e_product: product.to_string(),
        e_tangent: e_t.to_string(),
        p1_nu: nu_real.pontryagin_class(1).to_string(),
        criterion,
        pullback_note,
        verdict: verdict.name().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_n3() {
        let r = bott_example_pipeline(3, 2).unwrap();
        assert_eq!(r.e_nu, "2t");
        assert_eq!(r.e_d, "3t^4");
        assert_eq!(r.e_product, "6t^5");
        assert_eq!(r.e_tangent, "6t^5");
        assert_eq!(r.p1_nu, "4t^2");
        assert_eq!(r.verdict, "ObstructionNonzero");
        assert_eq!(r.criterion.witness_degree, Some(8));
        assert_eq!(r.criterion.witness_value.as_deref(), Some("16t^4"));
        assert!(r.identities_hold());
    }

    #[test]
    fn example_n2_is_silent() {
        let r = bott_example_pipeline(2, 2).unwrap();
        assert_eq!(r.e_product, "4t^3");
        assert_eq!(r.verdict, "Silent");
        assert!(r.identities_hold());
        assert!(bott_example_pipeline(1, 2).is_err());
    }

    #[test]
    fn trivial_normal_bundle_is_silent() {
        let ring = CohomRing::projective(7);
        for q in 0..4 {
            let v = bott_criterion(&BundleDescriptor::trivial(&ring, BundleKind::Real, 2), q).unwrap();
            assert_eq!(v, BottVerdict::Silent);
        }
        let pieces = pontryagin_ring(&BundleDescriptor::trivial(&ring, BundleKind::Real, 4)).unwrap();
        assert!(pieces.iter().all(|p| p.is_zero()));
    }
}
