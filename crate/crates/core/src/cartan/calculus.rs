//! Exterior derivative, interior products and the brackets of multivector
//! fields.
//!
//! Conventions:
//! - `contract(e_{j1}^...^e_{jk}, a)` applies `ι_{e_{j1}}` first, so the
//!   contraction is the adjoint of left wedge and
//!   `contract(e1^e2, dx1^dx2) = 1`.
//! - A 2-form evaluates on vectors as `ω(X, Y) = contract(X^Y, ω)`.
//! - The Schouten bracket restricts to the ordinary Lie bracket on vector
//!   fields and satisfies `[π,π](dxa,dxb,dxc) = 2·Jac(xa,xb,xc)` for the
//!   Poisson bracket `{f,g} = π(df,dg)`.

use crate::expr::Scalar;

use super::{CartanError, DiffForm, Multivector};

/// Coordinate exterior derivative.
pub fn exterior_derivative(a: &DiffForm) -> DiffForm {
    let chart = a.chart();
    let mut terms = Vec::new();
    for (idx, c) in a.comps() {
        for j in 0..chart.dim() {
            if idx.contains(&j) {
                continue;
            }
            let dc = c.partial(j);
            if dc.is_zero() {
                continue;
            }
            let mut t = Vec::with_capacity(idx.len() + 1);
            t.push(j);
            t.extend_from_slice(idx);
            terms.push((t, dc));
        }
    }
    DiffForm::from_terms(chart, a.degree() + 1, terms).expect("indices are in range")
}

/// `ι_{e_j}` on a form.
fn contract_basis_vector(j: usize, a: &DiffForm) -> DiffForm {
    let mut terms = Vec::new();
    for (idx, c) in a.comps() {
        if let Some(pos) = idx.iter().position(|&i| i == j) {
            let mut rest = idx.clone();
            rest.remove(pos);
            let c = if pos % 2 == 1 { -c } else { c.clone() };
            terms.push((rest, c));
        }
    }
    DiffForm::from_terms(a.chart(), a.degree() - 1, terms).expect("indices are in range")
}

/// Interior product of a multivector of degree k with a form of degree p ≥ k.
pub fn contract(x: &Multivector, a: &DiffForm) -> Result<DiffForm, CartanError> {
    if x.chart() != a.chart() {
        return Err(CartanError::ChartMismatch {
            left: x.chart().name().to_string(),
            right: a.chart().name().to_string(),
        });
    }
    if x.degree() > a.degree() {
        return Err(CartanError::ContractionDegree {
            vector: x.degree(),
            form: a.degree(),
        });
    }
    let mut out = DiffForm::zero(a.chart(), a.degree() - x.degree());
    for (jdx, coeff) in x.comps() {
        let mut cur = a.clone();
        for &j in jdx {
            cur = contract_basis_vector(j, &cur);
            if cur.is_zero() {
                break;
            }
        }
        if !cur.is_zero() {
            out = out.checked_add(&cur.mul_scalar(coeff)?)?;
        }
    }
    Ok(out)
}

/// Full pairing of a k-vector with a k-form.
pub fn pair(x: &Multivector, a: &DiffForm) -> Result<Scalar, CartanError> {
    if x.degree() != a.degree() {
        return Err(CartanError::DegreeMismatch {
            expected: x.degree(),
            found: a.degree(),
        });
    }
    Ok(contract(x, a)?.as_scalar().expect("degree zero"))
}

/// Odd derivative removing `e_i`, sign taken from the right end.
fn odd_derivative_right(p: &Multivector, i: usize) -> Option<Multivector> {
    let deg = p.degree();
    if deg == 0 {
        return None;
    }
    let mut terms = Vec::new();
    for (idx, c) in p.comps() {
        if let Some(pos) = idx.iter().position(|&k| k == i) {
            let mut rest = idx.clone();
            rest.remove(pos);
            let c = if (deg - 1 - pos) % 2 == 1 { -c } else { c.clone() };
            terms.push((rest, c));
        }
    }
    Some(Multivector::from_terms(p.chart(), deg - 1, terms).expect("indices are in range"))
}

/// Odd derivative removing `e_i`, sign taken from the left end.
fn odd_derivative_left(p: &Multivector, i: usize) -> Option<Multivector> {
    let deg = p.degree();
    if deg == 0 {
        return None;
    }
    let mut terms = Vec::new();
    for (idx, c) in p.comps() {
        if let Some(pos) = idx.iter().position(|&k| k == i) {
            let mut rest = idx.clone();
            rest.remove(pos);
            let c = if pos % 2 == 1 { -c } else { c.clone() };
            terms.push((rest, c));
        }
    }
    Some(Multivector::from_terms(p.chart(), deg - 1, terms).expect("indices are in range"))
}

fn partial_mv(p: &Multivector, i: usize) -> Multivector {
    p.map_to_chart(p.chart(), |c| Ok(c.partial(i)))
        .expect("same chart")
}

/// Schouten–Nijenhuis bracket, of degree `deg(a) + deg(b) - 1`.
pub fn schouten_bracket(a: &Multivector, b: &Multivector) -> Result<Multivector, CartanError> {
    a.check_compatible(b)?;
    let (p, q) = (a.degree(), b.degree());
    if p + q == 0 {
        return Err(CartanError::BracketDegree);
    }
    let chart = a.chart();
    let mut out = Multivector::zero(chart, p + q - 1);
    for i in 0..chart.dim() {
        if let Some(da) = odd_derivative_right(a, i) {
            let t = da.wedge(&partial_mv(b, i))?;
            out = out.checked_add(&t)?;
        }
        if let Some(db) = odd_derivative_left(b, i) {
            let t = partial_mv(a, i).wedge(&db)?;
            out = out.checked_sub(&t)?;
        }
    }
    // Twist by (-1)^{(p-1)(q-1)}: keeps the graded Lie structure and fixes the
    // Jacobiator normalisation on bivectors.
    let twist = p > 0 && q > 0 && (p - 1) * (q - 1) % 2 == 1;
    Ok(if twist { out.neg() } else { out })
}

/// Lie bracket of vector fields in coordinates.
pub fn lie_bracket(x: &Multivector, y: &Multivector) -> Result<Multivector, CartanError> {
    x.check_compatible(y)?;
    if x.degree() != 1 || y.degree() != 1 {
        return Err(CartanError::DegreeMismatch {
            expected: 1,
            found: if x.degree() != 1 { x.degree() } else { y.degree() },
        });
    }
    let chart = x.chart();
    let n = chart.dim();
    let mut terms = Vec::new();
    for k in 0..n {
        let mut c = Scalar::zero(chart);
        for i in 0..n {
            let xi = x.component(&[i]);
            let yi = y.component(&[i]);
            if !xi.is_zero() {
                c = &c + &(&xi * &y.component(&[k]).partial(i));
            }
            if !yi.is_zero() {
                c = &c - &(&yi * &x.component(&[k]).partial(i));
            }
        }
        terms.push((vec![k], c));
    }
    Multivector::from_terms(chart, 1, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::num::int;
    use crate::expr::Chart;

    #[test]
    fn derivative_examples() {
        let c = Chart::numbered("R4", "x", 4);
        let x2 = Scalar::var(&c, 1);
        let a = DiffForm::basis(&c, &[0]).unwrap().mul_scalar(&x2).unwrap();
        assert_eq!(exterior_derivative(&a), DiffForm::basis(&c, &[0, 1]).unwrap().neg());

        let r3 = Chart::new("R3", vec!["x".into(), "y".into(), "z".into()]).unwrap();
        let y = Scalar::var(&r3, 1);
        let alpha = DiffForm::basis(&r3, &[2])
            .unwrap()
            .checked_sub(&DiffForm::basis(&r3, &[0]).unwrap().mul_scalar(&y).unwrap())
            .unwrap();
        assert_eq!(exterior_derivative(&alpha), DiffForm::basis(&r3, &[0, 1]).unwrap());
    }

    #[test]
    fn contraction_examples() {
        let c = Chart::numbered("R2", "x", 2);
        let w = DiffForm::basis(&c, &[0, 1]).unwrap();
        let e1 = Multivector::basis(&c, &[0]).unwrap();
        assert_eq!(contract(&e1, &w).unwrap(), DiffForm::basis(&c, &[1]).unwrap());
        let e12 = Multivector::basis(&c, &[0, 1]).unwrap();
        assert_eq!(pair(&e12, &w).unwrap(), Scalar::one(&c));
        let e21 = Multivector::basis(&c, &[1, 0]).unwrap();
        assert_eq!(pair(&e21, &w).unwrap(), Scalar::constant(&c, int(-1)));
        assert!(matches!(
            contract(&e12, &DiffForm::basis(&c, &[0]).unwrap()),
            Err(CartanError::ContractionDegree { .. })
        ));
    }

    #[test]
    fn bracket_examples() {
        let r3 = Chart::new("R3", vec!["x".into(), "y".into(), "z".into()]).unwrap();
        let x = Scalar::var(&r3, 0);
        let ex = Multivector::basis(&r3, &[0]).unwrap();
        let ey = Multivector::basis(&r3, &[1]).unwrap();
        let xey = ey.mul_scalar(&x).unwrap();
        assert_eq!(lie_bracket(&ex, &xey).unwrap(), ey);
        assert_eq!(schouten_bracket(&ex, &xey).unwrap(), ey);
        assert!(lie_bracket(&ex, &ey).unwrap().is_zero());

        let c2 = Chart::numbered("R2", "x", 2);
        let p = Multivector::basis(&c2, &[0, 1]).unwrap();
        assert!(schouten_bracket(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn bracket_normalisation_on_bivectors() {
        // pi = e1^e2 + x2 e3^e4: [pi,pi] = -2 e1^e3^e4
        let c = Chart::numbered("R4", "x", 4);
        let x2 = Scalar::var(&c, 1);
        let pi = Multivector::basis(&c, &[0, 1])
            .unwrap()
            .checked_add(&Multivector::basis(&c, &[2, 3]).unwrap().mul_scalar(&x2).unwrap())
            .unwrap();
        let br = schouten_bracket(&pi, &pi).unwrap();
        assert_eq!(br.degree(), 3);
        assert_eq!(br.num_comps(), 1);
        assert_eq!(br.component(&[0, 2, 3]), Scalar::constant(&c, int(-2)));
    }

    #[test]
    fn bracket_with_function() {
        let c = Chart::numbered("R2", "x", 2);
        let x1 = Scalar::var(&c, 0);
        let f = Multivector::scalar(x1.pow(2));
        let e1 = Multivector::basis(&c, &[0]).unwrap();
        let xf = schouten_bracket(&e1, &f).unwrap();
        assert_eq!(xf.as_scalar().unwrap(), x1.scale(&int(2)));
        let fx = schouten_bracket(&f, &e1).unwrap();
        assert_eq!(fx.as_scalar().unwrap(), x1.scale(&int(-2)));
    }
}
