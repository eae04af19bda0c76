//! Small dense linear algebra over polynomials, rationals and doubles.
//!
//! Determinants and Pfaffians use memoised expansion over index subsets, so
//! they never divide and work over any commutative ring. Sizes stay small
//! (at most the chart dimension).

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::expr::{Rational, Scalar};

/// Commutative ring operations needed for expansion formulas.
pub trait RingElem: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
}

impl RingElem for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero(self.chart())
    }
    fn one_like(&self) -> Self {
        Scalar::one(self.chart())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl RingElem for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl RingElem for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero_elem(&self) -> bool {
        *self == 0.0
    }
}

pub type Matrix<T> = Vec<Vec<T>>;

/// Determinant of a square matrix whose entries share a zero (`zero`).
pub fn det<T: RingElem>(m: &Matrix<T>, zero: &T) -> T {
    let n = m.len();
    if n == 0 {
        return zero.one_like();
    }
    assert!(n <= 63, "matrix too large for subset expansion");
    let mut memo: HashMap<u64, T> = HashMap::new();
    det_rec(m, 0, (1u64 << n) - 1, zero, &mut memo)
}

fn det_rec<T: RingElem>(m: &Matrix<T>, row: usize, cols: u64, zero: &T, memo: &mut HashMap<u64, T>) -> T {
    if row == m.len() {
        return zero.one_like();
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let mut acc = zero.clone();
    let mut sign_neg = false;
    for c in 0..m.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let a = &m[row][c];
        if !a.is_zero_elem() {
            let sub = det_rec(m, row + 1, cols & !(1 << c), zero, memo);
            let t = a.mul(&sub);
            acc = if sign_neg { acc.sub(&t) } else { acc.add(&t) };
        }
        sign_neg = !sign_neg;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// Pfaffian of a skew-symmetric matrix (zero for odd size).
pub fn pfaffian<T: RingElem>(m: &Matrix<T>, zero: &T) -> T {
    let n = m.len();
    if n % 2 == 1 {
        return zero.clone();
    }
    if n == 0 {
        return zero.one_like();
    }
    assert!(n <= 63, "matrix too large for subset expansion");
    let mut memo = HashMap::new();
    pf_rec(m, (1u64 << n) - 1, zero, &mut memo)
}

fn pf_rec<T: RingElem>(m: &Matrix<T>, set: u64, zero: &T, memo: &mut HashMap<u64, T>) -> T {
    if set == 0 {
        return zero.one_like();
    }
    if let Some(v) = memo.get(&set) {
        return v.clone();
    }
    let i = set.trailing_zeros() as usize;
    let rest = set & !(1 << i);
    let mut acc = zero.clone();
    let mut pos = 0;
    for j in (i + 1)..m.len() {
        if rest & (1 << j) == 0 {
            continue;
        }
        let a = &m[i][j];
        if !a.is_zero_elem() {
            let sub = pf_rec(m, rest & !(1 << j), zero, memo);
            let t = a.mul(&sub);
            acc = if pos % 2 == 1 { acc.sub(&t) } else { acc.add(&t) };
        }
        pos += 1;
    }
    memo.insert(set, acc.clone());
    acc
}

pub fn submatrix<T: Clone>(m: &Matrix<T>, rows: &[usize], cols: &[usize]) -> Matrix<T> {
    rows.iter().map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect()).collect()
}

/// Adjugate (transpose of the cofactor matrix).
pub fn adjugate<T: RingElem>(m: &Matrix<T>, zero: &T) -> Matrix<T> {
    let n = m.len();
    let mut adj = vec![vec![zero.clone(); n]; n];
    if n == 1 {
        adj[0][0] = zero.one_like();
        return adj;
    }
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = det(&submatrix(m, &rows, &cols), zero);
            adj[i][j] = if (i + j) % 2 == 1 { minor.neg() } else { minor };
        }
    }
    adj
}

/// Inverse of a polynomial matrix whose determinant is a nonzero constant.
pub fn poly_inverse(m: &Matrix<Scalar>, zero: &Scalar) -> Option<Matrix<Scalar>> {
    let d = det(m, zero).as_constant()?;
    if d.is_zero() {
        return None;
    }
    let inv = Rational::one() / d;
    Some(
        adjugate(m, zero)
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.scale(&inv)).collect())
            .collect(),
    )
}

pub fn mat_mul<T: RingElem>(a: &Matrix<T>, b: &Matrix<T>, zero: &T) -> Matrix<T> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(zero.clone(), |acc, (x, brow)| acc.add(&x.mul(&brow[j])))
                })
                .collect()
        })
        .collect()
}

/// All k-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Reduced row echelon form over the rationals; returns pivot columns.
pub fn rref_exact(m: &mut Matrix<Rational>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_exact(m: &Matrix<Rational>) -> usize {
    let mut m = m.clone();
    rref_exact(&mut m).len()
}

/// Reduced row echelon form with partial pivoting; entries below `tol`
/// (relative to the largest entry) count as zero.
pub fn rref_f64(m: &mut Matrix<f64>, tol: f64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |a, &b| a.max(b.abs()))
        .max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if best <= tol * scale {
            continue;
        }
        m.swap(r, p);
        let inv = 1.0 / m[r][c];
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0.0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] -= f * m[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Kernel basis of a q×n matrix from its reduced form: one vector per free
/// column `f`, equal to `e_f - Σ_pivots a_{i f} e_{p_i}`.
pub fn kernel_f64(m: &Matrix<f64>, n: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut r = m.clone();
    let pivots = rref_f64(&mut r, tol);
    kernel_from_rref(&r, &pivots, n, 0.0, 1.0, |x| -*x)
}

pub fn kernel_exact(m: &Matrix<Rational>, n: usize) -> Vec<Vec<Rational>> {
    let mut r = m.clone();
    let pivots = rref_exact(&mut r);
    kernel_from_rref(&r, &pivots, n, Rational::zero(), Rational::one(), |x| -x.clone())
}

fn kernel_from_rref<T: Clone>(r: &Matrix<T>, pivots: &[usize], n: usize, zero: T, one: T, neg: impl Fn(&T) -> T) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); n];
        v[f] = one.clone();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = neg(&r[i][f]);
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::num::int;
    use crate::expr::Chart;

    fn q(m: &[&[i64]]) -> Matrix<Rational> {
        m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn determinant_and_pfaffian() {
        let a = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&a, &int(0)), int(18));
        let s = q(&[&[0, 1, 2, 3], &[-1, 0, 4, 5], &[-2, -4, 0, 6], &[-3, -5, -6, 0]]);
        let pf = pfaffian(&s, &int(0));
        assert_eq!(pf, int(1 * 6 - 2 * 5 + 3 * 4));
        assert_eq!(&pf * &pf, det(&s, &int(0)));
    }

    #[test]
    fn polynomial_inverse() {
        let c = Chart::numbered("R2", "x", 2);
        let x = Scalar::var(&c, 0);
        let one = Scalar::one(&c);
        let z = Scalar::zero(&c);
        let m = vec![vec![one.clone(), x.clone()], vec![z.clone(), one.clone()]];
        let inv = poly_inverse(&m, &z).unwrap();
        assert_eq!(inv[0][1], -&x);
        let id = mat_mul(&m, &inv, &z);
        assert_eq!(id, vec![vec![one.clone(), z.clone()], vec![z.clone(), one]]);
        let sing = vec![vec![x.clone(), z.clone()], vec![z.clone(), x]];
        assert!(poly_inverse(&sing, &z).is_none());
    }

    #[test]
    fn rank_and_kernel() {
        let a = q(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank_exact(&a), 1);
        let k = kernel_exact(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot: Rational = a[0].iter().zip(v).map(|(x, y)| x * y).sum();
            assert!(dot.is_zero());
        }
        let kf = kernel_f64(&vec![vec![0.0, 0.0, 1.0]], 3, 1e-12);
        assert_eq!(kf, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(2, 3).len(), 0);
    }
}
