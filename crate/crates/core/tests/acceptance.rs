//! End-to-end acceptance: one PASS/FAIL line per criterion.
//!
//! Tolerances: characteristic classes, Jacobi, Frobenius and the flat
//! homotopy are exact; the sphere period must agree within 1e-6.
//! Runtime bounds are checked on the measured wall clock.

mod common;

use std::time::{Duration, Instant};

use folhp::cartan::{exterior_derivative, schouten_bracket, DiffForm, Multivector};
use folhp::charclass::{bott_example_pipeline, haefliger_corollary_check, CohomologyData, HaefligerReason, HaefligerVerdict};
use folhp::expr::num::int;
use folhp::expr::{parse_document, Rational, Scalar};
use folhp::homotopy::{run_homotopy, RunOptions, Scenario, VerificationReport};
use folhp::poisson::{
    bivector_matrix, involutivity_check, leafwise_closed_check, poisson_check, rank_and_image, to_pair, CheckConfig,
    Distribution, InvolutivityVerdict, PoissonVerdict, RegularityStatus,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(name: &str, bound: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = bound.map_or(true, |b| took < b);
    let ok = out.ok && in_time;
    let limit = bound.map_or(String::new(), |b| format!(" (limit {:.0?})", b));
    println!(
        "{} {name}: {} [{:.2?}{limit}]",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        took
    );
    ok
}

// ---------------------------------------------------------------------------
// truncated power series oracle over the integers

fn series_mul(a: &[i64], b: &[i64], top: usize) -> Vec<i64> {
    let mut out = vec![0; top + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= top {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn binomial_power(c: i64, e: usize, top: usize) -> Vec<i64> {
    (0..e).fold(vec![1], |acc, _| series_mul(&acc, &[1, c], top))
}

/// `(1+t)^{2n} / (1+2t)` modulo `t^{2n}`, by long division.
fn chern_of_d(n: usize) -> Vec<i64> {
    let top = 2 * n - 1;
    let num = binomial_power(1, 2 * n, top);
    let mut q = vec![0i64; top + 1];
    for k in 0..=top {
        q[k] = num[k] - if k > 0 { 2 * q[k - 1] } else { 0 };
    }
    q
}

fn mono(c: i64, k: usize) -> String {
    match k {
        0 => c.to_string(),
        1 => format!("{c}t"),
        _ => format!("{c}t^{k}"),
    }
}

fn bott_example() -> Outcome {
    let r = bott_example_pipeline(3, 2).unwrap();
    let cd = chern_of_d(3);
    // D has complex rank 2n-2 = 4; ν = O(2) has c1 = 2t
    let e_d = cd[4];
    let expected = [
        ("e_nu", r.e_nu.clone(), mono(2, 1)),
        ("e_D", r.e_d.clone(), mono(e_d, 4)),
        ("e_D e_nu", r.e_product.clone(), mono(2 * e_d, 5)),
        ("e_T", r.e_tangent.clone(), mono(6, 5)),
        ("p1_nu", r.p1_nu.clone(), mono(4, 2)),
        ("witness", r.criterion.witness_value.clone().unwrap_or_default(), mono(16, 4)),
    ];
    let mut ok = expected.iter().all(|(_, got, want)| got == want);
    ok &= r.criterion.witness_degree == Some(8) && r.verdict == "ObstructionNonzero" && r.criterion.q == 2;
    let silent = bott_example_pipeline(2, 2).unwrap();
    ok &= silent.verdict == "Silent";
    let shown: Vec<String> = expected.iter().map(|(k, g, _)| format!("{k}={g}")).collect();
    Outcome {
        ok,
        detail: format!(
            "n=3 {} Pont^{} {}, n=2 {}",
            shown.join(" "),
            r.criterion.witness_degree.unwrap_or(0),
            r.verdict,
            silent.verdict
        ),
    }
}

fn bott_identities() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=8 {
        let r = bott_example_pipeline(n, 2).unwrap();
        let cd = chern_of_d(n);
        let top = 2 * n - 1;
        let back = series_mul(&cd, &[1, 2], top);
        let oracle_ok = back == binomial_power(1, 2 * n, top) && 2 * cd[2 * n - 2] == 2 * n as i64;
        let product = mono(2 * n as i64, 2 * n - 1);
        if !(r.identities_hold() && oracle_ok && r.e_product == product && r.e_tangent == product) {
            bad.push(n);
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: format!("c(D)c(O(2)) = (1+t)^2n and e(D)e(nu) = 2n t^(2n-1) for n in 2..=8, failures {bad:?}"),
    }
}

// ---------------------------------------------------------------------------
// Jacobi identity oracle

/// `J(x_i,x_j,x_k) = Σ_cyc Σ_l π^{lk} ∂_l π^{ij}` from the coordinate brackets.
fn jacobiator(pi: &Multivector, i: usize, j: usize, k: usize) -> Scalar {
    let m = bivector_matrix(pi);
    let n = pi.dim();
    let term = |a: usize, b: usize, c: usize| {
        (0..n).fold(Scalar::zero(pi.chart()), |s, l| &s + &(&m[l][c] * &m[a][b].partial(l)))
    };
    &(&term(i, j, k) + &term(j, k, i)) + &term(k, i, j)
}

fn catalog_bivectors() -> Vec<(String, Multivector)> {
    let mut out = Vec::new();
    for text in [folhp::catalog::BIVECTORS, folhp::catalog::HEISENBERG_R3, folhp::catalog::NONPOISSON_R4] {
        let doc = parse_document(text).unwrap();
        for item in doc.items() {
            if let Some((name, m)) = doc.bivector(Some(&item.name)) {
                out.push((name.to_string(), m.clone()));
            }
        }
    }
    out
}

fn jacobi_oracle() -> Outcome {
    let cat = catalog_bivectors();
    let mut mismatches = Vec::new();
    let mut non_poisson = 0;
    for (name, pi) in &cat {
        let n = pi.dim();
        let mut first = None;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let jac = jacobiator(pi, i, j, k);
                    if first.is_none() && !jac.is_zero() {
                        first = Some(([i, j, k], jac));
                    }
                }
            }
        }
        let agrees = match (poisson_check(pi).unwrap(), &first) {
            (PoissonVerdict::Poisson, None) => true,
            (PoissonVerdict::NotPoisson { triple, jacobiator }, Some((t, j))) => {
                non_poisson += 1;
                triple == *t && jacobiator == *j
            }
            _ => false,
        };
        // the bracket itself is twice the Jacobiator on every triple
        let br = schouten_bracket(pi, pi).unwrap();
        let doubled = folhp::linalg::subsets(n, 3)
            .iter()
            .all(|t| br.component(t) == jacobiator(pi, t[0], t[1], t[2]).scale(&int(2)));
        if !(agrees && doubled) {
            mismatches.push(name.clone());
        }
    }
    Outcome {
        ok: mismatches.is_empty() && cat.len() >= 10,
        detail: format!(
            "{} bivectors ({} non-Poisson), mismatches {:?}",
            cat.len(),
            non_poisson,
            mismatches
        ),
    }
}

fn regular_poisson_equivalence() -> Outcome {
    let cfg = CheckConfig::default();
    let mut tested = Vec::new();
    let mut bad = Vec::new();
    for (name, pi) in catalog_bivectors() {
        let Ok(rb) = rank_and_image(&pi, &cfg) else { continue };
        if rb.status() != RegularityStatus::Certified {
            continue;
        }
        let Ok(inv) = involutivity_check(rb.image()) else { continue };
        let (dist, form) = to_pair(&rb).unwrap();
        let closed = leafwise_closed_check(&dist, form.extension()).unwrap().is_closed();
        let schouten = poisson_check(&pi).unwrap().is_poisson();
        if schouten != (inv.is_involutive() && closed) {
            bad.push(name.clone());
        }
        tested.push(format!("{name}:{}", if schouten { "poisson" } else { "not" }));
    }
    Outcome {
        ok: bad.is_empty() && tested.len() >= 4,
        detail: format!("checked {}, mismatches {:?}", tested.join(" "), bad),
    }
}

fn frobenius() -> Outcome {
    let cfg = CheckConfig::default();
    let verdict = |text: &str| {
        let doc = parse_document(text).unwrap();
        let alpha = doc.form_of_degree(1, None).unwrap().1.clone();
        let chart = alpha.chart().clone();
        let d = Distribution::from_coframe(&chart, vec![alpha], &cfg).unwrap();
        involutivity_check(&d).unwrap()
    };
    let contact = verdict(folhp::catalog::CONTACT_R3);
    let flat = verdict(folhp::catalog::KER_DZ_R3);
    let volume = |c: &DiffForm| DiffForm::basis(c.chart(), &[0, 1, 2]).unwrap();
    let contact_ok = match &contact {
        InvolutivityVerdict::NotInvolutive { residual, .. } => *residual == volume(residual),
        _ => false,
    };
    let residual = match &contact {
        InvolutivityVerdict::NotInvolutive { residual, .. } => residual.to_string(),
        _ => "none".into(),
    };
    // independent oracle: dα ∧ α for α = dz - y dx
    let doc = parse_document(folhp::catalog::CONTACT_R3).unwrap();
    let alpha = doc.form_of_degree(1, None).unwrap().1;
    let oracle = exterior_derivative(alpha).wedge(alpha).unwrap();
    Outcome {
        ok: contact_ok && flat.is_involutive() && oracle == volume(&oracle),
        detail: format!(
            "ker(dz - y dx) involutive={} residual {residual}; ker(dz) involutive={}",
            contact.is_involutive(),
            flat.is_involutive()
        ),
    }
}

// ---------------------------------------------------------------------------
// calculus properties, replayed deterministically

fn replay<S: Strategy>(cases: usize, strat: S, prop: impl Fn(S::Value) -> bool) -> usize {
    let mut runner = TestRunner::new(Config::default());
    (0..cases)
        .filter(|_| !prop(strat.new_tree(&mut runner).unwrap().current()))
        .count()
}

fn calculus_suite() -> Outcome {
    use common::*;
    const CASES: usize = 100;
    let d2 = replay(CASES, any_form(3, 2), |a| exterior_derivative(&exterior_derivative(&a)).is_zero());
    let natural = replay(CASES, (map_comps(3), any_form(3, 2)), |(g, a)| {
        let c = chart(3);
        let g = folhp::homotopy::PolyMap::new(&c, &c, g.iter().map(|r| poly(&c, r)).collect()).unwrap();
        g.pullback(&exterior_derivative(&a)).unwrap() == exterior_derivative(&g.pullback(&a).unwrap())
    });
    let wedge = replay(CASES, (any_form(3, 2), any_form(3, 2)), |(a, b)| {
        a.wedge(&b).unwrap() == b.wedge(&a).unwrap().scale(&sign(a.degree() * b.degree()))
    });
    let pairs = (1usize..=2, 1usize..=2).prop_flat_map(|(p, q)| (multivector(3, p), multivector(3, q)));
    let schouten = replay(CASES, pairs, |(a, b)| {
        let s: Rational = -sign((a.degree() - 1) * (b.degree() - 1));
        schouten_bracket(&a, &b).unwrap() == schouten_bracket(&b, &a).unwrap().scale(&s)
    });
    let failures = d2 + natural + wedge + schouten;
    Outcome {
        ok: failures == 0,
        detail: format!(
            "{CASES} instances each: d^2=0 {d2} fail, g*d=dg* {natural} fail, graded commutativity {wedge} fail, Schouten symmetry {schouten} fail"
        ),
    }
}

// ---------------------------------------------------------------------------
// homotopy runs

fn homotopy(text: &str) -> VerificationReport {
    let opts = RunOptions::default();
    let doc = parse_document(text).unwrap();
    let sc = Scenario::from_document(&doc, &opts.cfg).unwrap();
    let k = opts.grid_per_axis(sc.dim());
    let v = sc.validate(&opts.cfg, k).unwrap();
    run_homotopy(&v, &opts).unwrap()
}

fn r5_flat() -> Outcome {
    let r = homotopy(folhp::catalog::R5_FLAT);
    let ok = r.endpoint_ok
        && r.junction_ok
        && r.min_pfaffian > 0.0
        && r.times.len() == 9
        && r.d_omega1_exact
        && r.d_omega1_residual == 0.0
        && r.passed();
    Outcome {
        ok,
        detail: format!(
            "endpoint {} junction {} min pfaffian {:.3e} over {}^5 grid x {} times, d(omega(1)) exact {} residual {}",
            r.endpoint_ok,
            r.junction_ok,
            r.min_pfaffian,
            r.grid_per_axis,
            r.times.len(),
            r.d_omega1_exact,
            r.d_omega1_residual
        ),
    }
}

fn s2xr() -> Outcome {
    let r = homotopy(folhp::catalog::S2XR);
    let period = r.periods.first();
    let ok = period.is_some_and(|p| p.error < 1e-6 && p.ok)
        && r.min_pfaffian > 0.0
        && r.pfaffian_sign_constant
        && r.passed();
    Outcome {
        ok,
        detail: format!(
            "period {} expected {} error {:.2e}, min pfaffian {:.3e}, sign constant {}",
            period.map_or(f64::NAN, |p| p.computed),
            period.map_or(String::new(), |p| p.expected.clone()),
            period.map_or(f64::NAN, |p| p.error),
            r.min_pfaffian,
            r.pfaffian_sign_constant
        ),
    }
}

// ---------------------------------------------------------------------------
// Haefliger table and determinism

fn haefliger_and_determinism() -> Outcome {
    let data = |flags: &[(usize, bool)], zero_above: Option<usize>| CohomologyData {
        flags: flags.iter().copied().collect(),
        zero_above,
        dim: None,
    };
    let cases = [
        // H^i = 0 for i >= 2, q = 1
        (data(&[], Some(1)), 1, HaefligerVerdict::Applies),
        // CP^5 x C: H^4 ≠ 0, q = 2
        (
            data(&[(4, false), (6, false), (8, false), (10, false)], Some(10)),
            2,
            HaefligerVerdict::DoesNotApply(HaefligerReason::Nonzero(4)),
        ),
        // nothing known
        (data(&[], None), 2, HaefligerVerdict::DoesNotApply(HaefligerReason::Unknown(4))),
        // everything above q + 1 explicitly zero
        (data(&[(3, true), (4, true)], Some(4)), 1, HaefligerVerdict::Applies),
    ];
    let table_ok = cases.iter().all(|(d, q, want)| haefliger_corollary_check(d, *q) == *want);

    let run = |args: &[&str]| {
        let mut full = vec!["folhp", "--json", "--seed", "17"];
        full.extend_from_slice(args);
        folhp::cli::run_with_env(full, None).stdout
    };
    let commands: [&[&str]; 4] = [
        &["check-poisson", "catalog:nonpoisson_r4.fol"],
        &["bott", "--n", "3"],
        &["check-involutive", "catalog:contact_r3.fol"],
        &["homotopy", "catalog:s2xr.scn"],
    ];
    let identical = commands.iter().all(|c| {
        let (a, b) = (run(c), run(c));
        !a.is_empty() && a == b
    });
    Outcome {
        ok: table_ok && identical,
        detail: format!("truth table 4 cases ok={table_ok}, byte-identical JSON over {} commands={identical}", commands.len()),
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        check("cp5 characteristic classes", Some(secs(1)), bott_example),
        check("consistency identities 2<=n<=8", Some(secs(1)), bott_identities),
        check("Schouten vs Jacobiator oracle", Some(secs(5)), jacobi_oracle),
        check("regular Poisson equivalence", None, regular_poisson_equivalence),
        check("Frobenius", None, frobenius),
        check("calculus property suite", None, calculus_suite),
        check("homotopy r5_flat", Some(secs(30)), r5_flat),
        check("homotopy s2xr", Some(secs(30)), s2xr),
        check("Haefliger table and determinism", None, haefliger_and_determinism),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len());
}
