use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::expr::num::{fmt_rational, rat};
use crate::expr::{Numeric, Rational};
use crate::poisson::{format_point, CheckConfig};

use super::engine::{gram, Homotopy};
use super::model::{sigma, CutoffValue};
use super::scenario::{parse_sphere_cycle, ValidatedScenario};
use super::HomotopyError;

pub const DEFAULT_GRID: usize = 9;
/// Total grid size cap; larger dimensions get fewer points per axis.
pub const MAX_GRID_POINTS: usize = 6561;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub cfg: CheckConfig,
    /// Points per axis; `None` picks the largest value up to
    /// `DEFAULT_GRID` within `MAX_GRID_POINTS`.
    pub grid: Option<usize>,
    /// Budget for the numeric checks (periods, non-exact residuals).
    pub tolerance: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            cfg: CheckConfig::default(),
            grid: None,
            tolerance: 1e-6,
        }
    }
}

impl RunOptions {
    pub fn grid_per_axis(&self, dim: usize) -> usize {
        if let Some(k) = self.grid {
            return k.max(1);
        }
        let mut k = DEFAULT_GRID;
        while k > 2 && k.pow(dim as u32) > MAX_GRID_POINTS {
            k -= 1;
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodRecord {
    pub cycle: String,
    pub expected: String,
    pub computed: f64,
    pub error: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonRecord {
    pub derived: f64,
    pub used: f64,
    pub max_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub t: String,
    pub point: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub manifold: String,
    pub leaf_dim: usize,
    pub grid_per_axis: usize,
    pub grid_points: usize,
    pub times: Vec<String>,
    pub epsilon: EpsilonRecord,
    pub endpoint_ok: bool,
    pub stationary_foliation_ok: bool,
    pub junction_ok: bool,
    pub half_equals_phi_ok: bool,
    pub compression_ok: bool,
    pub min_pfaffian: f64,
    pub min_pfaffian_at: Witness,
    pub pfaffian_sign_constant: bool,
    pub d_omega1_exact: bool,
    pub d_omega1_residual: f64,
    pub omega1_is_pullback: bool,
    pub periods: Vec<PeriodRecord>,
    pub bivector_rank: usize,
    pub bivector_rank_constant: bool,
    pub failures: Vec<String>,
    pub verdict: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Per-point results over all sampled times.
struct Cell {
    pf: Vec<f64>,
    rank_ok: bool,
}

fn to_f64(p: &[Rational]) -> Vec<f64> {
    p.iter().map(Numeric::as_f64).collect()
}

/// Numeric rank of the bivector `Yᵀ(-G⁻¹)Y` built from a leafwise frame.
fn bivector_rank(frame: &[Vec<f64>], w: &[f64], n: usize) -> Option<usize> {
    let k = frame.len();
    let g = gram(frame, w, n);
    let gm = DMatrix::from_fn(k, k, |a, b| g[a][b]);
    let q = -gm.try_inverse()?;
    let y = DMatrix::from_fn(k, n, |a, i| frame[a][i]);
    let p = y.transpose() * q * y;
    let sv = p.singular_values();
    let top = sv.max();
    Some(sv.iter().filter(|s| **s > 1e-9 * top.max(1.0)).count())
}

/// Runs the homotopy on a validated scenario and checks its defining
/// properties.
pub fn run_homotopy(v: &ValidatedScenario, opts: &RunOptions) -> Result<VerificationReport, HomotopyError> {
    let sc = &v.scenario;
    let h = Homotopy::new(sc);
    let n = sc.dim();
    let k = v.grid_per_axis;
    let half = rat(1, 2);
    let probes = opts.cfg.probe_points(n);
    let mut points = sc.box_grid(k);
    points.extend(probes.iter().cloned());
    let taus = sc.times.clone();
    let ts: Vec<Rational> = taus.iter().map(sigma).collect();
    let mut failures = Vec::new();

    // endpoint: ω(0) = ω₀ as a stored object and pointwise
    let endpoint_ok = h.stage_one_symbolic(&Rational::zero(), &CutoffValue::One)? == sc.omega0
        && points.par_iter().all(|p| {
            let w0: Vec<Rational> = crate::homotopy::engine::dense_form(&sc.omega0)
                .iter()
                .map(|s| s.eval(p))
                .collect();
            h.stage_one::<Rational>(&Rational::zero(), p) == Some(w0)
        });
    if !endpoint_ok {
        failures.push("endpoint".to_string());
    }

    // F(t) = F₀ for sampled t <= ½
    let stationary_foliation_ok = ts.iter().filter(|t| **t <= half).all(|t| {
        probes
            .iter()
            .all(|p| h.coframe::<Rational>(t, p) == h.coframe::<Rational>(&Rational::zero(), p))
    });
    if !stationary_foliation_ok {
        failures.push("stationary foliation".to_string());
    }

    // junction at t = ½
    let junction_ok = probes.iter().all(|p| {
        let exact = h.stage_one::<Rational>(&half, p) == h.stage_two::<Rational>(&half, p)
            && h.coframe::<Rational>(&half, p) == h.pulled_coframe::<Rational>(&Rational::zero(), p);
        let x = to_f64(p);
        exact && h.stage_one::<f64>(&half, &x) == h.stage_two::<f64>(&half, &x)
    });
    if !junction_ok {
        failures.push("junction".to_string());
    }

    // ω(½) = φ on U_{ρ/2}
    let rho_half = sc.model.rho() / Rational::from_integer(2.into());
    let phi_dense = crate::homotopy::engine::dense_form(&sc.phi);
    let half_equals_phi_ok = points.iter().filter(|p| sc.model.in_u(p, &rho_half)).all(|p| {
        h.stage_one::<Rational>(&half, p) == Some(phi_dense.iter().map(|s| s.eval(p)).collect())
    });
    if !half_equals_phi_ok {
        failures.push("omega(1/2) = phi near the core".to_string());
    }

    // compression invariants
    let g1 = sc.model.compression(&Rational::one());
    let compression_ok = sc.model.compression(&Rational::zero()) == super::PolyMap::identity(sc.chart())
        && points.iter().all(|p| sc.model.in_u(&g1.eval(p), &rho_half))
        && ts.iter().all(|t| {
            let s = (t * Rational::from_integer(2.into()) - Rational::one()).max(Rational::zero());
            let g = sc.model.compression(&s);
            probes.iter().all(|p| {
                let c = sc.model.core_point(p);
                g.eval(&c) == c
            })
        });
    if !compression_ok {
        failures.push("compression".to_string());
    }

    // leafwise nondegeneracy over grid × times, and bivector rank at probes
    let leaf = sc.leaf_dim();
    let cells: Vec<Cell> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let x = to_f64(p);
            let mut pf = Vec::with_capacity(ts.len());
            let mut rank_ok = true;
            for t in &ts {
                let (val, frame, w) = h.leaf_pfaffian(t, &x);
                pf.push(val);
                if i >= points.len() - probes.len() {
                    rank_ok &= frame.len() == leaf && bivector_rank(&frame, &w, n) == Some(leaf);
                }
            }
            Cell { pf, rank_ok }
        })
        .collect();
    let mut min_pfaffian = f64::INFINITY;
    let mut min_at = (0usize, 0usize);
    let mut pfaffian_sign_constant = true;
    let mut bivector_rank_constant = true;
    for (i, c) in cells.iter().enumerate() {
        for (j, v) in c.pf.iter().enumerate() {
            if v.abs() < min_pfaffian {
                min_pfaffian = v.abs();
                min_at = (i, j);
            }
        }
        let s0 = c.pf[0].signum();
        pfaffian_sign_constant &= c.pf.iter().all(|v| v.signum() == s0 && *v != 0.0);
        bivector_rank_constant &= c.rank_ok;
    }
    if !(min_pfaffian > 0.0) {
        failures.push(format!(
            "leafwise degenerate at t = {}, {}",
            fmt_rational(&ts[min_at.1]),
            format_point(&points[min_at.0])
        ));
    }
    if !pfaffian_sign_constant {
        failures.push("pfaffian sign".to_string());
    }
    if !bivector_rank_constant {
        failures.push("bivector rank".to_string());
    }

    // closedness of ω(1), and agreement with the path evaluator
    let omega1 = h.omega_one_symbolic()?;
    let residual = sc.density.closedness_residual(&omega1)?;
    let d_omega1_exact = residual.is_zero();
    let d_omega1_residual = if d_omega1_exact {
        0.0
    } else {
        points
            .iter()
            .map(|p| {
                let x = to_f64(p);
                let wgt = sc.density.residual_weight(&x);
                residual.eval_at(&x).values().fold(0.0f64, |a, c| a.max((wgt * c).abs()))
            })
            .fold(0.0, f64::max)
    };
    if !d_omega1_exact && !(d_omega1_residual < opts.tolerance) {
        failures.push("d(omega(1)) nonzero".to_string());
    }
    let omega1_dense = crate::homotopy::engine::dense_form(&omega1);
    let omega1_is_pullback = points.par_iter().all(|p| {
        h.omega::<Rational>(&Rational::one(), p) == Some(omega1_dense.iter().map(|s| s.eval(p)).collect())
    });
    if !omega1_is_pullback {
        failures.push("omega(1) differs from g_1^*phi".to_string());
    }

    // periods over the listed cycles
    let periods: Vec<PeriodRecord> = sc
        .cycles
        .iter()
        .map(|c| {
            let s0 = parse_sphere_cycle(&c.name).expect("validated cycle").as_f64();
            let computed = sphere_period(&h, s0);
            let expected = c.period.as_f64();
            let error = (computed - expected).abs();
            PeriodRecord {
                cycle: c.name.clone(),
                expected: fmt_rational(&c.period),
                computed,
                error,
                ok: error < opts.tolerance,
            }
        })
        .collect();
    for p in periods.iter().filter(|p| !p.ok) {
        failures.push(format!("period over {}", p.cycle));
    }

    let verdict = if failures.is_empty() { "pass" } else { "fail" }.to_string();
    Ok(VerificationReport {
        scenario: sc.name.clone(),
        manifold: sc.model.spec().to_string(),
        leaf_dim: leaf,
        grid_per_axis: k,
        grid_points: points.len(),
        times: taus.iter().map(fmt_rational).collect(),
        epsilon: EpsilonRecord {
            derived: v.epsilon_derived,
            used: v.epsilon_used,
            max_distance: v.max_distance,
        },
        endpoint_ok,
        stationary_foliation_ok,
        junction_ok,
        half_equals_phi_ok,
        compression_ok,
        min_pfaffian,
        min_pfaffian_at: Witness {
            t: fmt_rational(&ts[min_at.1]),
            point: format_point(&points[min_at.0]),
        },
        pfaffian_sign_constant,
        d_omega1_exact,
        d_omega1_residual,
        omega1_is_pullback,
        periods,
        bivector_rank: leaf,
        bivector_rank_constant,
        failures,
        verdict,
    })
}

/// `∫ ω(1)` over the sphere factor at height `s0`, in polar coordinates on
/// the stereographic chart with `r = tan ψ`.
fn sphere_period(h: &Homotopy<'_>, s0: f64) -> f64 {
    let density = h.scenario().density;
    let one = Rational::one();
    let inner = |theta: f64| {
        let (sn, cs) = theta.sin_cos();
        quadrature::double_exponential::integrate(
            |psi: f64| {
                let r = psi.tan();
                let x = [r * cs, r * sn, s0];
                let w = h.omega::<f64>(&one, &x).expect("f64 evaluation is total");
                let sec = 1.0 / psi.cos();
                density.value(&x) * w[0] * r * sec * sec
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-12,
        )
        .integral
    };
    quadrature::double_exponential::integrate(inner, 0.0, 2.0 * std::f64::consts::PI, 1e-11).integral
}
