use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::cartan::{exterior_derivative, DiffForm};
use crate::expr::num::{int, rat};
use crate::expr::{Chart, CycleSpec, Document, ManifoldSpec, Numeric, Presentation, Rational, Scalar};
use crate::linalg;
use crate::poisson::{format_point, involutivity_check, CheckConfig, Distribution, InvolutivityVerdict};

use super::engine::{dense_form, leaf_pfaffian};
use super::model::ModelManifold;
use super::HomotopyError;

/// Positive weight multiplying every scenario form. The polynomial parts
/// stored in the scenario are multiplied by it on evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    None,
    /// `1/(π(1+u²+v²)²)` on the first two coordinates: the round area form
    /// of the unit sphere in a stereographic chart, normalised to total
    /// mass 1.
    SphereArea,
}

impl Density {
    pub fn name(&self) -> &'static str {
        match self {
            Density::None => "none",
            Density::SphereArea => "sphere-area",
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Density::None => 1.0,
            Density::SphereArea => {
                let d = 1.0 + x[0] * x[0] + x[1] * x[1];
                1.0 / (std::f64::consts::PI * d * d)
            }
        }
    }

    /// Polynomial form that vanishes exactly when `δ·β` is closed. With
    /// `δ = 1/(πD²)`, `d(δβ) = δ/D·(D dβ + N∧β)` where `N = -4(u du + v dv)`.
    pub fn closedness_residual(&self, beta: &DiffForm) -> Result<DiffForm, HomotopyError> {
        let db = exterior_derivative(beta);
        match self {
            Density::None => Ok(db),
            Density::SphereArea => {
                let c = beta.chart();
                let u = Scalar::var(c, 0);
                let v = Scalar::var(c, 1);
                let d = &(&Scalar::one(c) + &u.pow(2)) + &v.pow(2);
                let n = DiffForm::basis(c, &[0])?
                    .mul_scalar(&u)?
                    .checked_add(&DiffForm::basis(c, &[1])?.mul_scalar(&v)?)?
                    .scale(&int(-4));
                Ok(db.mul_scalar(&d)?.checked_add(&n.wedge(beta)?)?)
            }
        }
    }

    /// Factor `δ/D` turning the closedness residual into `d(δβ)`.
    pub fn residual_weight(&self, x: &[f64]) -> f64 {
        match self {
            Density::None => 1.0,
            Density::SphereArea => self.value(x) / (1.0 + x[0] * x[0] + x[1] * x[1]),
        }
    }
}

/// A model manifold with a foliation `F₀` (as a coframe), an extension
/// `ω₀` of a leafwise nondegenerate 2-form, and a closed 2-form `φ`
/// standing for a prescribed class near the core.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub model: ModelManifold,
    pub coframe: Vec<DiffForm>,
    pub omega0: DiffForm,
    pub phi: DiffForm,
    pub density: Density,
    pub bbox: (Rational, Rational),
    pub times: Vec<Rational>,
    pub cycles: Vec<CycleSpec>,
    pub epsilon: Option<Rational>,
}

fn missing(field: &str) -> HomotopyError {
    HomotopyError::invalid("scenario header incomplete", format!("no {field} given"))
}

/// `S2x<s0>`: the sphere factor at height `s0`.
pub(crate) fn parse_sphere_cycle(name: &str) -> Option<Rational> {
    crate::expr::parse_rational(name.strip_prefix("S2x")?)
}

impl Scenario {
    pub fn from_document(doc: &Document, cfg: &CheckConfig) -> Result<Self, HomotopyError> {
        let h = &doc.header;
        let spec = h.manifold.clone().ok_or_else(|| missing("manifold"))?;
        let rho = h.rho.clone().ok_or_else(|| missing("rho"))?;
        let form_named = |field: &str, name: &Option<String>, default: &str| -> Result<DiffForm, HomotopyError> {
            let key = name.as_deref().unwrap_or(default);
            doc.form(key).cloned().ok_or_else(|| missing(field))
        };
        let omega0 = form_named("omega0", &h.omega0, "omega0")?;
        let phi = form_named("phi", &h.phi, "phi")?;
        let chart = omega0.chart().clone();
        for (what, f) in [("omega0", &omega0), ("phi", &phi)] {
            if f.degree() != 2 {
                return Err(HomotopyError::invalid(
                    &format!("{what} not a 2-form"),
                    format!("degree {}", f.degree()),
                ));
            }
        }
        if phi.chart() != &chart {
            return Err(HomotopyError::invalid(
                "forms on different charts",
                format!("omega0 on {}, phi on {}", chart.name(), phi.chart().name()),
            ));
        }
        let (_, decl) = doc
            .distribution(h.foliation.as_deref())
            .ok_or_else(|| missing("foliation"))?;
        if decl.chart != chart {
            return Err(HomotopyError::invalid(
                "forms on different charts",
                format!("foliation on {}, omega0 on {}", decl.chart.name(), chart.name()),
            ));
        }
        let coframe = match &decl.presentation {
            Presentation::Kernel(fs) => fs.clone(),
            Presentation::Span(vs) => Distribution::from_frame(&chart, vs.clone(), cfg)?.coframe()?,
        };
        let bbox = h.bbox.clone().unwrap_or((int(-1), int(1)));
        if bbox.0 >= bbox.1 {
            return Err(HomotopyError::invalid("box empty", format!("{} >= {}", bbox.0, bbox.1)));
        }
        let bound = bbox.0.abs().max(bbox.1.abs());
        let model = ModelManifold::new(&spec, &chart, &rho, &bound)?;
        let density = match h.density.as_deref() {
            None | Some("none") => Density::None,
            Some("sphere-area") => Density::SphereArea,
            Some(other) => return Err(HomotopyError::invalid("unknown density", other.to_string())),
        };
        let sphere_line = matches!(&spec, ManifoldSpec::ProductWithLine(b) if **b == ManifoldSpec::Sphere(2));
        if density == Density::SphereArea && !sphere_line {
            return Err(HomotopyError::invalid(
                "density not invariant under compression",
                format!("sphere-area density needs product-line sphere 2, found {spec}"),
            ));
        }
        for c in &h.cycles {
            if parse_sphere_cycle(&c.name).is_none() || !sphere_line {
                return Err(HomotopyError::invalid(
                    "unknown cycle",
                    format!("{} on {spec}", c.name),
                ));
            }
        }
        let times = h
            .times
            .clone()
            .unwrap_or_else(|| (0..=8).map(|k| rat(k, 8)).collect());
        if let Some(t) = times.iter().find(|t| t.is_negative() || **t > Rational::one()) {
            return Err(HomotopyError::invalid("time outside [0, 1]", t.to_string()));
        }
        Ok(Scenario {
            name: h.name.clone().unwrap_or_else(|| "scenario".to_string()),
            model,
            coframe,
            omega0,
            phi,
            density,
            bbox,
            times,
            cycles: h.cycles.clone(),
            epsilon: h.epsilon.clone(),
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.model.chart()
    }

    pub fn dim(&self) -> usize {
        self.chart().dim()
    }

    pub fn leaf_dim(&self) -> usize {
        self.dim() - self.coframe.len()
    }

    /// Tensor grid with `k` points per axis on the box, all coordinates.
    pub fn box_grid(&self, k: usize) -> Vec<Vec<Rational>> {
        let axes = vec![axis(&self.bbox.0, &self.bbox.1, k); self.dim()];
        tensor(&axes)
    }

    /// Tensor grid on the closure of `U_ρ`: normal coordinates range over
    /// `[-ρ, ρ]`, the others over the box, and points farther than `ρ` from
    /// the core are dropped.
    pub fn region_grid(&self, k: usize) -> Vec<Vec<Rational>> {
        let rho = self.model.rho();
        let axes: Vec<Vec<Rational>> = (0..self.dim())
            .map(|i| {
                if self.model.normal_coords().contains(&i) {
                    axis(&-rho.clone(), rho, k)
                } else {
                    axis(&self.bbox.0, &self.bbox.1, k)
                }
            })
            .collect();
        let r2 = rho * rho;
        tensor(&axes)
            .into_iter()
            .filter(|p| self.model.dist2(p) <= r2)
            .collect()
    }

    /// Checks every hypothesis the construction uses and derives the
    /// closeness budget `ε`.
    pub fn validate(self, cfg: &CheckConfig, k: usize) -> Result<ValidatedScenario, HomotopyError> {
        let chart = self.chart().clone();
        let n = self.dim();
        let residual = self.density.closedness_residual(&self.phi)?;
        if !residual.is_zero() {
            return Err(HomotopyError::invalid("phi not closed", format!("d(phi) has residual {residual}")));
        }
        let dist = Distribution::from_coframe(&chart, self.coframe.clone(), cfg).map_err(|e| {
            HomotopyError::invalid("foliation not regular", e.to_string())
        })?;
        if let InvolutivityVerdict::NotInvolutive { index, residual } = involutivity_check(&dist)? {
            return Err(HomotopyError::invalid(
                "foliation not involutive",
                format!("coframe form {} gives {residual}", index + 1),
            ));
        }
        let leaf = self.leaf_dim();
        if leaf == 0 || leaf % 2 == 1 {
            return Err(HomotopyError::invalid("leaf dimension odd", format!("leaves have dimension {leaf}")));
        }

        // exact leafwise nondegeneracy of the polynomial part at probe points
        let probes = cfg.probe_points(n);
        let w0 = dense_form(&self.omega0);
        let cof: Vec<Vec<Scalar>> = self
            .coframe
            .iter()
            .map(|a| (0..n).map(|i| a.component(&[i])).collect())
            .collect();
        for p in &probes {
            let a: Vec<Vec<Rational>> = cof.iter().map(|r| r.iter().map(|s| s.eval(p)).collect()).collect();
            let w: Vec<Rational> = w0.iter().map(|s| s.eval(p)).collect();
            let frame = linalg::kernel_exact(&a, n);
            if leaf_pfaffian(&frame, &w, n).is_exact_zero() {
                return Err(HomotopyError::invalid(
                    "omega0 degenerate on leaves",
                    format!("at {}", format_point(p)),
                ));
            }
        }

        // compression: identity at 0, core fixed, image of g_1 inside U_{ρ/2}
        let half = self.model.rho() / int(2);
        if self.model.compression(&Rational::zero()) != super::PolyMap::identity(&chart) {
            return Err(HomotopyError::invalid("compression not identity at 0", ""));
        }
        let g1 = self.model.compression(&Rational::one());
        let mut pts = self.box_grid(k);
        pts.extend(probes.iter().cloned());
        if let Some(p) = pts.iter().find(|p| !self.model.in_u(&g1.eval(p), &half)) {
            return Err(HomotopyError::invalid(
                "compression misses U_rho/2",
                format!("g_1 maps {} outside", format_point(p)),
            ));
        }

        // ε from the leafwise pfaffian of ω₀ on the closure of U_ρ
        let region = self.region_grid(k);
        if region.is_empty() {
            return Err(HomotopyError::EmptyRegion("closure of U_rho".to_string()));
        }
        let min_pf = region
            .iter()
            .map(|p| {
                let x: Vec<f64> = p.iter().map(Numeric::as_f64).collect();
                let a: Vec<Vec<f64>> = cof.iter().map(|r| r.iter().map(|s| s.eval(&x)).collect()).collect();
                let d = self.density.value(&x);
                let w: Vec<f64> = w0.iter().map(|s| d * s.eval(&x)).collect();
                let frame = linalg::kernel_f64(&a, n, 1e-12);
                leaf_pfaffian(&frame, &w, n).abs()
            })
            .fold(f64::INFINITY, f64::min);
        if min_pf == 0.0 {
            return Err(HomotopyError::invalid("omega0 degenerate on leaves", "on the closure of U_rho"));
        }
        let derived = 0.5 * min_pf;
        let used = match &self.epsilon {
            Some(e) if e.as_f64() > derived => {
                return Err(HomotopyError::invalid(
                    "epsilon exceeds derived budget",
                    format!("header epsilon {} > {derived:.6e}", e.as_f64()),
                ))
            }
            Some(e) => e.as_f64(),
            None => derived,
        };
        let max_distance = match check_epsilon_close(&self.omega0, &self.phi, &region, used, self.density)? {
            EpsilonCheck::Ok { max_distance } => max_distance,
            EpsilonCheck::Violation { point, distance, count } => {
                return Err(HomotopyError::invalid(
                    "phi not epsilon-close to omega0",
                    format!(
                        "distance {distance:.6e} >= epsilon {used:.6e} at {} ({count} grid points)",
                        format_point(&point)
                    ),
                ))
            }
        };
        Ok(ValidatedScenario {
            scenario: self,
            grid_per_axis: k,
            epsilon_derived: derived,
            epsilon_used: used,
            max_distance,
        })
    }
}

/// A scenario that passed validation, with its closeness budget.
#[derive(Debug, Clone)]
pub struct ValidatedScenario {
    pub scenario: Scenario,
    pub grid_per_axis: usize,
    pub epsilon_derived: f64,
    pub epsilon_used: f64,
    pub max_distance: f64,
}

fn axis(lo: &Rational, hi: &Rational, k: usize) -> Vec<Rational> {
    if k <= 1 {
        return vec![(lo + hi) / int(2)];
    }
    (0..k)
        .map(|j| lo + (hi - lo) * rat(j as i64, (k - 1) as i64))
        .collect()
}

fn tensor(axes: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for ax in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                ax.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonCheck {
    Ok { max_distance: f64 },
    /// First violating grid point, its distance, and how many grid points
    /// violate the budget.
    Violation { point: Vec<Rational>, distance: f64, count: usize },
}

/// Coefficient-wise sup distance between `φ` and `ω₀` (both weighted by
/// the density) at each point; OK iff below `epsilon` everywhere.
pub fn check_epsilon_close(
    omega0: &DiffForm,
    phi: &DiffForm,
    points: &[Vec<Rational>],
    epsilon: f64,
    density: Density,
) -> Result<EpsilonCheck, HomotopyError> {
    if omega0.chart() != phi.chart() {
        return Err(HomotopyError::Cartan(crate::cartan::CartanError::ChartMismatch {
            left: omega0.chart().name().to_string(),
            right: phi.chart().name().to_string(),
        }));
    }
    if omega0.degree() != phi.degree() {
        return Err(HomotopyError::Cartan(crate::cartan::CartanError::DegreeMismatch {
            expected: omega0.degree(),
            found: phi.degree(),
        }));
    }
    if points.is_empty() {
        return Err(HomotopyError::EmptyRegion("no grid points".to_string()));
    }
    let diff = phi.checked_sub(omega0)?;
    let dists: Vec<f64> = points
        .iter()
        .map(|p| {
            let sup = diff
                .eval_at(p)
                .values()
                .map(|c| c.abs())
                .fold(Rational::zero(), |a, b| a.max(b));
            let x: Vec<f64> = p.iter().map(Numeric::as_f64).collect();
            density.value(&x) * sup.as_f64()
        })
        .collect();
    let bad: Vec<usize> = (0..points.len()).filter(|&i| dists[i] >= epsilon).collect();
    match bad.first() {
        None => Ok(EpsilonCheck::Ok {
            max_distance: dists.iter().cloned().fold(0.0, f64::max),
        }),
        Some(&i) => Ok(EpsilonCheck::Violation {
            point: points[i].clone(),
            distance: dists[i],
            count: bad.len(),
        }),
    }
}
