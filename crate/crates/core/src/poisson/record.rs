use std::collections::BTreeMap;

use serde::Serialize;

use crate::expr::num::fmt_rational;
use crate::expr::Rational;

use super::{InvolutivityVerdict, LeafwiseVerdict, PoissonError, PoissonVerdict, RegularPoissonReport, RegularPoissonVerdict, Route};

pub fn format_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(fmt_rational).collect();
    format!("({})", parts.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeFailure {
    pub point: Vec<String>,
    pub rank: usize,
}

/// Machine-readable outcome of a Poisson or foliation check.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerdictRecord {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regularity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_triple: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobiator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_frame: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_failures: Option<Vec<ProbeFailure>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routes: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn failure(p: &(Vec<Rational>, usize)) -> ProbeFailure {
    ProbeFailure {
        point: p.0.iter().map(fmt_rational).collect(),
        rank: p.1,
    }
}

impl VerdictRecord {
    pub fn new(verdict: &str) -> Self {
        VerdictRecord {
            verdict: verdict.to_string(),
            ..Default::default()
        }
    }

    pub fn from_involutivity(v: &InvolutivityVerdict) -> Self {
        match v {
            InvolutivityVerdict::Involutive(_) => VerdictRecord::new("Involutive"),
            InvolutivityVerdict::NotInvolutive { residual, .. } => VerdictRecord {
                residual_form: Some(residual.to_string()),
                ..VerdictRecord::new("NotInvolutive")
            },
        }
    }

    /// `frame` holds the printed frame vectors the indices refer to.
    pub fn from_leafwise(v: &LeafwiseVerdict, frame: &[String]) -> Self {
        match v {
            LeafwiseVerdict::Closed => VerdictRecord::new("Closed"),
            LeafwiseVerdict::NotClosed { frame_indices, value } => VerdictRecord {
                witness_frame: Some(frame_indices.iter().map(|&i| frame[i].clone()).collect()),
                witness_value: Some(value.to_string()),
                ..VerdictRecord::new("NotClosed")
            },
        }
    }

    pub fn from_report(r: &RegularPoissonReport) -> Self {
        let mut rec = VerdictRecord::new(match &r.verdict {
            RegularPoissonVerdict::RegularPoisson => "RegularPoisson",
            RegularPoissonVerdict::NotPoisson => "NotPoisson",
            RegularPoissonVerdict::NotRegular => "NotRegular",
            RegularPoissonVerdict::Undecided(_) => "Undecided",
            RegularPoissonVerdict::Inconsistent => "Inconsistent",
        });
        if let RegularPoissonVerdict::Undecided(why) = &r.verdict {
            rec.note = Some(why.clone());
        }
        match &r.regular {
            Ok(rb) => {
                rec.rank = Some(rb.rank());
                rec.regularity = Some(rb.status().as_str().to_string());
            }
            Err(PoissonError::NotRegular { first, second }) => {
                rec.probe_failures = Some(vec![failure(first), failure(second)]);
            }
            Err(_) => {}
        }
        let mut routes = BTreeMap::new();
        match &r.schouten {
            PoissonVerdict::Poisson => {
                routes.insert("schouten".to_string(), "Poisson".to_string());
            }
            PoissonVerdict::NotPoisson { triple, jacobiator } => {
                routes.insert("schouten".to_string(), "NotPoisson".to_string());
                let c = jacobiator.chart();
                rec.witness_triple = Some(triple.iter().map(|&i| c.coord(i).to_string()).collect());
                rec.jacobiator = Some(jacobiator.to_string());
            }
        }
        routes.insert(
            "involutive".to_string(),
            match &r.involutive {
                Route::Decided(v) if v.is_involutive() => "Involutive".to_string(),
                Route::Decided(_) => "NotInvolutive".to_string(),
                Route::Undecidable(why) => format!("Undecidable: {why}"),
            },
        );
        routes.insert(
            "leafwise_closed".to_string(),
            match &r.leafwise {
                Route::Decided(v) if v.is_closed() => "Closed".to_string(),
                Route::Decided(_) => "NotClosed".to_string(),
                Route::Undecidable(why) => format!("Undecidable: {why}"),
            },
        );
        if let Route::Decided(InvolutivityVerdict::NotInvolutive { residual, .. }) = &r.involutive {
            rec.residual_form = Some(residual.to_string());
        }
        rec.routes = Some(routes);
        rec
    }
}
