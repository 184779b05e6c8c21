//! Verification campaigns. Each campaign runs a family of exact checks at
//! configured parameters and returns a [`CampaignReport`]; a campaign passes
//! iff every mandatory check passes. Informational records carry
//! measurements that are reported but never asserted.

mod campaigns;
mod sampling;

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::algebra::Field;
use crate::construction::{Budget, ConstructionError, MembershipCertificate, SpanQuery};
use crate::ore::OreError;
use crate::series::SeriesError;

pub use campaigns::{
    locate_escape, verify_ballot, verify_counterexample, verify_inclusions, verify_phi,
    verify_product_lemma, verify_series, verify_z_closure, EscapeResult,
};
pub use sampling::{random_block_generator, random_word, sample_z};

/// Version tag written into every report.
pub const SCHEMA_VERSION: &str = "dpring-report/1";

/// Campaign names accepted by [`run_campaign`].
pub const CAMPAIGNS: [&str; 8] = [
    "ballot",
    "z-closure",
    "inclusions",
    "product",
    "escape",
    "counterexample",
    "phi",
    "series",
];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Ore(#[from] OreError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("unknown campaign `{0}`")]
    UnknownCampaign(String),
}

impl HarnessError {
    /// Whether the failure is an exhausted enumeration or expansion budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            HarnessError::Construction(ConstructionError::Budget { .. })
                | HarnessError::Ore(OreError::BudgetExceeded { .. })
                | HarnessError::Construction(ConstructionError::Ore(OreError::BudgetExceeded { .. }))
        )
    }
}

/// Knobs shared by all campaigns.
#[derive(Clone, Debug)]
pub struct HarnessOptions {
    pub seed: u64,
    pub budget: Budget,
    /// Full expansions of `(x_0 X)^m` are refused above this `m`.
    pub expansion_budget: u64,
    /// Extra fields to rerun characteristic-sensitive checks over; their
    /// discrepancies are informational.
    pub extra_fields: Vec<Field>,
    /// Record wall-clock time per check (breaks byte-identical reruns).
    pub record_timings: bool,
    /// Embed full certificates instead of summaries.
    pub embed_certificates: bool,
    /// Also decide block-space queries by full elimination when the
    /// component is at most this large.
    pub cross_check_dim: u128,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            seed: 0x5eed,
            budget: Budget::default(),
            expansion_budget: crate::ore::DEFAULT_EXPANSION_BUDGET,
            extra_fields: Vec::new(),
            record_timings: false,
            embed_certificates: false,
            cross_check_dim: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ComponentRef {
    pub length: usize,
    pub degree: u64,
}

impl From<&SpanQuery> for ComponentRef {
    fn from(q: &SpanQuery) -> Self {
        ComponentRef {
            length: q.length,
            degree: q.degree,
        }
    }
}

/// One check inside a campaign.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<ComponentRef>,
    /// Mandatory checks decide the campaign; informational ones never do.
    pub mandatory: bool,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl CheckRecord {
    pub fn mandatory(claim: impl Into<String>, passed: bool, detail: Value) -> Self {
        CheckRecord {
            claim: claim.into(),
            component: None,
            mandatory: true,
            passed,
            detail,
            certificate: None,
            millis: None,
        }
    }

    pub fn info(claim: impl Into<String>, detail: Value) -> Self {
        CheckRecord {
            claim: claim.into(),
            component: None,
            mandatory: false,
            passed: true,
            detail,
            certificate: None,
            millis: None,
        }
    }

    pub fn at(mut self, component: ComponentRef) -> Self {
        self.component = Some(component);
        self
    }

    pub fn with_certificate(mut self, cert: Value) -> Self {
        self.certificate = Some(cert);
        self
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub passed: bool,
    pub mandatory: usize,
    pub failed: usize,
    pub informational: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub schema: &'static str,
    pub campaign: String,
    pub params: Value,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    #[serde(skip)]
    started: Option<Instant>,
    #[serde(skip)]
    record_timings: bool,
}

impl CampaignReport {
    pub fn new(campaign: &str, params: Value, opts: &HarnessOptions) -> Self {
        CampaignReport {
            schema: SCHEMA_VERSION,
            campaign: campaign.to_string(),
            params,
            seed: opts.seed,
            checks: Vec::new(),
            summary: Summary {
                passed: true,
                mandatory: 0,
                failed: 0,
                informational: 0,
            },
            started: opts.record_timings.then(Instant::now),
            record_timings: opts.record_timings,
        }
    }

    pub fn push(&mut self, mut check: CheckRecord) {
        if self.record_timings {
            let now = Instant::now();
            if let Some(start) = self.started {
                check.millis = Some(now.duration_since(start).as_millis() as u64);
            }
            self.started = Some(now);
        }
        if check.mandatory {
            self.summary.mandatory += 1;
            if !check.passed {
                self.summary.failed += 1;
                self.summary.passed = false;
            }
        } else {
            self.summary.informational += 1;
        }
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.mandatory && !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A compact certificate record, or the full certificate when requested.
pub(crate) fn certificate_value(
    cert: &MembershipCertificate,
    verified: bool,
    opts: &HarnessOptions,
) -> Value {
    if opts.embed_certificates {
        let mut v = serde_json::to_value(cert).expect("certificate serializes");
        v["verified"] = Value::Bool(verified);
        return v;
    }
    serde_json::json!({
        "verdict": cert.verdict,
        "route": cert.route,
        "witness_terms": cert.witness.len(),
        "functional_support": cert.functional.as_ref().map(|f| f.values.len()),
        "verified": verified,
    })
}

/// Parameters of a named campaign, as read from a config or the CLI.
#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub params: crate::construction::ConstructionParams,
    pub k: u32,
    pub h: u64,
    pub trials: usize,
    pub m_max: u64,
    pub degree_cap: u64,
    pub lengths: Vec<usize>,
    pub dimension: usize,
}

/// Runs a campaign by name.
pub fn run_campaign(
    name: &str,
    cfg: &CampaignConfig,
    opts: &HarnessOptions,
) -> Result<CampaignReport, HarnessError> {
    match name {
        "ballot" => verify_ballot(cfg.m_max, opts),
        "z-closure" => verify_z_closure(&cfg.params, cfg.k, cfg.trials, opts),
        "inclusions" => verify_inclusions(&cfg.params, cfg.k, &cfg.lengths, cfg.degree_cap, opts),
        "product" => verify_product_lemma(&cfg.params, cfg.k, cfg.trials, opts),
        "escape" => locate_escape(&cfg.params, cfg.k, cfg.h, opts).map(|r| r.report),
        "counterexample" => verify_counterexample(&cfg.params, cfg.k, cfg.h, opts),
        "phi" => verify_phi(&cfg.params, cfg.k, cfg.trials, opts),
        "series" => verify_series(cfg.dimension, cfg.trials, opts),
        other => Err(HarnessError::UnknownCampaign(other.to_string())),
    }
}
