//! Model documents, analysis reports and their canonical JSON form.
//!
//! Canonical JSON is compact, keeps struct field order, and prints every
//! float in exponent form with 17 significant digits, so parsing a report
//! and writing it again reproduces the same bytes.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::attainment::{attainment_report, WitnessCase};
use crate::error::{Error, Result};
use crate::geometry::{self, classify_degeneracy, union_case, Degeneracy, Predicates, RegionDescriptor, UnionCase};
use crate::linalg::ToleranceConfig;
use crate::model::{model_norm, GqoParams, OperatorModel};
use crate::norms::{gqo_norm_unit, NormReport};

/// `{"a": [re, im], "b": ..., "c": ..., "model": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub model: OperatorModel,
}

impl ModelDocument {
    pub fn new(params: GqoParams, model: OperatorModel) -> Self {
        Self {
            a: params.a,
            b: params.b,
            c: params.c,
            model,
        }
    }

    pub fn params(&self) -> Result<GqoParams> {
        GqoParams::new(self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttainmentSummary {
    pub attains: bool,
    pub case_tag: WitnessCase,
    /// Present for concrete matrices.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeBranch {
    /// `A = 0`: the closed segment `[a, b]`.
    ZeroOperator,
    /// `||A||` attained: `W(S_d)`.
    Attained,
    /// `||A||` not attained: `E_d`.
    NotAttained,
}

/// Which results produced the region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub branch: RangeBranch,
    pub degeneracy: Degeneracy,
    /// The `E_d` case of the scalars; describes the region when the norm is
    /// not attained, and the region the same scalars would give otherwise.
    pub union_case: UnionCase,
    pub union_case_hypothetical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: ModelDocument,
    pub operator_norm: f64,
    pub norm: NormReport,
    pub attainment: AttainmentSummary,
    pub region: RegionDescriptor,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

/// Classification thresholds closer than this multiple of `eq_tol` are
/// reported.
pub const WARNING_BAND: f64 = 10.0;

/// Distances within this many ulps of zero count as exact hits.
const EXACT_BAND: f64 = 64.0 * f64::EPSILON;

/// Warnings for classification predicates that sit near their threshold
/// without being exact.
pub fn near_threshold_warnings(params: &GqoParams, cfg: &ToleranceConfig) -> Vec<String> {
    let p = Predicates::of(params);
    let band = WARNING_BAND * cfg.eq_tol;
    [
        ("|c| = 1", p.unit_c),
        ("a = b", p.equal_diag),
        ("c = (a - b)^2 / |a - b|^2", p.aligned),
    ]
    .into_iter()
    .filter(|&(_, dist)| dist > EXACT_BAND && dist < band)
    .map(|(name, dist)| {
        format!(
            "condition {name} holds only to {dist:.3e}, within {WARNING_BAND} x eq_tol of the threshold; classification is fragile"
        )
    })
    .collect()
}

pub fn analyze(doc: &ModelDocument, cfg: &ToleranceConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    let params = doc.params()?;
    let norm_a = model_norm(&doc.model, cfg)?;
    let norm = gqo_norm_unit(params.a, params.b, params.c, norm_a.value)?;
    let attainment = attainment_report(&params, &doc.model, cfg)?;
    let region = geometry::gqo_numerical_range(&params, &doc.model, cfg)?;

    let branch = if doc.model.is_zero() {
        RangeBranch::ZeroOperator
    } else if norm_a.attained {
        RangeBranch::Attained
    } else {
        RangeBranch::NotAttained
    };
    let closed_expected = branch != RangeBranch::NotAttained;
    if region.is_closed() != closed_expected || attainment.attains != norm_a.attained {
        return Err(Error::InternalInconsistency(
            "region closure disagrees with attainment".into(),
        ));
    }

    Ok(AnalysisReport {
        input: doc.clone(),
        operator_norm: norm_a.value,
        norm,
        attainment: AttainmentSummary {
            attains: attainment.attains,
            case_tag: attainment.case_tag,
            residual: attainment.witness.as_ref().map(|_| attainment.residual),
        },
        region,
        provenance: Provenance {
            branch,
            degeneracy: classify_degeneracy(&params, cfg),
            union_case: union_case(&params, cfg),
            union_case_hypothetical: branch != RangeBranch::NotAttained,
        },
        warnings: near_threshold_warnings(&params, cfg),
    })
}

struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialize document: {e}")))?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}
