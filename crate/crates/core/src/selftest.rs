//! Built-in regression instances and a quick invariant sweep over them.

use num_complex::Complex64;
use serde::Serialize;

use crate::attainment::gram_witness;
use crate::decompose::{decompose_gqo, reconstruct, DecompositionOutcome};
use crate::error::Result;
use crate::geometry::membership;
use crate::linalg::{operator_norm, Matrix, ToleranceConfig};
use crate::model::{assemble_matrix, DiagonalSpectrum, OperatorModel};
use crate::oracle::verify_region;
use crate::report::{analyze, ModelDocument};

pub struct Instance {
    pub name: &'static str,
    pub document: ModelDocument,
}

fn instance(name: &'static str, a: Complex64, b: Complex64, c: Complex64, model: OperatorModel) -> Instance {
    Instance {
        name,
        document: ModelDocument {
            a,
            b,
            c,
            model,
        },
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn matrix(rows: usize, cols: usize, data: &[f64]) -> OperatorModel {
    OperatorModel::Matrix(Matrix::from_real(rows, cols, data).expect("literal matrix"))
}

pub fn regression_instances() -> Vec<Instance> {
    let approach = || OperatorModel::Diagonal(DiagonalSpectrum::harmonic_approach(100));
    vec![
        instance("jordan-block", re(0.0), re(0.0), re(0.0), matrix(1, 1, &[1.0])),
        instance("ellipse", re(1.0), re(-1.0), re(0.0), matrix(1, 1, &[1.0])),
        instance("aligned-segment", re(0.0), re(2.0), re(1.0), matrix(1, 1, &[1.0])),
        instance("circle-attained", re(0.0), re(2.0), re(-1.0), matrix(1, 1, &[1.0])),
        instance("circle-not-attained", re(0.0), re(2.0), re(-1.0), approach()),
        instance("open-ellipse", re(1.0), re(-1.0), re(0.0), approach()),
        instance("equal-diagonal", re(1.0), re(1.0), Complex64::new(0.0, 1.0), matrix(1, 1, &[1.0])),
        instance("case-one-block", re(1.0), re(1.0), re(-1.0), matrix(2, 2, &[1.0, 0.0, 0.0, 0.5])),
        instance("complex-coupling", re(2.0), re(1.0), Complex64::new(0.0, 1.0), matrix(1, 1, &[1.0])),
        instance(
            "rectangular",
            Complex64::new(0.5, 1.0),
            Complex64::new(-1.0, 0.25),
            Complex64::new(0.3, -0.6),
            matrix(2, 3, &[1.0, 0.5, 0.0, -0.25, 2.0, 1.0]),
        ),
        instance("zero-operator", re(3.0), Complex64::new(0.0, 7.0), re(5.0), matrix(1, 1, &[0.0])),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub instance: &'static str,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn line(instance: &'static str, check: &'static str, passed: bool, detail: String) -> CheckLine {
    CheckLine {
        instance,
        check,
        passed,
        detail,
    }
}

/// Runs the invariant checks on every regression instance.
pub fn run(cfg: &ToleranceConfig, samples: usize, angles: usize, seed: u64) -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    for inst in regression_instances() {
        let name = inst.name;
        let doc = &inst.document;
        let params = doc.params()?;
        let report = analyze(doc, cfg)?;

        let expected_closed = report.attainment.attains || doc.model.is_zero();
        lines.push(line(
            name,
            "closure-matches-attainment",
            report.region.is_closed() == expected_closed,
            format!("closed={} attains={}", report.region.is_closed(), report.attainment.attains),
        ));
        for (label, z) in [("a", params.a), ("b", params.b)] {
            let v = membership(&report.region.closed(), z, cfg);
            lines.push(line(
                name,
                if label == "a" { "a-in-closure" } else { "b-in-closure" },
                v.is_member(),
                format!("{:?}", v.value),
            ));
        }

        let OperatorModel::Matrix(off) = &doc.model else {
            continue;
        };
        let t = assemble_matrix(params, off).into_block();
        let direct = operator_norm(&t, cfg)?;
        let gap = (direct - report.norm.norm).abs();
        lines.push(line(
            name,
            "norm-formula",
            gap <= 1e-8 * (1.0 + direct),
            format!("closed form {} vs eigensolver {direct} (gap {gap:.2e})", report.norm.norm),
        ));

        let witness = gram_witness(&params, off, cfg)?;
        let bound = 1e-8 * (1.0 + report.norm.norm_squared);
        lines.push(line(
            name,
            "witness-residual",
            witness.residual <= bound,
            format!("{:?} residual {:.2e}", witness.case_tag, witness.residual),
        ));

        let verify = verify_region(&params, off, cfg, samples, angles, seed)?;
        lines.push(line(
            name,
            "samples-contained",
            verify.passed,
            format!(
                "violation {:.2e} (allowed {:.2e})",
                verify.max_outward_violation, verify.violation_tolerance
            ),
        ));
        let hausdorff_limit = 1e-9 * (1.0 + report.region.scale());
        lines.push(line(
            name,
            "support-boundary-matches",
            verify.hausdorff_closed <= hausdorff_limit,
            format!("hausdorff {:.2e} (allowed {hausdorff_limit:.2e})", verify.hausdorff_closed),
        ));

        if let DecompositionOutcome::Decomposed(dec) = decompose_gqo(&params, cfg) {
            let diff = reconstruct(&dec, params.c, off).max_abs_diff(&t);
            lines.push(line(
                name,
                "decomposition-reconstructs",
                diff <= 1e-12 * (1.0 + t.max_abs()),
                format!("{:?} max entry difference {diff:.2e}", dec.case_tag),
            ));
        }
    }
    Ok(lines)
}
