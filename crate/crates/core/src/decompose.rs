//! Writing `T = [[a I, A], [c A*, b I]]` as `Q + c Q* + k I` with `Q` quadratic.
//!
//! With `Q = [[a1 I, A], [0, b1 I]]` the identity needs
//! `a1 + c conj(a1) + k = a` and `b1 + c conj(b1) + k = b`:
//!
//! * `|c| != 1`: `a1 = (a - c conj(a)) / (1 - |c|^2)`, same for `b1`, `k = 0`.
//! * `a != b`, `c = (a - b)^2 / |a - b|^2`: `a1 = a - b`, `b1 = (a - b) / 2`,
//!   `k = 2b - a`.
//! * `a = b`, `|c| = 1`: `a1 = b1 = sqrt(c) / 2`, `k = a - sqrt(c)`.
//!
//! In the remaining case (`a != b`, `|c| = 1`, not aligned) no such
//! decomposition exists: `W(Q + cQ* + kI)` is always open, closed, or a
//! segment, while `W(T)` there can be the open disk plus `{a, b}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::Predicates;
use crate::linalg::{Matrix, ToleranceConfig};
use crate::model::GqoParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarCase {
    ScalarCase1,
    ScalarCase2,
    ScalarCase3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub a1: Complex64,
    pub b1: Complex64,
    pub k: Complex64,
    pub case_tag: ScalarCase,
}

impl Decomposition {
    /// `(a1 + c conj(a1) + k, b1 + c conj(b1) + k)`.
    pub fn diagonal(&self, c: Complex64) -> (Complex64, Complex64) {
        (
            self.a1 + c * self.a1.conj() + self.k,
            self.b1 + c * self.b1.conj() + self.k,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DecompositionOutcome {
    Decomposed(Decomposition),
    Impossible {
        reason: String,
        /// `||c| - 1|`.
        unit_c_defect: f64,
        /// `|c - (a - b)^2 / |a - b|^2|`.
        aligned_defect: f64,
    },
}

pub fn decompose_gqo(params: &GqoParams, cfg: &ToleranceConfig) -> DecompositionOutcome {
    let GqoParams { a, b, c } = *params;
    let pred = Predicates::of(params);
    let tol = cfg.eq_tol;
    let dec = if !pred.is_unit_c(tol) {
        let denom = 1.0 - c.norm_sqr();
        Decomposition {
            a1: (a - c * a.conj()) / denom,
            b1: (b - c * b.conj()) / denom,
            k: Complex64::new(0.0, 0.0),
            case_tag: ScalarCase::ScalarCase1,
        }
    } else if !pred.is_equal_diag(tol) && pred.is_aligned(tol) {
        let delta = a - b;
        Decomposition {
            a1: delta,
            b1: delta * 0.5,
            k: b * 2.0 - a,
            case_tag: ScalarCase::ScalarCase2,
        }
    } else if pred.is_equal_diag(tol) {
        let root = c.sqrt();
        Decomposition {
            a1: root * 0.5,
            b1: root * 0.5,
            k: a - root,
            case_tag: ScalarCase::ScalarCase3,
        }
    } else {
        return DecompositionOutcome::Impossible {
            reason: "a != b, |c| = 1 and c != (a - b)^2 / |a - b|^2: the numerical range is the open \
                     elliptical disk plus the two boundary points a and b, which no operator of the form \
                     Q + cQ* + kI with Q quadratic can have"
                .into(),
            unit_c_defect: pred.unit_c,
            aligned_defect: pred.aligned,
        };
    };
    DecompositionOutcome::Decomposed(dec)
}

/// `Q = [[a1 I, A], [0, b1 I]]`.
pub fn quadratic_part(dec: &Decomposition, off: &Matrix) -> Matrix {
    let (m, n) = (off.rows(), off.cols());
    let mut q = Matrix::zeros(m + n, m + n);
    for i in 0..m {
        q[(i, i)] = dec.a1;
    }
    for i in m..m + n {
        q[(i, i)] = dec.b1;
    }
    q.set_block(0, m, off);
    q
}

/// `Q + c Q* + k I`.
pub fn reconstruct(dec: &Decomposition, c: Complex64, off: &Matrix) -> Matrix {
    let q = quadratic_part(dec, off);
    let dim = q.rows();
    let sum = &q + &q.adjoint().scale(c);
    &sum + &Matrix::identity(dim).scale(dec.k)
}
