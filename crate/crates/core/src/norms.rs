//! Closed-form norm of `T = [[a I, d A], [c A*, b I]]`.
//!
//! With `N = ||A||`:
//!
//! ```text
//! r = |a|^2 + |b|^2 + N^2 (|c|^2 + |d|^2)
//! s = 2 |ab - c d N^2|
//! ||T|| = ((r + s)^(1/2) + (r - s)^(1/2)) / 2
//! ||T||^2 = (r + (r^2 - s^2)^(1/2)) / 2
//! ```
//!
//! `r^2 - s^2` is evaluated as a sum of nonnegative terms
//! `(|a|^2 - |b|^2)^2 + (|c|^2 - |d|^2)^2 N^4 + 2 k N^2` with
//! `k = |b conj(d) + conj(a) c|^2 + |a conj(d) + conj(b) c|^2`, which is the
//! `d = 1` expansion carried to general `d`. Taking `sqrt(r - s)` as
//! `sqrt(r^2 - s^2) / sqrt(r + s)` avoids the cancellation in `r - s`.
//! Nothing here touches an eigensolver.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub r: f64,
    pub s: f64,
    pub norm: f64,
    pub norm_squared: f64,
    pub r2_minus_s2: f64,
}

fn check_norm_a(norm_a: f64) -> Result<()> {
    if norm_a.is_finite() && norm_a >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "operator norm must be finite and nonnegative, got {norm_a}"
        )))
    }
}

/// `(r, s)`; `s` is clamped to `r` only when it exceeds it by rounding noise.
pub fn rs_coefficients(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    norm_a: f64,
) -> Result<(f64, f64)> {
    check_norm_a(norm_a)?;
    let n2 = norm_a * norm_a;
    let r = a.norm_sqr() + b.norm_sqr() + n2 * (c.norm_sqr() + d.norm_sqr());
    let s = 2.0 * (a * b - c * d * n2).norm();
    clamp_s(r, s)
}

fn clamp_s(r: f64, s: f64) -> Result<(f64, f64)> {
    if s <= r {
        Ok((r, s))
    } else if s - r <= 1e-12 * r {
        Ok((r, r))
    } else {
        Err(Error::InternalInconsistency(format!("s = {s} exceeds r = {r}")))
    }
}

/// `(r^2 - s^2, k)` for general `d`.
fn r2_minus_s2_general(a: Complex64, b: Complex64, c: Complex64, d: Complex64, norm_a: f64) -> (f64, f64) {
    let n2 = norm_a * norm_a;
    let k = (b * d.conj() + a.conj() * c).norm_sqr() + (a * d.conj() + b.conj() * c).norm_sqr();
    let diag = a.norm_sqr() - b.norm_sqr();
    let off = c.norm_sqr() - d.norm_sqr();
    (diag * diag + off * off * n2 * n2 + 2.0 * k * n2, k)
}

/// `r^2 - s^2` in its expanded form for `d = 1`, together with
/// `k = |b + conj(a) c|^2 + |a + conj(b) c|^2`.
pub fn r2_minus_s2_expanded(a: Complex64, b: Complex64, c: Complex64, norm_a: f64) -> Result<(f64, f64)> {
    check_norm_a(norm_a)?;
    Ok(r2_minus_s2_general(a, b, c, Complex64::new(1.0, 0.0), norm_a))
}

fn report_from_parts(r: f64, s: f64, q: f64) -> NormReport {
    let sum = r + s;
    let root_sum = sum.sqrt();
    let root_q = q.sqrt();
    let root_diff = if sum > 0.0 { root_q / root_sum } else { 0.0 };
    NormReport {
        r,
        s,
        norm: 0.5 * (root_sum + root_diff),
        norm_squared: 0.5 * (r + root_q),
        r2_minus_s2: q,
    }
}

/// Norm of `[[a I, d A], [c A*, b I]]` given `||A||`.
pub fn gqo_norm(a: Complex64, b: Complex64, c: Complex64, d: Complex64, norm_a: f64) -> Result<NormReport> {
    let (r, s) = rs_coefficients(a, b, c, d, norm_a)?;
    let (q, _) = r2_minus_s2_general(a, b, c, d, norm_a);
    Ok(report_from_parts(r, s, q))
}

/// `gqo_norm` with `d = 1`, the form `T = [[a I, A], [c A*, b I]]`.
pub fn gqo_norm_unit(a: Complex64, b: Complex64, c: Complex64, norm_a: f64) -> Result<NormReport> {
    gqo_norm(a, b, c, Complex64::new(1.0, 0.0), norm_a)
}

/// Spectral norm of the 2x2 matrix `[[a, d], [c, b]]`.
pub fn matrix2x2_norm(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    let r = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
    let s = 2.0 * (a * b - c * d).norm();
    let diag = a.norm_sqr() - b.norm_sqr();
    let off = c.norm_sqr() - d.norm_sqr();
    let k = (b * d.conj() + a.conj() * c).norm_sqr() + (a * d.conj() + b.conj() * c).norm_sqr();
    let q = diag * diag + off * off + 2.0 * k;
    report_from_parts(r, s.min(r), q).norm
}
