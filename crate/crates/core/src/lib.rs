//! Generalized quadratic operators `T = [[a I, A], [c A*, b I]]`.
//!
//! Closed-form norms, norm attainment with explicit witnesses, the numerical
//! range `W(T)` as an elliptical disk or segment with its exact closure, the
//! `Q + cQ* + kI` decomposition, and a sampling oracle that checks all of it
//! against dense matrices.
//!
//! ```
//! use quadrange::geometry::{gqo_numerical_range, Closure};
//! use quadrange::linalg::{Matrix, ToleranceConfig};
//! use quadrange::model::{GqoParams, OperatorModel};
//!
//! let params = GqoParams::real(0.0, 2.0, -1.0);
//! let model = OperatorModel::Matrix(Matrix::from_real(1, 1, &[1.0]).unwrap());
//! let region = gqo_numerical_range(&params, &model, &ToleranceConfig::default()).unwrap();
//! assert_eq!(*region.closure(), Closure::Closed);
//! ```

pub mod attainment;
pub mod decompose;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod norms;
pub mod oracle;
pub mod report;
pub mod selftest;
