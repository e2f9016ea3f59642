//! The generalized quadratic operator `T = [[a I, A], [c A*, b I]]` and the
//! off-diagonal operator `A`.
//!
//! `A` is either a concrete finite matrix or a diagonal-spectrum model of an
//! infinite-dimensional operator. The latter is described only by a list of
//! singular values, their supremum and whether that supremum is attained,
//! which is all the norm-attainment and numerical-range results depend on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, check_finite, Matrix, ToleranceConfig};

/// The scalars `a`, `b`, `c` of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct GqoParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

#[derive(Deserialize)]
struct RawParams {
    a: Complex64,
    b: Complex64,
    c: Complex64,
}

impl TryFrom<RawParams> for GqoParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        GqoParams::new(raw.a, raw.b, raw.c)
    }
}

impl GqoParams {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        check_finite(a, "parameter a")?;
        check_finite(b, "parameter b")?;
        check_finite(c, "parameter c")?;
        Ok(Self { a, b, c })
    }

    /// Real-valued shorthand, mostly for tests and examples.
    pub fn real(a: f64, b: f64, c: f64) -> Self {
        Self {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
            c: Complex64::new(c, 0.0),
        }
    }
}

/// Singular values of an operator whose norm is a declared supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct DiagonalSpectrum {
    values: Vec<f64>,
    sup: f64,
    sup_attained: bool,
}

#[derive(Deserialize)]
struct RawSpectrum {
    values: Vec<f64>,
    sup: f64,
    sup_attained: bool,
}

impl TryFrom<RawSpectrum> for DiagonalSpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        DiagonalSpectrum::new(raw.values, raw.sup, raw.sup_attained)
    }
}

impl DiagonalSpectrum {
    /// Validates the declaration: values are finite, nonnegative and bounded
    /// by `sup`, and `sup_attained` agrees (exactly) with the listed values.
    pub fn new(values: Vec<f64>, sup: f64, sup_attained: bool) -> Result<Self> {
        if !(sup.is_finite() && sup >= 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "sup must be finite and nonnegative, got {sup}"
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "values must be finite and nonnegative, got {bad}"
            )));
        }
        if let Some(big) = values.iter().find(|&&v| v > sup) {
            return Err(Error::InvalidSpectrum(format!("value {big} exceeds sup {sup}")));
        }
        let listed = values.contains(&sup);
        if listed != sup_attained {
            return Err(Error::InvalidSpectrum(format!(
                "sup_attained = {sup_attained} but sup {sup} {} among the listed values",
                if listed { "appears" } else { "does not appear" }
            )));
        }
        Ok(Self {
            values,
            sup,
            sup_attained,
        })
    }

    /// Truncation `{1 - 1/n : n = 1..=count}` of an operator with norm 1
    /// that is never attained.
    pub fn harmonic_approach(count: usize) -> Self {
        let values = (1..=count).map(|n| 1.0 - 1.0 / n as f64).collect();
        Self::new(values, 1.0, false).expect("1 - 1/n < 1")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn sup_attained(&self) -> bool {
        self.sup_attained
    }
}

/// The off-diagonal operator `A : K -> H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OperatorModel {
    Matrix(Matrix),
    Diagonal(DiagonalSpectrum),
}

impl OperatorModel {
    pub fn is_zero(&self) -> bool {
        match self {
            OperatorModel::Matrix(m) => m.is_zero(),
            OperatorModel::Diagonal(d) => d.sup == 0.0,
        }
    }

    pub fn as_matrix(&self) -> Option<&Matrix> {
        match self {
            OperatorModel::Matrix(m) => Some(m),
            OperatorModel::Diagonal(_) => None,
        }
    }
}

/// How the norm of a model is realized.
#[derive(Debug, Clone, PartialEq)]
pub enum NormWitness {
    /// Unit vector `x` with `||A x|| = ||A||`.
    Vector(Vec<Complex64>),
    /// Index of a maximizing singular value in a diagonal spectrum.
    BasisIndex(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelNorm {
    pub value: f64,
    pub attained: bool,
    pub witness: Option<NormWitness>,
}

/// `||A||`, whether it is attained, and a maximizing vector when it is.
pub fn model_norm(model: &OperatorModel, cfg: &ToleranceConfig) -> Result<ModelNorm> {
    match model {
        OperatorModel::Matrix(m) => {
            let top = linalg::top_singular(m, cfg)?;
            Ok(ModelNorm {
                value: top.value,
                attained: true,
                witness: Some(NormWitness::Vector(top.right)),
            })
        }
        OperatorModel::Diagonal(d) => {
            let witness = if d.sup_attained {
                d.values.iter().position(|&v| v == d.sup).map(NormWitness::BasisIndex)
            } else {
                None
            };
            Ok(ModelNorm {
                value: d.sup,
                attained: d.sup_attained,
                witness,
            })
        }
    }
}

/// `T` laid out as a dense block matrix, with `A` of size `m x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledGqo {
    params: GqoParams,
    block: Matrix,
    m: usize,
    n: usize,
}

impl AssembledGqo {
    pub fn params(&self) -> GqoParams {
        self.params
    }

    pub fn block(&self) -> &Matrix {
        &self.block
    }

    pub fn into_block(self) -> Matrix {
        self.block
    }

    /// `(dim H, dim K)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// The `(1, 2)` block, i.e. `A`.
    pub fn off_diagonal(&self) -> Matrix {
        self.block.block(0, self.m, self.m, self.n)
    }

    /// Reads `(a, b, c, A)` back out of the four blocks.
    pub fn extract(&self) -> (GqoParams, Matrix) {
        let a = self.block[(0, 0)];
        let b = self.block[(self.m, self.m)];
        let off = self.off_diagonal();
        // c is recovered from any nonzero entry of the lower-left block.
        let lower = self.block.block(self.m, 0, self.n, self.m);
        let c = (0..self.m)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| off[(i, j)].norm() > 0.0)
            .map_or(self.params.c, |(i, j)| lower[(j, i)] / off[(i, j)].conj());
        (GqoParams { a, b, c }, off)
    }

    /// `T* T`.
    pub fn gram(&self) -> Matrix {
        self.block.gram()
    }
}

/// Lays out `[[a I_m, A], [c A*, b I_n]]`.
pub fn assemble(params: GqoParams, model: &OperatorModel) -> Result<AssembledGqo> {
    let off = model.as_matrix().ok_or(Error::UnsupportedModel)?;
    Ok(assemble_matrix(params, off))
}

pub fn assemble_matrix(params: GqoParams, off: &Matrix) -> AssembledGqo {
    let (m, n) = (off.rows(), off.cols());
    let mut block = Matrix::zeros(m + n, m + n);
    for i in 0..m {
        block[(i, i)] = params.a;
    }
    for j in 0..n {
        block[(m + j, m + j)] = params.b;
    }
    block.set_block(0, m, off);
    block.set_block(m, 0, &off.adjoint().scale(params.c));
    AssembledGqo {
        params,
        block,
        m,
        n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn assemble_scalar_examples() {
        let one = OperatorModel::Matrix(Matrix::from_real(1, 1, &[1.0]).unwrap());
        let t = assemble(GqoParams::real(0.0, 0.0, 0.0), &one).unwrap();
        assert_eq!(t.block(), &Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap());

        let p = GqoParams::new(c(2.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let t = assemble(p, &one).unwrap();
        let expected =
            Matrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]])
                .unwrap();
        assert_eq!(t.block(), &expected);
    }

    #[test]
    fn assemble_block_example() {
        let a = Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.5]).unwrap();
        let t = assemble(GqoParams::real(1.0, 1.0, -1.0), &OperatorModel::Matrix(a)).unwrap();
        #[rustfmt::skip]
        let expected = Matrix::from_real(4, 4, &[
            1.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 0.5,
            -1.0, 0.0, 1.0, 0.0,
            0.0, -0.5, 0.0, 1.0,
        ]).unwrap();
        assert_eq!(t.block(), &expected);
    }

    #[test]
    fn diagonal_model_cannot_be_assembled() {
        let model = OperatorModel::Diagonal(DiagonalSpectrum::harmonic_approach(10));
        assert_eq!(
            assemble(GqoParams::real(0.0, 0.0, 0.0), &model),
            Err(Error::UnsupportedModel)
        );
    }

    #[test]
    fn model_norm_examples() {
        let cfg = ToleranceConfig::default();
        let approach = OperatorModel::Diagonal(DiagonalSpectrum::harmonic_approach(100));
        assert_eq!(
            model_norm(&approach, &cfg).unwrap(),
            ModelNorm {
                value: 1.0,
                attained: false,
                witness: None
            }
        );

        let attained = OperatorModel::Diagonal(DiagonalSpectrum::new(vec![3.0, 4.0], 4.0, true).unwrap());
        assert_eq!(
            model_norm(&attained, &cfg).unwrap(),
            ModelNorm {
                value: 4.0,
                attained: true,
                witness: Some(NormWitness::BasisIndex(1))
            }
        );

        let jordan = OperatorModel::Matrix(Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap());
        let norm = model_norm(&jordan, &cfg).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-15);
        assert!(norm.attained);
        let Some(NormWitness::Vector(x)) = norm.witness else {
            panic!("expected a vector witness");
        };
        assert!(x[0].norm() < 1e-15);
        assert!((x[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_declaration_is_checked() {
        assert!(DiagonalSpectrum::new(vec![0.5, 1.0], 1.0, false).is_err());
        assert!(DiagonalSpectrum::new(vec![0.5], 1.0, true).is_err());
        assert!(DiagonalSpectrum::new(vec![1.5], 1.0, false).is_err());
        assert!(DiagonalSpectrum::new(vec![-0.5], 1.0, false).is_err());
        assert!(DiagonalSpectrum::new(vec![], 1.0, false).is_ok());
    }

    #[test]
    fn model_document_forms() {
        let m: OperatorModel = serde_json::from_str(
            r#"{"type":"matrix","rows":1,"cols":1,"entries":[[1.0,0.0]]}"#,
        )
        .unwrap();
        assert!(matches!(m, OperatorModel::Matrix(_)));
        let d: OperatorModel = serde_json::from_str(
            r#"{"type":"diagonal","values":[0.0,0.5],"sup":1.0,"sup_attained":false}"#,
        )
        .unwrap();
        assert!(matches!(d, OperatorModel::Diagonal(_)));
        assert!(serde_json::from_str::<OperatorModel>(
            r#"{"type":"diagonal","values":[1.0],"sup":1.0,"sup_attained":false}"#
        )
        .is_err());
    }

    fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 25)
    }

    proptest! {
        #[test]
        fn assemble_then_extract_is_identity(
            m in 1usize..=4, n in 1usize..=4, e in entries(),
            a in (-3.0..3.0f64, -3.0..3.0f64),
            b in (-3.0..3.0f64, -3.0..3.0f64),
            cc in (-3.0..3.0f64, -3.0..3.0f64),
        ) {
            let off = Matrix::new(m, n, e[..m * n].iter().map(|&(x, y)| c(x, y)).collect()).unwrap();
            prop_assume!(!off.is_zero());
            let p = GqoParams::new(c(a.0, a.1), c(b.0, b.1), c(cc.0, cc.1)).unwrap();
            let t = assemble_matrix(p, &off);
            let (q, back) = t.extract();
            prop_assert_eq!(back, off);
            prop_assert_eq!(q.a, p.a);
            prop_assert_eq!(q.b, p.b);
            prop_assert!((q.c - p.c).norm() <= 1e-14 * (1.0 + p.c.norm()));
        }

        #[test]
        fn concrete_witness_realizes_norm(
            m in 1usize..=5, n in 1usize..=5, e in entries(),
        ) {
            let cfg = ToleranceConfig::default();
            let off = Matrix::new(m, n, e[..m * n].iter().map(|&(x, y)| c(x, y)).collect()).unwrap();
            let model = OperatorModel::Matrix(off.clone());
            let norm = model_norm(&model, &cfg).unwrap();
            prop_assert_eq!(norm.value, linalg::operator_norm(&off, &cfg).unwrap());
            let Some(NormWitness::Vector(x)) = norm.witness else { panic!() };
            let image = linalg::norm(&off.matvec(&x));
            prop_assert!((image - norm.value).abs() <= 1e-9 * (1.0 + norm.value));
            let adj = model_norm(&OperatorModel::Matrix(off.adjoint()), &cfg).unwrap();
            prop_assert!((adj.value - norm.value).abs() <= 1e-12 * (1.0 + norm.value));
        }
    }
}
