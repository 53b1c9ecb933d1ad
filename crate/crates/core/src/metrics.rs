//! Evaluation metrics for a fitted pair `(β₁, β₂)`.
//!
//! Predictions are accumulated sample by sample over columns in ascending
//! order, so results do not depend on how the solver computed its products.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SclError};
use crate::model::{Iterate, ProblemData};

/// How the per-view residual norms enter [`mse_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MseVariant {
    /// `(‖y − Xβ₁‖ + ‖y − Zβ₂‖)/n`.
    #[default]
    Norm,
    /// `(‖y − Xβ₁‖² + ‖y − Zβ₂‖²)/n`.
    Squared,
}

fn check_shape(data: &ProblemData, beta: &Iterate) -> Result<()> {
    if beta.p1() != data.p1() || beta.p2() != data.p2() {
        return Err(SclError::DimensionMismatch(format!(
            "solution has blocks ({}, {}), data has ({}, {})",
            beta.p1(),
            beta.p2(),
            data.p1(),
            data.p2()
        )));
    }
    Ok(())
}

fn predictions(data: &ProblemData, beta: &Iterate) -> (Vec<f64>, Vec<f64>) {
    let row = |m: &ndarray::Array2<f64>, b: &ndarray::Array1<f64>, i: usize| {
        let mut acc = 0.0;
        for j in 0..b.len() {
            acc += m[[i, j]] * b[j];
        }
        acc
    };
    (0..data.n())
        .map(|i| (row(data.x(), beta.beta1(), i), row(data.z(), beta.beta2(), i)))
        .unzip()
}

/// Two-view classification error rate
/// `(#{sign(Xβ₁) ≠ y} + #{sign(Zβ₂) ≠ y})/n`, with `sign(t) = 1` for `t > 0`
/// and 0 otherwise. Ranges over `[0, 2]`.
pub fn cer(data: &ProblemData, beta: &Iterate) -> Result<f64> {
    check_shape(data, beta)?;
    if data.y().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(SclError::InvalidArgument("CER requires responses in {0, 1}".into()));
    }
    let (xb, zb) = predictions(data, beta);
    let label = |t: f64| if t > 0.0 { 1.0 } else { 0.0 };
    let mut errors = 0usize;
    for (i, &y) in data.y().iter().enumerate() {
        errors += usize::from(label(xb[i]) != y) + usize::from(label(zb[i]) != y);
    }
    Ok(errors as f64 / data.n() as f64)
}

/// Cross-view disagreement `‖Xβ₁ − Zβ₂‖/n`.
pub fn ccv(data: &ProblemData, beta: &Iterate) -> Result<f64> {
    check_shape(data, beta)?;
    let (xb, zb) = predictions(data, beta);
    let mut sq = 0.0;
    for (u, v) in xb.iter().zip(&zb) {
        sq += (u - v) * (u - v);
    }
    Ok(sq.sqrt() / data.n() as f64)
}

/// `(‖y − Xβ₁‖ + ‖y − Zβ₂‖)/n`, norms unsquared.
pub fn mse(data: &ProblemData, beta: &Iterate) -> Result<f64> {
    mse_with(data, beta, MseVariant::Norm)
}

pub fn mse_with(data: &ProblemData, beta: &Iterate, variant: MseVariant) -> Result<f64> {
    check_shape(data, beta)?;
    let (xb, zb) = predictions(data, beta);
    let (mut s1, mut s2) = (0.0, 0.0);
    for (i, &y) in data.y().iter().enumerate() {
        s1 += (y - xb[i]) * (y - xb[i]);
        s2 += (y - zb[i]) * (y - zb[i]);
    }
    let total = match variant {
        MseVariant::Norm => s1.sqrt() + s2.sqrt(),
        MseVariant::Squared => s1 + s2,
    };
    Ok(total / data.n() as f64)
}
