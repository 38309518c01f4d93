//! Model cost used to compare factorizations of different rank.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::nmf::sum_squared_error;
use crate::error::{Error, Result};

/// Guards the logarithm of a zero error.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Description length in bits.
    #[default]
    Mdl,
    /// Akaike information criterion under a Gaussian error model.
    Aic,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Mdl => "mdl",
            Criterion::Aic => "aic",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mdl" => Ok(Criterion::Mdl),
            "aic" => Ok(Criterion::Aic),
            _ => Err(Error::Unknown {
                what: "criterion",
                name: s.to_string(),
            }),
        }
    }
}

/// Cost of describing `x` by the factors `w` (n × r) and `h` (r × f).
///
/// MDL: every factor entry costs `bits`, and each of the `n·f` residuals is
/// coded with a Gaussian code at resolution `2^-bits`, which costs
/// `½·log2(1 + MSE·4^bits)` bits per entry. A perfect fit therefore costs
/// only the factor bits.
///
/// AIC: `2·(n·r + r·f) + n·f·ln(MSE + 1e-12)`.
pub fn model_cost(
    x: &Array2<f64>,
    w: &Array2<f64>,
    h: &Array2<f64>,
    criterion: Criterion,
    bits: u32,
) -> Result<f64> {
    let (n, f) = x.dim();
    let r = w.ncols();
    if w.nrows() != n || h.nrows() != r || h.ncols() != f {
        return Err(Error::Shape(format!(
            "X is {:?}, W is {:?}, H is {:?}",
            x.dim(),
            w.dim(),
            h.dim()
        )));
    }
    if bits == 0 {
        return Err(Error::InvalidParameter(
            "bits per value must be at least 1".into(),
        ));
    }
    let params = (n * r + r * f) as f64;
    let cells = (n * f) as f64;
    let mse = if cells > 0.0 {
        sum_squared_error(x, w, h) / cells
    } else {
        0.0
    };
    Ok(match criterion {
        Criterion::Mdl => bits as f64 * params + 0.5 * cells * residual_bits(mse, bits),
        Criterion::Aic => 2.0 * params + cells * (mse + LOG_FLOOR).ln(),
    })
}

// log2(1 + mse * 2^(2 bits)) without overflowing for large `bits`
fn residual_bits(mse: f64, bits: u32) -> f64 {
    if mse <= 0.0 {
        return 0.0;
    }
    let t = mse.log2() + 2.0 * bits as f64;
    if t > 60.0 {
        t
    } else {
        t.exp2().ln_1p() / std::f64::consts::LN_2
    }
}
