//! Explicit analytic bounds: the Mertens-type upper bound for sum_{p<=n} 1/p
//! and the Rosser-Schoenfeld bounds for pi(x).
// `!(x >= a)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use super::NumError;

/// Bracket for the Meissel-Mertens constant.
pub const MERTENS_LO: f64 = 0.26149;
pub const MERTENS_HI: f64 = 0.26150;

/// Upper bound for `sum_{p <= n} 1/p`, valid for `n >= 2`.
pub fn mertens_upper(n: f64) -> Result<f64, NumError> {
    if !(n >= 2.0) {
        return Err(NumError::Domain(format!("mertens_upper needs n >= 2, got {n}")));
    }
    Ok(n.ln().ln() + MERTENS_HI + 4.0 / (n + 1.0).ln() + 2.0 / (n * n.ln()))
}

/// Lower bound for `pi(x)`, valid for `x >= 59`.
pub fn pi_lower(x: f64) -> Result<f64, NumError> {
    if !(x >= 59.0) {
        return Err(NumError::Domain(format!("pi_lower needs x >= 59, got {x}")));
    }
    let l = x.ln();
    Ok(x / l * (1.0 + 1.0 / (2.0 * l)))
}

/// Upper bound for `pi(x)`, valid for `x > 1`.
pub fn pi_upper(x: f64) -> Result<f64, NumError> {
    if !(x > 1.0) {
        return Err(NumError::Domain(format!("pi_upper needs x > 1, got {x}")));
    }
    let l = x.ln();
    Ok(x / l * (1.0 + 3.0 / (2.0 * l)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        assert!(mertens_upper(2.93e12).unwrap() < 3.758);
        assert!(mertens_upper(1.019e20).unwrap() < 4.1785);
        assert!(mertens_upper(1.143e13).unwrap() < 3.798);
        assert!(pi_lower(2.93e12).unwrap() > 1.038e11);
        assert!(pi_lower(1.019e20).unwrap() > 2.2358e18);
        let l = 59f64.ln();
        assert_eq!(pi_lower(59.0).unwrap(), 59.0 / l * (1.0 + 1.0 / (2.0 * l)));
    }

    #[test]
    fn domains() {
        assert!(mertens_upper(1.5).is_err());
        assert!(pi_lower(58.9).is_err());
        assert!(pi_upper(1.0).is_err());
        assert!(pi_lower(f64::NAN).is_err());
    }
}
