use crate::model::{Arena, Family};

use super::ReductionError;

/// Window size from which the fixed objective has the same winning set as the bounded one.
///
/// One dimension: `|V|` for PR and `(d/2)·|V|` for WP. With `n ≥ 2` dimensions,
/// `b = |V|·2^{n·d/2}·n·(d/2)` for PR and `b·d/2` for WP. Never below 1.
pub fn bounded_threshold(arena: &Arena, family: Family) -> Result<u32, ReductionError> {
    let v = arena.len() as u64;
    let half = u64::from(arena.d() / 2);
    let n = arena.dims() as u64;
    let too_large = || ReductionError::ThresholdOverflow;
    let value = if n == 1 {
        match family {
            Family::PR => v,
            Family::WP => half.checked_mul(v).ok_or_else(too_large)?,
        }
    } else {
        let exponent = u32::try_from(n.checked_mul(half).ok_or_else(too_large)?).map_err(|_| too_large())?;
        let b = 2u64
            .checked_pow(exponent)
            .and_then(|x| x.checked_mul(v))
            .and_then(|x| x.checked_mul(n))
            .and_then(|x| x.checked_mul(half))
            .ok_or_else(too_large)?;
        match family {
            Family::PR => b,
            Family::WP => b.checked_mul(half).ok_or_else(too_large)?,
        }
    };
    u32::try_from(value.max(1)).map_err(|_| too_large())
}

/// Upper bound on the number of states of the fixed-λ product for `family`.
pub fn fixed_product_bound(arena: &Arena, family: Family, lambda: u32) -> f64 {
    let v = arena.len() as f64;
    let lambda = f64::from(lambda);
    match family {
        Family::WP => {
            let per_dim = (f64::from(arena.d()) + 1.0) * lambda;
            v * per_dim.powi(arena.dims() as i32) + v
        }
        Family::PR => {
            let slots: u32 = (0..arena.dims()).map(|m| arena.max_priority(m) / 2).sum();
            v * lambda.powi(slots as i32) + v
        }
    }
}
