use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::Q;

/// Natural log of a positive integer of any size.
pub(crate) fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Height of `m1/m2` in lowest terms: `log|m1| + log m2`, with `psi(0) = 0`.
pub fn psi(q: &Q) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    ln_bigint(&q.numer().abs()) + ln_bigint(q.denom())
}

/// `log(|m1|)^2 + log(m2)^2`, zero at zero.
pub fn psi_entropy(q: &Q) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let a = ln_bigint(&q.numer().abs());
    let b = ln_bigint(q.denom());
    a * a + b * b
}

/// Size, entropy and count statistics of a collection of rational entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixStats {
    pub psi_sum: f64,
    pub psi_entropy: f64,
    pub psi_nonzero: usize,
}

/// `(sum psi, -sum psi_entropy, #{psi != 0})` over every entry.
pub fn matrix_stats<'a>(entries: impl IntoIterator<Item = &'a Q>) -> MatrixStats {
    let mut s = MatrixStats::default();
    for q in entries {
        let p = psi(q);
        s.psi_sum += p;
        s.psi_entropy -= psi_entropy(q);
        if p != 0.0 {
            s.psi_nonzero += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{integer, rational};
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn values() {
        assert_eq!(psi(&integer(1)), 0.0);
        assert!((psi(&rational(3, 2)) - 6f64.ln()).abs() < 1e-15);
        assert!((psi(&integer(-5)) - 5f64.ln()).abs() < 1e-15);
        assert_eq!(psi(&integer(0)), 0.0);
        assert!((psi_entropy(&rational(3, 2)) - (3f64.ln().powi(2) + 2f64.ln().powi(2))).abs() < 1e-15);
    }

    #[test]
    fn huge_heights() {
        let big = Q::from_integer(BigInt::from(10).pow(400));
        assert!((psi(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((psi(&big.recip()) - psi(&big)).abs() < 1e-12);
    }

    #[test]
    fn stats() {
        let zeros = vec![integer(0); 8];
        assert_eq!(matrix_stats(&zeros), MatrixStats::default());
        let ones = vec![integer(1); 8];
        assert_eq!(matrix_stats(&ones), MatrixStats::default());
        let m = [rational(3, 2), integer(1), integer(0), integer(2)];
        let s = matrix_stats(&m);
        // entrywise: log 6, 0, 0, log 2
        assert!((s.psi_sum - (6f64.ln() + 2f64.ln())).abs() < 1e-14);
        let ent = 3f64.ln().powi(2) + 2f64.ln().powi(2) + 2f64.ln().powi(2);
        assert!((s.psi_entropy + ent).abs() < 1e-14);
        assert_eq!(s.psi_nonzero, 2);
    }

    proptest! {
        #[test]
        fn symmetric_and_nonnegative(n in -100000i64..100000, d in 1i64..100000) {
            let q = rational(n, d);
            let p = psi(&q);
            prop_assert!(p >= 0.0);
            prop_assert_eq!(p, psi(&-q.clone()));
            if !q.is_zero() {
                prop_assert!((p - psi(&q.recip())).abs() < 1e-12);
                let m = [q.clone(), -q.clone(), q.recip(), Q::one()];
                let c = matrix_stats(&m[..1]).psi_nonzero;
                prop_assert_eq!(matrix_stats(&m[1..2]).psi_nonzero, c);
                prop_assert_eq!(matrix_stats(&m[2..3]).psi_nonzero, c);
            }
        }
    }
}
