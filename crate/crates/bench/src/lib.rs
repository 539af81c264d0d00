//! Fixed inputs shared by the benchmarks.

use gmplan_core::algebra::{parse_polynomial, Polynomial, Q};

pub const FERMAT: &str = "x^4 + y^4 + z^4 + w^4";
pub const KLEIN: &str = "x^3*y + y^3*z + z^3*w + w^3*x";
pub const QUICK_EDGE: (&str, &str) = ("x^4 + y^4 + z^4 + w^4", "x^4 + y^4 + z^4 + z*w^3");

pub fn quartic(s: &str) -> Polynomial<Q> {
    parse_polynomial(s).expect("benchmark quartics parse")
}
