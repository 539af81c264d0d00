use std::fmt;
use std::time::Duration;

use num_traits::{Signed, Zero};

use crate::algebra::{format_rational, integer, rational, Field, Matrix, Polynomial, RationalFunction, ZPoly, Q};
use crate::budget::{Budget, Exhausted, Meter};
use crate::connection::{reduce_metered, CachedRing, ConnectionError, Pencil, PoleForm};
use crate::jacobian::{GbError, JacobianError, JacobianRing};

/// `sum_j c_j(t) d^j/dt^j` with integer polynomial coefficients, content
/// removed and `c_r` with positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardFuchsOperator {
    coefficients: Vec<ZPoly>,
}

impl PicardFuchsOperator {
    pub fn from_coefficients(coeffs: &[RationalFunction]) -> Self {
        let mut polys = clear_denominators(coeffs);
        let content = polys.iter().fold(ZPoly::zero(), |acc, p| acc.gcd(p));
        if !content.is_zero() && !content.is_one() {
            polys = polys.iter().map(|p| p.exact_div(&content)).collect();
        }
        while polys.last().is_some_and(ZPoly::is_zero) {
            polys.pop();
        }
        if polys.last().and_then(ZPoly::leading).is_some_and(|l| l.is_negative()) {
            polys = polys.iter().map(ZPoly::neg).collect();
        }
        PicardFuchsOperator { coefficients: polys }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Maximal coefficient degree.
    pub fn degree(&self) -> usize {
        self.coefficients.iter().filter_map(ZPoly::degree).max().unwrap_or(0)
    }

    /// `c_0, ..., c_r`.
    pub fn coefficients(&self) -> &[ZPoly] {
        &self.coefficients
    }
}

impl fmt::Display for PicardFuchsOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coefficients.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*D")?,
                _ => write!(f, "({c})*D^{j}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Success { operator: PicardFuchsOperator, elapsed: Duration },
    Timeout { reason: Exhausted, elapsed: Duration },
    /// The generic member is singular or the reduction hit an impossible state.
    SingularFamily { detail: String, elapsed: Duration },
}

impl Outcome {
    pub fn elapsed(&self) -> Duration {
        match self {
            Outcome::Success { elapsed, .. }
            | Outcome::Timeout { elapsed, .. }
            | Outcome::SingularFamily { elapsed, .. } => *elapsed,
        }
    }

    pub fn operator(&self) -> Option<&PicardFuchsOperator> {
        match self {
            Outcome::Success { operator, .. } => Some(operator),
            _ => None,
        }
    }
}

/// First Picard-Fuchs operator of the pencil, for the class of `1/f_t`.
pub fn first_ode(e: &Pencil, budget: &Budget) -> Outcome {
    first_ode_with(e, &mut Meter::new(budget))
}

pub fn first_ode_with(e: &Pencil, meter: &mut Meter) -> Outcome {
    let result = derive(e, meter);
    let elapsed = meter.elapsed();
    match result {
        Ok(operator) => Outcome::Success { operator, elapsed },
        Err(Failure::Budget(reason)) => Outcome::Timeout { reason, elapsed },
        Err(Failure::Singular(detail)) => Outcome::SingularFamily { detail, elapsed },
    }
}

enum Failure {
    Budget(Exhausted),
    Singular(String),
}

impl From<Exhausted> for Failure {
    fn from(e: Exhausted) -> Self {
        Failure::Budget(e)
    }
}

impl From<ConnectionError> for Failure {
    fn from(e: ConnectionError) -> Self {
        match e {
            ConnectionError::Budget(r) => Failure::Budget(r),
            other => Failure::Singular(other.to_string()),
        }
    }
}

fn derive(e: &Pencil, meter: &mut Meter) -> Result<PicardFuchsOperator, Failure> {
    let family = e.generic_member();
    let ring = JacobianRing::with_meter(&family, meter).map_err(|err| match err {
        JacobianError::Groebner(GbError::Budget { reason, .. }) => Failure::Budget(reason),
        other => Failure::Singular(other.to_string()),
    })?;
    let basis = ring.griffiths_basis();
    let n = basis.len();
    let dir = e.direction().to_rational_function_coeffs();
    let probe = Probe::new();

    let mut v = vec![RationalFunction::zero(); n];
    v[0] = RationalFunction::one();
    let mut chain = vec![v];
    loop {
        meter.check()?;
        let last = chain.last().unwrap();
        let mut next: Vec<RationalFunction> = last.iter().map(RationalFunction::derivative).collect();
        if !dir.is_zero() {
            for k in 1..=3u32 {
                let mut numerator = Polynomial::zero();
                for (row, c) in basis.rows().iter().zip(last) {
                    if row.pole_order == k && !c.is_zero() {
                        numerator.add_scaled(c, &row.monomial, &Polynomial::one());
                    }
                }
                if numerator.is_zero() {
                    continue;
                }
                let numerator = numerator.mul(&dir).scale(&RationalFunction::from_i64(-(k as i64)));
                let coords = reduce_metered(&PoleForm::new(numerator, k + 1), &ring, &basis, meter)?;
                for (a, b) in next.iter_mut().zip(coords) {
                    *a = a.plus(&b);
                }
            }
        }
        chain.push(next);
        if probe.maybe_dependent(&chain) {
            if let Some(kernel) = kernel_of_chain(&chain, meter)? {
                return Ok(PicardFuchsOperator::from_coefficients(&kernel));
            }
        }
    }
}

/// Cheap independence test at a fixed rational point: full rank there
/// implies full rank over `Q(t)`.
struct Probe {
    points: Vec<Q>,
}

impl Probe {
    fn new() -> Self {
        Probe { points: vec![rational(7, 13), rational(-11, 17), rational(5, 3)] }
    }

    fn maybe_dependent(&self, chain: &[Vec<RationalFunction>]) -> bool {
        'points: for t0 in &self.points {
            let n = chain[0].len();
            let mut m = Matrix::zeros(n, chain.len());
            for (j, col) in chain.iter().enumerate() {
                for (i, c) in col.iter().enumerate() {
                    match c.eval(t0) {
                        Some(x) => m.set(i, j, x),
                        None => continue 'points,
                    }
                }
            }
            return m.rank() < chain.len();
        }
        true
    }
}

/// Multiplies by the lcm of the denominators.
fn clear_denominators(v: &[RationalFunction]) -> Vec<ZPoly> {
    clear_with_lcm(v).0
}

/// Integer numerators over the common denominator, and that denominator.
fn clear_with_lcm(v: &[RationalFunction]) -> (Vec<ZPoly>, ZPoly) {
    let mut lcm = ZPoly::one();
    for c in v {
        let g = lcm.gcd(c.denom());
        lcm = lcm.mul(&c.denom().exact_div(&g));
    }
    (v.iter().map(|c| c.numer().mul(&lcm.exact_div(c.denom()))).collect(), lcm)
}

/// Kernel of the columns `v_0..v_r` when it is nonzero, normalized so the
/// first free column has coefficient 1. Fraction-free elimination over `Z[t]`.
fn kernel_of_chain(chain: &[Vec<RationalFunction>], meter: &mut Meter) -> Result<Option<Vec<RationalFunction>>, Exhausted> {
    let cols = chain.len();
    let rows = chain[0].len();
    let mut a: Vec<Vec<ZPoly>> = vec![Vec::with_capacity(cols); rows];
    let mut scales = Vec::with_capacity(cols);
    for col in chain {
        let (cleared, lcm) = clear_with_lcm(col);
        for (i, c) in cleared.into_iter().enumerate() {
            a[i].push(c);
        }
        scales.push(lcm);
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = ZPoly::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                meter.step()?;
                let v = a[r][c].mul(&a[i][j]).sub(&a[i][c].mul(&a[r][j]));
                a[i][j] = v.exact_div(&prev);
            }
            a[i][c] = ZPoly::zero();
        }
        prev = a[r][c].clone();
        pivots.push((r, c));
        r += 1;
    }
    let Some(free) = (0..cols).find(|c| !pivots.iter().any(|&(_, pc)| pc == *c)) else {
        return Ok(None);
    };
    let mut x = vec![RationalFunction::zero(); cols];
    x[free] = RationalFunction::one();
    for &(pr, pc) in pivots.iter().rev() {
        if pc > free {
            continue;
        }
        let mut s = RationalFunction::zero();
        for j in pc + 1..cols {
            if !x[j].is_zero() && !a[pr][j].is_zero() {
                s = s.plus(&RationalFunction::from_integer_parts(a[pr][j].clone(), ZPoly::one()).times(&x[j]));
            }
        }
        let pivot = RationalFunction::from_integer_parts(a[pr][pc].clone(), ZPoly::one());
        x[pc] = s.negated().over(&pivot);
    }
    // undo the column scaling
    for (xj, l) in x.iter_mut().zip(scales) {
        *xj = xj.times(&RationalFunction::from_integer_parts(l, ZPoly::one()));
    }
    Ok(Some(x))
}

/// Specialization check at `t0`: recomputes the chain
/// `v_j(t0) = [(-1)^j j! (g-f)^j / f_{t0}^(j+1)]` over `Q` and tests
/// `sum_j c_j(t0) v_j(t0) = 0`.
pub fn verify_at(e: &Pencil, op: &PicardFuchsOperator, t0: &Q) -> Result<bool, ConnectionError> {
    let member = e.member(t0);
    let ring = CachedRing::new(&member)
        .map_err(|source| ConnectionError::SingularMember { t0: format_rational(t0), source })?;
    let dir = e.direction();
    let mut sum = vec![integer(0); ring.basis.len()];
    let mut power = Polynomial::one();
    let mut factorial = integer(1);
    for (j, c) in op.coefficients().iter().enumerate() {
        if j > 0 {
            power = power.mul(&dir);
            factorial = factorial * integer(j as i64);
        }
        let cj = c.eval(t0);
        if Zero::is_zero(&cj) {
            continue;
        }
        let sign = if j % 2 == 0 { integer(1) } else { integer(-1) };
        let form = PoleForm::new(power.scale(&(sign * &factorial)), j as u32 + 1);
        let v = reduce_metered(&form, &ring.ring, &ring.basis, &mut Meter::unlimited())?;
        for (s, x) in sum.iter_mut().zip(v) {
            *s += &cj * x;
        }
    }
    Ok(sum.iter().all(Zero::is_zero))
}

/// True when `t0` is a root of the leading coefficient.
pub fn is_singular_point(op: &PicardFuchsOperator, t0: &Q) -> bool {
    op.coefficients().last().is_none_or(|c| Zero::is_zero(&c.eval(t0)))
}
