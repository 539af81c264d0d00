use std::time::Duration;

use crate::algebra::{Field, Monomial, Polynomial};
use crate::budget::{Exhausted, Meter};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GbError {
    #[error("no generators")]
    Empty,
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("budget exceeded ({reason:?}) after {steps} reduction steps in {elapsed:?}")]
    Budget { reason: Exhausted, steps: u64, elapsed: Duration },
}

impl GbError {
    pub(crate) fn from_meter(reason: Exhausted, meter: &Meter) -> Self {
        GbError::Budget { reason, steps: meter.steps(), elapsed: meter.elapsed() }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GbOptions {
    /// Record every basis element as a combination of the inputs.
    pub track_cofactors: bool,
    /// Return as soon as pure powers of all variables are leading terms. The
    /// result is then a zero-dimensionality witness, not a full basis.
    pub stop_when_zero_dimensional: bool,
}

impl GbOptions {
    pub fn with_cofactors() -> Self {
        GbOptions { track_cofactors: true, stop_when_zero_dimensional: false }
    }
}

/// A polynomial together with its expression in the input generators.
#[derive(Clone, Debug)]
pub(crate) struct Tracked<K: Field> {
    pub poly: Polynomial<K>,
    pub cof: Option<Vec<Polynomial<K>>>,
}

impl<K: Field> Tracked<K> {
    fn scale(&mut self, c: &K) {
        self.poly = self.poly.scale(c);
        if let Some(cof) = &mut self.cof {
            for a in cof.iter_mut() {
                *a = a.scale(c);
            }
        }
    }

    fn add_scaled(&mut self, c: &K, m: &Monomial, other: &Tracked<K>) {
        self.poly.add_scaled(c, m, &other.poly);
        if let (Some(cof), Some(ocof)) = (&mut self.cof, &other.cof) {
            for (a, b) in cof.iter_mut().zip(ocof) {
                a.add_scaled(c, m, b);
            }
        }
    }
}

/// Gröbner basis for grevlex, reduced and sorted by leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<K: Field> {
    inputs: Vec<Polynomial<K>>,
    elements: Vec<Polynomial<K>>,
    cofactors: Option<Vec<Vec<Polynomial<K>>>>,
    complete: bool,
}

impl<K: Field> GroebnerBasis<K> {
    pub fn inputs(&self) -> &[Polynomial<K>] {
        &self.inputs
    }

    pub fn elements(&self) -> &[Polynomial<K>] {
        &self.elements
    }

    /// `cofactors()[i][j]` is the coefficient of input `j` in element `i`.
    pub fn cofactors(&self) -> Option<&[Vec<Polynomial<K>>]> {
        self.cofactors.as_deref()
    }

    /// False when the computation stopped early at a zero-dimensionality witness.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.elements.iter().filter_map(|g| g.leading_monomial())
    }

    /// True iff for every variable some leading monomial is a pure power of it.
    pub fn is_zero_dimensional(&self) -> bool {
        let mut seen = [false; crate::algebra::NVARS];
        for m in self.leading_monomials() {
            if let Some(v) = m.pure_power_var() {
                seen[v] = true;
            }
        }
        seen.iter().all(|&s| s)
    }

    /// True iff `m` is not divisible by any leading monomial.
    pub fn is_standard(&self, m: &Monomial) -> bool {
        !self.leading_monomials().any(|l| l.divides(m))
    }

    pub fn normal_form(&self, p: &Polynomial<K>) -> Polynomial<K> {
        reduce_plain(p, &self.elements)
    }

    /// Multivariate division: `p = remainder + sum_k quotients[k] * elements[k]`.
    pub fn divide(&self, p: &Polynomial<K>) -> (Polynomial<K>, Vec<Polynomial<K>>) {
        self.divide_metered(p, &mut Meter::unlimited()).expect("unlimited meter")
    }

    /// [`divide`](Self::divide) charging one meter step per reduction step.
    #[allow(clippy::type_complexity)]
    pub fn divide_metered(
        &self,
        p: &Polynomial<K>,
        meter: &mut Meter,
    ) -> Result<(Polynomial<K>, Vec<Polynomial<K>>), Exhausted> {
        let mut quotients = vec![Polynomial::zero(); self.elements.len()];
        let mut work = p.clone();
        let mut rem = Vec::new();
        while let Some((lm, lc)) = work.leading_term().map(|(m, c)| (*m, c.clone())) {
            match self.elements.iter().position(|g| g.leading_monomial().unwrap().divides(&lm)) {
                Some(k) => {
                    let g = &self.elements[k];
                    let m = g.leading_monomial().unwrap().quotient_of(&lm);
                    let c = lc.over(g.leading_coeff().unwrap());
                    work.add_scaled(&c.negated(), &m, g);
                    quotients[k].add_scaled(&c, &m, &Polynomial::one());
                    meter.step()?;
                }
                None => {
                    rem.push((lm, lc));
                    work = pop_leading(work);
                }
            }
        }
        Ok((Polynomial::from_sorted_unchecked(rem), quotients))
    }
}

fn pop_leading<K: Field>(p: Polynomial<K>) -> Polynomial<K> {
    let mut terms = p.into_terms();
    terms.remove(0);
    Polynomial::from_sorted_unchecked(terms)
}

fn reduce_plain<K: Field>(p: &Polynomial<K>, basis: &[Polynomial<K>]) -> Polynomial<K> {
    let mut work = p.clone();
    let mut rem = Vec::new();
    while let Some((lm, lc)) = work.leading_term().map(|(m, c)| (*m, c.clone())) {
        match basis.iter().find(|g| g.leading_monomial().unwrap().divides(&lm)) {
            Some(g) => {
                let m = g.leading_monomial().unwrap().quotient_of(&lm);
                let c = lc.over(g.leading_coeff().unwrap());
                work.add_scaled(&c.negated(), &m, g);
            }
            None => {
                rem.push((lm, lc));
                work = pop_leading(work);
            }
        }
    }
    Polynomial::from_sorted_unchecked(rem)
}

/// Full reduction of `p` by monic `basis`, carrying cofactors along.
fn reduce_tracked<K: Field>(
    mut p: Tracked<K>,
    basis: &[Tracked<K>],
    skip: Option<usize>,
    meter: &mut Meter,
) -> Result<Tracked<K>, Exhausted> {
    let mut rem = Vec::new();
    while let Some((lm, lc)) = p.poly.leading_term().map(|(m, c)| (*m, c.clone())) {
        let divisor = basis
            .iter()
            .enumerate()
            .find(|(k, g)| Some(*k) != skip && g.poly.leading_monomial().unwrap().divides(&lm));
        match divisor {
            Some((_, g)) => {
                let m = g.poly.leading_monomial().unwrap().quotient_of(&lm);
                p.add_scaled(&lc.negated(), &m, g);
                meter.step()?;
            }
            None => {
                rem.push((lm, lc));
                p.poly = pop_leading(std::mem::take(&mut p.poly));
            }
        }
    }
    p.poly = Polynomial::from_sorted_unchecked(rem);
    Ok(p)
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Buchberger's algorithm with the normal selection strategy and both of
/// Buchberger's criteria. Deterministic for a fixed input order.
pub fn buchberger<K: Field>(
    gens: &[Polynomial<K>],
    opts: GbOptions,
    meter: &mut Meter,
) -> Result<GroebnerBasis<K>, GbError> {
    if gens.is_empty() {
        return Err(GbError::Empty);
    }
    if let Some(i) = gens.iter().position(Polynomial::is_zero) {
        return Err(GbError::ZeroGenerator(i));
    }
    let n_in = gens.len();
    let mut basis: Vec<Tracked<K>> = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        let cof = opts.track_cofactors.then(|| {
            (0..n_in).map(|k| if k == j { Polynomial::one() } else { Polynomial::zero() }).collect()
        });
        let mut t = Tracked { poly: g.clone(), cof };
        t.scale(&g.leading_coeff().unwrap().inverse());
        basis.push(t);
    }

    let lm = |b: &[Tracked<K>], i: usize| *b[i].poly.leading_monomial().unwrap();
    let mut pending: Vec<Pair> = Vec::new();
    // done[i][j] for i < j: pair treated (processed or discarded)
    let mut done: Vec<Vec<bool>> = Vec::new();
    for j in 0..basis.len() {
        done.push(vec![false; j]);
        for i in 0..j {
            pending.push(Pair { i, j, lcm: lm(&basis, i).lcm(&lm(&basis, j)) });
        }
    }
    let is_done = |done: &Vec<Vec<bool>>, a: usize, b: usize| {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        done[j][i]
    };

    let early_exit = |basis: &[Tracked<K>]| {
        let mut seen = [false; crate::algebra::NVARS];
        for t in basis {
            if let Some(v) = t.poly.leading_monomial().and_then(Monomial::pure_power_var) {
                seen[v] = true;
            }
        }
        seen.iter().all(|&s| s)
    };

    let mut complete = true;
    loop {
        if opts.stop_when_zero_dimensional && early_exit(&basis) {
            complete = false;
            break;
        }
        // normal strategy: smallest lcm first, ties by index for determinism
        let Some(pos) = pending
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.lcm.cmp(&b.lcm).then(a.j.cmp(&b.j)).then(a.i.cmp(&b.i)))
            .map(|(p, _)| p)
        else {
            break;
        };
        let pair = pending.swap_remove(pos);
        done[pair.j][pair.i] = true;
        meter.check().map_err(|r| GbError::from_meter(r, meter))?;

        let (li, lj) = (lm(&basis, pair.i), lm(&basis, pair.j));
        if li.is_coprime(&lj) {
            continue;
        }
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && lm(&basis, k).divides(&pair.lcm)
                && is_done(&done, pair.i, k)
                && is_done(&done, pair.j, k)
        });
        if chain {
            continue;
        }

        let mut s = basis[pair.i].clone();
        s.poly = Polynomial::zero();
        if let Some(c) = &mut s.cof {
            c.iter_mut().for_each(|a| *a = Polynomial::zero());
        }
        s.add_scaled(&K::one(), &li.quotient_of(&pair.lcm), &basis[pair.i]);
        s.add_scaled(&K::one().negated(), &lj.quotient_of(&pair.lcm), &basis[pair.j]);
        let mut r = reduce_tracked(s, &basis, None, meter).map_err(|e| GbError::from_meter(e, meter))?;
        if r.poly.is_zero() {
            continue;
        }
        r.scale(&r.poly.leading_coeff().unwrap().inverse());
        let new_lm = *r.poly.leading_monomial().unwrap();
        let j = basis.len();
        basis.push(r);
        done.push(vec![false; j]);
        for i in 0..j {
            pending.push(Pair { i, j, lcm: lm(&basis, i).lcm(&new_lm) });
        }
    }

    if !complete {
        let (elements, cofactors) = split(basis);
        return Ok(GroebnerBasis { inputs: gens.to_vec(), elements, cofactors, complete });
    }

    // minimalize: drop elements whose leading monomial is divisible by another's
    let mut keep: Vec<Tracked<K>> = Vec::new();
    for (i, t) in basis.iter().enumerate() {
        let m = lm(&basis, i);
        let redundant = basis.iter().enumerate().any(|(k, o)| {
            let om = *o.poly.leading_monomial().unwrap();
            k != i && om.divides(&m) && (om != m || k < i)
        });
        if !redundant {
            keep.push(t.clone());
        }
    }
    // interreduce tails
    for i in 0..keep.len() {
        let t = keep[i].clone();
        let r = reduce_tail(t, &keep, i, meter).map_err(|e| GbError::from_meter(e, meter))?;
        keep[i] = r;
    }
    keep.sort_by(|a, b| a.poly.leading_monomial().cmp(&b.poly.leading_monomial()));
    let (elements, cofactors) = split(keep);
    Ok(GroebnerBasis { inputs: gens.to_vec(), elements, cofactors, complete })
}

fn reduce_tail<K: Field>(
    t: Tracked<K>,
    basis: &[Tracked<K>],
    own: usize,
    meter: &mut Meter,
) -> Result<Tracked<K>, Exhausted> {
    let (lm, lc) = {
        let (m, c) = t.poly.leading_term().unwrap();
        (*m, c.clone())
    };
    let mut tail = t.clone();
    tail.poly = pop_leading(tail.poly);
    // cofactors of the tail: subtract the leading term's share afterwards
    let mut head = Tracked { poly: Polynomial::term(lc, lm), cof: t.cof.clone() };
    if let Some(c) = &mut tail.cof {
        c.iter_mut().for_each(|a| *a = Polynomial::zero());
    }
    let reduced = reduce_tracked(tail, basis, Some(own), meter)?;
    head.poly = head.poly.add(&reduced.poly);
    if let (Some(hc), Some(rc)) = (&mut head.cof, &reduced.cof) {
        for (a, b) in hc.iter_mut().zip(rc) {
            *a = a.add(b);
        }
    }
    Ok(head)
}

#[allow(clippy::type_complexity)]
fn split<K: Field>(basis: Vec<Tracked<K>>) -> (Vec<Polynomial<K>>, Option<Vec<Vec<Polynomial<K>>>>) {
    let has_cof = basis.first().is_some_and(|t| t.cof.is_some());
    let mut elements = Vec::with_capacity(basis.len());
    let mut cofs = Vec::new();
    for t in basis {
        elements.push(t.poly);
        if let Some(c) = t.cof {
            cofs.push(c);
        }
    }
    (elements, has_cof.then_some(cofs))
}
