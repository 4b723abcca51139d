//! Formal character arithmetic over the (half-)weight lattice.
//!
//! Characters are finite integer combinations of lattice exponentials
//! `e^λ`, stored sparsely. All operations are exact; division is by
//! leading-term elimination under an explicit term order and fails loudly
//! when the quotient would not be a finite character.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, BTreeMap, HashMap, HashSet};

use num_traits::{Signed, Zero};

use crate::rootsys::{Functional, GroupSide, Rat, SubgroupPair, Weight, WeylElement};
use crate::{Error, Result};

/// Sparse Laurent polynomial on the doubled weight lattice.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FormalCharacter {
    terms: BTreeMap<Weight, i64>,
}

impl FormalCharacter {
    pub fn zero() -> Self {
        FormalCharacter { terms: BTreeMap::new() }
    }

    /// The unit `e^0`.
    pub fn one(rank: usize) -> Self {
        Self::monomial(Weight::zero(rank), 1)
    }

    pub fn monomial(w: Weight, c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(w, c);
        }
        FormalCharacter { terms }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Weight, i64)>) -> Self {
        let mut out = Self::zero();
        for (w, c) in pairs {
            out.add_term(w, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Weight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Weight, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn add_term(&mut self, w: Weight, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let nv = *o.get() + c;
                if nv == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = nv;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        FormalCharacter { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        FormalCharacter { terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }

    /// Relabels every exponent through a Weyl element.
    pub fn weyl_action(&self, w: &WeylElement) -> Self {
        FormalCharacter { terms: self.terms.iter().map(|(x, &c)| (w.apply(x), c)).collect() }
    }

    /// Sum of all coefficients (the dimension of a genuine character).
    pub fn total_coefficient(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Terms sorted descending by the given order, for stable serialisation.
    pub fn sorted_pairs(&self, order: &TermOrder) -> Vec<(Vec<i64>, i64)> {
        let mut v: Vec<(&Weight, i64)> = self.terms().collect();
        v.sort_by(|(a, _), (b, _)| order.cmp(b, a));
        v.into_iter().map(|(w, c)| (w.0.clone(), c)).collect()
    }
}

/// `Π (1 − e^{−γ})` over a factor multiset.
pub fn product_one_minus_exp_neg(rank: usize, factors: &[Weight]) -> FormalCharacter {
    let mut acc = FormalCharacter::one(rank);
    for g in factors {
        let f = FormalCharacter::from_pairs([(Weight::zero(rank), 1), (g.neg(), -1)]);
        acc = acc.mul(&f);
    }
    acc
}

/// `Π (e^{γ/2} − e^{−γ/2})`; factors must have even doubled coordinates.
pub fn product_half_diff(rank: usize, factors: &[Weight]) -> FormalCharacter {
    let mut acc = FormalCharacter::one(rank);
    for g in factors {
        let h = g.half();
        let f = FormalCharacter::from_pairs([(h.clone(), 1), (h.neg(), -1)]);
        acc = acc.mul(&f);
    }
    acc
}

// ---------------------------------------------------------------------------
// Term orders and exact division
// ---------------------------------------------------------------------------

/// Total order on lattice exponents: primary key a linear functional,
/// lexicographic tiebreak. Compatible with addition of exponents.
#[derive(Clone, Debug)]
pub struct TermOrder {
    pub functional: Functional,
}

impl TermOrder {
    pub fn new(functional: Functional) -> Self {
        TermOrder { functional }
    }

    pub fn cmp(&self, a: &Weight, b: &Weight) -> Ordering {
        self.functional
            .pair(a)
            .cmp(&self.functional.pair(b))
            .then_with(|| a.0.cmp(&b.0))
    }

    pub fn max_exponent<'c>(&self, x: &'c FormalCharacter) -> Option<&'c Weight> {
        x.terms.keys().max_by(|a, b| self.cmp(a, b))
    }

    pub fn min_exponent<'c>(&self, x: &'c FormalCharacter) -> Option<&'c Weight> {
        x.terms.keys().min_by(|a, b| self.cmp(a, b))
    }
}

#[derive(PartialEq, Eq)]
struct HeapEntry {
    key: i64,
    w: Weight,
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key).then_with(|| self.w.0.cmp(&other.w.0))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const DIVISION_STEP_CAP: usize = 2_000_000;

/// Exact quotient `num / den`, eliminating leading terms under `order`.
///
/// When the division is exact every intermediate leading exponent stays
/// above `min(num) − min(den) + max(den)`; dropping below that bound proves
/// inexactness, as does exhausting the step cap or a non-divisible leading
/// coefficient.
pub fn exact_divide(
    num: &FormalCharacter,
    den: &FormalCharacter,
    order: &TermOrder,
) -> Result<FormalCharacter> {
    if den.is_zero() {
        return Err(Error::InexactDivision("division by the zero character".into()));
    }
    if num.is_zero() {
        return Ok(FormalCharacter::zero());
    }

    let lt_den = order.max_exponent(den).unwrap().clone();
    let lc_den = den.coeff(&lt_den);
    let min_den = order.min_exponent(den).unwrap().clone();
    let min_num = order.min_exponent(num).unwrap().clone();
    let threshold = min_num.sub(&min_den).add(&lt_den);

    let mut rem = num.clone();
    let mut quot = FormalCharacter::zero();
    let mut heap: BinaryHeap<HeapEntry> = rem
        .terms
        .keys()
        .map(|w| HeapEntry { key: order.functional.pair(w), w: w.clone() })
        .collect();
    let mut steps = 0usize;

    while let Some(top) = heap.pop() {
        let c = rem.coeff(&top.w);
        if c == 0 {
            continue;
        }
        if order.cmp(&top.w, &threshold) == Ordering::Less {
            return Err(Error::InexactDivision(
                "remainder dropped below the exact-quotient bound".into(),
            ));
        }
        if c % lc_den != 0 {
            return Err(Error::InexactDivision(
                "leading coefficient not divisible".into(),
            ));
        }
        steps += 1;
        if steps > DIVISION_STEP_CAP {
            return Err(Error::InexactDivision("division step cap exceeded".into()));
        }
        let q_exp = top.w.sub(&lt_den);
        let q_c = c / lc_den;
        quot.add_term(q_exp.clone(), q_c);
        for (de, dc) in den.terms() {
            let target = q_exp.add(de);
            rem.add_term(target.clone(), -q_c * dc);
            if rem.coeff(&target) != 0 && target != top.w {
                heap.push(HeapEntry { key: order.functional.pair(&target), w: target });
            }
        }
        debug_assert_eq!(rem.coeff(&top.w), 0);
    }

    if rem.is_zero() {
        Ok(quot)
    } else {
        Err(Error::InexactDivision("nonzero remainder".into()))
    }
}

// ---------------------------------------------------------------------------
// Weyl character formula and companions
// ---------------------------------------------------------------------------

/// `Σ_w ε(w) e^{w·x}` over the given Weyl elements.
pub fn alternating_sum(elements: &[WeylElement], x: &Weight) -> FormalCharacter {
    let mut out = FormalCharacter::zero();
    for w in elements {
        out.add_term(w.apply(x), w.sign);
    }
    out
}

/// Term order used to divide alternating sums for the chosen group.
pub fn character_order(pair: &SubgroupPair, side: GroupSide) -> TermOrder {
    TermOrder::new(pair.g.weight_functional(pair.rho(side)))
}

/// Finite character of the irreducible representation with dominant highest
/// weight `lam`, via the full alternating sum with ρ-shift. Boundary
/// (singular) dominant weights are handled by the same code path.
pub fn weyl_character(
    pair: &SubgroupPair,
    lam: &Weight,
    side: GroupSide,
) -> Result<FormalCharacter> {
    if !pair.is_dominant(lam, side) {
        return Err(Error::Domain(format!("{lam:?} is not dominant for the chosen group")));
    }
    let rho = pair.rho(side);
    let weyl = pair.weyl(side);
    let num = alternating_sum(weyl, &lam.add(rho));
    let den = alternating_sum(weyl, rho);
    exact_divide(&num, &den, &character_order(pair, side))
}

/// Character attached to an arbitrary (possibly non-dominant) highest-weight
/// label: zero when `label + ρ` is singular, otherwise the sign-twisted
/// character of the dominant conjugate. This is the unique extension under
/// which the alternating-sum algebra holds literally.
pub fn character_for_label(
    pair: &SubgroupPair,
    label: &Weight,
    side: GroupSide,
) -> Result<FormalCharacter> {
    let shifted = label.add(pair.rho(side));
    match pair.regular_dominant_conjugate(&shifted, side) {
        None => Ok(FormalCharacter::zero()),
        Some((dom, sign)) => {
            let high = dom.sub(pair.rho(side));
            Ok(weyl_character(pair, &high, side)?.scale(sign))
        }
    }
}

/// Dimension of the irreducible with highest weight `lam`, by the product
/// formula over positive roots. Independent of the character expansion.
pub fn weyl_dimension(pair: &SubgroupPair, lam: &Weight, side: GroupSide) -> Result<i64> {
    if !pair.is_dominant(lam, side) {
        return Err(Error::Domain(format!("{lam:?} is not dominant for the chosen group")));
    }
    let rho = pair.rho(side);
    let shifted = lam.add(rho);
    let mut acc = Rat::from(1);
    for phi in pair.positive_roots(side) {
        acc *= pair.g.form_pair(&shifted, phi) / pair.g.form_pair(rho, phi);
    }
    debug_assert!(acc.is_integer());
    Ok(acc.to_integer())
}

/// Weight multiplicities by the Freudenthal recursion, independent of the
/// Weyl character formula. Used as a cross-check oracle.
pub fn freudenthal_multiplicities(
    pair: &SubgroupPair,
    lam: &Weight,
    side: GroupSide,
) -> Result<FormalCharacter> {
    if !pair.is_dominant(lam, side) {
        return Err(Error::Domain(format!("{lam:?} is not dominant for the chosen group")));
    }
    let rho = pair.rho(side);
    let positives = pair.positive_roots(side);
    let simples = pair.simple_roots(side);
    let top_norm = pair.g.form_pair(&lam.add(rho), &lam.add(rho));
    // Monotone grading: strictly positive on the side's positive roots, so
    // a string μ + kα leaves the weight region permanently once it crosses.
    let grading = pair.g.weight_functional(pair.rho(side));
    let lam_grade = grading.pair(lam);

    let mut mult: HashMap<Weight, i64> = HashMap::new();
    mult.insert(lam.clone(), 1);
    let mut frontier: Vec<Weight> = vec![lam.clone()];
    let mut result = FormalCharacter::monomial(lam.clone(), 1);

    while !frontier.is_empty() {
        let mut candidates: HashSet<Weight> = HashSet::new();
        for mu in &frontier {
            for s in simples {
                candidates.insert(mu.sub(s));
            }
        }
        let mut next_frontier = Vec::new();
        let mut batch: Vec<Weight> = candidates.into_iter().collect();
        batch.sort();
        for mu in batch {
            if mult.contains_key(&mu) {
                continue;
            }
            let shifted = mu.add(rho);
            let denom = top_norm - pair.g.form_pair(&shifted, &shifted);
            let m = if denom.is_zero() {
                0
            } else {
                let mut rhs = Rat::zero();
                for alpha in positives {
                    let mut k = 1i64;
                    loop {
                        let up = mu.add(&alpha.scale(k));
                        if grading.pair(&up) > lam_grade {
                            break;
                        }
                        let m_up = mult.get(&up).copied().unwrap_or(0);
                        if m_up != 0 {
                            rhs += pair.g.form_pair(&up, alpha) * Rat::from(m_up);
                        }
                        k += 1;
                    }
                }
                let val = Rat::from(2) * rhs / denom;
                if !val.is_integer() || val.is_negative() {
                    return Err(Error::Inconsistency(format!(
                        "Freudenthal recursion produced non-integral multiplicity at {mu:?}"
                    )));
                }
                val.to_integer()
            };
            mult.insert(mu.clone(), m);
            if m > 0 {
                result.add_term(mu.clone(), m);
                next_frontier.push(mu);
            }
        }
        frontier = next_frontier;
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// Decomposition into irreducible subgroup characters
// ---------------------------------------------------------------------------

const PEEL_CAP: usize = 200_000;

/// Peels a Weyl(K)-invariant character into irreducible subgroup characters
/// greedily from the top of the term order.
pub fn decompose_into_k(
    pair: &SubgroupPair,
    x: &FormalCharacter,
) -> Result<BTreeMap<Weight, i64>> {
    let rho_k_order = pair.g.weight_functional(&pair.rho_k);
    let peel_cmp = |a: &Weight, b: &Weight| {
        rho_k_order
            .pair(a)
            .cmp(&rho_k_order.pair(b))
            .then_with(|| pair.xi.pair(a).cmp(&pair.xi.pair(b)))
            .then_with(|| a.0.cmp(&b.0))
    };
    let floor = x
        .terms
        .keys()
        .map(|w| rho_k_order.pair(w))
        .min()
        .unwrap_or(0);

    let mut rest = x.clone();
    let mut out: BTreeMap<Weight, i64> = BTreeMap::new();
    let mut peels = 0usize;
    while !rest.is_zero() {
        peels += 1;
        if peels > PEEL_CAP {
            return Err(Error::NotAKCharacter("peel cap exceeded".into()));
        }
        let top = rest
            .terms
            .keys()
            .max_by(|a, b| peel_cmp(a, b))
            .unwrap()
            .clone();
        if rho_k_order.pair(&top) < floor {
            return Err(Error::NotAKCharacter(
                "peeling descended below the original support".into(),
            ));
        }
        if !pair.is_dominant(&top, GroupSide::Subgroup) {
            return Err(Error::NotAKCharacter(format!(
                "maximal term {top:?} is not dominant for the subgroup"
            )));
        }
        let c = rest.coeff(&top);
        let chi = weyl_character(pair, &top, GroupSide::Subgroup)?;
        rest = rest.sub(&chi.scale(c));
        *out.entry(top).or_insert(0) += c;
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Wall-set denominator identity
// ---------------------------------------------------------------------------

/// Checks `Σ_{w∈𝒜} (−1)^{s_w} e^{w·ρ_A} == Π_{α∈A}(e^{α/2}−e^{−α/2})` for a
/// wall set `A ⊂ Φ⁺(K)`, where `𝒜` is the reflection subgroup it generates
/// and `s_w` counts the elements of `A` sent to negative roots.
pub fn denominator_identity_check(pair: &SubgroupPair, wall_set: &[Weight]) -> Result<bool> {
    let rank = pair.rank();
    for a in wall_set {
        if !pair.is_k_root(a) {
            return Err(Error::Domain(format!("{a:?} is not a root of the subgroup")));
        }
    }
    let gens: Vec<WeylElement> = wall_set
        .iter()
        .map(|a| pair.g.reflection_element(a))
        .collect::<Result<_>>()?;
    let subgroup = if gens.is_empty() {
        vec![WeylElement::identity(rank)]
    } else {
        crate::rootsys::close_under_generators(rank, &gens)
    };
    let rho_a = wall_set
        .iter()
        .fold(Weight::zero(rank), |acc, a| acc.add(a))
        .half();

    let mut lhs = FormalCharacter::zero();
    for w in &subgroup {
        let flipped = wall_set
            .iter()
            .filter(|a| {
                let img = w.apply(a);
                pair.k_positive_roots.contains(&img.neg())
            })
            .count();
        let sign = if flipped % 2 == 0 { 1 } else { -1 };
        lhs.add_term(w.apply(&rho_a), sign);
    }
    let rhs = product_half_diff(rank, wall_set);
    Ok(lhs == rhs)
}
