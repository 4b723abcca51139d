//! Multiplicities: vector partition functions over polarised tangent
//! weights, the signed sum over the pair set Z, the branching
//! specialisation for regular coadjoint orbits, and the comparison table
//! against the earlier regular-points-only formula.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::charring::FormalCharacter;
use crate::fixedpoint::FixedPointSet;
use crate::quantize;
use crate::rootsys::{Functional, GroupSide, SubgroupPair, Weight};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Vector partition functions
// ---------------------------------------------------------------------------

/// A pointed vector partition problem: non-negative integer combinations of
/// the generators, certified finite by a functional strictly positive on
/// every generator.
#[derive(Clone, Debug)]
pub struct PartitionProblem {
    pub generators: Vec<Weight>,
    pub pointedness: Functional,
}

/// Builds a partition problem, choosing the pointedness functional as the
/// polarisation functional plus a small multiple of the subgroup ρ.
pub fn partition_problem(pair: &SubgroupPair, generators: &[Weight]) -> Result<PartitionProblem> {
    for g in generators {
        if g.is_zero() {
            return Err(Error::Domain("zero weight cannot be a partition generator".into()));
        }
    }
    let mut gens: Vec<Weight> = generators.to_vec();
    gens.sort();
    if gens.is_empty() {
        return Ok(PartitionProblem { generators: gens, pointedness: pair.xi.clone() });
    }
    let rho_k_f = pair.g.weight_functional(&pair.rho_k);
    let strictly_positive =
        |u: &Functional| gens.iter().all(|g| u.pair(g) > 0);
    if strictly_positive(&pair.xi) {
        return Ok(PartitionProblem { generators: gens, pointedness: pair.xi.clone() });
    }
    let mut scale = 1i64;
    while scale <= (1 << 30) {
        let u = rho_k_f.combine(&pair.xi, scale);
        if strictly_positive(&u) {
            return Ok(PartitionProblem { generators: gens, pointedness: u });
        }
        scale *= 2;
    }
    Err(Error::NonPointedCone(format!(
        "generators {gens:?} do not lie in an open half-space; the partition \
         function would be infinite"
    )))
}

type Memo = HashMap<(usize, Weight), i64>;

fn count_memo(pp: &PartitionProblem, memo: &mut Memo, j: usize, zeta: Weight) -> i64 {
    if zeta.is_zero() {
        return 1;
    }
    let height = pp.pointedness.pair(&zeta);
    if height < 0 {
        return 0;
    }
    if j == pp.generators.len() {
        return 0;
    }
    if let Some(&v) = memo.get(&(j, zeta.clone())) {
        return v;
    }
    let g = pp.generators[j].clone();
    let step = pp.pointedness.pair(&g);
    let k_max = height / step;
    let mut total = 0i64;
    let mut cur = zeta.clone();
    for _ in 0..=k_max {
        total += count_memo(pp, memo, j + 1, cur.clone());
        cur = cur.sub(&g);
    }
    memo.insert((j, zeta), total);
    total
}

/// Memoised evaluation handle for one partition problem.
pub struct PartitionCounter<'a> {
    pp: &'a PartitionProblem,
    memo: Memo,
}

impl<'a> PartitionCounter<'a> {
    pub fn new(pp: &'a PartitionProblem) -> Self {
        PartitionCounter { pp, memo: Memo::new() }
    }

    pub fn count(&mut self, zeta: &Weight) -> i64 {
        count_memo(self.pp, &mut self.memo, 0, zeta.clone())
    }
}

/// Number of ways to write `zeta` as a non-negative integer combination of
/// the generators. The memo table lives only for this call.
pub fn partition_count(pp: &PartitionProblem, zeta: &Weight) -> i64 {
    PartitionCounter::new(pp).count(zeta)
}

// ---------------------------------------------------------------------------
// The multiplicity theorem
// ---------------------------------------------------------------------------

/// Which of the two signed-sum formulas to evaluate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Variant {
    /// Argument `μ(p) + wρ_K + β_p − λ − ρ_K − β⁺_p`.
    Theorem,
    /// The regular-points formula: `λ + wρ_K + β⁺_p − β_p − ρ_K − μ(p)`.
    GuilleminPrato,
}

/// Shared evaluation state: one partition problem and memo per fixed point.
#[derive(Clone)]
struct Evaluator<'f> {
    fps: &'f FixedPointSet,
    problems: Vec<PartitionProblem>,
    memos: Vec<Memo>,
}

impl<'f> Evaluator<'f> {
    fn new(fps: &'f FixedPointSet) -> Result<Self> {
        let problems: Vec<PartitionProblem> = fps
            .point_data
            .iter()
            .map(|d| partition_problem(&fps.pair, &d.polar.b_plus))
            .collect::<Result<_>>()?;
        let memos = vec![Memo::new(); problems.len()];
        Ok(Evaluator { fps, problems, memos })
    }

    fn evaluate(&mut self, lam: &Weight, variant: Variant) -> i64 {
        let pair = &self.fps.pair;
        let mut total = 0i64;
        for z in &self.fps.z {
            let d = &self.fps.point_data[z.point];
            let w = &pair.weyl_k[z.w];
            let w_rho = w.apply(&pair.rho_k);
            let mu = &self.fps.points[z.point].mu;
            let zeta = match variant {
                Variant::Theorem => mu
                    .add(&w_rho)
                    .add(&d.polar.beta_half)
                    .sub(lam)
                    .sub(&pair.rho_k)
                    .sub(&d.polar.beta_plus_half),
                Variant::GuilleminPrato => lam
                    .add(&w_rho)
                    .add(&d.polar.beta_plus_half)
                    .sub(&d.polar.beta_half)
                    .sub(&pair.rho_k)
                    .sub(mu),
            };
            if !zeta.is_integral() {
                eprintln!(
                    "warning: non-integral partition argument {zeta:?} at point {:?}; \
                     contributing 0",
                    self.fps.points[z.point].id
                );
                continue;
            }
            let sign_s = if d.polar.s % 2 == 0 { 1 } else { -1 };
            let count = count_memo(&self.problems[z.point], &mut self.memos[z.point], 0, zeta);
            total += sign_s * w.sign * count;
        }
        total
    }
}

fn validate_k_weight(fps: &FixedPointSet, lam: &Weight) -> Result<()> {
    if lam.rank() != fps.rank() {
        return Err(Error::Domain(format!("{lam:?} has the wrong rank")));
    }
    if !lam.is_integral() {
        return Err(Error::Domain(format!(
            "{lam:?} is not an integral weight (doubled coordinates must be even)"
        )));
    }
    if !fps.pair.is_dominant(lam, GroupSide::Subgroup) {
        return Err(Error::Domain(format!("{lam:?} is not dominant for the subgroup")));
    }
    Ok(())
}

/// Multiplicity of the irreducible subgroup representation with highest
/// weight `lam` in the quantisation, by the signed sum over the pair set Z.
pub fn multiplicity_theorem(fps: &FixedPointSet, lam: &Weight) -> Result<i64> {
    validate_k_weight(fps, lam)?;
    Ok(Evaluator::new(fps)?.evaluate(lam, Variant::Theorem))
}

/// The regular-points-only variant, returned for comparison and never
/// asserted against the theorem.
pub fn guillemin_prato_variant(fps: &FixedPointSet, lam: &Weight) -> Result<i64> {
    validate_k_weight(fps, lam)?;
    Ok(Evaluator::new(fps)?.evaluate(lam, Variant::GuilleminPrato))
}

// ---------------------------------------------------------------------------
// Branching for regular coadjoint orbits
// ---------------------------------------------------------------------------

/// Multiplicity of the subgroup representation `lam` in the irreducible
/// ambient representation with regular highest weight `nu`, as a signed sum
/// of partition counts over the complementary positive roots.
pub fn kostant_branching(pair: &SubgroupPair, nu: &Weight, lam: &Weight) -> Result<i64> {
    if !nu.is_integral() || !pair.is_strictly_dominant(nu, GroupSide::Ambient) {
        return Err(Error::Domain(format!(
            "{nu:?} must be a regular dominant integral weight of the ambient group"
        )));
    }
    if !lam.is_integral() || !pair.is_dominant(lam, GroupSide::Subgroup) {
        return Err(Error::Domain(format!(
            "{lam:?} must be a dominant integral weight of the subgroup"
        )));
    }
    let generators: Vec<Weight> = pair
        .g
        .positive_roots
        .iter()
        .filter(|phi| !pair.is_k_root(phi))
        .cloned()
        .collect();
    let pp = partition_problem(pair, &generators)?;
    let mut counter = PartitionCounter::new(&pp);
    let shifted = nu.add(&pair.rho_g);
    let mut total = 0i64;
    for u in &pair.weyl_g {
        let zeta = u.apply(&shifted).sub(lam).sub(&pair.rho_g);
        total += u.sign * counter.count(&zeta);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Spectrum sweeps
// ---------------------------------------------------------------------------

/// Inclusive per-coordinate bounds in doubled coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn symmetric(rank: usize, radius: i64) -> Self {
        Window { lo: vec![-radius; rank], hi: vec![radius; rank] }
    }

    /// Tight bounding box of a character's support.
    pub fn covering_character(chi: &FormalCharacter) -> Self {
        let mut lo: Vec<i64> = Vec::new();
        let mut hi: Vec<i64> = Vec::new();
        for (w, _) in chi.terms() {
            if lo.is_empty() {
                lo = w.0.clone();
                hi = w.0.clone();
            } else {
                for (i, &c) in w.0.iter().enumerate() {
                    lo[i] = lo[i].min(c);
                    hi[i] = hi[i].max(c);
                }
            }
        }
        Window { lo, hi }
    }

    pub fn contains(&self, w: &Weight) -> bool {
        w.0.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&c, (&lo, &hi))| lo <= c && c <= hi)
    }

    /// All integral weights (even doubled coordinates) in the box.
    pub fn integral_weights(&self) -> Vec<Weight> {
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return Vec::new();
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l > h) {
            return Vec::new();
        }
        let starts: Vec<i64> = self
            .lo
            .iter()
            .map(|&l| if l.rem_euclid(2) == 0 { l } else { l + 1 })
            .collect();
        let mut out = Vec::new();
        let mut cur = starts.clone();
        if cur.iter().zip(&self.hi).any(|(c, h)| c > h) {
            return Vec::new();
        }
        loop {
            out.push(Weight(cur.clone()));
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 2;
                if cur[i] <= self.hi[i] {
                    break;
                }
                cur[i] = starts[i];
            }
        }
    }
}

/// Evaluates the multiplicity theorem over every dominant integral weight
/// in the window and checks the result against the decomposition of the
/// main formula character; returns the nonzero entries.
pub fn multiplicity_spectrum(
    fps: &FixedPointSet,
    window: &Window,
) -> Result<BTreeMap<Weight, i64>> {
    let candidates: Vec<Weight> = window
        .integral_weights()
        .into_iter()
        .filter(|w| fps.pair.is_dominant(w, GroupSide::Subgroup))
        .collect();
    if candidates.is_empty() {
        return Ok(BTreeMap::new());
    }

    let report = quantize::main_formula_character(fps)?;

    let seed = Evaluator::new(fps)?;
    let values: Vec<(Weight, i64)> = candidates
        .par_iter()
        .map_init(
            || seed.clone(),
            |ev, lam| (lam.clone(), ev.evaluate(lam, Variant::Theorem)),
        )
        .collect();

    let mut out = BTreeMap::new();
    for (lam, value) in values {
        let expected = report.k_decomposition.get(&lam).copied().unwrap_or(0);
        if value != expected {
            return Err(Error::Inconsistency(format!(
                "multiplicity theorem gives {value} at λ = {lam:?} but the character \
                 decomposition gives {expected}"
            )));
        }
        if value != 0 {
            out.insert(lam, value);
        }
    }
    // Everything the decomposition sees inside the window must have been
    // found by the sweep as well.
    for (lam, c) in &report.k_decomposition {
        if window.contains(lam) && *c != 0 && !out.contains_key(lam) {
            return Err(Error::Inconsistency(format!(
                "character decomposition has multiplicity {c} at λ = {lam:?} but the \
                 sweep missed it"
            )));
        }
    }
    Ok(out)
}

/// One row of the comparison table between the two signed-sum formulas.
#[derive(Clone, Debug)]
pub struct GpRow {
    pub lambda: Weight,
    pub multiplicity: i64,
    pub gp_value: i64,
    pub delta: i64,
}

/// Side-by-side table over the window; rows where both formulas vanish are
/// omitted. No agreement is asserted.
pub fn gp_comparison(fps: &FixedPointSet, window: &Window) -> Result<Vec<GpRow>> {
    let candidates: Vec<Weight> = window
        .integral_weights()
        .into_iter()
        .filter(|w| fps.pair.is_dominant(w, GroupSide::Subgroup))
        .collect();
    let seed = Evaluator::new(fps)?;
    let rows: Vec<GpRow> = candidates
        .par_iter()
        .map_init(
            || seed.clone(),
            |ev, lam| {
                let ours = ev.evaluate(lam, Variant::Theorem);
                let gp = ev.evaluate(lam, Variant::GuilleminPrato);
                GpRow { lambda: lam.clone(), multiplicity: ours, gp_value: gp, delta: ours - gp }
            },
        )
        .collect();
    Ok(rows.into_iter().filter(|r| r.multiplicity != 0 || r.gp_value != 0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::coadjoint_fixed_point_set;
    use crate::rootsys::{build_root_system, make_pair};

    fn a2_torus() -> SubgroupPair {
        make_pair(build_root_system("A2").unwrap(), &[]).unwrap()
    }

    fn su3_pair() -> SubgroupPair {
        make_pair(build_root_system("A2").unwrap(), &[Weight(vec![4, -2])]).unwrap()
    }

    fn a2_roots() -> (Weight, Weight, Weight) {
        // α, γ and β = α + γ.
        (Weight(vec![4, -2]), Weight(vec![-2, 4]), Weight(vec![2, 2]))
    }

    #[test]
    fn empty_sum_counts_once() {
        let pair = a2_torus();
        let (alpha, gamma, beta) = a2_roots();
        let pp = partition_problem(&pair, &[alpha, gamma, beta]).unwrap();
        assert_eq!(partition_count(&pp, &Weight(vec![0, 0])), 1);
    }

    #[test]
    fn beta_decomposes_two_ways_over_the_full_root_set() {
        let pair = a2_torus();
        let (alpha, gamma, beta) = a2_roots();
        let pp = partition_problem(&pair, &[alpha, gamma, beta.clone()]).unwrap();
        // β itself, and α + γ.
        assert_eq!(partition_count(&pp, &beta), 2);
    }

    #[test]
    fn independent_generators_give_unit_counts() {
        let pair = a2_torus();
        let (_, gamma, beta) = a2_roots();
        let pp = partition_problem(&pair, &[beta.clone(), gamma]).unwrap();
        assert_eq!(partition_count(&pp, &beta), 1);
        assert_eq!(partition_count(&pp, &Weight(vec![4, 4])), 1);
        assert_eq!(partition_count(&pp, &Weight(vec![4, -2])), 0);
    }

    #[test]
    fn negative_height_returns_zero() {
        let pair = a2_torus();
        let (alpha, _, _) = a2_roots();
        let pp = partition_problem(&pair, std::slice::from_ref(&alpha)).unwrap();
        assert_eq!(partition_count(&pp, &alpha.neg()), 0);
    }

    #[test]
    fn brute_force_agreement_small() {
        let pair = a2_torus();
        let (alpha, gamma, beta) = a2_roots();
        let gens = vec![alpha, gamma, beta];
        let pp = partition_problem(&pair, &gens).unwrap();
        let table = brute_force_counts(&pp, 24);
        for (zeta, expect) in table {
            assert_eq!(partition_count(&pp, &zeta), expect, "at {zeta:?}");
        }
    }

    /// Forward enumeration over coefficient vectors, bounded by the
    /// pointedness height. Independent of the memoised recursion.
    pub fn brute_force_counts(pp: &PartitionProblem, max_height: i64) -> BTreeMap<Weight, i64> {
        let mut out = BTreeMap::new();
        let rank = pp.generators.first().map(|g| g.rank()).unwrap_or(0);
        fn rec(
            pp: &PartitionProblem,
            j: usize,
            acc: Weight,
            max_height: i64,
            out: &mut BTreeMap<Weight, i64>,
        ) {
            if pp.pointedness.pair(&acc) > max_height {
                return;
            }
            if j == pp.generators.len() {
                *out.entry(acc).or_insert(0) += 1;
                return;
            }
            let mut cur = acc;
            loop {
                rec(pp, j + 1, cur.clone(), max_height, out);
                cur = cur.add(&pp.generators[j]);
                if pp.pointedness.pair(&cur) > max_height {
                    break;
                }
            }
        }
        rec(pp, 0, Weight::zero(rank), max_height, &mut out);
        out
    }

    #[test]
    fn su3_multiplicities_on_and_off_the_circled_points() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![0, 6])).unwrap(), 1);
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![6, -6])).unwrap(), 1);
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![4, -2])).unwrap(), 1);
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![2, 2])).unwrap(), 1);
        // Inside the hashed cancellation region.
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![0, 0])).unwrap(), 0);
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![2, -4])).unwrap(), 0);
        // Far outside the moment polytope.
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![20, 20])).unwrap(), 0);
        // Non-dominant and non-integral inputs are rejected.
        assert!(multiplicity_theorem(&fps, &Weight(vec![-2, 0])).is_err());
        assert!(multiplicity_theorem(&fps, &Weight(vec![1, 1])).is_err());
    }

    #[test]
    fn su3_spectrum_matches_the_circled_points() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let spectrum = multiplicity_spectrum(&fps, &Window::symmetric(2, 8)).unwrap();
        let expected: BTreeMap<Weight, i64> = [
            (Weight(vec![6, -6]), 1),
            (Weight(vec![4, -2]), 1),
            (Weight(vec![2, 2]), 1),
            (Weight(vec![0, 6]), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(spectrum, expected);
    }

    #[test]
    fn empty_window_gives_empty_spectrum() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let w = Window { lo: vec![4, 4], hi: vec![0, 0] };
        assert!(multiplicity_spectrum(&fps, &w).unwrap().is_empty());
    }

    #[test]
    fn window_enumeration_rounds_odd_bounds_to_the_lattice() {
        let w = Window { lo: vec![-3, -1], hi: vec![2, 3] };
        let pts = w.integral_weights();
        assert!(pts.iter().all(|p| p.is_integral()));
        assert!(pts.contains(&Weight(vec![-2, 0])));
        assert!(pts.contains(&Weight(vec![2, 2])));
        assert_eq!(pts.len(), 3 * 2);
    }

    #[test]
    fn gp_variant_differs_on_the_singular_orbit() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        // Hand evaluation of the regular-points formula at λ = ν gives 0
        // while the theorem gives 1.
        assert_eq!(guillemin_prato_variant(&fps, &Weight(vec![0, 6])).unwrap(), 0);
        assert_eq!(multiplicity_theorem(&fps, &Weight(vec![0, 6])).unwrap(), 1);
        let rows = gp_comparison(&fps, &Window::symmetric(2, 8)).unwrap();
        assert!(rows.iter().any(|r| r.delta != 0));
    }

    #[test]
    fn kostant_branching_adjoint_zero_weight() {
        let pair = a2_torus();
        // Torus case: branching multiplicity is the weight multiplicity;
        // the adjoint has a two-dimensional zero weight space.
        assert_eq!(
            kostant_branching(&pair, &Weight(vec![2, 2]), &Weight(vec![0, 0])).unwrap(),
            2
        );
        assert_eq!(
            kostant_branching(&pair, &Weight(vec![2, 2]), &Weight(vec![2, 2])).unwrap(),
            1
        );
        // Singular ν is out of scope for this specialisation.
        assert!(kostant_branching(&pair, &Weight(vec![0, 6]), &Weight(vec![0, 0])).is_err());
    }

    #[test]
    fn kostant_branching_matches_decomposition_for_the_pair() {
        let pair = su3_pair();
        let nu = Weight(vec![2, 2]);
        let chi = crate::charring::weyl_character(&pair, &nu, GroupSide::Ambient).unwrap();
        let dec = crate::charring::decompose_into_k(&pair, &chi).unwrap();
        let window = Window::covering_character(&chi);
        for lam in window.integral_weights() {
            if !pair.is_dominant(&lam, GroupSide::Subgroup) {
                continue;
            }
            let expect = dec.get(&lam).copied().unwrap_or(0);
            assert_eq!(
                kostant_branching(&pair, &nu, &lam).unwrap(),
                expect,
                "at {lam:?}"
            );
        }
    }

    #[test]
    fn support_bound_from_the_pointedness_functional() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let ev = Evaluator::new(&fps).unwrap();
        // Base points of the partition arguments bound the support.
        let mut max_height = i64::MIN;
        for z in &fps.z {
            let d = &fps.point_data[z.point];
            let base = fps.points[z.point]
                .mu
                .add(&fps.pair.weyl_k[z.w].apply(&fps.pair.rho_k))
                .add(&d.polar.beta_half)
                .sub(&fps.pair.rho_k)
                .sub(&d.polar.beta_plus_half);
            max_height = max_height.max(ev.problems[z.point].pointedness.pair(&base));
        }
        // A dominant weight strictly above the bound gets multiplicity 0.
        for lam in Window::symmetric(2, 30).integral_weights() {
            if !fps.pair.is_dominant(&lam, GroupSide::Subgroup) {
                continue;
            }
            let above = fps
                .z
                .iter()
                .all(|z| ev.problems[z.point].pointedness.pair(&lam) > max_height);
            if above {
                assert_eq!(multiplicity_theorem(&fps, &lam).unwrap(), 0, "at {lam:?}");
            }
        }
    }
}
