//! Fixed-point data: moment images, tangent weights, subgroup Weyl orbits
//! and the polarised combinatorics derived from them.
//!
//! The engine never sees a manifold; a fixture is a finite list of fixed
//! points, each carrying its moment image and the multiset of tangent
//! weights of the torus action. Everything else is derived here.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::charring::{product_half_diff, product_one_minus_exp_neg, FormalCharacter};
use crate::rootsys::{Chamber, GroupSide, SubgroupPair, Weight};
use crate::{Error, Result};

pub const FIXTURE_FORMAT: u32 = 1;

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSpec {
    #[serde(rename = "type")]
    pub cartan_type: String,
    #[serde(default)]
    pub k_simple_roots: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawPoint {
    pub id: String,
    pub mu: Vec<i64>,
    pub tangent_weights: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureFile {
    pub format: u32,
    pub group: GroupSpec,
    pub points: Vec<RawPoint>,
}

pub fn pair_from_spec(spec: &GroupSpec) -> Result<SubgroupPair> {
    let rs = crate::rootsys::build_root_system(&spec.cartan_type)?;
    let roots: Vec<Weight> = spec.k_simple_roots.iter().map(|v| Weight(v.clone())).collect();
    crate::rootsys::make_pair(rs, &roots)
}

/// Parses a fixture file and runs full ingestion.
pub fn fixture_from_json(json: &str) -> Result<FixedPointSet> {
    let file: FixtureFile = serde_json::from_str(json)?;
    if file.format != FIXTURE_FORMAT {
        return Err(Error::Schema(format!(
            "unsupported fixture format {} (expected {FIXTURE_FORMAT})",
            file.format
        )));
    }
    let pair = pair_from_spec(&file.group)?;
    let points = file
        .points
        .into_iter()
        .map(|p| PointInput {
            id: p.id,
            mu: Weight(p.mu),
            tangent_weights: p.tangent_weights.into_iter().map(Weight).collect(),
            component: p.component,
        })
        .collect();
    ingest(pair, points)
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Raw per-point input before validation.
#[derive(Clone, Debug)]
pub struct PointInput {
    pub id: String,
    pub mu: Weight,
    pub tangent_weights: Vec<Weight>,
    pub component: Option<String>,
}

/// A validated fixed point.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub id: String,
    pub mu: Weight,
    /// Sorted tangent-weight multiset.
    pub tangent_weights: Vec<Weight>,
    pub component: Option<String>,
}

/// Result of polarising a weight multiset against the pair's functional ξ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarized {
    /// Polarised multiset, sorted.
    pub b_plus: Vec<Weight>,
    /// Number of sign flips.
    pub s: i64,
    /// Sum of the weights that were flipped.
    pub beta_bar: Weight,
    /// Half the sum of the original multiset (exact in doubled coordinates).
    pub beta_half: Weight,
    /// Half the sum of the polarised multiset.
    pub beta_plus_half: Weight,
}

/// Combinatorial data attached to a single fixed point.
#[derive(Clone, Debug)]
pub struct PointLocalData {
    /// Tangent weights along the subgroup orbit through the point
    /// (one occurrence of ±α per non-wall positive root of the subgroup).
    pub orbit_weights: Vec<Weight>,
    /// The remaining tangent weights, sorted.
    pub b: Vec<Weight>,
    pub polar: Polarized,
}

/// A subgroup Weyl orbit of fixed points with its derived data.
#[derive(Clone, Debug)]
pub struct OrbitData {
    /// Point index of the representative with dominant moment image.
    pub rep: usize,
    /// For each element of the subgroup Weyl group (indexed as in the
    /// pair), the point it sends the representative to.
    pub members_by_w: Vec<usize>,
    /// Distinct member point indices, ascending.
    pub member_points: Vec<usize>,
    /// Wall roots at the representative.
    pub wall_roots: Vec<Weight>,
    pub stabilizer_size: usize,
    /// The Weyl sweep of the representative's non-orbit weights, polarised
    /// (multiset; repeats within the representative's own multiset are
    /// kept, sweep images are deduplicated).
    pub b_plus_orbit: Vec<Weight>,
    /// Sweep-only polarised weights, absent at the representative itself.
    pub c_set: Vec<Weight>,
    /// Expansion of `Π_{γ∈C}(1−e^{−γ})`.
    pub m: FormalCharacter,
    /// Expansion of `Π_{γ∈C}(e^{γ/2}−e^{−γ/2})`.
    pub m_tilde: FormalCharacter,
    /// Sign count, constant across the orbit.
    pub s: i64,
}

/// One element of the pair set Z: a fixed point together with a subgroup
/// Weyl element pulling its moment image into the closed dominant chamber.
#[derive(Clone, Copy, Debug)]
pub struct ZElement {
    pub orbit: usize,
    /// Index into the pair's subgroup Weyl group.
    pub w: usize,
    pub point: usize,
}

#[derive(Clone, Debug)]
pub struct FixedPointSet {
    pub pair: SubgroupPair,
    pub points: Vec<FixedPoint>,
    pub point_data: Vec<PointLocalData>,
    pub orbits: Vec<OrbitData>,
    pub z: Vec<ZElement>,
    /// Set when the fixture was generated from a coadjoint orbit; enables
    /// the character-formula oracles during verification.
    pub coadjoint_origin: Option<Weight>,
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------------------
// Polarisation and orbit splitting
// ---------------------------------------------------------------------------

/// Polarises a weight multiset: flips every weight pairing strictly
/// negatively with ξ and records the bookkeeping sums.
pub fn polarize(pair: &SubgroupPair, b: &[Weight]) -> Polarized {
    let rank = pair.rank();
    let mut b_plus = Vec::with_capacity(b.len());
    let mut s = 0i64;
    let mut beta_bar = Weight::zero(rank);
    let mut sum = Weight::zero(rank);
    let mut sum_plus = Weight::zero(rank);
    for beta in b {
        sum = sum.add(beta);
        if pair.xi.pair(beta) < 0 {
            s += 1;
            beta_bar = beta_bar.add(beta);
            let flipped = beta.neg();
            sum_plus = sum_plus.add(&flipped);
            b_plus.push(flipped);
        } else {
            sum_plus = sum_plus.add(beta);
            b_plus.push(beta.clone());
        }
    }
    b_plus.sort();
    Polarized {
        b_plus,
        s,
        beta_bar,
        beta_half: sum.half(),
        beta_plus_half: sum_plus.half(),
    }
}

/// Splits a point's tangent multiset into the subgroup-orbit directions and
/// the remainder: for every positive subgroup root not orthogonal to the
/// moment image, exactly one occurrence of `+α` or `−α` is removed.
pub fn split_orbit_weights(
    pair: &SubgroupPair,
    point: &FixedPoint,
) -> Result<(Vec<Weight>, Vec<Weight>)> {
    let mut remaining = point.tangent_weights.clone();
    let mut orbit_weights = Vec::new();
    for alpha in &pair.k_positive_roots {
        if pair.g.coroot_pairing(&point.mu, alpha).is_zero() {
            continue;
        }
        let neg = alpha.neg();
        let pos_at = remaining.iter().position(|t| t == alpha);
        let neg_at = remaining.iter().position(|t| *t == neg);
        match (pos_at, neg_at) {
            (Some(i), None) => {
                remaining.remove(i);
                orbit_weights.push(alpha.clone());
            }
            (None, Some(i)) => {
                remaining.remove(i);
                orbit_weights.push(neg);
            }
            (Some(_), Some(_)) => {
                return Err(Error::MalformedPoint(format!(
                    "point {:?}: both signs of the subgroup root {alpha:?} occur in the \
                     tangent weights, so the orbit direction is not determined",
                    point.id
                )));
            }
            (None, None) => {
                return Err(Error::MalformedPoint(format!(
                    "point {:?}: neither sign of the subgroup root {alpha:?} occurs in the \
                     tangent weights, yet the moment image is not on its wall",
                    point.id
                )));
            }
        }
    }
    remaining.sort();
    Ok((orbit_weights, remaining))
}

// ---------------------------------------------------------------------------
// Ingestion
// ---------------------------------------------------------------------------

/// Validates raw points, partitions them into subgroup Weyl orbits, derives
/// all per-point and per-orbit data, and assembles the pair set Z.
pub fn ingest(pair: SubgroupPair, inputs: Vec<PointInput>) -> Result<FixedPointSet> {
    if inputs.is_empty() {
        return Err(Error::DegenerateInput("empty fixed-point list".into()));
    }
    let rank = pair.rank();

    let mut ids = BTreeSet::new();
    let labelled = inputs.iter().filter(|p| p.component.is_some()).count();
    if labelled != 0 && labelled != inputs.len() {
        return Err(Error::Schema(
            "component labels must be given on all points or on none".into(),
        ));
    }
    let mut points: Vec<FixedPoint> = Vec::with_capacity(inputs.len());
    for p in inputs {
        if !ids.insert(p.id.clone()) {
            return Err(Error::Schema(format!("duplicate point id {:?}", p.id)));
        }
        if p.mu.rank() != rank {
            return Err(Error::Schema(format!(
                "point {:?}: moment image has rank {} but the group has rank {rank}",
                p.id,
                p.mu.rank()
            )));
        }
        if !p.mu.is_integral() {
            return Err(Error::MalformedPoint(format!(
                "point {:?}: moment image {:?} is not an integral weight \
                 (doubled coordinates must be even)",
                p.id, p.mu
            )));
        }
        if p.tangent_weights.is_empty() {
            return Err(Error::MalformedPoint(format!(
                "point {:?}: empty tangent weight multiset",
                p.id
            )));
        }
        for t in &p.tangent_weights {
            if t.rank() != rank {
                return Err(Error::Schema(format!(
                    "point {:?}: tangent weight {t:?} has the wrong rank",
                    p.id
                )));
            }
            if t.is_zero() {
                return Err(Error::MalformedPoint(format!(
                    "point {:?}: zero tangent weight (fixed points must be isolated)",
                    p.id
                )));
            }
            if !t.is_integral() {
                return Err(Error::MalformedPoint(format!(
                    "point {:?}: tangent weight {t:?} is not integral \
                     (doubled coordinates must be even)",
                    p.id
                )));
            }
        }
        let mut tangent = p.tangent_weights;
        tangent.sort();
        points.push(FixedPoint { id: p.id, mu: p.mu, tangent_weights: tangent, component: p.component });
    }

    // The polarisation functional must separate every tangent weight that
    // is not a subgroup root; re-select it if the default fails.
    let mut seen: BTreeSet<Weight> = BTreeSet::new();
    for p in &points {
        seen.extend(p.tangent_weights.iter().cloned());
    }
    let all_tangents: Vec<Weight> = seen.into_iter().collect();
    let pair = pair.with_xi_separating(&all_tangents)?;

    // Match each (point, w) to the point carrying the transported data.
    let key_of = |p: &FixedPoint| (p.component.clone(), p.mu.clone(), p.tangent_weights.clone());
    let mut index: HashMap<(Option<String>, Weight, Vec<Weight>), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        index.entry(key_of(p)).or_default().push(i);
    }
    let nw = pair.weyl_k.len();
    let mut targets = vec![vec![usize::MAX; nw]; points.len()];
    for (pi, p) in points.iter().enumerate() {
        for (wi, w) in pair.weyl_k.iter().enumerate() {
            let mut tangent: Vec<Weight> =
                p.tangent_weights.iter().map(|t| w.apply(t)).collect();
            tangent.sort();
            let key = (p.component.clone(), w.apply(&p.mu), tangent);
            match index.get(&key).map(Vec::as_slice) {
                None | Some([]) => {
                    return Err(Error::MalformedPoint(format!(
                        "point {:?}: no point carries its Weyl-transported data \
                         (moment image {:?}); the fixture is not closed under the \
                         subgroup Weyl action",
                        p.id, key.1
                    )));
                }
                Some([unique]) => targets[pi][wi] = *unique,
                Some(_) => {
                    return Err(Error::AmbiguousData(format!(
                        "point {:?}: several points share the Weyl-transported moment \
                         image and tangent data; supply distinct component labels to \
                         disambiguate the orbit structure",
                        p.id
                    )));
                }
            }
        }
    }

    // Per-point split and polarisation.
    let mut point_data = Vec::with_capacity(points.len());
    let mut warnings = Vec::new();
    for p in &points {
        let (orbit_weights, b) = split_orbit_weights(&pair, p)?;
        let polar = polarize(&pair, &b);
        if b.windows(2).any(|w| w[0] == w[1]) {
            warnings.push(format!(
                "point {:?}: repeated tangent weight in the non-orbit multiset; the \
                 orbit sweep deduplicates repeats, which may not match the intended \
                 geometry",
                p.id
            ));
        }
        point_data.push(PointLocalData { orbit_weights, b, polar });
    }

    // Partition into orbits.
    let mut orbit_of = vec![usize::MAX; points.len()];
    let mut orbits: Vec<OrbitData> = Vec::new();
    for start in 0..points.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let oi = orbits.len();
        let members: BTreeSet<usize> = targets[start].iter().copied().collect();
        for &m in &members {
            if orbit_of[m] != usize::MAX {
                return Err(Error::AmbiguousData(format!(
                    "points {:?} and {:?} produce overlapping orbits",
                    points[start].id, points[m].id
                )));
            }
            orbit_of[m] = oi;
        }

        // Unique member with dominant moment image is the representative.
        let dominant: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&m| {
                !matches!(pair.chamber(&points[m].mu, GroupSide::Subgroup), Chamber::Outside)
            })
            .collect();
        let [rep] = dominant.as_slice() else {
            return Err(Error::AmbiguousData(format!(
                "orbit of {:?} has {} members with dominant moment image, expected \
                 exactly one",
                points[start].id,
                dominant.len()
            )));
        };
        let rep = *rep;

        let members_by_w: Vec<usize> = (0..nw).map(|wi| targets[rep][wi]).collect();
        let wall_roots = pair.wall_set(&points[rep].mu, GroupSide::Subgroup);

        // The stabiliser of the representative must be exactly the subgroup
        // generated by its wall reflections.
        let stab: BTreeSet<Vec<i64>> = (0..nw)
            .filter(|&wi| members_by_w[wi] == rep)
            .map(|wi| pair.weyl_k[wi].mat.a.clone())
            .collect();
        let gens: Vec<_> = wall_roots
            .iter()
            .map(|a| pair.g.reflection_element(a))
            .collect::<Result<_>>()?;
        let wall_group = if gens.is_empty() {
            vec![crate::rootsys::WeylElement::identity(rank)]
        } else {
            crate::rootsys::close_under_generators(rank, &gens)
        };
        let wall_set_mats: BTreeSet<Vec<i64>> =
            wall_group.iter().map(|w| w.mat.a.clone()).collect();
        if stab != wall_set_mats {
            return Err(Error::MalformedPoint(format!(
                "point {:?}: its stabiliser in the subgroup Weyl group differs from \
                 the wall-reflection subgroup; such fixtures are not supported",
                points[rep].id
            )));
        }

        // Sign count is constant across the orbit.
        let s = point_data[rep].polar.s;
        for &m in &members {
            if point_data[m].polar.s != s {
                return Err(Error::Inconsistency(format!(
                    "sign count varies across the orbit of {:?}; the polarisation \
                     functional is not orbit-invariant on this data",
                    points[rep].id
                )));
            }
        }

        // Weyl sweep of the representative's non-orbit weights.
        let rep_b = &point_data[rep].b;
        let rep_b_plus = &point_data[rep].polar.b_plus;
        let rep_plus_set: BTreeSet<Weight> = rep_b_plus.iter().cloned().collect();
        let mut sweep_extra: BTreeSet<Weight> = BTreeSet::new();
        for w in &pair.weyl_k {
            for beta in rep_b {
                let img = w.apply(beta);
                let pol = if pair.xi.pair(&img) < 0 { img.neg() } else { img };
                if !rep_plus_set.contains(&pol) {
                    sweep_extra.insert(pol);
                }
            }
        }
        let c_set: Vec<Weight> = sweep_extra.into_iter().collect();
        let mut b_plus_orbit = rep_b_plus.clone();
        b_plus_orbit.extend(c_set.iter().cloned());
        b_plus_orbit.sort();
        let m = product_one_minus_exp_neg(rank, &c_set);
        let m_tilde = product_half_diff(rank, &c_set);

        orbits.push(OrbitData {
            rep,
            members_by_w,
            member_points: members.into_iter().collect(),
            wall_roots,
            stabilizer_size: stab.len(),
            b_plus_orbit,
            c_set,
            m,
            m_tilde,
            s,
        });
    }

    // The pair set Z: one element per orbit per subgroup Weyl element.
    let mut z = Vec::with_capacity(orbits.len() * nw);
    for (oi, orbit) in orbits.iter().enumerate() {
        for (wi, &pt) in orbit.members_by_w.iter().enumerate() {
            z.push(ZElement { orbit: oi, w: wi, point: pt });
        }
    }

    Ok(FixedPointSet {
        pair,
        points,
        point_data,
        orbits,
        z,
        coadjoint_origin: None,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Coadjoint orbit fixtures
// ---------------------------------------------------------------------------

/// Fixed-point data of the coadjoint orbit through a dominant weight: one
/// point per Weyl image, with tangent weights transported from the
/// positive roots pairing non-trivially with the weight. The sign flag
/// flips the complex structure; `+1` is the convention under which the
/// quantisation of the orbit through ω (type A1) has character
/// `e^ω + e^{−ω}`.
pub fn coadjoint_fixture(
    pair: &SubgroupPair,
    lam: &Weight,
    complex_structure_sign: i64,
) -> Result<Vec<PointInput>> {
    if !pair.is_dominant(lam, GroupSide::Ambient) {
        return Err(Error::Domain(format!("{lam:?} is not dominant for the ambient group")));
    }
    if !lam.is_integral() {
        return Err(Error::Domain(format!("{lam:?} is not an integral weight")));
    }
    let base: Vec<Weight> = pair
        .g
        .positive_roots
        .iter()
        .filter(|phi| !pair.g.coroot_pairing(lam, phi).is_zero())
        .cloned()
        .collect();
    if base.is_empty() {
        return Err(Error::DegenerateInput(
            "the orbit of the zero weight is a point, not a fixture with isolated \
             fixed points"
                .into(),
        ));
    }

    // Enumerate the orbit, remembering one Weyl element per image.
    let mut images: BTreeMap<Weight, usize> = BTreeMap::new();
    let mut queue = vec![lam.clone()];
    images.insert(lam.clone(), 0);
    let mut elements: Vec<crate::rootsys::WeylElement> =
        vec![crate::rootsys::WeylElement::identity(pair.rank())];
    while let Some(mu) = queue.pop() {
        let idx = images[&mu];
        for simple in &pair.g.simple_roots {
            let refl = pair.g.reflection_element(simple)?;
            let img = refl.apply(&mu);
            if !images.contains_key(&img) {
                let composed = refl.compose(&elements[idx]);
                elements.push(composed);
                images.insert(img.clone(), elements.len() - 1);
                queue.push(img);
            }
        }
    }

    // Deterministic point order: descending by the ρ functional, then by
    // coordinates.
    let order = pair.g.weight_functional(&pair.rho_g);
    let mut sorted: Vec<(Weight, usize)> = images.into_iter().collect();
    sorted.sort_by(|(a, _), (b, _)| {
        order.pair(b).cmp(&order.pair(a)).then_with(|| b.0.cmp(&a.0))
    });

    let points = sorted
        .into_iter()
        .enumerate()
        .map(|(i, (mu, idx))| {
            let w = &elements[idx];
            let tangent: Vec<Weight> = base
                .iter()
                .map(|phi| w.apply(phi).scale(complex_structure_sign))
                .collect();
            PointInput { id: format!("p{}", i + 1), mu, tangent_weights: tangent, component: None }
        })
        .collect();
    Ok(points)
}

/// Coadjoint fixture, ingested, with the origin recorded for verification.
pub fn coadjoint_fixed_point_set(
    pair: &SubgroupPair,
    lam: &Weight,
    complex_structure_sign: i64,
) -> Result<FixedPointSet> {
    let raw = coadjoint_fixture(pair, lam, complex_structure_sign)?;
    let mut fps = ingest(pair.clone(), raw)?;
    fps.coadjoint_origin = Some(lam.clone());
    Ok(fps)
}

impl FixedPointSet {
    pub fn rank(&self) -> usize {
        self.pair.rank()
    }

    pub fn orbit_of_point(&self, point: usize) -> usize {
        self.orbits
            .iter()
            .position(|o| o.member_points.contains(&point))
            .expect("every point belongs to an orbit")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, make_pair};

    pub fn su3_pair() -> SubgroupPair {
        make_pair(build_root_system("A2").unwrap(), &[Weight(vec![4, -2])]).unwrap()
    }

    fn su3_points() -> Vec<PointInput> {
        vec![
            PointInput {
                id: "nu".into(),
                mu: Weight(vec![0, 6]),
                tangent_weights: vec![Weight(vec![2, 2]), Weight(vec![-2, 4])],
                component: None,
            },
            PointInput {
                id: "wp".into(),
                mu: Weight(vec![6, -6]),
                tangent_weights: vec![Weight(vec![4, -2]), Weight(vec![2, -4])],
                component: None,
            },
            PointInput {
                id: "wm".into(),
                mu: Weight(vec![-6, 0]),
                tangent_weights: vec![Weight(vec![-4, 2]), Weight(vec![-2, -2])],
                component: None,
            },
        ]
    }

    #[test]
    fn su3_ingest_builds_two_orbits_and_four_z_elements() {
        let fps = ingest(su3_pair(), su3_points()).unwrap();
        assert_eq!(fps.orbits.len(), 2);
        assert_eq!(fps.z.len(), 4);
        let sizes: Vec<usize> =
            fps.orbits.iter().map(|o| o.member_points.len()).collect();
        assert!(sizes.contains(&1) && sizes.contains(&2));
        let total: usize = fps.orbits.iter().map(|o| o.member_points.len()).sum();
        assert_eq!(total, fps.points.len());
    }

    #[test]
    fn su3_split_and_polarise_match_the_table() {
        let fps = ingest(su3_pair(), su3_points()).unwrap();
        let beta = Weight(vec![2, 2]);
        let gamma = Weight(vec![-2, 4]);

        let wp = fps.points.iter().position(|p| p.id == "wp").unwrap();
        let d = &fps.point_data[wp];
        assert_eq!(d.orbit_weights, vec![Weight(vec![4, -2])]);
        assert_eq!(d.b, vec![gamma.neg()]);
        assert_eq!(d.polar.s, 1);
        assert_eq!(d.polar.beta_bar, gamma.neg());
        assert_eq!(d.polar.beta_half, Weight(vec![1, -2]));
        assert_eq!(d.polar.beta_plus_half, Weight(vec![-1, 2]));
        assert_eq!(d.polar.b_plus, vec![gamma.clone()]);

        let nu = fps.points.iter().position(|p| p.id == "nu").unwrap();
        let d = &fps.point_data[nu];
        assert!(d.orbit_weights.is_empty());
        assert_eq!(d.b.len(), 2);
        assert_eq!(d.polar.s, 0);
        assert!(d.polar.beta_bar.is_zero());
        assert_eq!(d.polar.beta_half, beta.add(&gamma).half());
    }

    #[test]
    fn su3_orbit_sweep_data() {
        let fps = ingest(su3_pair(), su3_points()).unwrap();
        let beta = Weight(vec![2, 2]);
        let gamma = Weight(vec![-2, 4]);
        let p1_orbit = fps
            .orbits
            .iter()
            .find(|o| fps.points[o.rep].id == "wp")
            .unwrap();
        assert_eq!(p1_orbit.b_plus_orbit, {
            let mut v = vec![beta.clone(), gamma.clone()];
            v.sort();
            v
        });
        assert_eq!(p1_orbit.c_set, vec![beta.clone()]);
        assert_eq!(p1_orbit.s, 1);
        assert_eq!(p1_orbit.m.coeff(&Weight(vec![0, 0])), 1);
        assert_eq!(p1_orbit.m.coeff(&beta.neg()), -1);
        assert_eq!(p1_orbit.m.len(), 2);

        let nu_orbit = fps
            .orbits
            .iter()
            .find(|o| fps.points[o.rep].id == "nu")
            .unwrap();
        assert!(nu_orbit.c_set.is_empty());
        assert_eq!(nu_orbit.m, FormalCharacter::one(2));
        assert_eq!(nu_orbit.wall_roots, vec![Weight(vec![4, -2])]);
        assert_eq!(nu_orbit.stabilizer_size, 2);
    }

    #[test]
    fn polarized_orbit_set_is_weyl_stable() {
        let fps = ingest(su3_pair(), su3_points()).unwrap();
        for orbit in &fps.orbits {
            let set: BTreeSet<Weight> = orbit.b_plus_orbit.iter().cloned().collect();
            for w in &fps.pair.weyl_k {
                let image: BTreeSet<Weight> = set
                    .iter()
                    .map(|g| {
                        let img = w.apply(g);
                        if fps.pair.xi.pair(&img) < 0 {
                            img.neg()
                        } else {
                            img
                        }
                    })
                    .collect();
                assert_eq!(image, set);
            }
        }
    }

    #[test]
    fn m_coefficients_evaluate_to_zero_or_one() {
        // Σ_η m(η) is Π(1−1) = 0 for a nonempty sweep set, 1 for an empty
        // one.
        let fps = ingest(su3_pair(), su3_points()).unwrap();
        for orbit in &fps.orbits {
            let total = orbit.m.total_coefficient();
            if orbit.c_set.is_empty() {
                assert_eq!(total, 1);
            } else {
                assert_eq!(total, 0);
            }
        }
    }

    #[test]
    fn torus_fixture_orbits_are_singletons() {
        let pair = make_pair(build_root_system("A1").unwrap(), &[]).unwrap();
        let points = vec![
            PointInput {
                id: "n".into(),
                mu: Weight(vec![2]),
                tangent_weights: vec![Weight(vec![2])],
                component: None,
            },
            PointInput {
                id: "s".into(),
                mu: Weight(vec![-2]),
                tangent_weights: vec![Weight(vec![-2])],
                component: None,
            },
        ];
        let fps = ingest(pair, points).unwrap();
        assert_eq!(fps.orbits.len(), 2);
        assert_eq!(fps.z.len(), 2);
        for z in &fps.z {
            assert!(fps.pair.weyl_k[z.w].is_identity());
        }
    }

    #[test]
    fn empty_point_list_is_rejected() {
        assert!(matches!(
            ingest(su3_pair(), Vec::new()),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn ambiguous_duplicate_points_are_rejected() {
        let pair = make_pair(build_root_system("A2").unwrap(), &[Weight(vec![4, -2])]).unwrap();
        // Two identical points cannot be told apart by the matcher.
        let mk = |id: &str| PointInput {
            id: id.into(),
            mu: Weight(vec![0, 6]),
            tangent_weights: vec![Weight(vec![2, 2]), Weight(vec![-2, 4])],
            component: None,
        };
        let err = ingest(pair, vec![mk("a"), mk("b")]).unwrap_err();
        assert!(matches!(err, Error::AmbiguousData(_)));
    }

    #[test]
    fn tangent_validation_errors() {
        let pair = su3_pair();
        let bad_zero = PointInput {
            id: "x".into(),
            mu: Weight(vec![0, 6]),
            tangent_weights: vec![Weight(vec![0, 0])],
            component: None,
        };
        assert!(matches!(
            ingest(pair.clone(), vec![bad_zero]),
            Err(Error::MalformedPoint(_))
        ));
        let bad_odd_mu = PointInput {
            id: "x".into(),
            mu: Weight(vec![1, 0]),
            tangent_weights: vec![Weight(vec![2, 2])],
            component: None,
        };
        assert!(matches!(
            ingest(pair.clone(), vec![bad_odd_mu]),
            Err(Error::MalformedPoint(_))
        ));
        let missing_root = PointInput {
            id: "x".into(),
            // Moment image off the wall of α but no ±α in the tangent data.
            mu: Weight(vec![6, -6]),
            tangent_weights: vec![Weight(vec![2, -4])],
            component: None,
        };
        assert!(matches!(
            ingest(pair, vec![missing_root]),
            Err(Error::MalformedPoint(_))
        ));
    }

    #[test]
    fn coadjoint_a1_reproduces_the_two_point_sphere() {
        let pair = make_pair(build_root_system("A1").unwrap(), &[]).unwrap();
        let raw = coadjoint_fixture(&pair, &Weight(vec![2]), 1).unwrap();
        assert_eq!(raw.len(), 2);
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![2]), 1).unwrap();
        assert_eq!(fps.points[0].mu, Weight(vec![2]));
        assert_eq!(fps.points[0].tangent_weights, vec![Weight(vec![4])]);
        assert_eq!(fps.points[1].mu, Weight(vec![-2]));
        assert_eq!(fps.points[1].tangent_weights, vec![Weight(vec![-4])]);
    }

    #[test]
    fn coadjoint_su3_matches_the_handwritten_fixture() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        assert_eq!(fps.points.len(), 3);
        let by_mu: BTreeMap<Weight, Vec<Weight>> = fps
            .points
            .iter()
            .map(|p| (p.mu.clone(), p.tangent_weights.clone()))
            .collect();
        let hand = ingest(su3_pair(), su3_points()).unwrap();
        for p in &hand.points {
            assert_eq!(by_mu[&p.mu], p.tangent_weights, "at {:?}", p.mu);
        }
    }

    #[test]
    fn coadjoint_zero_orbit_is_degenerate() {
        let pair = su3_pair();
        assert!(matches!(
            coadjoint_fixture(&pair, &Weight(vec![0, 0]), 1),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn orbit_member_data_transports_under_weyl() {
        let fps = ingest(su3_pair(), su3_points()).unwrap();
        for orbit in &fps.orbits {
            let rep = &fps.points[orbit.rep];
            for (wi, &pt) in orbit.members_by_w.iter().enumerate() {
                let w = &fps.pair.weyl_k[wi];
                assert_eq!(fps.points[pt].mu, w.apply(&rep.mu));
                let mut transported: Vec<Weight> =
                    rep.tangent_weights.iter().map(|t| w.apply(t)).collect();
                transported.sort();
                assert_eq!(fps.points[pt].tangent_weights, transported);
            }
        }
    }
}
