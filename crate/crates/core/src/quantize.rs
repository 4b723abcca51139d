//! The character engine: the direct localization sum over fixed points,
//! its reorganisation into a quotient of subgroup characters, the
//! half-weight variant, and the equal-rank multiplet identity for
//! coadjoint orbits.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::charring::{
    self, character_for_label, decompose_into_k, exact_divide, product_half_diff,
    product_one_minus_exp_neg, weyl_character, FormalCharacter, TermOrder,
};
use crate::fixedpoint::{polarize, FixedPointSet};
use crate::multiplicity;
use crate::rootsys::{GroupSide, SubgroupPair, Weight};
use crate::{Error, Result};

/// Shape of a denominator factor attached to a weight γ.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DenomForm {
    /// `1 − e^{−γ}`
    Standard,
    /// `e^{γ/2} − e^{−γ/2}`
    Half,
}

fn factor_product(rank: usize, factors: &[Weight], form: DenomForm) -> FormalCharacter {
    match form {
        DenomForm::Standard => product_one_minus_exp_neg(rank, factors),
        DenomForm::Half => product_half_diff(rank, factors),
    }
}

fn multiset_counts(ws: &[Weight]) -> BTreeMap<Weight, usize> {
    let mut out = BTreeMap::new();
    for w in ws {
        *out.entry(w.clone()).or_insert(0) += 1;
    }
    out
}

/// Union with maximal multiplicity of the given factor multisets.
fn merge_factor_multisets(sets: &[&[Weight]]) -> Vec<Weight> {
    let mut merged: BTreeMap<Weight, usize> = BTreeMap::new();
    for s in sets {
        for (w, c) in multiset_counts(s) {
            let e = merged.entry(w).or_insert(0);
            *e = (*e).max(c);
        }
    }
    merged
        .into_iter()
        .flat_map(|(w, c)| std::iter::repeat_n(w, c))
        .collect()
}

/// Multiset difference `merged − own`.
fn missing_factors(merged: &[Weight], own: &[Weight]) -> Vec<Weight> {
    let mut own_counts = multiset_counts(own);
    let mut out = Vec::new();
    for w in merged {
        match own_counts.get_mut(w) {
            Some(c) if *c > 0 => *c -= 1,
            _ => out.push(w.clone()),
        }
    }
    out
}

fn division_order(pair: &SubgroupPair) -> TermOrder {
    // ρ of the ambient group plus the polarisation functional; lexicographic
    // tiebreak inside the order itself.
    TermOrder::new(pair.g.weight_functional(&pair.rho_g).combine(&pair.xi, 1))
}

/// Brings per-orbit rational terms to a common denominator and divides
/// exactly. Returns the finite character, the assembled numerator and the
/// merged factor multiset.
fn assemble_quotient(
    pair: &SubgroupPair,
    numerators: &[FormalCharacter],
    factor_sets: &[&[Weight]],
    form: DenomForm,
    context: &str,
) -> Result<(FormalCharacter, FormalCharacter, Vec<Weight>)> {
    let rank = pair.rank();
    let merged = merge_factor_multisets(factor_sets);
    let mut assembled = FormalCharacter::zero();
    for (num, own) in numerators.iter().zip(factor_sets) {
        let pad = factor_product(rank, &missing_factors(&merged, own), form);
        assembled = assembled.add(&num.mul(&pad));
    }
    let den = factor_product(rank, &merged, form);
    let quot = exact_divide(&assembled, &den, &division_order(pair)).map_err(|e| match e {
        Error::InexactDivision(msg) => Error::Inconsistency(format!(
            "{context}: the rational sum is not a finite character ({msg}); \
             the fixture does not come from a genuine quantisation"
        )),
        other => other,
    })?;
    Ok((quot, assembled, merged))
}

// ---------------------------------------------------------------------------
// Localization sum
// ---------------------------------------------------------------------------

/// The character as the bare fixed-point sum
/// `Σ_p e^{μ(p)} / Π_t (1 − e^{−t})`, evaluated exactly by polarising every
/// tangent weight and dividing out the common denominator.
pub fn localization_character(fps: &FixedPointSet) -> Result<FormalCharacter> {
    let pair = &fps.pair;
    let mut numerators = Vec::with_capacity(fps.points.len());
    let mut factor_sets: Vec<Vec<Weight>> = Vec::with_capacity(fps.points.len());
    for p in &fps.points {
        let polar = polarize(pair, &p.tangent_weights);
        let sign = if polar.s % 2 == 0 { 1 } else { -1 };
        numerators.push(FormalCharacter::monomial(p.mu.add(&polar.beta_bar), sign));
        factor_sets.push(polar.b_plus);
    }
    let refs: Vec<&[Weight]> = factor_sets.iter().map(Vec::as_slice).collect();
    let (chi, _, _) =
        assemble_quotient(pair, &numerators, &refs, DenomForm::Standard, "localization sum")?;
    Ok(chi)
}

// ---------------------------------------------------------------------------
// Main character formula
// ---------------------------------------------------------------------------

/// Per-orbit contribution to a character report.
#[derive(Clone, Debug)]
pub struct OrbitTerm {
    pub orbit: usize,
    pub representative: String,
    pub component: Option<String>,
    /// `(−1)^{s}` for the orbit.
    pub sign: i64,
    /// Highest-weight labels with total coefficients `(−1)^s · m(η)`.
    pub k_label_terms: Vec<(i64, Weight)>,
    /// The orbit's numerator as a finite character (before padding to the
    /// common denominator).
    pub numerator: FormalCharacter,
}

#[derive(Clone, Debug)]
pub struct CharacterReport {
    pub character: FormalCharacter,
    /// Numerator over the merged denominator.
    pub numerator: FormalCharacter,
    pub denominator_factors: Vec<Weight>,
    pub denominator_form: DenomForm,
    pub k_decomposition: BTreeMap<Weight, i64>,
    pub per_orbit: Vec<OrbitTerm>,
}

fn orbit_terms(
    fps: &FixedPointSet,
    orbit_index: usize,
    form: DenomForm,
) -> Result<(Vec<(i64, Weight)>, FormalCharacter)> {
    let pair = &fps.pair;
    let orbit = &fps.orbits[orbit_index];
    let rep = &fps.points[orbit.rep];
    let data = &fps.point_data[orbit.rep];
    let sign = if orbit.s % 2 == 0 { 1 } else { -1 };
    let (coeffs, shift) = match form {
        DenomForm::Standard => (&orbit.m, &data.polar.beta_bar),
        DenomForm::Half => (&orbit.m_tilde, &data.polar.beta_half),
    };
    let mut labels = Vec::new();
    let mut numerator = FormalCharacter::zero();
    for (eta, m_eta) in coeffs.terms() {
        let label = rep.mu.add(shift).add(eta);
        let c = sign * m_eta;
        let chi = character_for_label(pair, &label, GroupSide::Subgroup)?;
        numerator = numerator.add(&chi.scale(c));
        labels.push((c, label));
    }
    Ok((labels, numerator))
}

/// The character as a sum over orbits of quotients of subgroup characters,
/// cross-checked against the raw localization sum, with its decomposition
/// into irreducible subgroup characters.
pub fn main_formula_character(fps: &FixedPointSet) -> Result<CharacterReport> {
    let pair = &fps.pair;
    let mut numerators = Vec::new();
    let mut per_orbit = Vec::new();
    for (oi, orbit) in fps.orbits.iter().enumerate() {
        let (k_label_terms, numerator) = orbit_terms(fps, oi, DenomForm::Standard)?;
        per_orbit.push(OrbitTerm {
            orbit: oi,
            representative: fps.points[orbit.rep].id.clone(),
            component: fps.points[orbit.rep].component.clone(),
            sign: if orbit.s % 2 == 0 { 1 } else { -1 },
            k_label_terms,
            numerator: numerator.clone(),
        });
        numerators.push(numerator);
    }
    let factor_sets: Vec<&[Weight]> =
        fps.orbits.iter().map(|o| o.b_plus_orbit.as_slice()).collect();
    let (character, assembled, merged) = assemble_quotient(
        pair,
        &numerators,
        &factor_sets,
        DenomForm::Standard,
        "main character quotient",
    )?;

    let loc = localization_character(fps)?;
    if character != loc {
        return Err(Error::Inconsistency(
            "main formula character differs from the localization sum".into(),
        ));
    }
    let k_decomposition = decompose_into_k(pair, &character)?;

    Ok(CharacterReport {
        character,
        numerator: assembled,
        denominator_factors: merged,
        denominator_form: DenomForm::Standard,
        k_decomposition,
        per_orbit,
    })
}

/// The half-weight variant: shifts by half-sums instead of flipped sums and
/// denominators `e^{γ/2} − e^{−γ/2}`. Produces the same character, which is
/// asserted.
pub fn lie_algebra_form(fps: &FixedPointSet) -> Result<CharacterReport> {
    let pair = &fps.pair;
    let mut numerators = Vec::new();
    let mut per_orbit = Vec::new();
    for (oi, orbit) in fps.orbits.iter().enumerate() {
        let (k_label_terms, numerator) = orbit_terms(fps, oi, DenomForm::Half)?;
        per_orbit.push(OrbitTerm {
            orbit: oi,
            representative: fps.points[orbit.rep].id.clone(),
            component: fps.points[orbit.rep].component.clone(),
            sign: if orbit.s % 2 == 0 { 1 } else { -1 },
            k_label_terms,
            numerator: numerator.clone(),
        });
        numerators.push(numerator);
    }
    let factor_sets: Vec<&[Weight]> =
        fps.orbits.iter().map(|o| o.b_plus_orbit.as_slice()).collect();
    let (character, assembled, merged) =
        assemble_quotient(pair, &numerators, &factor_sets, DenomForm::Half, "half-weight form")?;

    let main = main_formula_character(fps)?;
    if character != main.character {
        return Err(Error::Inconsistency(
            "half-weight form differs from the main formula character".into(),
        ));
    }

    Ok(CharacterReport {
        character,
        numerator: assembled,
        denominator_factors: merged,
        denominator_form: DenomForm::Half,
        k_decomposition: main.k_decomposition,
        per_orbit,
    })
}

// ---------------------------------------------------------------------------
// Equal-rank multiplet identity
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct GkrsMultiplet {
    /// Indices into the ambient Weyl group of the chamber-mapping elements.
    pub c_indices: Vec<usize>,
    /// `(ε(c), c(λ+ρ_G) − ρ_K)` per element of C.
    pub multiplet: Vec<(i64, Weight)>,
    /// The alternating sum of subgroup characters (left side).
    pub character: FormalCharacter,
}

/// The multiplet of subgroup characters whose alternating sum, divided by
/// the half-weight product over the complementary roots, gives the
/// irreducible ambient character. The identity is verified exactly.
pub fn gkrs_multiplet(pair: &SubgroupPair, lam: &Weight) -> Result<GkrsMultiplet> {
    if !pair.is_dominant(lam, GroupSide::Ambient) {
        return Err(Error::Domain(format!("{lam:?} is not dominant for the ambient group")));
    }
    let c_indices: Vec<usize> = (0..pair.weyl_g.len())
        .filter(|&i| {
            let image = pair.weyl_g[i].apply(&pair.rho_g);
            pair.is_strictly_dominant(&image, GroupSide::Subgroup)
        })
        .collect();
    if c_indices.len() * pair.weyl_k.len() != pair.weyl_g.len() {
        return Err(Error::Inconsistency(format!(
            "chamber-mapping set has size {} but |W(G)|/|W(K)| = {}",
            c_indices.len(),
            pair.weyl_g.len() / pair.weyl_k.len()
        )));
    }

    let shifted = lam.add(&pair.rho_g);
    let mut multiplet = Vec::with_capacity(c_indices.len());
    let mut lhs = FormalCharacter::zero();
    for &i in &c_indices {
        let c = &pair.weyl_g[i];
        let label = c.apply(&shifted).sub(&pair.rho_k);
        let chi = character_for_label(pair, &label, GroupSide::Subgroup)?;
        lhs = lhs.add(&chi.scale(c.sign));
        multiplet.push((c.sign, label));
    }

    let complementary: Vec<Weight> = pair
        .g
        .positive_roots
        .iter()
        .filter(|phi| !pair.is_k_root(phi))
        .cloned()
        .collect();
    let rhs = weyl_character(pair, lam, GroupSide::Ambient)?
        .mul(&product_half_diff(pair.rank(), &complementary));
    if lhs != rhs {
        return Err(Error::Inconsistency(format!(
            "multiplet identity failed at λ = {lam:?}"
        )));
    }
    Ok(GkrsMultiplet { c_indices, multiplet, character: lhs })
}

// ---------------------------------------------------------------------------
// Fixture-wide verification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct FixtureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Default)]
pub struct FixtureVerifyReport {
    pub checks: Vec<FixtureCheck>,
}

impl FixtureVerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn run<F: FnOnce() -> Result<String>>(&mut self, name: &str, f: F) {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(FixtureCheck {
            name: name.to_string(),
            passed,
            detail,
            millis: start.elapsed().as_millis(),
        });
    }
}

/// Runs every cross-check available for a fixture and reports the outcome
/// of each; never returns an error.
pub fn verify_fixture(fps: &FixedPointSet) -> FixtureVerifyReport {
    let mut report = FixtureVerifyReport::default();
    let pair = &fps.pair;

    report.run("localization-character", || {
        let chi = localization_character(fps)?;
        Ok(format!("{} terms, total coefficient {}", chi.len(), chi.total_coefficient()))
    });
    report.run("main-vs-localization", || {
        let rep = main_formula_character(fps)?;
        Ok(format!("{} orbit terms", rep.per_orbit.len()))
    });
    report.run("half-weight-form", || {
        let rep = lie_algebra_form(fps)?;
        Ok(format!("{} denominator factors", rep.denominator_factors.len()))
    });
    report.run("decomposition-roundtrip", || {
        let rep = main_formula_character(fps)?;
        let mut rebuilt = FormalCharacter::zero();
        for (lam, c) in &rep.k_decomposition {
            rebuilt = rebuilt.add(&weyl_character(pair, lam, GroupSide::Subgroup)?.scale(*c));
        }
        if rebuilt != rep.character {
            return Err(Error::Inconsistency(
                "rebuilt sum of subgroup characters differs from the character".into(),
            ));
        }
        Ok(format!("{} irreducible constituents", rep.k_decomposition.len()))
    });
    report.run("multiplicity-vs-decomposition", || {
        let rep = main_formula_character(fps)?;
        let window = multiplicity::Window::covering_character(&rep.character);
        let spectrum = multiplicity::multiplicity_spectrum(fps, &window)?;
        Ok(format!("{} nonzero multiplicities agree", spectrum.len()))
    });
    report.run("wall-set-denominator-identity", || {
        let mut n = 0usize;
        for orbit in &fps.orbits {
            if !charring::denominator_identity_check(pair, &orbit.wall_roots)? {
                return Err(Error::Inconsistency(format!(
                    "denominator identity failed on the wall set {:?}",
                    orbit.wall_roots
                )));
            }
            n += 1;
        }
        Ok(format!("{n} wall sets checked"))
    });

    if let Some(origin) = &fps.coadjoint_origin {
        report.run("weyl-character-oracle", || {
            let rep = main_formula_character(fps)?;
            let chi = weyl_character(pair, origin, GroupSide::Ambient)?;
            if rep.character != chi {
                return Err(Error::Inconsistency(
                    "coadjoint character differs from the Weyl character formula".into(),
                ));
            }
            Ok(format!("dimension {}", chi.total_coefficient()))
        });
        report.run("multiplet-identity", || {
            let m = gkrs_multiplet(pair, origin)?;
            Ok(format!("multiplet of size {}", m.multiplet.len()))
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::{coadjoint_fixed_point_set, fixture_from_json, ingest, PointInput};
    use crate::rootsys::{build_root_system, make_pair};

    fn a1_torus() -> SubgroupPair {
        make_pair(build_root_system("A1").unwrap(), &[]).unwrap()
    }

    fn su3_pair() -> SubgroupPair {
        make_pair(build_root_system("A2").unwrap(), &[Weight(vec![4, -2])]).unwrap()
    }

    #[test]
    fn a1_sphere_quantisation_pins_the_sign_convention() {
        let pair = a1_torus();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![2]), 1).unwrap();
        let chi = localization_character(&fps).unwrap();
        assert_eq!(
            chi,
            FormalCharacter::from_pairs([(Weight(vec![2]), 1), (Weight(vec![-2]), 1)])
        );
        // Opposite complex structure: the index vanishes.
        let flipped = coadjoint_fixed_point_set(&pair, &Weight(vec![2]), -1).unwrap();
        assert!(localization_character(&flipped).unwrap().is_zero());
    }

    #[test]
    fn hand_entered_sphere_with_unit_tangent_weight() {
        let pair = a1_torus();
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
        let chi = localization_character(&fps).unwrap();
        assert_eq!(
            chi,
            FormalCharacter::from_pairs([
                (Weight(vec![2]), 1),
                (Weight(vec![0]), 1),
                (Weight(vec![-2]), 1)
            ])
        );
    }

    #[test]
    fn su3_singular_orbit_character_and_labels() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let rep = main_formula_character(&fps).unwrap();
        assert_eq!(
            rep.character,
            weyl_character(&pair, &Weight(vec![0, 6]), GroupSide::Ambient).unwrap()
        );
        assert_eq!(rep.character.total_coefficient(), 10);
        // Denominator {β, γ}.
        let mut expect = vec![Weight(vec![2, 2]), Weight(vec![-2, 4])];
        expect.sort();
        assert_eq!(rep.denominator_factors, expect);
        assert_eq!(rep.k_decomposition.len(), 4);
    }

    #[test]
    fn torus_case_reduces_to_the_weyl_quotient() {
        let pair = a1_torus();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![2]), 1).unwrap();
        let rep = main_formula_character(&fps).unwrap();
        assert_eq!(
            rep.character,
            FormalCharacter::from_pairs([(Weight(vec![2]), 1), (Weight(vec![-2]), 1)])
        );
        assert_eq!(rep.per_orbit.len(), 2);
    }

    #[test]
    fn half_weight_form_agrees() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let half = lie_algebra_form(&fps).unwrap();
        let main = main_formula_character(&fps).unwrap();
        assert_eq!(half.character, main.character);
        assert_eq!(half.denominator_form, DenomForm::Half);
        // The sphere orbit's labels shift by the half-sum: w·ν − γ/2 has
        // odd coordinates, a character of the covering.
        let sphere = half
            .per_orbit
            .iter()
            .find(|t| fps.points[fps.orbits[t.orbit].rep].mu == Weight(vec![6, -6]))
            .unwrap();
        assert!(sphere
            .k_label_terms
            .iter()
            .any(|(_, w)| *w == Weight(vec![8, -7]) || *w == Weight(vec![6, -9])));
        assert!(sphere.k_label_terms.iter().all(|(_, w)| !w.is_integral()));
    }

    #[test]
    fn b2_pair_regular_orbit_passes_all_checks() {
        let rs = build_root_system("B2").unwrap();
        let long_simple = rs.simple_roots[0].clone();
        let pair = make_pair(rs, &[long_simple]).unwrap();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![2, 2]), 1).unwrap();
        assert_eq!(fps.points.len(), 8);
        assert_eq!(fps.orbits.len(), 4);
        let report = verify_fixture(&fps);
        assert!(report.all_passed(), "{:?}", report.checks);
    }

    #[test]
    fn coadjoint_characters_are_invariant_under_the_full_weyl_group() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let chi = localization_character(&fps).unwrap();
        for w in &pair.weyl_g {
            assert_eq!(chi.weyl_action(w), chi);
        }
    }

    #[test]
    fn g2_pair_multiplet() {
        let rs = build_root_system("G2").unwrap();
        let long_simple = rs.simple_roots[1].clone();
        let pair = make_pair(rs, &[long_simple]).unwrap();
        let m = gkrs_multiplet(&pair, &Weight(vec![2, 0])).unwrap();
        assert_eq!(m.multiplet.len(), 6);
    }

    #[test]
    fn torus_multiplet_degenerates_to_the_weyl_quotient() {
        // K = T: the chamber-mapping set is all of W(G) and the identity
        // becomes the Weyl character formula itself.
        let pair = make_pair(build_root_system("A2").unwrap(), &[]).unwrap();
        let m = gkrs_multiplet(&pair, &Weight(vec![2, 2])).unwrap();
        assert_eq!(m.multiplet.len(), pair.weyl_g.len());
    }

    #[test]
    fn gkrs_multiplet_for_a2_pair() {
        let pair = su3_pair();
        let m = gkrs_multiplet(&pair, &Weight(vec![0, 0])).unwrap();
        assert_eq!(m.multiplet.len(), 3);
        assert!(m
            .multiplet
            .iter()
            .any(|(sign, w)| *sign == 1 && *w == Weight(vec![0, 3])));
        let bigger = gkrs_multiplet(&pair, &Weight(vec![2, 2])).unwrap();
        assert_eq!(bigger.multiplet.len(), 3);
    }

    #[test]
    fn corrupted_fixture_fails_the_exact_division() {
        // The singular A2 orbit viewed with K = T, with the sign of one
        // tangent weight at "nu" flipped. Ingestion has nothing to object
        // to, but the localization sum is no longer a finite character.
        let json = r#"{
            "format": 1,
            "group": {"type": "A2", "k_simple_roots": []},
            "points": [
                {"id": "nu", "mu": [0, 6], "tangent_weights": [[2, 2], [2, -4]]},
                {"id": "wp", "mu": [6, -6], "tangent_weights": [[4, -2], [2, -4]]},
                {"id": "wm", "mu": [-6, 0], "tangent_weights": [[-4, 2], [-2, -2]]}
            ]
        }"#;
        let fps = fixture_from_json(json).unwrap();
        assert!(matches!(
            localization_character(&fps),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn verify_report_passes_on_good_data() {
        let pair = su3_pair();
        let fps = coadjoint_fixed_point_set(&pair, &Weight(vec![0, 6]), 1).unwrap();
        let report = verify_fixture(&fps);
        assert!(report.all_passed(), "{:?}", report.checks);
        assert!(report.checks.iter().any(|c| c.name == "multiplet-identity"));
    }
}
