//! Root systems, Weyl groups, weights and equal-rank subgroup pairs.
//!
//! Weights live in doubled coordinates: a weight `λ` is stored as the
//! integer vector `x` with `x[i] = 2⟨λ, αᵢ∨⟩`. Ordinary integral weights
//! have all coordinates even; odd coordinates represent elements of the
//! half-weight lattice (half-sums of roots, `γ/2` exponents), which the
//! rest of the engine needs exactly.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Rat = Ratio<i64>;

/// Element of the (half-)weight lattice in doubled coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// True when the weight lies in the ordinary weight lattice
    /// (all doubled coordinates even).
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|&c| c % 2 == 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: i64) -> Weight {
        Weight(self.0.iter().map(|a| a * c).collect())
    }

    /// Exact halving; the caller guarantees all coordinates are even.
    pub fn half(&self) -> Weight {
        debug_assert!(self.is_integral());
        Weight(self.0.iter().map(|a| a / 2).collect())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Integer linear functional on the doubled coordinate space.
///
/// Pairing is a plain dot product with the coordinate vector; rational
/// functionals are stored scaled to primitive integer vectors since only
/// signs and relative order of pairings ever matter.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Functional(pub Vec<i64>);

impl Functional {
    pub fn zero(rank: usize) -> Self {
        Functional(vec![0; rank])
    }

    pub fn pair(&self, w: &Weight) -> i64 {
        self.0.iter().zip(&w.0).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Combines `self + scale·other` into a single functional.
    pub fn combine(&self, other: &Functional, scale: i64) -> Functional {
        Functional(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + scale * b)
                .collect(),
        )
    }
}

fn primitive(v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| gcd(acc, x.abs()));
    if g <= 1 {
        return v;
    }
    v.into_iter().map(|x| x / g).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ---------------------------------------------------------------------------
// Cartan types
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CartanFamily {
    A,
    B,
    C,
    D,
    G,
    F,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CartanType {
    pub family: CartanFamily,
    pub rank: usize,
}

impl CartanType {
    pub fn parse(label: &str) -> Result<CartanType> {
        let label = label.trim();
        let mut chars = label.chars();
        let fam = chars.next().ok_or_else(|| Error::Config("empty Cartan type label".into()))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Config(format!("bad Cartan type label {label:?}")))?;
        let family = match fam.to_ascii_uppercase() {
            'A' => CartanFamily::A,
            'B' => CartanFamily::B,
            'C' => CartanFamily::C,
            'D' => CartanFamily::D,
            'G' => CartanFamily::G,
            'F' => CartanFamily::F,
            other => {
                return Err(Error::Config(format!("unsupported Cartan family {other:?}")));
            }
        };
        let ok = match family {
            CartanFamily::A => (1..=8).contains(&rank),
            CartanFamily::B | CartanFamily::C => (2..=8).contains(&rank),
            CartanFamily::D => (3..=8).contains(&rank),
            CartanFamily::G => rank == 2,
            CartanFamily::F => rank == 4,
        };
        if !ok {
            return Err(Error::Config(format!("rank {rank} out of range for family {fam}")));
        }
        Ok(CartanType { family, rank })
    }

    /// Number of positive roots, from the classical counts.
    pub fn positive_root_count(&self) -> usize {
        let n = self.rank;
        match self.family {
            CartanFamily::A => n * (n + 1) / 2,
            CartanFamily::B | CartanFamily::C => n * n,
            CartanFamily::D => n * (n - 1),
            CartanFamily::G => 6,
            CartanFamily::F => 24,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            CartanFamily::A => 'A',
            CartanFamily::B => 'B',
            CartanFamily::C => 'C',
            CartanFamily::D => 'D',
            CartanFamily::G => 'G',
            CartanFamily::F => 'F',
        };
        write!(f, "{fam}{}", self.rank)
    }
}

// ---------------------------------------------------------------------------
// Integer matrices acting on doubled coordinates
// ---------------------------------------------------------------------------

/// Small dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SquareMat {
    pub n: usize,
    pub a: Vec<i64>,
}

impl SquareMat {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        SquareMat { n, a }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[i * self.n + j] = v;
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        let n = self.n;
        let out = (0..n)
            .map(|i| (0..n).map(|j| self.a[i * n + j] * w.0[j]).sum())
            .collect();
        Weight(out)
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &SquareMat) -> SquareMat {
        let n = self.n;
        let mut a = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let s = self.a[i * n + k];
                if s == 0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] += s * rhs.a[k * n + j];
                }
            }
        }
        SquareMat { n, a }
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> i64 {
        let n = self.n;
        let mut m: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    m.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i * n + j] =
                        (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
                }
                m[i * n + k] = 0;
            }
            prev = m[k * n + k];
        }
        (sign * m[n * n - 1]) as i64
    }
}

/// Weyl group element: an integer matrix on doubled coordinates together
/// with its sign (the determinant, always ±1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylElement {
    pub mat: SquareMat,
    pub sign: i64,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement { mat: SquareMat::identity(n), sign: 1 }
    }

    pub fn apply(&self, w: &Weight) -> Weight {
        self.mat.apply(w)
    }

    pub fn compose(&self, rhs: &WeylElement) -> WeylElement {
        WeylElement { mat: self.mat.mul(&rhs.mat), sign: self.sign * rhs.sign }
    }

    pub fn is_identity(&self) -> bool {
        self.mat == SquareMat::identity(self.mat.n)
    }
}

// ---------------------------------------------------------------------------
// Root systems
// ---------------------------------------------------------------------------

/// A simple root system with its symmetrised invariant form.
///
/// `cartan[i][j] = ⟨α_j, α_i∨⟩`, so the simple root `α_j` has doubled
/// coordinates equal to twice the `j`-th column. The form matrix `M`
/// satisfies `(λ, μ) ∝ x_λᵀ M x_μ` on doubled coordinates.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub cartan_type: CartanType,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    /// Symmetrising factors `d_i = (αᵢ, αᵢ)/2`, short roots normalised to 1.
    pub sym: Vec<i64>,
    pub simple_roots: Vec<Weight>,
    pub positive_roots: Vec<Weight>,
    /// Rational form matrix `D·A⁻¹`.
    pub form: Vec<Vec<Rat>>,
}

fn cartan_and_sym(ct: CartanType) -> (Vec<Vec<i64>>, Vec<i64>) {
    let n = ct.rank;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let chain = |a: &mut Vec<Vec<i64>>| {
        for i in 0..n - 1 {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    };
    let sym = match ct.family {
        CartanFamily::A => {
            chain(&mut a);
            vec![1; n]
        }
        CartanFamily::B => {
            // Last simple root short; the short-root row carries the -2.
            chain(&mut a);
            a[n - 1][n - 2] = -2;
            let mut d = vec![2; n];
            d[n - 1] = 1;
            d
        }
        CartanFamily::C => {
            // Last simple root long.
            chain(&mut a);
            a[n - 2][n - 1] = -2;
            let mut d = vec![1; n];
            d[n - 1] = 2;
            d
        }
        CartanFamily::D => {
            for i in 0..n - 2 {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
            a[n - 2][n - 1] = 0;
            a[n - 1][n - 2] = 0;
            vec![1; n]
        }
        CartanFamily::G => {
            // First simple root short.
            a[0][1] = -3;
            a[1][0] = -1;
            vec![1, 3]
        }
        CartanFamily::F => {
            chain(&mut a);
            a[2][1] = -2;
            a[1][2] = -1;
            vec![2, 2, 1, 1]
        }
    };
    (a, sym)
}

fn invert_rational(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rat>> = m.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::from(1) } else { Rat::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        inv.swap(col, pivot);
        let p = aug[col][col];
        for j in 0..n {
            aug[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col];
            for j in 0..n {
                let x = aug[col][j] * f;
                aug[r][j] -= x;
                let y = inv[col][j] * f;
                inv[r][j] -= y;
            }
        }
    }
    Some(inv)
}

/// Builds the root system for a type label such as `"A2"`, `"B2"` or `"G2"`.
pub fn build_root_system(label: &str) -> Result<RootSystem> {
    let ct = CartanType::parse(label)?;
    let n = ct.rank;
    let (cartan, sym) = cartan_and_sym(ct);

    let simple_roots: Vec<Weight> = (0..n)
        .map(|j| Weight((0..n).map(|i| 2 * cartan[i][j]).collect()))
        .collect();

    // Rational inverse of the Cartan matrix, then the symmetrised form.
    let a_rat: Vec<Vec<Rat>> =
        cartan.iter().map(|row| row.iter().map(|&x| Rat::from(x)).collect()).collect();
    let a_inv = invert_rational(&a_rat)
        .ok_or_else(|| Error::Config(format!("singular Cartan matrix for {label}")))?;
    let form: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| Rat::from(sym[i]) * a_inv[i][j]).collect())
        .collect();

    let mut rs = RootSystem {
        cartan_type: ct,
        rank: n,
        cartan,
        sym,
        simple_roots,
        positive_roots: Vec::new(),
        form,
    };

    // Close the simple roots under simple reflections; a root is positive
    // exactly when its simple-root coefficients are all non-negative.
    let mut all: BTreeSet<Weight> = rs.simple_roots.iter().cloned().collect();
    loop {
        let mut fresh: Vec<Weight> = Vec::new();
        for r in &all {
            for i in 0..n {
                let img = rs.simple_reflection_apply(i, r);
                if !all.contains(&img) {
                    fresh.push(img);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        all.extend(fresh);
    }
    let mut positives: Vec<Weight> = all.into_iter().filter(|r| rs.root_is_positive(r)).collect();
    positives.sort_by_key(|w| (rs.root_coefficients(w).into_iter().sum::<Rat>(), w.0.clone()));

    if positives.len() != ct.positive_root_count() {
        return Err(Error::Config(format!(
            "root closure produced {} positive roots for {label}, expected {}",
            positives.len(),
            ct.positive_root_count()
        )));
    }
    rs.positive_roots = positives;
    Ok(rs)
}

impl RootSystem {
    /// `s_i(x)` for the `i`-th simple root, directly on doubled coordinates.
    fn simple_reflection_apply(&self, i: usize, x: &Weight) -> Weight {
        let n = self.rank;
        let xi = x.0[i];
        let mut out = x.0.clone();
        for (k, o) in out.iter_mut().enumerate().take(n) {
            *o -= xi * self.cartan[k][i];
        }
        Weight(out)
    }

    /// Coefficients of a weight in the simple-root basis.
    #[allow(clippy::needless_range_loop)]
    pub fn root_coefficients(&self, w: &Weight) -> Vec<Rat> {
        // Solve A·c = x/2 where columns of A are simple roots in
        // fundamental-weight coordinates.
        let n = self.rank;
        let mut aug: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> =
                    (0..n).map(|j| Rat::from(self.cartan[i][j])).collect();
                row.push(Rat::new(w.0[i], 2));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !aug[r][col].is_zero()).expect("invertible");
            aug.swap(col, pivot);
            let p = aug[col][col];
            for j in col..=n {
                aug[col][j] /= p;
            }
            for r in 0..n {
                if r == col || aug[r][col].is_zero() {
                    continue;
                }
                let f = aug[r][col];
                for j in col..=n {
                    let x = aug[col][j] * f;
                    aug[r][j] -= x;
                }
            }
        }
        (0..n).map(|i| aug[i][n]).collect()
    }

    fn root_is_positive(&self, w: &Weight) -> bool {
        self.root_coefficients(w).iter().all(|c| !c.is_negative())
    }

    pub fn is_root(&self, w: &Weight) -> bool {
        self.positive_roots.contains(w) || self.positive_roots.contains(&w.neg())
    }

    /// Symmetrised invariant form on doubled coordinates (up to a global
    /// positive scalar, which never matters).
    pub fn form_pair(&self, x: &Weight, y: &Weight) -> Rat {
        let n = self.rank;
        let mut acc = Rat::zero();
        for i in 0..n {
            if x.0[i] == 0 {
                continue;
            }
            let mut row = Rat::zero();
            for j in 0..n {
                if y.0[j] != 0 {
                    row += self.form[i][j] * Rat::from(y.0[j]);
                }
            }
            acc += Rat::from(x.0[i]) * row;
        }
        acc
    }

    /// `⟨λ, α∨⟩ = 2(λ,α)/(α,α)` as an exact rational.
    pub fn coroot_pairing(&self, lam: &Weight, alpha: &Weight) -> Rat {
        Rat::from(2) * self.form_pair(lam, alpha) / self.form_pair(alpha, alpha)
    }

    /// Reflection of `lam` in the hyperplane orthogonal to the root `alpha`.
    pub fn reflect(&self, alpha: &Weight, lam: &Weight) -> Result<Weight> {
        if !self.is_root(alpha) {
            return Err(Error::Domain(format!("{alpha:?} is not a root of {}", self.cartan_type)));
        }
        Ok(self.reflect_unchecked(alpha, lam))
    }

    fn reflect_unchecked(&self, alpha: &Weight, lam: &Weight) -> Weight {
        let c = self.coroot_pairing(lam, alpha);
        // c is a (half-)integer and alpha has even coordinates, so the
        // result stays integral.
        let num = *c.numer();
        let den = *c.denom();
        let scaled: Vec<i64> = alpha
            .0
            .iter()
            .map(|&a| {
                debug_assert_eq!((a * num) % den, 0);
                a * num / den
            })
            .collect();
        lam.sub(&Weight(scaled))
    }

    /// The reflection in `alpha` as an explicit Weyl element.
    pub fn reflection_element(&self, alpha: &Weight) -> Result<WeylElement> {
        if !self.is_root(alpha) {
            return Err(Error::Domain(format!("{alpha:?} is not a root of {}", self.cartan_type)));
        }
        let n = self.rank;
        let mut mat = SquareMat::identity(n);
        for j in 0..n {
            let mut e = Weight::zero(n);
            e.0[j] = 1;
            let img = self.reflect_unchecked(alpha, &e);
            for i in 0..n {
                mat.set(i, j, img.0[i]);
            }
        }
        Ok(WeylElement { mat, sign: -1 })
    }

    /// Half the sum of the positive roots; doubled coordinates all 2.
    pub fn rho(&self) -> Weight {
        Weight(vec![2; self.rank])
    }

    /// Functional `x ↦ (x, w)` scaled to a primitive integer vector.
    pub fn weight_functional(&self, w: &Weight) -> Functional {
        let n = self.rank;
        let vals: Vec<Rat> = (0..n)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..n {
                    if w.0[j] != 0 {
                        acc += self.form[i][j] * Rat::from(w.0[j]);
                    }
                }
                acc
            })
            .collect();
        let lcm = vals.iter().fold(1i64, |acc, r| {
            let d = *r.denom();
            acc / gcd(acc, d) * d
        });
        Functional(primitive(vals.iter().map(|r| (*r * Rat::from(lcm)).to_integer()).collect()))
    }
}

/// Enumerates the full Weyl group by closing the simple reflections under
/// composition. Signs come along for free: multiplying by a reflection
/// flips the determinant.
pub fn weyl_group(rs: &RootSystem) -> Vec<WeylElement> {
    let n = rs.rank;
    let gens: Vec<WeylElement> = (0..rs.simple_roots.len())
        .map(|i| rs.reflection_element(&rs.simple_roots[i]).expect("simple root"))
        .collect();
    close_under_generators(n, &gens)
}

/// Closure of a set of reflections (or any elements with tracked signs)
/// under composition, starting from the identity.
pub fn close_under_generators(rank: usize, gens: &[WeylElement]) -> Vec<WeylElement> {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut out: Vec<WeylElement> = Vec::new();
    let mut queue: Vec<WeylElement> = vec![WeylElement::identity(rank)];
    while let Some(next) = queue.pop() {
        if !seen.insert(next.mat.a.clone()) {
            continue;
        }
        for g in gens {
            queue.push(g.compose(&next));
        }
        out.push(next);
    }
    // Deterministic order: identity first, then by matrix entries.
    out.sort_by(|a, b| {
        (a.is_identity(), &a.mat.a).cmp(&(b.is_identity(), &b.mat.a)).reverse()
    });
    debug_assert!(out[0].is_identity());
    out
}

// ---------------------------------------------------------------------------
// Equal-rank subgroup pairs
// ---------------------------------------------------------------------------

/// Which group of the pair an operation refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GroupSide {
    Ambient,
    Subgroup,
}

/// An equal-rank pair `K ⊂ G` described by a root subsystem, together with
/// the polarisation functional `ξ` vanishing on the roots of `K`.
#[derive(Clone, Debug)]
pub struct SubgroupPair {
    pub g: RootSystem,
    pub k_positive_roots: Vec<Weight>,
    /// A simple system for the subsystem (irredundant generators).
    pub k_simple_roots: Vec<Weight>,
    pub weyl_g: Vec<WeylElement>,
    pub weyl_k: Vec<WeylElement>,
    pub rho_g: Weight,
    pub rho_k: Weight,
    pub xi: Functional,
}

/// Classification of a weight against the closed dominant chamber.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Chamber {
    Interior,
    /// On the boundary; carries the full wall set
    /// `{α ∈ Φ⁺ : ⟨λ, α∨⟩ = 0}`.
    Boundary(Vec<Weight>),
    Outside,
}

/// Builds the pair generated by the given roots of `G`. The subsystem is
/// closed under its own reflections; positivity is inherited from `Φ⁺(G)`.
pub fn make_pair(rs: RootSystem, k_simple_roots: &[Weight]) -> Result<SubgroupPair> {
    for r in k_simple_roots {
        if r.rank() != rs.rank {
            return Err(Error::Domain(format!(
                "root {r:?} has rank {} but {} has rank {}",
                r.rank(),
                rs.cartan_type,
                rs.rank
            )));
        }
        if !rs.is_root(r) {
            let hint = if !r.is_integral() {
                " (doubled coordinates expected: every root has even coordinates)"
            } else {
                ""
            };
            return Err(Error::Domain(format!(
                "{r:?} is not a root of {}{hint}",
                rs.cartan_type
            )));
        }
    }

    // Close under reflections by members.
    let mut system: BTreeSet<Weight> = BTreeSet::new();
    for r in k_simple_roots {
        system.insert(r.clone());
        system.insert(r.neg());
    }
    loop {
        let mut fresh = Vec::new();
        for a in &system {
            for b in &system {
                let img = rs.reflect_unchecked(a, b);
                if !system.contains(&img) {
                    fresh.push(img);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        system.extend(fresh);
    }

    let mut k_positive_roots: Vec<Weight> = rs
        .positive_roots
        .iter()
        .filter(|r| system.contains(*r))
        .cloned()
        .collect();
    k_positive_roots
        .sort_by_key(|w| (rs.root_coefficients(w).into_iter().sum::<Rat>(), w.0.clone()));

    // Simple system: positive roots not expressible as a sum of two others.
    let pos_set: BTreeSet<&Weight> = k_positive_roots.iter().collect();
    let k_simple: Vec<Weight> = k_positive_roots
        .iter()
        .filter(|r| {
            !k_positive_roots
                .iter()
                .any(|a| pos_set.contains(&r.sub(a)) && a != *r)
        })
        .cloned()
        .collect();

    let weyl_g = weyl_group(&rs);
    let gens: Vec<WeylElement> = k_simple
        .iter()
        .map(|r| rs.reflection_element(r).expect("subsystem root"))
        .collect();
    let weyl_k = if gens.is_empty() {
        vec![WeylElement::identity(rs.rank)]
    } else {
        close_under_generators(rs.rank, &gens)
    };
    if !weyl_g.len().is_multiple_of(weyl_k.len()) {
        return Err(Error::Config(format!(
            "subgroup Weyl order {} does not divide {}",
            weyl_k.len(),
            weyl_g.len()
        )));
    }

    let rho_g = rs.rho();
    let rho_k = k_positive_roots
        .iter()
        .fold(Weight::zero(rs.rank), |acc, r| acc.add(r))
        .half();

    let xi = select_xi(&rs, &k_positive_roots, &[], 0)?;
    Ok(SubgroupPair {
        g: rs,
        k_positive_roots,
        k_simple_roots: k_simple,
        weyl_g,
        weyl_k,
        rho_g,
        rho_k,
        xi,
    })
}

/// Picks the polarisation functional: the orthogonal projection of `ρ_G`
/// onto the annihilator of `Φ(K)`, perturbed deterministically when it
/// fails to separate the given weights. `attempt` 0 is the unperturbed
/// projection.
pub fn select_xi(
    rs: &RootSystem,
    k_positive_roots: &[Weight],
    must_separate: &[Weight],
    attempt: u64,
) -> Result<Functional> {
    let separated = |xi: &Functional| {
        must_separate.iter().all(|w| {
            let is_k_root =
                k_positive_roots.contains(w) || k_positive_roots.contains(&w.neg());
            is_k_root || xi.pair(w) != 0
        })
    };

    for state in attempt..attempt + 64 {
        let target = if state == 0 {
            rs.rho()
        } else {
            // Small pseudo-random non-negative bumps of the fundamental
            // weight coefficients, fixed seed for reproducibility.
            let mut t = rs.rho();
            let mut s = splitmix(state.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            for c in t.0.iter_mut() {
                s = splitmix(s);
                *c += 2 * ((s >> 32) % 4) as i64;
            }
            t
        };
        let xi = project_to_annihilator(rs, k_positive_roots, &target);
        let orthogonal = k_positive_roots.iter().all(|a| xi.pair(a) == 0);
        debug_assert!(orthogonal);
        if orthogonal && separated(&xi) {
            return Ok(xi);
        }
    }
    Err(Error::DegeneratePair(
        "no polarisation functional separates the tangent weights from the subsystem".into(),
    ))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Functional of the projection of `target` onto the orthogonal complement
/// of the span of the subsystem, under the invariant form.
#[allow(clippy::needless_range_loop)]
fn project_to_annihilator(
    rs: &RootSystem,
    k_positive_roots: &[Weight],
    target: &Weight,
) -> Functional {
    // Independent basis of the span by rational Gaussian elimination.
    let mut basis: Vec<Weight> = Vec::new();
    let mut echelon: Vec<Vec<Rat>> = Vec::new();
    for r in k_positive_roots {
        let mut v: Vec<Rat> = r.0.iter().map(|&x| Rat::from(x)).collect();
        for row in &echelon {
            let lead = row.iter().position(|c| !c.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = v[lead] / row[lead];
                for (vi, ri) in v.iter_mut().zip(row) {
                    let x = *ri * f;
                    *vi -= x;
                }
            }
        }
        if v.iter().any(|c| !c.is_zero()) {
            echelon.push(v);
            basis.push(r.clone());
        }
    }

    if basis.is_empty() {
        return rs.weight_functional(target);
    }

    // Solve the Gram system for the projection coefficients.
    let m = basis.len();
    let mut aug: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row: Vec<Rat> =
                (0..m).map(|j| rs.form_pair(&basis[i], &basis[j])).collect();
            row.push(rs.form_pair(&basis[i], target));
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !aug[r][col].is_zero()).expect("Gram invertible");
        aug.swap(col, pivot);
        let p = aug[col][col];
        for j in col..=m {
            aug[col][j] /= p;
        }
        for r in 0..m {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col];
            for j in col..=m {
                let x = aug[col][j] * f;
                aug[r][j] -= x;
            }
        }
    }

    // ξ* = target − Σ cᵢ bᵢ in weight coordinates, as exact rationals.
    let n = rs.rank;
    let mut xi_star: Vec<Rat> = target.0.iter().map(|&x| Rat::from(x)).collect();
    for (i, b) in basis.iter().enumerate() {
        let c = aug[i][m];
        for (xs, &bb) in xi_star.iter_mut().zip(&b.0) {
            let x = c * Rat::from(bb);
            *xs -= x;
        }
    }

    // Pair through the form to get the functional, clear denominators.
    let vals: Vec<Rat> = (0..n)
        .map(|i| {
            rs.form[i]
                .iter()
                .zip(&xi_star)
                .map(|(f, x)| *f * *x)
                .sum()
        })
        .collect();
    let lcm = vals.iter().fold(1i64, |acc, r| {
        let d = *r.denom();
        acc / gcd(acc, d) * d
    });
    Functional(primitive(vals.iter().map(|r| (*r * Rat::from(lcm)).to_integer()).collect()))
}

impl SubgroupPair {
    pub fn rank(&self) -> usize {
        self.g.rank
    }

    pub fn positive_roots(&self, side: GroupSide) -> &[Weight] {
        match side {
            GroupSide::Ambient => &self.g.positive_roots,
            GroupSide::Subgroup => &self.k_positive_roots,
        }
    }

    pub fn simple_roots(&self, side: GroupSide) -> &[Weight] {
        match side {
            GroupSide::Ambient => &self.g.simple_roots,
            GroupSide::Subgroup => &self.k_simple_roots,
        }
    }

    pub fn rho(&self, side: GroupSide) -> &Weight {
        match side {
            GroupSide::Ambient => &self.rho_g,
            GroupSide::Subgroup => &self.rho_k,
        }
    }

    pub fn weyl(&self, side: GroupSide) -> &[WeylElement] {
        match side {
            GroupSide::Ambient => &self.weyl_g,
            GroupSide::Subgroup => &self.weyl_k,
        }
    }

    pub fn is_k_root(&self, w: &Weight) -> bool {
        self.k_positive_roots.contains(w) || self.k_positive_roots.contains(&w.neg())
    }

    /// Positive representative of a subsystem root.
    pub fn k_positive_representative(&self, w: &Weight) -> Option<&Weight> {
        self.k_positive_roots
            .iter()
            .find(|r| *r == w || **r == w.neg())
    }

    /// Classifies `lam` against the closed dominant chamber of the chosen
    /// group. Boundary carries the complete wall set over positive roots.
    pub fn chamber(&self, lam: &Weight, side: GroupSide) -> Chamber {
        let mut walls = Vec::new();
        for alpha in self.positive_roots(side) {
            let p = self.g.coroot_pairing(lam, alpha);
            if p.is_negative() {
                return Chamber::Outside;
            }
            if p.is_zero() {
                walls.push(alpha.clone());
            }
        }
        if walls.is_empty() {
            Chamber::Interior
        } else {
            Chamber::Boundary(walls)
        }
    }

    pub fn is_dominant(&self, lam: &Weight, side: GroupSide) -> bool {
        !matches!(self.chamber(lam, side), Chamber::Outside)
    }

    pub fn is_strictly_dominant(&self, lam: &Weight, side: GroupSide) -> bool {
        matches!(self.chamber(lam, side), Chamber::Interior)
    }

    /// Wall set `{α ∈ Φ⁺(side) : ⟨λ, α∨⟩ = 0}`.
    pub fn wall_set(&self, lam: &Weight, side: GroupSide) -> Vec<Weight> {
        self.positive_roots(side)
            .iter()
            .filter(|a| self.g.coroot_pairing(lam, a).is_zero())
            .cloned()
            .collect()
    }

    /// Dominant representative of the orbit of `x` under the chosen Weyl
    /// group, found by descending simple reflections.
    pub fn dominant_representative(&self, x: &Weight, side: GroupSide) -> Weight {
        let mut cur = x.clone();
        'outer: loop {
            for s in self.simple_roots(side) {
                if self.g.coroot_pairing(&cur, s).is_negative() {
                    cur = self.g.reflect_unchecked(s, &cur);
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// For regular `x`: the strictly dominant conjugate together with the
    /// sign of the conjugating element. Returns `None` when `x` lies on a
    /// wall of the chosen group.
    pub fn regular_dominant_conjugate(
        &self,
        x: &Weight,
        side: GroupSide,
    ) -> Option<(Weight, i64)> {
        let mut cur = x.clone();
        let mut sign = 1i64;
        'outer: loop {
            for s in self.simple_roots(side) {
                let p = self.g.coroot_pairing(&cur, s);
                if p.is_negative() {
                    cur = self.g.reflect_unchecked(s, &cur);
                    sign = -sign;
                    continue 'outer;
                }
            }
            break;
        }
        if self
            .positive_roots(side)
            .iter()
            .any(|a| self.g.coroot_pairing(&cur, a).is_zero())
        {
            return None;
        }
        Some((cur, sign))
    }

    /// Replaces the polarisation functional, re-running selection against
    /// the given tangent weights.
    pub fn with_xi_separating(&self, must_separate: &[Weight]) -> Result<SubgroupPair> {
        let mut pair = self.clone();
        if must_separate
            .iter()
            .all(|w| pair.is_k_root(w) || pair.xi.pair(w) != 0)
        {
            return Ok(pair);
        }
        pair.xi = select_xi(&self.g, &self.k_positive_roots, must_separate, 1)?;
        Ok(pair)
    }
}

/// Orbit of a weight under a list of Weyl elements, as a map from the image
/// weight to the index of one element producing it.
pub fn weyl_orbit(elements: &[WeylElement], x: &Weight) -> HashMap<Weight, usize> {
    let mut out: HashMap<Weight, usize> = HashMap::new();
    for (i, w) in elements.iter().enumerate() {
        out.entry(w.apply(x)).or_insert(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> RootSystem {
        build_root_system("A2").unwrap()
    }

    #[test]
    fn a1_has_one_positive_root_and_weyl_order_two() {
        let rs = build_root_system("A1").unwrap();
        assert_eq!(rs.positive_roots, vec![Weight(vec![4])]);
        let w = weyl_group(&rs);
        assert_eq!(w.len(), 2);
        let refl = w.iter().find(|e| !e.is_identity()).unwrap();
        assert_eq!(refl.sign, -1);
        assert_eq!(refl.mat.det(), -1);
    }

    #[test]
    fn a2_roots_and_weyl_group() {
        let rs = a2();
        assert_eq!(rs.positive_roots.len(), 3);
        assert!(rs.positive_roots.contains(&Weight(vec![4, -2])));
        assert!(rs.positive_roots.contains(&Weight(vec![-2, 4])));
        assert!(rs.positive_roots.contains(&Weight(vec![2, 2])));
        let w = weyl_group(&rs);
        assert_eq!(w.len(), 6);
        assert_eq!(w.iter().filter(|e| e.sign == 1).count(), 3);
        for e in &w {
            assert_eq!(e.sign, e.mat.det());
        }
    }

    #[test]
    fn b2_weyl_group_has_eight_elements() {
        let rs = build_root_system("B2").unwrap();
        assert_eq!(rs.positive_roots.len(), 4);
        assert_eq!(weyl_group(&rs).len(), 8);
    }

    #[test]
    fn g2_enumeration() {
        let rs = build_root_system("G2").unwrap();
        assert_eq!(rs.positive_roots.len(), 6);
        assert_eq!(weyl_group(&rs).len(), 12);
    }

    #[test]
    fn bigger_types_match_classical_counts() {
        for (label, roots, weyl) in [
            ("A3", 6, 24),
            ("B3", 9, 48),
            ("C3", 9, 48),
            ("D4", 12, 192),
            ("F4", 24, 1152),
        ] {
            let rs = build_root_system(label).unwrap();
            assert_eq!(rs.positive_roots.len(), roots, "{label}");
            assert_eq!(weyl_group(&rs).len(), weyl, "{label}");
        }
    }

    #[test]
    fn unknown_label_is_a_configuration_error() {
        assert!(matches!(build_root_system("E6"), Err(Error::Config(_))));
        assert!(matches!(build_root_system("Zork"), Err(Error::Config(_))));
        assert!(matches!(build_root_system("A9"), Err(Error::Config(_))));
    }

    #[test]
    fn reflections_on_the_a2_wall() {
        let rs = a2();
        let alpha = Weight(vec![4, -2]);
        let gamma = Weight(vec![-2, 4]);
        let nu = Weight(vec![0, 6]);
        assert_eq!(rs.reflect(&alpha, &nu).unwrap(), nu);
        assert_eq!(rs.reflect(&gamma, &nu).unwrap(), Weight(vec![6, -6]));
        // Involution.
        let x = Weight(vec![2, 8]);
        assert_eq!(
            rs.reflect(&alpha, &rs.reflect(&alpha, &x).unwrap()).unwrap(),
            x
        );
        // Non-root input is rejected.
        assert!(rs.reflect(&Weight(vec![2, 0]), &x).is_err());
    }

    #[test]
    fn a2_pair_fields() {
        let rs = a2();
        let pair = make_pair(rs, &[Weight(vec![4, -2])]).unwrap();
        assert_eq!(pair.k_positive_roots, vec![Weight(vec![4, -2])]);
        assert_eq!(pair.weyl_k.len(), 2);
        assert_eq!(pair.rho_k, Weight(vec![2, -1]));
        assert_eq!(pair.rho_g, Weight(vec![2, 2]));
        // ξ kills the subsystem and is positive on the other positive roots.
        assert_eq!(pair.xi.pair(&Weight(vec![4, -2])), 0);
        assert!(pair.xi.pair(&Weight(vec![-2, 4])) > 0);
        assert!(pair.xi.pair(&Weight(vec![2, 2])) > 0);
    }

    #[test]
    fn torus_pair() {
        let pair = make_pair(a2(), &[]).unwrap();
        assert!(pair.k_positive_roots.is_empty());
        assert_eq!(pair.weyl_k.len(), 1);
        assert_eq!(pair.rho_k, Weight(vec![0, 0]));
        // ξ = functional of ρ is strictly positive on all positive roots.
        for r in &pair.g.positive_roots {
            assert!(pair.xi.pair(r) > 0);
        }
    }

    #[test]
    fn b2_long_root_pair() {
        let rs = build_root_system("B2").unwrap();
        let long_simple = rs.simple_roots[0].clone();
        assert_eq!(long_simple, Weight(vec![4, -4]));
        let pair = make_pair(rs, &[long_simple]).unwrap();
        assert_eq!(pair.weyl_k.len(), 2);
        assert_eq!(pair.k_positive_roots.len(), 1);
    }

    #[test]
    fn pair_rejects_non_roots() {
        // Odd coordinates cannot be a root; the message hints at doubling.
        let err = make_pair(a2(), &[Weight(vec![2, -1])]).unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.contains("doubled")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn chamber_classification() {
        let pair = make_pair(a2(), &[Weight(vec![4, -2])]).unwrap();
        match pair.chamber(&Weight(vec![0, 6]), GroupSide::Subgroup) {
            Chamber::Boundary(walls) => assert_eq!(walls, vec![Weight(vec![4, -2])]),
            other => panic!("expected boundary, got {other:?}"),
        }
        assert_eq!(
            pair.chamber(&Weight(vec![6, -6]), GroupSide::Subgroup),
            Chamber::Interior
        );
        match pair.chamber(&Weight::zero(2), GroupSide::Ambient) {
            Chamber::Boundary(walls) => assert_eq!(walls.len(), 3),
            other => panic!("expected all-wall boundary, got {other:?}"),
        }
        assert_eq!(
            pair.chamber(&Weight(vec![-2, 0]), GroupSide::Ambient),
            Chamber::Outside
        );
    }

    #[test]
    fn weyl_permutes_roots_and_signs_multiply() {
        for label in ["A2", "B2", "G2"] {
            let rs = build_root_system(label).unwrap();
            let w = weyl_group(&rs);
            let all_roots: BTreeSet<Weight> = rs
                .positive_roots
                .iter()
                .flat_map(|r| [r.clone(), r.neg()])
                .collect();
            for e in &w {
                let image: BTreeSet<Weight> =
                    all_roots.iter().map(|r| e.apply(r)).collect();
                assert_eq!(image, all_roots, "{label}");
            }
            for x in &w {
                for y in &w {
                    let z = x.compose(y);
                    assert_eq!(z.sign, x.sign * y.sign);
                    assert_eq!(z.sign, z.mat.det());
                }
            }
        }
    }

    #[test]
    fn orbit_stabilizer_sizes() {
        let rs = a2();
        let w = weyl_group(&rs);
        for lam in [Weight(vec![0, 6]), Weight(vec![2, 2]), Weight::zero(2)] {
            let orbit = weyl_orbit(&w, &lam);
            let stab = w.iter().filter(|e| e.apply(&lam) == lam).count();
            assert_eq!(orbit.len() * stab, w.len());
        }
    }

    #[test]
    fn xi_is_weyl_k_invariant() {
        let pair = make_pair(a2(), &[Weight(vec![4, -2])]).unwrap();
        let lam = Weight(vec![2, 8]);
        for w in &pair.weyl_k {
            assert_eq!(pair.xi.pair(&w.apply(&lam)), pair.xi.pair(&lam));
        }
    }
}
