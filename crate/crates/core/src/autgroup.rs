//! `LatAut(G)` two ways.
//!
//! The constructive side relabels admissible triples along a
//! class-preserving slot permutation `σ`, mapping chain positions with the
//! chain isomorphisms. The brute-force side is a backtracking search over
//! the abstract lattice that only ever looks at the covering relation and
//! invariants derived from it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::gf2::Subspace;
use crate::group_spec::{chain_iso, factorial, ChainPosition, SlotClass, TowerGroupSpec};
use crate::lattice::{AdmissibleTriple, Lattice, LatticeError};
use crate::poset::AbstractLattice;

/// Default bound on lattice size for the brute-force search.
pub const DEFAULT_MAX_LATTICE: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("lattice has {elements} elements, above the search bound {max}")]
    TooLarge { elements: usize, max: usize },
    #[error("slot permutation does not preserve the A/B classes at slot {0}")]
    ClassViolation(usize),
    #[error("not a permutation of {0} points")]
    NotAPermutation(usize),
    #[error("factor structure mismatch: {0}")]
    FactorMismatch(String),
}

/// A permutation of slot indices; `mapping[s]` is the image of slot `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotPermutation {
    mapping: Vec<usize>,
}

impl SlotPermutation {
    /// Validates bijectivity and that classes are preserved.
    pub fn new(spec: &TowerGroupSpec, mapping: Vec<usize>) -> Result<Self, AutError> {
        let t = spec.slot_count();
        check_permutation(&mapping, t)?;
        let slots = spec.slots();
        if let Some(s) = (0..t).find(|&s| slots[s].class != slots[mapping[s]].class) {
            return Err(AutError::ClassViolation(s));
        }
        Ok(SlotPermutation { mapping })
    }

    pub fn identity(t: usize) -> Self {
        SlotPermutation {
            mapping: (0..t).collect(),
        }
    }

    pub fn transposition(spec: &TowerGroupSpec, a: usize, b: usize) -> Result<Self, AutError> {
        let mut mapping: Vec<usize> = (0..spec.slot_count()).collect();
        if a >= mapping.len() || b >= mapping.len() {
            return Err(AutError::NotAPermutation(mapping.len()));
        }
        mapping.swap(a, b);
        Self::new(spec, mapping)
    }

    /// Every element of `Sym(A) × Sym(B)`, in a fixed order.
    pub fn all(spec: &TowerGroupSpec) -> Vec<Self> {
        let t = spec.slot_count();
        let a: Vec<usize> = class_slots(spec, SlotClass::A);
        let b: Vec<usize> = class_slots(spec, SlotClass::B);
        let perms_a: Vec<Vec<usize>> = a.iter().copied().permutations(a.len()).collect();
        let perms_b: Vec<Vec<usize>> = b.iter().copied().permutations(b.len()).collect();
        let mut out = Vec::with_capacity(perms_a.len() * perms_b.len());
        for pa in &perms_a {
            for pb in &perms_b {
                let mut mapping = vec![0; t];
                for (&src, &dst) in a.iter().zip(pa) {
                    mapping[src] = dst;
                }
                for (&src, &dst) in b.iter().zip(pb) {
                    mapping[src] = dst;
                }
                out.push(SlotPermutation { mapping });
            }
        }
        out
    }

    /// Adjacent transpositions within each class.
    pub fn generators(spec: &TowerGroupSpec) -> Vec<Self> {
        [SlotClass::A, SlotClass::B]
            .into_iter()
            .flat_map(|c| {
                class_slots(spec, c)
                    .windows(2)
                    .map(|w| Self::transposition(spec, w[0], w[1]).expect("same class"))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn apply(&self, slot: usize) -> usize {
        self.mapping[slot]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SlotPermutation) -> SlotPermutation {
        SlotPermutation {
            mapping: other.mapping.iter().map(|&s| self.mapping[s]).collect(),
        }
    }

    pub fn inverse(&self) -> SlotPermutation {
        SlotPermutation {
            mapping: invert(&self.mapping),
        }
    }
}

impl fmt::Display for SlotPermutation {
    /// Cycle notation on slot indices, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = cycles(&self.mapping);
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            write!(f, "({})", c.iter().join(" "))?;
        }
        Ok(())
    }
}

fn class_slots(spec: &TowerGroupSpec, class: SlotClass) -> Vec<usize> {
    spec.slots()
        .iter()
        .filter(|s| s.class == class)
        .map(|s| s.index)
        .collect()
}

fn check_permutation(mapping: &[usize], n: usize) -> Result<(), AutError> {
    let mut seen = vec![false; n];
    if mapping.len() != n {
        return Err(AutError::NotAPermutation(n));
    }
    for &j in mapping {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(AutError::NotAPermutation(n));
        }
    }
    Ok(())
}

fn invert(mapping: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; mapping.len()];
    for (i, &j) in mapping.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Non-trivial cycles, each starting at its smallest point.
fn cycles(mapping: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; mapping.len()];
    let mut out = Vec::new();
    for start in 0..mapping.len() {
        if seen[start] || mapping[start] == start {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = mapping[start];
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = mapping[x];
        }
        out.push(cycle);
    }
    out
}

/// A bijection on element indices that preserves order both ways.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeAutomorphism {
    mapping: Vec<usize>,
}

impl LatticeAutomorphism {
    /// Checks bijectivity and order preservation against `lattice`.
    pub fn new(lattice: &AbstractLattice, mapping: Vec<usize>) -> Result<Self, AutError> {
        check_permutation(&mapping, lattice.len())?;
        let phi = LatticeAutomorphism { mapping };
        if !phi.preserves_order(lattice) {
            return Err(AutError::FactorMismatch(
                "mapping does not preserve order".into(),
            ));
        }
        Ok(phi)
    }

    pub fn identity(n: usize) -> Self {
        LatticeAutomorphism {
            mapping: (0..n).collect(),
        }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeAutomorphism) -> LatticeAutomorphism {
        LatticeAutomorphism {
            mapping: other.mapping.iter().map(|&s| self.mapping[s]).collect(),
        }
    }

    pub fn inverse(&self) -> LatticeAutomorphism {
        LatticeAutomorphism {
            mapping: invert(&self.mapping),
        }
    }

    /// Order as a group element: lcm of the cycle lengths.
    pub fn order(&self) -> usize {
        cycles(&self.mapping).iter().map(Vec::len).fold(1, lcm)
    }

    pub fn preserves_order(&self, lattice: &AbstractLattice) -> bool {
        let n = lattice.len();
        (0..n).all(|i| {
            (0..n).all(|j| lattice.leq(i, j) == lattice.leq(self.mapping[i], self.mapping[j]))
        })
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// All `N` admitting some `C` with `N ∧ C = 0` and `N ∨ C = 1`.
pub fn complemented_elements(lattice: &AbstractLattice) -> Vec<usize> {
    let n = lattice.len();
    (0..n)
        .filter(|&a| (0..n).any(|b| lattice.are_complements(a, b)))
        .collect()
}

/// Minimal non-bottom complemented elements: in `N(G)` of a tower group
/// these are exactly the single factors.
pub fn factor_atoms(lattice: &AbstractLattice) -> Vec<usize> {
    let bottom = lattice.bottom();
    let complemented: Vec<usize> = complemented_elements(lattice)
        .into_iter()
        .filter(|&c| c != bottom)
        .collect();
    complemented
        .iter()
        .copied()
        .filter(|&c| !complemented.iter().any(|&d| d != c && lattice.leq(d, c)))
        .collect()
}

/// `τ_σ(J, P, H) = (σ(J), ψ∘P∘σ⁻¹, H relabelled)`.
pub fn tau_sigma(
    spec: &TowerGroupSpec,
    sigma: &SlotPermutation,
    triple: &AdmissibleTriple,
) -> Result<AdmissibleTriple, AutError> {
    let t = spec.slot_count();
    if sigma.mapping.len() != t || triple.slot_count() != t {
        return Err(AutError::NotAPermutation(t));
    }
    let slots = spec.slots();
    if let Some(s) = (0..t).find(|&s| slots[s].class != slots[sigma.apply(s)].class) {
        return Err(AutError::ClassViolation(s));
    }
    let mut image_coupled: Vec<usize> = triple.coupled().iter().map(|&s| sigma.apply(s)).collect();
    image_coupled.sort_unstable();

    let mut positions = BTreeMap::new();
    for (s, p) in triple.positions() {
        let target = sigma.apply(s);
        let iso = chain_iso(slots[s].degree, slots[target].degree)
            .map_err(|_| AutError::ClassViolation(s))?;
        positions.insert(target, iso.apply(p));
    }

    // Old coordinate i (slot J[i]) moves to the position of σ(J[i]) in σ(J).
    let new_coord: Vec<usize> = triple
        .coupled()
        .iter()
        .map(|&s| {
            image_coupled
                .binary_search(&sigma.apply(s))
                .expect("image of J")
        })
        .collect();
    let rows = triple
        .signs()
        .raw_basis()
        .iter()
        .map(|&h| crate::gf2::scatter_bits(h, &new_coord))
        .collect::<Vec<_>>();
    let signs = Subspace::from_raw(image_coupled.len(), rows).map_err(LatticeError::from)?;
    Ok(AdmissibleTriple::new(
        spec,
        &image_coupled,
        &positions,
        signs,
    )?)
}

/// `τ_σ` as a map on element indices of an enumerated lattice.
pub fn tau_sigma_on_lattice(
    lattice: &Lattice,
    sigma: &SlotPermutation,
) -> Result<LatticeAutomorphism, AutError> {
    let mapping = lattice
        .elements()
        .iter()
        .map(|e| {
            let image = tau_sigma(lattice.spec(), sigma, &e.triple)?;
            lattice
                .find(&image)
                .ok_or_else(|| AutError::FactorMismatch("image triple not enumerated".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_permutation(&mapping, lattice.len())?;
    Ok(LatticeAutomorphism { mapping })
}

/// The slot that a single-factor sub-product occupies.
fn factor_slot(lattice: &Lattice, element: usize) -> Option<usize> {
    let t = &lattice.elements()[element].triple;
    if !t.coupled().is_empty() {
        return None;
    }
    let full: Vec<usize> = (0..t.slot_count())
        .filter(|&s| t.position(s) == Some(ChainPosition::Full))
        .collect();
    let rest_trivial = (0..t.slot_count())
        .all(|s| full.contains(&s) || t.position(s) == Some(ChainPosition::Triv));
    (full.len() == 1 && rest_trivial).then(|| full[0])
}

/// Factor atoms of `lattice` listed by slot: `result[s]` is the element
/// `S_k^{(k,i)}` of slot `s`.
pub fn factor_atoms_by_slot(
    lattice: &Lattice,
    abstract_lattice: &AbstractLattice,
) -> Result<Vec<usize>, AutError> {
    let t = lattice.spec().slot_count();
    let atoms = factor_atoms(abstract_lattice);
    if atoms.len() != t {
        return Err(AutError::FactorMismatch(format!(
            "found {} factor atoms for {t} slots",
            atoms.len()
        )));
    }
    let mut by_slot = vec![usize::MAX; t];
    for a in atoms {
        let s = factor_slot(lattice, a).ok_or_else(|| {
            AutError::FactorMismatch(format!("element {a} is not a single factor"))
        })?;
        by_slot[s] = a;
    }
    Ok(by_slot)
}

/// `π_φ`: the permutation that `φ` induces on the factors.
pub fn induced_permutation(
    phi: &LatticeAutomorphism,
    lattice: &Lattice,
    atoms_by_slot: &[usize],
) -> Result<SlotPermutation, AutError> {
    let slot_of: HashMap<usize, usize> = atoms_by_slot
        .iter()
        .enumerate()
        .map(|(s, &a)| (a, s))
        .collect();
    let mapping = atoms_by_slot
        .iter()
        .map(|&a| {
            slot_of
                .get(&phi.apply(a))
                .copied()
                .ok_or_else(|| AutError::FactorMismatch("factor not sent to a factor".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SlotPermutation::new(lattice.spec(), mapping)
}

/// Colour refinement on the covering digraph, starting from height, depth,
/// cover degrees and up/down-set sizes. Returns a colour per element.
fn refine_colors(lattice: &AbstractLattice) -> Vec<usize> {
    let n = lattice.len();
    let initial: Vec<(usize, usize, usize, usize, usize, usize)> = (0..n)
        .map(|i| {
            (
                lattice.height(i),
                lattice.depth(i),
                lattice.upper_covers(i).len(),
                lattice.lower_covers(i).len(),
                lattice.down_set(i).count_ones(..),
                lattice.up_set(i).count_ones(..),
            )
        })
        .collect();
    let mut colors = densify(&initial);
    let mut classes = colors.iter().collect::<BTreeSet<_>>().len();
    loop {
        let keys: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
            .map(|i| {
                let mut ups: Vec<usize> =
                    lattice.upper_covers(i).iter().map(|&j| colors[j]).collect();
                let mut downs: Vec<usize> =
                    lattice.lower_covers(i).iter().map(|&j| colors[j]).collect();
                ups.sort_unstable();
                downs.sort_unstable();
                (colors[i], ups, downs)
            })
            .collect();
        let next = densify(&keys);
        let next_classes = next.iter().collect::<BTreeSet<_>>().len();
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

fn densify<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let sorted: BTreeSet<&K> = keys.iter().collect();
    let ids: BTreeMap<&K, usize> = sorted
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    keys.iter().map(|k| ids[k]).collect()
}

/// Every automorphism of the abstract lattice, sorted by mapping.
///
/// Uses only the covering relation: elements are coloured by refinement,
/// then placed one at a time, each next element chosen adjacent to an
/// already placed one (smallest colour class first) so that its image is
/// confined to the covers of an already fixed image.
pub fn brute_force_automorphisms(
    lattice: &AbstractLattice,
    max_elements: usize,
) -> Result<Vec<LatticeAutomorphism>, AutError> {
    let n = lattice.len();
    if n > max_elements {
        return Err(AutError::TooLarge {
            elements: n,
            max: max_elements,
        });
    }
    let colors = refine_colors(lattice);
    let mut class_size = vec![0usize; n];
    for &c in &colors {
        class_size[c] += 1;
    }
    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &c) in colors.iter().enumerate() {
        by_color[c].push(i);
    }

    // Placement order with, for each step, an optional placed neighbour.
    let mut placed = vec![false; n];
    let mut plan: Vec<(usize, Option<(usize, bool)>)> = Vec::with_capacity(n);
    let mut frontier: BTreeSet<(usize, usize)> = BTreeSet::new();
    for _ in 0..n {
        let next = match frontier.iter().next().copied() {
            Some(entry) => {
                frontier.remove(&entry);
                entry.1
            }
            None => (0..n)
                .filter(|&i| !placed[i])
                .min_by_key(|&i| (class_size[colors[i]], i))
                .expect("unplaced element"),
        };
        // Anchor: a placed neighbour; `true` when `next` is an upper cover of it.
        let anchor = lattice
            .lower_covers(next)
            .iter()
            .find(|&&j| placed[j])
            .map(|&j| (j, true))
            .or_else(|| {
                lattice
                    .upper_covers(next)
                    .iter()
                    .find(|&&j| placed[j])
                    .map(|&j| (j, false))
            });
        placed[next] = true;
        plan.push((next, anchor));
        for &j in lattice
            .upper_covers(next)
            .iter()
            .chain(lattice.lower_covers(next))
        {
            if !placed[j] {
                frontier.insert((class_size[colors[j]], j));
            }
        }
    }

    let mut search = Search {
        lattice,
        colors: &colors,
        by_color: &by_color,
        plan: &plan,
        forward: vec![usize::MAX; n],
        backward: vec![usize::MAX; n],
        found: Vec::new(),
    };
    search.run(0);
    let mut found = search.found;
    found.sort();
    Ok(found)
}

struct Search<'a> {
    lattice: &'a AbstractLattice,
    colors: &'a [usize],
    by_color: &'a [Vec<usize>],
    plan: &'a [(usize, Option<(usize, bool)>)],
    forward: Vec<usize>,
    backward: Vec<usize>,
    found: Vec<LatticeAutomorphism>,
}

impl Search<'_> {
    fn run(&mut self, step: usize) {
        if step == self.plan.len() {
            self.found.push(LatticeAutomorphism {
                mapping: self.forward.clone(),
            });
            return;
        }
        let (x, anchor) = self.plan[step];
        let candidates: &[usize] = match anchor {
            Some((y, true)) => self.lattice.upper_covers(self.forward[y]),
            Some((y, false)) => self.lattice.lower_covers(self.forward[y]),
            None => &self.by_color[self.colors[x]],
        };
        for &c in candidates {
            if self.backward[c] != usize::MAX
                || self.colors[c] != self.colors[x]
                || !self.consistent(x, c)
            {
                continue;
            }
            self.forward[x] = c;
            self.backward[c] = x;
            self.run(step + 1);
            self.forward[x] = usize::MAX;
            self.backward[c] = usize::MAX;
        }
    }

    /// Covers of `x` that are already placed must map to covers of `c` in
    /// the same direction, and vice versa.
    fn consistent(&self, x: usize, c: usize) -> bool {
        let l = self.lattice;
        let forward_ok = |from: &[usize], to: &[usize]| {
            from.iter()
                .filter(|&&u| self.forward[u] != usize::MAX)
                .all(|&u| to.binary_search(&self.forward[u]).is_ok())
        };
        let backward_ok = |from: &[usize], to: &[usize]| {
            from.iter()
                .filter(|&&v| self.backward[v] != usize::MAX)
                .all(|&v| to.binary_search(&self.backward[v]).is_ok())
        };
        forward_ok(l.upper_covers(x), l.upper_covers(c))
            && forward_ok(l.lower_covers(x), l.lower_covers(c))
            && backward_ok(l.upper_covers(c), l.upper_covers(x))
            && backward_ok(l.lower_covers(c), l.lower_covers(x))
    }
}

/// Histogram of element orders, a cheap isomorphism invariant.
pub fn order_histogram(group: &[LatticeAutomorphism]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for phi in group {
        *h.entry(phi.order()).or_insert(0) += 1;
    }
    h
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductFormulaReport {
    pub spec: String,
    pub predicted_order: u128,
    pub brute_force_order: usize,
    pub constructive_order: usize,
    /// Every `τ_σ` is a brute-force automorphism and `σ ↦ τ_σ` is onto.
    pub realisation_matches: bool,
    /// `π_{τ_σ} = σ` for every `σ`.
    pub induced_matches: bool,
    /// `φ ↦ π_φ` is injective on the brute-force group.
    pub injective: bool,
    #[serde(rename = "match")]
    pub matches: bool,
    pub generators: Vec<String>,
}

pub fn verify_product_formula(
    spec: &TowerGroupSpec,
    max_slots: usize,
    max_lattice: usize,
) -> Result<ProductFormulaReport, AutError> {
    let lattice = Lattice::enumerate_bounded(spec, max_slots)?;
    if lattice.len() > max_lattice {
        return Err(AutError::TooLarge {
            elements: lattice.len(),
            max: max_lattice,
        });
    }
    let abstract_lattice = lattice.to_abstract();
    let brute = brute_force_automorphisms(&abstract_lattice, max_lattice)?;
    let predicted = factorial(spec.a4() as u32) * factorial(spec.b() as u32);
    let atoms = factor_atoms_by_slot(&lattice, &abstract_lattice)?;

    let brute_set: BTreeSet<&LatticeAutomorphism> = brute.iter().collect();
    let mut constructive = BTreeSet::new();
    let mut induced_matches = true;
    for sigma in SlotPermutation::all(spec) {
        let tau = tau_sigma_on_lattice(&lattice, &sigma)?;
        induced_matches &= induced_permutation(&tau, &lattice, &atoms)? == sigma;
        constructive.insert(tau);
    }
    let realisation_matches = constructive.iter().collect::<BTreeSet<_>>() == brute_set;

    let mut induced = BTreeSet::new();
    for phi in &brute {
        induced.insert(induced_permutation(phi, &lattice, &atoms)?);
    }
    let injective = induced.len() == brute.len();

    let matches = brute.len() as u128 == predicted
        && constructive.len() as u128 == predicted
        && realisation_matches
        && induced_matches
        && injective;
    Ok(ProductFormulaReport {
        spec: spec.to_string(),
        predicted_order: predicted,
        brute_force_order: brute.len(),
        constructive_order: constructive.len(),
        realisation_matches,
        induced_matches,
        injective,
        matches,
        generators: SlotPermutation::generators(spec)
            .iter()
            .map(|g| g.to_string())
            .collect(),
    })
}
