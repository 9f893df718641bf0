//! Concrete permutation-group computations, independent of the triple
//! classification.
//!
//! A [`ConcreteGroup`] is a product of symmetric groups `S_n` (degree 2 is
//! allowed here, so `C_2` factors can be built). Every element has a global
//! id: the Lehmer rank of each component, combined in mixed radix with
//! factor 0 most significant. Subgroups are bitsets over those ids.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::autgroup::lcm;
use crate::gf2::Subspace;
use crate::group_spec::{factorial, parse_factors, ChainPosition, SpecError, TowerGroupSpec};
use crate::lattice::{Lattice, LatticeError, Profile};
use crate::poset::AbstractLattice;

/// Default bound on `|G|` for concrete computations.
pub const DEFAULT_MAX_ORDER: u128 = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("group order {order} exceeds the oracle bound {max}")]
    TooLarge { order: u128, max: u128 },
    #[error("factor S_{0} is not allowed in a tower group")]
    NotTowerGroup(u32),
    #[error("unsupported factor {family}{degree}")]
    BadFactor { family: char, degree: i64 },
    #[error("oracle mismatch for {spec}: {detail}")]
    Mismatch { spec: String, detail: String },
}

/// A permutation of `0..n`, `images[i]` being the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n as u8).collect(),
        }
    }

    pub fn from_images(images: Vec<u8>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                return None;
            }
        }
        Some(Perm { images })
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    /// `i ↦ i+1 mod n`.
    pub fn long_cycle(n: usize) -> Self {
        Perm {
            images: (0..n).map(|i| ((i + 1) % n) as u8).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm {
            images: other
                .images
                .iter()
                .map(|&i| self.images[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &j)| i == j as usize)
    }

    /// Lengths of all cycles, including fixed points, in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            if len > 0 {
                out.push(len);
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// `+1` or `-1`, the parity of the number of inversions.
    pub fn sign(&self) -> i8 {
        let even_cycles = self.cycle_type().iter().filter(|&&l| l % 2 == 0).count();
        if even_cycles % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn order(&self) -> usize {
        self.cycle_type().into_iter().fold(1, lcm)
    }

    /// Position in the lexicographic list of all permutations of `0..n`.
    pub fn rank(&self) -> usize {
        let n = self.images.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    pub fn unrank(n: usize, mut rank: usize) -> Perm {
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<u8> = (0..n as u8).collect();
        Perm {
            images: digits.into_iter().map(|d| pool.remove(d)).collect(),
        }
    }

    /// Membership in the named normal subgroup of `S_n`.
    pub fn in_position(&self, position: ChainPosition) -> bool {
        match position {
            ChainPosition::Triv => self.is_identity(),
            ChainPosition::V => self.is_identity() || self.cycle_type() == [2, 2],
            ChainPosition::Alt => self.sign() == 1,
            ChainPosition::Full => true,
        }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.images.len()];
        let mut any = false;
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            any = true;
            f.write_str("(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.images[x] as usize;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// All of `S_n` with its multiplication table, indexed by rank.
#[derive(Debug, Clone)]
struct FactorTable {
    degree: usize,
    perms: Vec<Perm>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl FactorTable {
    fn new(degree: usize) -> Self {
        let size = factorial(degree as u32) as usize;
        let perms: Vec<Perm> = (0..size).map(|r| Perm::unrank(degree, r)).collect();
        let mut mul = vec![0u32; size * size];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                mul[a * size + b] = pa.compose(pb).rank() as u32;
            }
        }
        let inv = perms.iter().map(|p| p.inverse().rank() as u32).collect();
        FactorTable {
            degree,
            perms,
            mul,
            inv,
        }
    }

    fn size(&self) -> usize {
        self.perms.len()
    }
}

/// A direct product `∏ S_{n_j}` with degrees sorted ascending.
#[derive(Debug, Clone)]
pub struct ConcreteGroup {
    degrees: Vec<u32>,
    tables: Vec<FactorTable>,
    order: usize,
    generators: Vec<usize>,
}

impl ConcreteGroup {
    /// Degrees of 0 and 1 are dropped; the rest are sorted ascending.
    pub fn new(degrees: &[u32], max_order: u128) -> Result<Self, OracleError> {
        let mut degrees: Vec<u32> = degrees.iter().copied().filter(|&d| d >= 2).collect();
        degrees.sort_unstable();
        let mut order: u128 = 1;
        for &d in &degrees {
            order = order.saturating_mul(factorial(d.min(34)));
            if order > max_order {
                return Err(OracleError::TooLarge {
                    order,
                    max: max_order,
                });
            }
        }
        let mut cache: HashMap<u32, FactorTable> = HashMap::new();
        let tables: Vec<FactorTable> = degrees
            .iter()
            .map(|&d| {
                cache
                    .entry(d)
                    .or_insert_with(|| FactorTable::new(d as usize))
                    .clone()
            })
            .collect();
        let mut group = ConcreteGroup {
            degrees,
            tables,
            order: order as usize,
            generators: Vec::new(),
        };
        let mut gens = Vec::new();
        for (j, t) in group.tables.iter().enumerate() {
            let n = t.degree;
            for p in [Perm::transposition(n, 0, 1), Perm::long_cycle(n)] {
                let mut digits = vec![0; group.degrees.len()];
                digits[j] = p.rank();
                gens.push(group.encode(&digits));
            }
        }
        gens.sort_unstable();
        gens.dedup();
        group.generators = gens;
        Ok(group)
    }

    pub fn from_spec(spec: &TowerGroupSpec, max_order: u128) -> Result<Self, OracleError> {
        Self::new(&spec.degrees(), max_order)
    }

    /// Parses literals such as `C2*S3` or `S3^2*S4`; `C` only takes degree 2.
    pub fn parse(literal: &str, max_order: u128) -> Result<Self, OracleError> {
        let mut degrees = Vec::new();
        for f in parse_factors(literal, &['c', 's'])? {
            let ok = match f.family {
                'c' => f.degree == 2 || f.degree == 1,
                _ => (1..=34).contains(&f.degree),
            };
            if !ok || f.exponent < 0 {
                return Err(OracleError::BadFactor {
                    family: f.family.to_ascii_uppercase(),
                    degree: f.degree,
                });
            }
            degrees.extend(std::iter::repeat_n(f.degree as u32, f.exponent as usize));
        }
        Self::new(&degrees, max_order)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// The tower group with the same factors, if every degree is at least 3.
    pub fn tower_spec(&self) -> Result<TowerGroupSpec, OracleError> {
        if let Some(&d) = self.degrees.iter().find(|&&d| d < 3) {
            return Err(OracleError::NotTowerGroup(d));
        }
        Ok(TowerGroupSpec::from_degrees(&self.degrees)?)
    }

    fn encode(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.tables)
            .fold(0, |acc, (&d, t)| acc * t.size() + d)
    }

    fn decode(&self, mut id: usize) -> Vec<usize> {
        let mut digits = vec![0; self.tables.len()];
        for (j, t) in self.tables.iter().enumerate().rev() {
            digits[j] = id % t.size();
            id /= t.size();
        }
        digits
    }

    pub fn component(&self, id: usize, factor: usize) -> &Perm {
        &self.tables[factor].perms[self.decode(id)[factor]]
    }

    pub fn components(&self, id: usize) -> Vec<&Perm> {
        self.decode(id)
            .into_iter()
            .zip(&self.tables)
            .map(|(d, t)| &t.perms[d])
            .collect()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.decode(a), self.decode(b));
        let digits: Vec<usize> = self
            .tables
            .iter()
            .enumerate()
            .map(|(j, t)| t.mul[da[j] * t.size() + db[j]] as usize)
            .collect();
        self.encode(&digits)
    }

    pub fn inv(&self, a: usize) -> usize {
        let digits: Vec<usize> = self
            .decode(a)
            .into_iter()
            .zip(&self.tables)
            .map(|(d, t)| t.inv[d] as usize)
            .collect();
        self.encode(&digits)
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    /// Bit `j` set iff component `j` is odd.
    pub fn sign_bits(&self, id: usize) -> u64 {
        self.components(id)
            .iter()
            .enumerate()
            .filter(|(_, p)| p.sign() == -1)
            .fold(0, |m, (j, _)| m | 1 << j)
    }

    pub fn element_order(&self, id: usize) -> usize {
        self.components(id).iter().map(|p| p.order()).fold(1, lcm)
    }

    /// Subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> ConcreteSubgroup {
        let mut members = FixedBitSet::with_capacity(self.order);
        members.insert(self.identity());
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !members.put(y) {
                    queue.push_back(y);
                }
            }
        }
        ConcreteSubgroup::from_bits(members)
    }

    /// The conjugacy class of `g`.
    pub fn conjugacy_class(&self, g: usize) -> Vec<usize> {
        let mut seen = FixedBitSet::with_capacity(self.order);
        seen.insert(g);
        let mut queue = VecDeque::from([g]);
        let mut out = vec![g];
        while let Some(x) = queue.pop_front() {
            for &s in &self.generators {
                let y = self.conjugate(x, s);
                if !seen.put(y) {
                    queue.push_back(y);
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Smallest normal subgroup containing `g`.
    pub fn normal_closure(&self, g: usize) -> ConcreteSubgroup {
        self.generate(&self.conjugacy_class(g))
    }

    /// `NM` for normal `N`, built one coset `aM` at a time.
    pub fn join(&self, n: &ConcreteSubgroup, m: &ConcreteSubgroup) -> ConcreteSubgroup {
        let mut out = m.members.clone();
        for a in n.members.ones() {
            if out.contains(a) {
                continue;
            }
            for b in m.members.ones() {
                out.insert(self.mul(a, b));
            }
        }
        ConcreteSubgroup::from_bits(out)
    }

    pub fn meet(&self, n: &ConcreteSubgroup, m: &ConcreteSubgroup) -> ConcreteSubgroup {
        ConcreteSubgroup::from_bits(&n.members & &m.members)
    }

    pub fn is_normal(&self, n: &ConcreteSubgroup) -> bool {
        n.members.ones().all(|x| {
            self.generators
                .iter()
                .all(|&g| n.contains(self.conjugate(x, g)))
        })
    }

    pub fn is_subgroup(&self, n: &ConcreteSubgroup) -> bool {
        n.contains(self.identity())
            && n.members
                .ones()
                .all(|a| n.members.ones().all(|b| n.contains(self.mul(a, b))))
    }

    /// Every normal subgroup, sorted by order and then by members.
    ///
    /// Seeds are `1` and the normal closures of conjugacy class
    /// representatives; the list is then closed under pairwise joins.
    pub fn all_normal_subgroups(&self) -> Vec<ConcreteSubgroup> {
        let mut classified = FixedBitSet::with_capacity(self.order);
        let mut found: Vec<ConcreteSubgroup> = vec![self.generate(&[])];
        let mut seen: HashSet<FixedBitSet> = found.iter().map(|n| n.members.clone()).collect();
        for g in 0..self.order {
            if classified.contains(g) {
                continue;
            }
            for x in self.conjugacy_class(g) {
                classified.insert(x);
            }
            let n = self.normal_closure(g);
            if seen.insert(n.members.clone()) {
                found.push(n);
            }
        }
        let mut frontier = 0;
        while frontier < found.len() {
            let end = found.len();
            for i in frontier..end {
                for j in 0..i {
                    let n = self.join(&found[i], &found[j]);
                    if seen.insert(n.members.clone()) {
                        found.push(n);
                    }
                }
            }
            frontier = end;
        }
        found.sort_by_cached_key(|n| (n.order(), n.elements()));
        found
    }
}

/// A subgroup stored as a bitset over element ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConcreteSubgroup {
    members: FixedBitSet,
    order: usize,
}

impl ConcreteSubgroup {
    fn from_bits(members: FixedBitSet) -> Self {
        let order = members.count_ones(..);
        ConcreteSubgroup { members, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(id)
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn is_subset(&self, other: &ConcreteSubgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }
}

/// Projections and sign image of a concrete normal subgroup of a tower group.
pub fn extract_profile(
    group: &ConcreteGroup,
    spec: &TowerGroupSpec,
    n: &ConcreteSubgroup,
) -> Result<Profile, OracleError> {
    let own = group.tower_spec()?;
    if &own != spec {
        return Err(OracleError::Mismatch {
            spec: spec.to_string(),
            detail: format!("concrete group is {own}"),
        });
    }
    let t = group.degrees.len();
    let mut projections: Vec<HashSet<usize>> = vec![HashSet::new(); t];
    let mut signs = Vec::new();
    for x in n.members.ones() {
        for (j, d) in group.decode(x).into_iter().enumerate() {
            projections[j].insert(d);
        }
        signs.push(group.sign_bits(x));
    }
    let eff = projections
        .iter()
        .zip(&group.degrees)
        .map(|(p, &k)| {
            let size = p.len() as u128;
            let pos = [
                ChainPosition::Triv,
                ChainPosition::V,
                ChainPosition::Alt,
                ChainPosition::Full,
            ]
            .into_iter()
            .find(|c| c.is_legal_for(k) && c.cardinality(k) == size);
            pos.ok_or_else(|| OracleError::Mismatch {
                spec: spec.to_string(),
                detail: format!("projection of size {size} is not normal in S_{k}"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let image = Subspace::from_raw(t, signs).map_err(LatticeError::from)?;
    Ok(Profile::new(spec, eff, image)?)
}

/// Whether the profile's membership test classifies every element of `G`
/// exactly as set membership in `n` does.
pub fn profile_reproduces(group: &ConcreteGroup, profile: &Profile, n: &ConcreteSubgroup) -> bool {
    (0..group.order()).all(|x| {
        let comps = group.components(x);
        let admitted = profile.admits(|s, p| comps[s].in_position(p), group.sign_bits(x));
        admitted == n.contains(x)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub spec: String,
    pub group_order: usize,
    pub concrete_count: usize,
    pub lattice_count: usize,
    pub profiles_bijective: bool,
    pub membership_agrees: bool,
    pub orders_agree: bool,
    pub pairs_checked: usize,
    pub leq_agrees: bool,
    pub meet_agrees: bool,
    pub join_agrees: bool,
    pub mismatch: Option<String>,
}

impl OracleReport {
    pub fn is_ok(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn ensure_ok(&self) -> Result<(), OracleError> {
        match &self.mismatch {
            None => Ok(()),
            Some(detail) => Err(OracleError::Mismatch {
                spec: self.spec.clone(),
                detail: detail.clone(),
            }),
        }
    }
}

/// Compares the enumerated lattice of `spec` with the concrete one:
/// element counts, the profile bijection and the order relation on all pairs.
pub fn differential_validate(
    spec: &TowerGroupSpec,
    max_order: u128,
    max_slots: usize,
) -> Result<OracleReport, OracleError> {
    let group = ConcreteGroup::from_spec(spec, max_order)?;
    let lattice = Lattice::enumerate_bounded(spec, max_slots)?;
    let concrete = group.all_normal_subgroups();
    let mut report = OracleReport {
        spec: spec.to_string(),
        group_order: group.order(),
        concrete_count: concrete.len(),
        lattice_count: lattice.len(),
        profiles_bijective: false,
        membership_agrees: true,
        orders_agree: true,
        pairs_checked: 0,
        leq_agrees: true,
        meet_agrees: true,
        join_agrees: true,
        mismatch: None,
    };
    let first = |report: &mut OracleReport, msg: String| {
        if report.mismatch.is_none() {
            report.mismatch = Some(msg);
        }
    };
    if concrete.len() != lattice.len() {
        first(
            &mut report,
            format!(
                "{} concrete vs {} enumerated",
                concrete.len(),
                lattice.len()
            ),
        );
        return Ok(report);
    }

    let mut to_lattice = Vec::with_capacity(concrete.len());
    for (c, n) in concrete.iter().enumerate() {
        let profile = extract_profile(&group, spec, n)?;
        if !profile_reproduces(&group, &profile, n) {
            report.membership_agrees = false;
            first(
                &mut report,
                format!("membership test of subgroup {c} disagrees"),
            );
        }
        let idx = lattice.find_profile(&profile)?;
        if lattice.elements()[idx].order != n.order() as u128 {
            report.orders_agree = false;
            first(
                &mut report,
                format!("order of element {idx} disagrees with subgroup {c}"),
            );
        }
        to_lattice.push(idx);
    }
    let mut hit = vec![false; lattice.len()];
    for &i in &to_lattice {
        hit[i] = true;
    }
    report.profiles_bijective = hit.iter().all(|&h| h);
    if !report.profiles_bijective {
        first(
            &mut report,
            "profiles do not cover the enumerated lattice".into(),
        );
        return Ok(report);
    }

    let by_members: HashMap<&FixedBitSet, usize> = concrete
        .iter()
        .enumerate()
        .map(|(c, n)| (&n.members, c))
        .collect();
    let lookup = |n: &ConcreteSubgroup| by_members.get(&n.members).map(|&c| to_lattice[c]);
    for a in 0..concrete.len() {
        for b in a + 1..concrete.len() {
            report.pairs_checked += 1;
            let (la, lb) = (to_lattice[a], to_lattice[b]);
            for (x, y, lx, ly) in [(a, b, la, lb), (b, a, lb, la)] {
                let truth = concrete[x].is_subset(&concrete[y]);
                if lattice.leq(lx, ly)? != truth || lattice.leq_by_triples(lx, ly)? != truth {
                    report.leq_agrees = false;
                    first(&mut report, format!("inclusion of elements {lx} and {ly}"));
                }
            }
            if lookup(&group.meet(&concrete[a], &concrete[b])) != Some(lattice.meet(la, lb)?) {
                report.meet_agrees = false;
                first(&mut report, format!("meet of elements {la} and {lb}"));
            }
            if lookup(&group.join(&concrete[a], &concrete[b])) != Some(lattice.join(la, lb)?) {
                report.join_agrees = false;
                first(&mut report, format!("join of elements {la} and {lb}"));
            }
        }
    }
    Ok(report)
}

/// Inclusion lattice of concrete normal subgroups.
pub fn concrete_lattice(subgroups: &[ConcreteSubgroup]) -> AbstractLattice {
    AbstractLattice::from_leq(subgroups.len(), |i, j| {
        subgroups[i].is_subset(&subgroups[j])
    })
}

/// The non-tower lattices used by the tower's small cases.
pub fn lemma_lattices() -> BTreeMap<String, AbstractLattice> {
    ["C2", "C2^2", "C2*S3", "C2*S4", "C2*S5"]
        .into_iter()
        .map(|name| {
            let g = ConcreteGroup::parse(name, DEFAULT_MAX_ORDER).expect("small lemma group");
            (
                name.to_string(),
                concrete_lattice(&g.all_normal_subgroups()),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GoursatReport {
    pub spec: String,
    pub bipartitions: usize,
    pub subgroups: usize,
    pub consistent: bool,
    pub failure: Option<String>,
}

/// For every split of the factors into `X | Y` and every normal `N`, checks
/// that the projections `H, K` and kernels `H_1 = N ∩ X`, `K_1 = N ∩ Y`
/// satisfy `|N| = |H||K_1| = |K||H_1|`, that all four are normal, and that
/// `[G_X, H] ≤ H_1` and `[G_Y, K] ≤ K_1`.
pub fn goursat_check(group: &ConcreteGroup) -> GoursatReport {
    let t = group.degrees.len();
    let subgroups = group.all_normal_subgroups();
    let mut report = GoursatReport {
        spec: group
            .degrees
            .iter()
            .map(|d| format!("S{d}"))
            .collect::<Vec<_>>()
            .join("*"),
        bipartitions: 0,
        subgroups: subgroups.len(),
        consistent: true,
        failure: None,
    };
    let gens_of = |mask: u64| -> Vec<usize> {
        group
            .generators
            .iter()
            .copied()
            .filter(|&g| {
                let d = group.decode(g);
                (0..t).all(|j| d[j] == 0 || mask >> j & 1 == 1)
            })
            .collect()
    };
    // Masks containing factor 0 enumerate each unordered split once.
    for x_mask in (1u64..(1 << t) - 1).filter(|m| m & 1 == 1) {
        report.bipartitions += 1;
        let y_mask = !x_mask & ((1 << t) - 1);
        let (gx, gy) = (gens_of(x_mask), gens_of(y_mask));
        for (idx, n) in subgroups.iter().enumerate() {
            let (h, h1) = split(group, n, x_mask);
            let (k, k1) = split(group, n, y_mask);
            let sizes = n.order() == h.order() * k1.order() && n.order() == k.order() * h1.order();
            let normal = [&h, &h1, &k, &k1].iter().all(|s| group.is_normal(s));
            let central =
                commutators_inside(group, &gx, &h, &h1) && commutators_inside(group, &gy, &k, &k1);
            if !(sizes && normal && central) {
                report.consistent = false;
                report
                    .failure
                    .get_or_insert(format!("subgroup {idx}, split {x_mask:#b}"));
            }
        }
    }
    report
}

/// Projection of `n` onto the factors in `mask` and the kernel `n ∩ G_mask`,
/// both as subsets of `G` with identity components outside `mask`.
fn split(
    group: &ConcreteGroup,
    n: &ConcreteSubgroup,
    mask: u64,
) -> (ConcreteSubgroup, ConcreteSubgroup) {
    let mut proj = FixedBitSet::with_capacity(group.order);
    let mut kernel = FixedBitSet::with_capacity(group.order);
    for x in n.members.ones() {
        let d = group.decode(x);
        let inside: Vec<usize> = (0..d.len())
            .map(|j| if mask >> j & 1 == 1 { d[j] } else { 0 })
            .collect();
        let p = group.encode(&inside);
        proj.insert(p);
        if p == x {
            kernel.insert(x);
        }
    }
    (
        ConcreteSubgroup::from_bits(proj),
        ConcreteSubgroup::from_bits(kernel),
    )
}

fn commutators_inside(
    group: &ConcreteGroup,
    gens: &[usize],
    h: &ConcreteSubgroup,
    h1: &ConcreteSubgroup,
) -> bool {
    gens.iter().all(|&g| {
        h.members
            .ones()
            .all(|x| h1.contains(group.commutator(g, x)))
    })
}

/// Number of elements of each order in `∏ S_n`.
pub fn product_order_histogram(degrees: &[u32]) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::from([(1usize, 1usize)]);
    for &d in degrees.iter().filter(|&&d| d >= 2) {
        let mut factor: BTreeMap<usize, usize> = BTreeMap::new();
        for r in 0..factorial(d) as usize {
            *factor
                .entry(Perm::unrank(d as usize, r).order())
                .or_insert(0) += 1;
        }
        let mut next = BTreeMap::new();
        for (&a, &ca) in &hist {
            for (&b, &cb) in &factor {
                *next.entry(lcm(a, b)).or_insert(0) += ca * cb;
            }
        }
        hist = next;
    }
    hist
}
