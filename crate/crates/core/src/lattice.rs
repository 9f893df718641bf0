//! The normal subgroup lattice `N(G)` of a tower group.
//!
//! Every normal subgroup has two exact descriptions:
//!
//! * an [`AdmissibleTriple`] `(J, P, H)`: the coupled slots `J`, a chain
//!   position for every uncoupled slot, and the joint sign constraint
//!   `H ≤ F_2^J`;
//! * a [`Profile`] `(eff, W)`: the projection of the subgroup onto every
//!   slot plus its full sign image `W ≤ F_2^T`.
//!
//! `g` lies in the subgroup iff `g_s ∈ eff[s]` for every slot and the sign
//! vector of `g` lies in `W`. Triples drive enumeration and serialization;
//! profiles turn the lattice operations into componentwise chain
//! comparisons plus subspace arithmetic.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{self, Gf2Error, Subspace};
use crate::group_spec::{chain, ChainPosition, SpecError, TowerGroupSpec};
use crate::poset::AbstractLattice;

/// Default bound on the number of slots accepted by [`Lattice::enumerate`].
pub const DEFAULT_MAX_SLOTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("slot {0}: the unit sign vector lies in H")]
    UnitVectorInH(usize),
    #[error("slot {0}: no element of H has sign -1 there")]
    DeadCoordinate(usize),
    #[error("slot {slot}: {position:?} is not a normal subgroup of S_{degree}")]
    IllegalChainPosition {
        slot: usize,
        degree: u32,
        position: ChainPosition,
    },
    #[error("slot {0} is neither coupled nor given a chain position")]
    MissingPosition(usize),
    #[error("slot {0} is coupled but also given a chain position")]
    UnexpectedPosition(usize),
    #[error("slot {0} does not exist")]
    BadSlot(usize),
    #[error("coupled slots must be strictly increasing")]
    UnsortedCoupling,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("{slots} slots exceed the enumeration bound {max}")]
    TooLarge { slots: usize, max: usize },
    #[error("elements belong to different groups")]
    SpecMismatch,
    #[error("element is not mixed")]
    NotMixed,
    #[error("subgroup order overflows u128")]
    OrderOverflow,
    #[error("element index {0} out of range")]
    UnknownElement(usize),
}

/// Canonical coordinates `(J, P, H)` of a normal subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleTriple {
    coupled: Vec<usize>,
    positions: Vec<Option<ChainPosition>>,
    signs: Subspace,
}

impl AdmissibleTriple {
    /// Checks shapes and both admissibility conditions.
    pub fn new(
        spec: &TowerGroupSpec,
        coupled: &[usize],
        positions: &BTreeMap<usize, ChainPosition>,
        signs: Subspace,
    ) -> Result<Self, LatticeError> {
        let t = spec.slot_count();
        if !coupled.windows(2).all(|w| w[0] < w[1]) {
            return Err(LatticeError::UnsortedCoupling);
        }
        if let Some(&bad) = coupled.iter().find(|&&s| s >= t) {
            return Err(LatticeError::BadSlot(bad));
        }
        if let Some(&bad) = positions.keys().find(|&&s| s >= t) {
            return Err(LatticeError::BadSlot(bad));
        }
        if signs.width() != coupled.len() {
            return Err(Gf2Error::WidthMismatch(coupled.len(), signs.width()).into());
        }
        let mut slots = vec![None; t];
        for slot in spec.slots() {
            let s = slot.index;
            let is_coupled = coupled.binary_search(&s).is_ok();
            match (is_coupled, positions.get(&s)) {
                (true, Some(_)) => return Err(LatticeError::UnexpectedPosition(s)),
                (false, None) => return Err(LatticeError::MissingPosition(s)),
                (false, Some(&p)) => {
                    if !p.is_legal_for(slot.degree) {
                        return Err(LatticeError::IllegalChainPosition {
                            slot: s,
                            degree: slot.degree,
                            position: p,
                        });
                    }
                    slots[s] = Some(p);
                }
                (true, None) => {}
            }
        }
        check_admissible(&signs).map_err(|c| match c {
            Violation::Unit(c) => LatticeError::UnitVectorInH(coupled[c]),
            Violation::Dead(c) => LatticeError::DeadCoordinate(coupled[c]),
        })?;
        Ok(AdmissibleTriple {
            coupled: coupled.to_vec(),
            positions: slots,
            signs,
        })
    }

    /// `∏ P_s` with nothing coupled.
    pub fn sub_product(
        spec: &TowerGroupSpec,
        positions: &[ChainPosition],
    ) -> Result<Self, LatticeError> {
        if positions.len() != spec.slot_count() {
            return Err(LatticeError::MissingPosition(
                positions.len().min(spec.slot_count()),
            ));
        }
        let map = positions.iter().copied().enumerate().collect();
        Self::new(spec, &[], &map, Subspace::zero(0)?)
    }

    /// `D_I`: elements whose sign product over `I` is `+1`.
    pub fn sign_parity(spec: &TowerGroupSpec, slots: &[usize]) -> Result<Self, LatticeError> {
        let mut coupled = slots.to_vec();
        coupled.sort_unstable();
        coupled.dedup();
        let positions = (0..spec.slot_count())
            .filter(|s| coupled.binary_search(s).is_err())
            .map(|s| (s, ChainPosition::Full))
            .collect();
        Self::new(
            spec,
            &coupled,
            &positions,
            Subspace::even_weight(coupled.len())?,
        )
    }

    pub fn coupled(&self) -> &[usize] {
        &self.coupled
    }

    pub fn coupled_mask(&self) -> u64 {
        self.coupled.iter().fold(0, |m, &s| m | 1 << s)
    }

    /// `P_s`, or `None` when `s ∈ J`.
    pub fn position(&self, slot: usize) -> Option<ChainPosition> {
        self.positions.get(slot).copied().flatten()
    }

    pub fn positions(&self) -> BTreeMap<usize, ChainPosition> {
        self.positions
            .iter()
            .enumerate()
            .filter_map(|(s, p)| p.map(|p| (s, p)))
            .collect()
    }

    pub fn signs(&self) -> &Subspace {
        &self.signs
    }

    pub fn slot_count(&self) -> usize {
        self.positions.len()
    }

    /// The projection onto slot `s`.
    pub fn effective(&self, slot: usize) -> ChainPosition {
        self.positions[slot].unwrap_or(ChainPosition::Full)
    }

    pub fn to_profile(&self) -> Profile {
        triple_to_profile(self)
    }

    pub fn family(&self) -> Family {
        if self.coupled.is_empty() {
            Family::SubProduct
        } else if self
            .positions
            .iter()
            .flatten()
            .all(|&p| p == ChainPosition::Full)
            && self.signs == Subspace::even_weight(self.coupled.len()).expect("width checked")
        {
            Family::SignParity {
                slots: self.coupled.clone(),
            }
        } else {
            Family::Mixed
        }
    }

    /// `|N| = |H| · ∏_{s∈J} k_s!/2 · ∏_{s∉J} |P_s|`.
    pub fn order(&self, spec: &TowerGroupSpec) -> Result<u128, LatticeError> {
        let mut order = self.signs.cardinality();
        for slot in spec.slots() {
            let factor = self.effective(slot.index).cardinality(slot.degree);
            let factor = if self.positions[slot.index].is_none() {
                factor / 2
            } else {
                factor
            };
            order = order
                .checked_mul(factor)
                .ok_or(LatticeError::OrderOverflow)?;
        }
        Ok(order)
    }
}

enum Violation {
    Unit(usize),
    Dead(usize),
}

fn check_admissible(h: &Subspace) -> Result<(), Violation> {
    let support = h.support();
    for c in 0..h.width() {
        if h.contains_raw(1 << c) {
            return Err(Violation::Unit(c));
        }
        if support >> c & 1 == 0 {
            return Err(Violation::Dead(c));
        }
    }
    Ok(())
}

/// The subspaces of `F_2^width` that pass both admissibility conditions.
pub fn admissible_sign_subspaces(width: usize) -> Result<Vec<Subspace>, LatticeError> {
    Ok(Subspace::enumerate_all(width)?
        .into_iter()
        .filter(|h| check_admissible(h).is_ok())
        .collect())
}

/// Per-slot projections plus the full sign image.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Profile {
    eff: Vec<ChainPosition>,
    image: Subspace,
}

impl Profile {
    /// Validates chain positions, support and activity of `image`.
    pub fn new(
        spec: &TowerGroupSpec,
        eff: Vec<ChainPosition>,
        image: Subspace,
    ) -> Result<Self, LatticeError> {
        let t = spec.slot_count();
        if eff.len() != t {
            return Err(LatticeError::InvalidProfile(format!(
                "{} positions for {t} slots",
                eff.len()
            )));
        }
        if image.width() != t {
            return Err(Gf2Error::WidthMismatch(t, image.width()).into());
        }
        for slot in spec.slots() {
            let p = eff[slot.index];
            if !p.is_legal_for(slot.degree) {
                return Err(LatticeError::IllegalChainPosition {
                    slot: slot.index,
                    degree: slot.degree,
                    position: p,
                });
            }
        }
        let profile = Profile { eff, image };
        let full = profile.full_mask();
        let support = profile.image.support();
        if support & !full != 0 {
            return Err(LatticeError::InvalidProfile(format!(
                "sign image is nonzero at slot {} whose projection is not the full group",
                (support & !full).trailing_zeros()
            )));
        }
        if full & !support != 0 {
            return Err(LatticeError::InvalidProfile(format!(
                "slot {} projects onto the full group but never carries sign -1",
                (full & !support).trailing_zeros()
            )));
        }
        Ok(profile)
    }

    pub fn effective(&self) -> &[ChainPosition] {
        &self.eff
    }

    pub fn image(&self) -> &Subspace {
        &self.image
    }

    fn full_mask(&self) -> u64 {
        self.eff
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == ChainPosition::Full)
            .fold(0, |m, (s, _)| m | 1 << s)
    }

    /// Whether `g` (given per slot by a membership test for each chain
    /// position and by its sign vector) lies in the subgroup.
    pub fn admits(&self, in_position: impl Fn(usize, ChainPosition) -> bool, signs: u64) -> bool {
        (0..self.eff.len()).all(|s| in_position(s, self.eff[s])) && self.image.contains_raw(signs)
    }

    pub fn leq(&self, other: &Profile) -> bool {
        self.eff.len() == other.eff.len()
            && self.eff.iter().zip(&other.eff).all(|(a, b)| a <= b)
            && self.image.is_subspace_of(&other.image).unwrap_or(false)
    }

    /// Intersection of the two subgroups.
    pub fn meet(&self, other: &Profile) -> Result<Profile, LatticeError> {
        if self.eff.len() != other.eff.len() {
            return Err(LatticeError::SpecMismatch);
        }
        let mut eff: Vec<_> = self
            .eff
            .iter()
            .zip(&other.eff)
            .map(|(a, b)| *a.min(b))
            .collect();
        let mut image = self.image.intersect(&other.image)?;
        loop {
            let full = eff
                .iter()
                .enumerate()
                .filter(|(_, &p)| p == ChainPosition::Full)
                .fold(0u64, |m, (s, _)| m | 1 << s);
            let support = image.support();
            // Signs can only survive where both projections are full.
            if support & !full != 0 {
                let keep: Vec<u64> = image.raw_basis().iter().map(|&b| b & full).collect();
                image = Subspace::from_raw(eff.len(), keep)?;
                continue;
            }
            let dead = full & !support;
            if dead == 0 {
                break;
            }
            for (s, p) in eff.iter_mut().enumerate() {
                if dead >> s & 1 == 1 {
                    *p = ChainPosition::Alt;
                }
            }
        }
        Ok(Profile { eff, image })
    }

    /// Product of the two subgroups.
    pub fn join(&self, other: &Profile) -> Result<Profile, LatticeError> {
        if self.eff.len() != other.eff.len() {
            return Err(LatticeError::SpecMismatch);
        }
        let eff = self
            .eff
            .iter()
            .zip(&other.eff)
            .map(|(a, b)| *a.max(b))
            .collect();
        let image = self.image.sum(&other.image)?;
        Ok(Profile { eff, image })
    }

    pub fn to_triple(&self, spec: &TowerGroupSpec) -> Result<AdmissibleTriple, LatticeError> {
        profile_to_triple(spec, self)
    }
}

/// `eff[s] = Full` on `J`, else `P[s]`; `W = H` placed on `J` plus the unit
/// vectors of the uncoupled full slots.
pub fn triple_to_profile(t: &AdmissibleTriple) -> Profile {
    let width = t.slot_count();
    let eff: Vec<_> = (0..width).map(|s| t.effective(s)).collect();
    let mut image = t
        .signs
        .embed(width, &t.coupled)
        .expect("coupled slots are in range");
    let free: Vec<u64> = t
        .positions
        .iter()
        .enumerate()
        .filter(|(_, p)| **p == Some(ChainPosition::Full))
        .map(|(s, _)| 1u64 << s)
        .collect();
    image = image
        .sum(&Subspace::from_raw(width, free).expect("width checked"))
        .expect("same width");
    Profile { eff, image }
}

/// `J = {s : eff[s] = Full, e_s ∉ W}`, `P = eff` off `J`, `H = W|_J`.
pub fn profile_to_triple(
    spec: &TowerGroupSpec,
    profile: &Profile,
) -> Result<AdmissibleTriple, LatticeError> {
    let profile = Profile::new(spec, profile.eff.clone(), profile.image.clone())?;
    let coupled: Vec<usize> = (0..spec.slot_count())
        .filter(|&s| profile.eff[s] == ChainPosition::Full && !profile.image.contains_raw(1 << s))
        .collect();
    let positions = (0..spec.slot_count())
        .filter(|s| coupled.binary_search(s).is_err())
        .map(|s| (s, profile.eff[s]))
        .collect();
    let signs = profile.image.project(&coupled)?;
    AdmissibleTriple::new(spec, &coupled, &positions, signs)
}

/// Inclusion computed directly on triples: the projections are ordered
/// slot by slot, and every sign pattern of `N1` restricted to `J2` (with the
/// uncoupled full slots of `N1` free) lies in `H2`. By linearity only basis
/// vectors of `H1` and the unit vectors of the free slots need checking.
pub fn leq_by_triples(a: &AdmissibleTriple, b: &AdmissibleTriple) -> Result<bool, LatticeError> {
    let t = a.slot_count();
    if t != b.slot_count() {
        return Err(LatticeError::SpecMismatch);
    }
    if !(0..t).all(|s| a.effective(s) <= b.effective(s)) {
        return Ok(false);
    }
    // Coordinate of each J2 slot inside b's sign space.
    let j2_pos: HashMap<usize, usize> =
        b.coupled.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    for h in a.signs.raw_basis() {
        let mut pattern = 0u64;
        for (i, &s) in a.coupled.iter().enumerate() {
            if let Some(&c) = j2_pos.get(&s) {
                pattern |= (h >> i & 1) << c;
            }
        }
        if !b.signs.contains_raw(pattern) {
            return Ok(false);
        }
    }
    for (&s, &c) in &j2_pos {
        if a.position(s) == Some(ChainPosition::Full) && !b.signs.contains_raw(1 << c) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    SubProduct,
    SignParity { slots: Vec<usize> },
    Mixed,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::SubProduct => "sub-product",
            Family::SignParity { .. } => "sign-parity",
            Family::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeElement {
    pub triple: AdmissibleTriple,
    pub profile: Profile,
    pub family: Family,
    pub order: u128,
}

impl LatticeElement {
    pub fn from_triple(
        spec: &TowerGroupSpec,
        triple: AdmissibleTriple,
    ) -> Result<Self, LatticeError> {
        let order = triple.order(spec)?;
        Ok(LatticeElement {
            profile: triple.to_profile(),
            family: triple.family(),
            order,
            triple,
        })
    }

    pub fn from_profile(spec: &TowerGroupSpec, profile: &Profile) -> Result<Self, LatticeError> {
        Self::from_triple(spec, profile.to_triple(spec)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub sub_products: usize,
    pub sign_parity: usize,
    pub mixed: usize,
    pub total: usize,
}

impl std::fmt::Display for Census {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "total {}: sub-products {}, sign-parity {}, mixed {}",
            self.total, self.sub_products, self.sign_parity, self.mixed
        )
    }
}

/// `N = S_P ∧ D_{I_1} ∧ … ∧ D_{I_ℓ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MixedDecomposition {
    pub sub_product: usize,
    pub parity_sets: Vec<Vec<usize>>,
}

/// An enumerated `N(G)`, elements sorted by subgroup order (a linear
/// extension of inclusion), so the bottom is index 0 and the top is last.
#[derive(Debug, Clone)]
pub struct Lattice {
    spec: TowerGroupSpec,
    elements: Vec<LatticeElement>,
    index: HashMap<AdmissibleTriple, usize>,
    census: Census,
}

impl Lattice {
    pub fn enumerate(spec: &TowerGroupSpec) -> Result<Self, LatticeError> {
        Self::enumerate_bounded(spec, DEFAULT_MAX_SLOTS)
    }

    /// Every admissible triple exactly once: for each `J`, every admissible
    /// `H ≤ F_2^J`, then every choice of chain positions off `J`.
    pub fn enumerate_bounded(
        spec: &TowerGroupSpec,
        max_slots: usize,
    ) -> Result<Self, LatticeError> {
        let t = spec.slot_count();
        if t > max_slots || t > gf2::MAX_WIDTH {
            return Err(LatticeError::TooLarge {
                slots: t,
                max: max_slots,
            });
        }
        let by_width: Vec<Vec<Subspace>> = (0..=t)
            .map(admissible_sign_subspaces)
            .collect::<Result<_, _>>()?;
        let mut elements = Vec::new();
        for j_mask in 0u64..1 << t {
            let coupled: Vec<usize> = (0..t).filter(|&s| j_mask >> s & 1 == 1).collect();
            let free: Vec<usize> = (0..t).filter(|&s| j_mask >> s & 1 == 0).collect();
            let choices: Vec<&[ChainPosition]> = free
                .iter()
                .map(|&s| chain(spec.slots()[s].degree))
                .collect::<Result<_, _>>()?;
            let combos = choices.iter().fold(vec![Vec::new()], |acc, options| {
                acc.into_iter()
                    .flat_map(|prefix: Vec<ChainPosition>| {
                        options.iter().map(move |&p| {
                            let mut next = prefix.clone();
                            next.push(p);
                            next
                        })
                    })
                    .collect()
            });
            for h in &by_width[coupled.len()] {
                for combo in &combos {
                    let positions = free.iter().copied().zip(combo.iter().copied()).collect();
                    let triple = AdmissibleTriple::new(spec, &coupled, &positions, h.clone())?;
                    elements.push(LatticeElement::from_triple(spec, triple)?);
                }
            }
        }
        elements.sort_by(|a, b| {
            a.order
                .cmp(&b.order)
                .then_with(|| a.triple.coupled_mask().cmp(&b.triple.coupled_mask()))
                .then_with(|| a.triple.cmp(&b.triple))
        });
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.triple.clone(), i))
            .collect();
        let mut census = Census {
            sub_products: 0,
            sign_parity: 0,
            mixed: 0,
            total: elements.len(),
        };
        for e in &elements {
            match e.family {
                Family::SubProduct => census.sub_products += 1,
                Family::SignParity { .. } => census.sign_parity += 1,
                Family::Mixed => census.mixed += 1,
            }
        }
        Ok(Lattice {
            spec: spec.clone(),
            elements,
            index,
            census,
        })
    }

    pub fn spec(&self) -> &TowerGroupSpec {
        &self.spec
    }

    pub fn elements(&self) -> &[LatticeElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn census(&self) -> Census {
        self.census
    }

    pub fn get(&self, i: usize) -> Result<&LatticeElement, LatticeError> {
        self.elements.get(i).ok_or(LatticeError::UnknownElement(i))
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn find(&self, triple: &AdmissibleTriple) -> Option<usize> {
        self.index.get(triple).copied()
    }

    pub fn find_profile(&self, profile: &Profile) -> Result<usize, LatticeError> {
        let triple = profile.to_triple(&self.spec)?;
        self.find(&triple)
            .ok_or_else(|| LatticeError::InvalidProfile("not an element of this lattice".into()))
    }

    /// Inclusion via profiles.
    pub fn leq(&self, i: usize, j: usize) -> Result<bool, LatticeError> {
        Ok(self.get(i)?.profile.leq(&self.get(j)?.profile))
    }

    /// Inclusion via triples; must always agree with [`Lattice::leq`].
    pub fn leq_by_triples(&self, i: usize, j: usize) -> Result<bool, LatticeError> {
        leq_by_triples(&self.get(i)?.triple, &self.get(j)?.triple)
    }

    pub fn meet(&self, i: usize, j: usize) -> Result<usize, LatticeError> {
        let p = self.get(i)?.profile.meet(&self.get(j)?.profile)?;
        self.find_profile(&p)
    }

    pub fn join(&self, i: usize, j: usize) -> Result<usize, LatticeError> {
        let p = self.get(i)?.profile.join(&self.get(j)?.profile)?;
        self.find_profile(&p)
    }

    pub fn sub_product(&self, positions: &[ChainPosition]) -> Result<usize, LatticeError> {
        let t = AdmissibleTriple::sub_product(&self.spec, positions)?;
        self.find(&t)
            .ok_or(LatticeError::InvalidProfile("missing sub-product".into()))
    }

    pub fn sign_parity(&self, slots: &[usize]) -> Result<usize, LatticeError> {
        let t = AdmissibleTriple::sign_parity(&self.spec, slots)?;
        self.find(&t).ok_or(LatticeError::InvalidProfile(
            "missing sign-parity element".into(),
        ))
    }

    /// Writes a mixed element as a meet of a sub-product and sign-parity
    /// elements, one per basis vector of `H^⊥`. The basis (hence the list of
    /// index sets) depends on the echelon form; only the meet is canonical.
    pub fn decompose_mixed(&self, i: usize) -> Result<MixedDecomposition, LatticeError> {
        let e = self.get(i)?;
        if e.family != Family::Mixed {
            return Err(LatticeError::NotMixed);
        }
        let t = &e.triple;
        let envelope: Vec<ChainPosition> = (0..self.spec.slot_count())
            .map(|s| t.effective(s))
            .collect();
        let sub_product = self.sub_product(&envelope)?;
        let parity_sets: Vec<Vec<usize>> = t
            .signs()
            .annihilator()
            .raw_basis()
            .iter()
            .map(|&f| {
                t.coupled()
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| f >> c & 1 == 1)
                    .map(|(_, &s)| s)
                    .collect()
            })
            .collect();
        let mut acc = sub_product;
        for set in &parity_sets {
            acc = self.meet(acc, self.sign_parity(set)?)?;
        }
        debug_assert_eq!(acc, i, "decomposition must reproduce the element");
        if acc != i {
            return Err(LatticeError::InvalidProfile(
                "decomposition does not reproduce element".into(),
            ));
        }
        Ok(MixedDecomposition {
            sub_product,
            parity_sets,
        })
    }

    /// Inclusion matrix and covering relation as an abstract lattice.
    pub fn to_abstract(&self) -> AbstractLattice {
        let n = self.len();
        AbstractLattice::from_leq(n, |i, j| {
            self.elements[i].profile.leq(&self.elements[j].profile)
        })
    }

    pub fn export(&self, hasse: &[(usize, usize)]) -> LatticeExport {
        LatticeExport {
            spec: self.spec.to_string(),
            slots: self
                .spec
                .slots()
                .iter()
                .map(|s| SlotExport {
                    index: s.index,
                    degree: s.degree,
                    copy: s.copy,
                    class: s.class,
                })
                .collect(),
            census: self.census,
            elements: self
                .elements
                .iter()
                .enumerate()
                .map(|(index, e)| ElementExport {
                    index,
                    triple: TripleExport::from(&e.triple),
                    family: e.family.clone(),
                    order: e.order,
                })
                .collect(),
            hasse: hasse.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotExport {
    pub index: usize,
    pub degree: u32,
    pub copy: u32,
    pub class: crate::group_spec::SlotClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleExport {
    #[serde(rename = "J")]
    pub coupled: Vec<usize>,
    #[serde(rename = "P")]
    pub positions: BTreeMap<String, ChainPosition>,
    #[serde(rename = "H")]
    pub signs: Vec<String>,
}

impl From<&AdmissibleTriple> for TripleExport {
    fn from(t: &AdmissibleTriple) -> Self {
        TripleExport {
            coupled: t.coupled.clone(),
            positions: t
                .positions()
                .into_iter()
                .map(|(s, p)| (s.to_string(), p))
                .collect(),
            signs: t.signs.to_bit_strings(),
        }
    }
}

impl TripleExport {
    pub fn to_triple(&self, spec: &TowerGroupSpec) -> Result<AdmissibleTriple, LatticeError> {
        let positions = self
            .positions
            .iter()
            .map(|(k, &p)| {
                k.parse::<usize>()
                    .map(|s| (s, p))
                    .map_err(|_| LatticeError::InvalidProfile(format!("bad slot id {k:?}")))
            })
            .collect::<Result<_, _>>()?;
        let signs = Subspace::from_bit_strings(self.coupled.len(), &self.signs)?;
        AdmissibleTriple::new(spec, &self.coupled, &positions, signs)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementExport {
    pub index: usize,
    pub triple: TripleExport,
    pub family: Family,
    pub order: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeExport {
    pub spec: String,
    pub slots: Vec<SlotExport>,
    pub census: Census,
    pub elements: Vec<ElementExport>,
    pub hasse: Vec<[usize; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use ChainPosition::*;

    fn spec(s: &str) -> TowerGroupSpec {
        TowerGroupSpec::parse(s).unwrap()
    }

    fn h(width: usize, rows: &[&str]) -> Subspace {
        Subspace::from_bit_strings(
            width,
            &rows.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn mixed_type1(g: &TowerGroupSpec, third: ChainPosition) -> AdmissibleTriple {
        AdmissibleTriple::new(g, &[0, 1], &BTreeMap::from([(2, third)]), h(2, &["11"])).unwrap()
    }

    fn all_same_sign(g: &TowerGroupSpec) -> AdmissibleTriple {
        AdmissibleTriple::new(g, &[0, 1, 2], &BTreeMap::new(), h(3, &["111"])).unwrap()
    }

    #[test]
    fn validate_sign_parity() {
        let g = spec("S3^3");
        let t = AdmissibleTriple::new(&g, &[0, 1], &BTreeMap::from([(2, Full)]), h(2, &["11"]))
            .unwrap();
        assert_eq!(t.family(), Family::SignParity { slots: vec![0, 1] });
        assert_eq!(t.order(&g).unwrap(), 108);
    }

    #[test]
    fn single_coupled_slot_is_never_admissible() {
        let g = spec("S3^2");
        let p = BTreeMap::from([(1, Full)]);
        assert_eq!(
            AdmissibleTriple::new(&g, &[0], &p, Subspace::zero(1).unwrap()),
            Err(LatticeError::DeadCoordinate(0))
        );
        assert_eq!(
            AdmissibleTriple::new(&g, &[0], &p, Subspace::full(1).unwrap()),
            Err(LatticeError::UnitVectorInH(0))
        );
    }

    #[test]
    fn empty_coupling_is_a_sub_product() {
        let g = spec("S4*S3");
        // Slot 0 is the S_3 factor.
        let t = AdmissibleTriple::sub_product(&g, &[V, Alt]);
        assert!(matches!(
            t,
            Err(LatticeError::IllegalChainPosition { slot: 0, .. })
        ));
        let t = AdmissibleTriple::sub_product(&g, &[Alt, V]).unwrap();
        assert_eq!(t.family(), Family::SubProduct);
        assert_eq!(t.order(&g).unwrap(), 4 * 3);
    }

    #[test]
    fn shape_errors() {
        let g = spec("S3^2");
        assert_eq!(
            AdmissibleTriple::new(&g, &[0, 1], &BTreeMap::from([(1, Full)]), h(2, &["11"])),
            Err(LatticeError::UnexpectedPosition(1))
        );
        assert_eq!(
            AdmissibleTriple::new(
                &g,
                &[],
                &BTreeMap::from([(1, Full)]),
                Subspace::zero(0).unwrap()
            ),
            Err(LatticeError::MissingPosition(0))
        );
        assert_eq!(
            AdmissibleTriple::new(&g, &[1, 0], &BTreeMap::new(), h(2, &["11"])),
            Err(LatticeError::UnsortedCoupling)
        );
    }

    #[test]
    fn profiles_of_examples() {
        let g2 = spec("S3^2");
        let p = AdmissibleTriple::sub_product(&g2, &[Full, Alt])
            .unwrap()
            .to_profile();
        assert_eq!(p.effective(), &[Full, Alt]);
        assert_eq!(p.image(), &h(2, &["10"]));

        let d = AdmissibleTriple::sign_parity(&g2, &[0, 1])
            .unwrap()
            .to_profile();
        assert_eq!(d.effective(), &[Full, Full]);
        assert_eq!(d.image(), &h(2, &["11"]));

        let g3 = spec("S3^3");
        let e = all_same_sign(&g3).to_profile();
        assert_eq!(e.effective(), &[Full, Full, Full]);
        assert_eq!(e.image(), &h(3, &["111"]));
    }

    #[test]
    fn profile_back_to_triple() {
        let g2 = spec("S3^2");
        let d = Profile::new(&g2, vec![Full, Full], h(2, &["11"])).unwrap();
        let t = d.to_triple(&g2).unwrap();
        assert_eq!(t.coupled(), &[0, 1]);
        assert_eq!(t.signs(), &h(2, &["11"]));

        let s = Profile::new(&g2, vec![Full, Alt], h(2, &["10"])).unwrap();
        let t = s.to_triple(&g2).unwrap();
        assert!(t.coupled().is_empty());
        assert_eq!(t.positions(), BTreeMap::from([(0, Full), (1, Alt)]));

        let g3 = spec("S3^3");
        let m = Profile::new(&g3, vec![Full, Full, Alt], h(3, &["110"])).unwrap();
        let t = m.to_triple(&g3).unwrap();
        assert_eq!(t, mixed_type1(&g3, Alt));
        assert_eq!(t.family(), Family::Mixed);
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        let g2 = spec("S3^2");
        assert!(matches!(
            Profile::new(&g2, vec![Full, Alt], h(2, &["11"])),
            Err(LatticeError::InvalidProfile(_))
        ));
        assert!(matches!(
            Profile::new(&g2, vec![Full, Full], h(2, &["10"])),
            Err(LatticeError::InvalidProfile(_))
        ));
    }

    #[test]
    fn orders_from_the_s3_cubed_examples() {
        let g = spec("S3^3");
        assert_eq!(mixed_type1(&g, Alt).order(&g).unwrap(), 54);
        assert_eq!(mixed_type1(&g, Triv).order(&g).unwrap(), 18);
        assert_eq!(all_same_sign(&g).order(&g).unwrap(), 54);
        for g in [spec("S3^3"), spec("S5*S4*S3")] {
            let d = AdmissibleTriple::sign_parity(&g, &[0, 2]).unwrap();
            assert_eq!(d.order(&g).unwrap() * 2, g.group_order().unwrap());
        }
    }

    #[test]
    fn census_s3_cubed() {
        let lat = Lattice::enumerate(&spec("S3^3")).unwrap();
        let c = lat.census();
        assert_eq!(
            (c.total, c.sub_products, c.sign_parity, c.mixed),
            (38, 27, 4, 7)
        );
        assert_eq!(
            c.to_string(),
            "total 38: sub-products 27, sign-parity 4, mixed 7"
        );
    }

    #[test]
    fn census_small_cases() {
        let c = Lattice::enumerate(&spec("S3^2")).unwrap().census();
        assert_eq!(
            (c.total, c.sub_products, c.sign_parity, c.mixed),
            (10, 9, 1, 0)
        );
        let c = Lattice::enumerate(&spec("S4")).unwrap().census();
        assert_eq!(
            (c.total, c.sub_products, c.sign_parity, c.mixed),
            (4, 4, 0, 0)
        );
        let lat = Lattice::enumerate(&TowerGroupSpec::trivial()).unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.elements()[0].family, Family::SubProduct);
        assert_eq!(lat.elements()[0].order, 1);
    }

    #[test]
    fn enumeration_bound() {
        assert_eq!(
            Lattice::enumerate_bounded(&spec("S3^3"), 2).unwrap_err(),
            LatticeError::TooLarge { slots: 3, max: 2 }
        );
    }

    #[test]
    fn inclusion_examples() {
        let g = spec("S3^2");
        let lat = Lattice::enumerate(&g).unwrap();
        let alt_alt = lat.sub_product(&[Alt, Alt]).unwrap();
        let d = lat.sign_parity(&[0, 1]).unwrap();
        assert!(lat.leq(alt_alt, d).unwrap());
        assert!(lat.leq_by_triples(alt_alt, d).unwrap());

        let g = spec("S3^3");
        let lat = Lattice::enumerate(&g).unwrap();
        let d12 = lat.sign_parity(&[0, 1]).unwrap();
        let d13 = lat.sign_parity(&[0, 2]).unwrap();
        let d23 = lat.sign_parity(&[1, 2]).unwrap();
        assert!(!lat.leq(d12, d13).unwrap() && !lat.leq(d13, d12).unwrap());
        let e = lat.find(&all_same_sign(&g)).unwrap();
        assert!(lat.leq(e, d12).unwrap());
        assert!(lat.leq_by_triples(e, d12).unwrap());
        assert_eq!(lat.meet(d12, d23).unwrap(), e);
        assert_eq!(lat.get(e).unwrap().order, 54);
        assert_eq!(lat.join(d12, d13).unwrap(), lat.top());
    }

    #[test]
    fn meet_of_parity_and_sub_product() {
        let lat = Lattice::enumerate(&spec("S3^2")).unwrap();
        let d = lat.sign_parity(&[0, 1]).unwrap();
        let full_alt = lat.sub_product(&[Full, Alt]).unwrap();
        assert_eq!(
            lat.meet(d, full_alt).unwrap(),
            lat.sub_product(&[Alt, Alt]).unwrap()
        );
    }

    #[test]
    fn decompositions() {
        let g = spec("S3^3");
        let lat = Lattice::enumerate(&g).unwrap();
        let e = lat.find(&all_same_sign(&g)).unwrap();
        let dec = lat.decompose_mixed(e).unwrap();
        assert_eq!(dec.sub_product, lat.top());
        assert_eq!(dec.parity_sets.len(), 2);
        assert!(dec.parity_sets.iter().all(|s| s.len() >= 2));

        let m = lat.find(&mixed_type1(&g, Alt)).unwrap();
        let dec = lat.decompose_mixed(m).unwrap();
        assert_eq!(
            dec.sub_product,
            lat.sub_product(&[Full, Full, Alt]).unwrap()
        );
        assert_eq!(dec.parity_sets, vec![vec![0, 1]]);

        let d = lat.sign_parity(&[0, 1]).unwrap();
        assert_eq!(lat.decompose_mixed(d), Err(LatticeError::NotMixed));
    }

    #[test]
    fn export_round_trips_triples() {
        let g = spec("S4*S3^2");
        let lat = Lattice::enumerate(&g).unwrap();
        let export = lat.export(&[]);
        let json = serde_json::to_string(&export).unwrap();
        let back: LatticeExport = serde_json::from_str(&json).unwrap();
        for (e, x) in lat.elements().iter().zip(&back.elements) {
            assert_eq!(x.triple.to_triple(&g).unwrap(), e.triple);
            assert_eq!(x.order, e.order);
        }
    }
}
