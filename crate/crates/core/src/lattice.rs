//! Ground-set structures: posets, ideals, bounded integer lattice points and
//! linear extensions.
//!
//! Element sets are `u64` bitmasks, so a poset holds at most [`MAX_ELEMENTS`]
//! elements. The strict up- and down-sets of every element are computed once
//! when the poset is built.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LatmaxError, Result};

pub const MAX_ELEMENTS: usize = 64;

/// Default cap on the number of points any enumeration may visit.
pub const DEFAULT_ENUM_LIMIT: u64 = 1 << 24;

/// Environment variable overriding [`DEFAULT_ENUM_LIMIT`].
pub const ENUM_LIMIT_VAR: &str = "LATMAX_ENUM_LIMIT";

/// The enumeration cap in effect: `LATMAX_ENUM_LIMIT` if set and parseable,
/// otherwise [`DEFAULT_ENUM_LIMIT`].
pub fn enumeration_limit() -> u64 {
    std::env::var(ENUM_LIMIT_VAR).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ENUM_LIMIT)
}

pub type Mask = u64;

#[inline]
pub fn bit(e: usize) -> Mask {
    1u64 << e
}

pub fn mask_of(ids: impl IntoIterator<Item = usize>) -> Mask {
    ids.into_iter().fold(0, |m, e| m | bit(e))
}

pub fn mask_elements(mask: Mask) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(e)
        }
    })
}

fn full_mask(size: usize) -> Mask {
    if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

/// On-disk form of a poset: `{ "elements": m, "covers": [[l,u],...], "labels": [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub elements: usize,
    #[serde(default)]
    pub covers: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A finite poset on element ids `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PosetSpec", into = "PosetSpec")]
pub struct Poset {
    size: usize,
    relations: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
    below: Vec<Mask>,
    above: Vec<Mask>,
    upper_covers: Vec<Mask>,
}

impl Poset {
    /// Builds a poset from `(lower, upper)` pairs. The pairs need not be a
    /// transitive reduction; the closure is derived here.
    pub fn new(size: usize, relations: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if size > MAX_ELEMENTS {
            return Err(LatmaxError::TooManyElements { size, max: MAX_ELEMENTS });
        }
        let relations: Vec<(usize, usize)> = relations.into_iter().collect();
        let mut direct_below = vec![0 as Mask; size];
        for &(l, u) in &relations {
            for id in [l, u] {
                if id >= size {
                    return Err(LatmaxError::ElementOutOfRange { id, size });
                }
            }
            if l == u {
                return Err(LatmaxError::Cycle(l));
            }
            direct_below[u] |= bit(l);
        }

        // Kahn order, then closure along it.
        let mut indegree: Vec<u32> = direct_below.iter().map(|m| m.count_ones()).collect();
        let mut ready: BTreeSet<usize> = (0..size).filter(|&e| indegree[e] == 0).collect();
        let mut topo = Vec::with_capacity(size);
        while let Some(e) = ready.pop_first() {
            topo.push(e);
            for u in 0..size {
                if direct_below[u] & bit(e) != 0 {
                    indegree[u] -= 1;
                    if indegree[u] == 0 {
                        ready.insert(u);
                    }
                }
            }
        }
        if topo.len() < size {
            let stuck = (0..size).find(|e| !topo.contains(e)).unwrap_or(0);
            return Err(LatmaxError::Cycle(stuck));
        }
        let mut below = vec![0 as Mask; size];
        for &e in &topo {
            let mut acc = direct_below[e];
            for d in mask_elements(direct_below[e]) {
                acc |= below[d];
            }
            below[e] = acc;
        }
        let mut above = vec![0 as Mask; size];
        for (e, &down) in below.iter().enumerate() {
            for d in mask_elements(down) {
                above[d] |= bit(e);
            }
        }
        let mut upper_covers = vec![0 as Mask; size];
        for x in 0..size {
            for y in mask_elements(above[x]) {
                if below[y] & above[x] == 0 {
                    upper_covers[x] |= bit(y);
                }
            }
        }
        Ok(Poset { size, relations, labels: None, below, above, upper_covers })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(invalid(format!("{} labels given for {} elements", labels.len(), self.size)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn antichain(size: usize) -> Result<Self> {
        Poset::new(size, [])
    }

    pub fn chain(size: usize) -> Result<Self> {
        Poset::new(size, (1..size).map(|e| (e - 1, e)))
    }

    /// `chains` disjoint chains of `length` elements each. Chain `i` uses ids
    /// `i*length .. (i+1)*length`, lowest first.
    pub fn disjoint_chains(chains: usize, length: usize) -> Result<Self> {
        let rel = (0..chains).flat_map(move |i| (1..length).map(move |t| (i * length + t - 1, i * length + t)));
        Poset::new(chains * length, rel)
    }

    /// Random poset: each pair `i < j` of a hidden order is related with
    /// probability `edge_prob`, then ids are shuffled.
    pub fn random(size: usize, edge_prob: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(invalid(format!("edge probability {edge_prob} outside [0,1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ids: Vec<usize> = (0..size).collect();
        ids.shuffle(&mut rng);
        let mut rel = Vec::new();
        for i in 0..size {
            for j in i + 1..size {
                if rng.gen_bool(edge_prob) {
                    rel.push((ids[i], ids[j]));
                }
            }
        }
        let closure = Poset::new(size, rel)?;
        // keep only covers so the stored relation list stays small
        let covers = closure.cover_pairs();
        Poset::new(size, covers)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn full(&self) -> Mask {
        full_mask(self.size)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, e: usize) -> String {
        match &self.labels {
            Some(l) => l[e].clone(),
            None => format!("x{}", e + 1),
        }
    }

    /// The relation pairs the poset was built from.
    pub fn relations(&self) -> &[(usize, usize)] {
        &self.relations
    }

    /// Cover pairs `(x, y)` with `y` covering `x`, sorted.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> =
            (0..self.size).flat_map(|x| mask_elements(self.upper_covers[x]).map(move |y| (x, y))).collect();
        out.sort_unstable();
        out
    }

    /// Elements strictly below `e`.
    pub fn below(&self, e: usize) -> Mask {
        self.below[e]
    }

    /// Elements strictly above `e`.
    pub fn above(&self, e: usize) -> Mask {
        self.above[e]
    }

    /// Elements covering `e`.
    pub fn upper_covers(&self, e: usize) -> Mask {
        self.upper_covers[e]
    }

    /// `a ⪯ b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.below[b] & bit(a) != 0
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn is_ideal(&self, set: Mask) -> bool {
        set & !self.full() == 0 && mask_elements(set).all(|e| self.below[e] & !set == 0)
    }

    /// Checks downward closure of an explicit id list.
    pub fn check_ideal(&self, ids: &[usize]) -> Result<bool> {
        for &id in ids {
            if id >= self.size {
                return Err(LatmaxError::ElementOutOfRange { id, size: self.size });
            }
        }
        Ok(self.is_ideal(mask_of(ids.iter().copied())))
    }

    /// `e ∉ set` and `set + e` is an ideal (given that `set` is one).
    pub fn addable(&self, set: Mask, e: usize) -> bool {
        set & bit(e) == 0 && self.below[e] & !set == 0
    }

    /// `e ∈ set` and `set - e` is an ideal (given that `set` is one).
    pub fn removable(&self, set: Mask, e: usize) -> bool {
        set & bit(e) != 0 && self.above[e] & set == 0
    }

    pub fn ideal(&self, ids: &[usize]) -> Result<Ideal> {
        for &id in ids {
            if id >= self.size {
                return Err(LatmaxError::ElementOutOfRange { id, size: self.size });
            }
        }
        self.ideal_from_mask(mask_of(ids.iter().copied()))
    }

    pub fn ideal_from_mask(&self, mask: Mask) -> Result<Ideal> {
        if mask & !self.full() != 0 {
            return Err(LatmaxError::ElementOutOfRange { id: 63 - mask.leading_zeros() as usize, size: self.size });
        }
        for e in mask_elements(mask) {
            let missing = self.below[e] & !mask;
            if missing != 0 {
                return Err(LatmaxError::NotAnIdeal { element: e, missing: missing.trailing_zeros() as usize });
            }
        }
        Ok(Ideal { universe: self.size, mask })
    }

    pub fn empty_ideal(&self) -> Ideal {
        Ideal { universe: self.size, mask: 0 }
    }

    pub fn full_ideal(&self) -> Ideal {
        Ideal { universe: self.size, mask: self.full() }
    }

    /// The smallest ideal containing `set`.
    pub fn down_closure(&self, set: Mask) -> Mask {
        mask_elements(set).fold(set, |acc, e| acc | self.below[e])
    }

    /// Whether this poset is exactly the `chains × length` disjoint-chain
    /// poset produced by [`Poset::disjoint_chains`].
    pub fn is_disjoint_chains(&self, chains: usize, length: usize) -> bool {
        if self.size != chains * length {
            return false;
        }
        (0..self.size).all(|e| {
            let (i, t) = (e / length, e % length);
            self.below[e] == mask_of((0..t).map(|s| i * length + s))
        })
    }
}

impl TryFrom<PosetSpec> for Poset {
    type Error = LatmaxError;

    fn try_from(spec: PosetSpec) -> Result<Self> {
        let p = Poset::new(spec.elements, spec.covers.iter().map(|c| (c[0], c[1])))?;
        match spec.labels {
            Some(l) => p.with_labels(l),
            None => Ok(p),
        }
    }
}

impl From<Poset> for PosetSpec {
    fn from(p: Poset) -> Self {
        PosetSpec { elements: p.size, covers: p.relations.iter().map(|&(l, u)| [l, u]).collect(), labels: p.labels }
    }
}

/// A downward-closed element set of a poset with `universe` elements.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    universe: usize,
    mask: Mask,
}

impl Ideal {
    pub fn mask(&self) -> Mask {
        self.mask
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        e < 64 && self.mask & bit(e) != 0
    }

    pub fn elements(&self) -> Vec<usize> {
        mask_elements(self.mask).collect()
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.mask & !other.mask == 0
    }

    /// Unchecked constructor for code that already maintains ideality.
    pub(crate) fn from_raw(universe: usize, mask: Mask) -> Self {
        Ideal { universe, mask }
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{:?}", self.elements())
    }
}

#[derive(Serialize, Deserialize)]
struct IdealRepr {
    universe: usize,
    elements: Vec<usize>,
}

impl Serialize for Ideal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IdealRepr { universe: self.universe, elements: self.elements() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ideal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IdealRepr::deserialize(d)?;
        if r.universe > MAX_ELEMENTS || r.elements.iter().any(|&e| e >= r.universe) {
            return Err(serde::de::Error::custom("ideal element out of range"));
        }
        Ok(Ideal { universe: r.universe, mask: mask_of(r.elements) })
    }
}

/// A vector in `{0..bound}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    bound: u32,
    coords: Vec<u32>,
}

impl LatticePoint {
    pub fn new(coords: Vec<u32>, bound: u32) -> Result<Self> {
        if let Some(i) = coords.iter().position(|&c| c > bound) {
            return Err(invalid(format!("coordinate {i} = {} exceeds bound {bound}", coords[i])));
        }
        Ok(LatticePoint { bound, coords })
    }

    pub fn bottom(n: usize, bound: u32) -> Self {
        LatticePoint { bound, coords: vec![0; n] }
    }

    pub fn top(n: usize, bound: u32) -> Self {
        LatticePoint { bound, coords: vec![bound; n] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> u32 {
        self.coords[i]
    }

    /// `(self | x_k = value)`.
    pub fn with(&self, k: usize, value: u32) -> Self {
        debug_assert!(value <= self.bound);
        let mut coords = self.coords.clone();
        coords[k] = value;
        LatticePoint { bound: self.bound, coords }
    }

    pub fn set(&mut self, k: usize, value: u32) {
        debug_assert!(value <= self.bound);
        self.coords[k] = value;
    }

    pub fn sum(&self) -> u64 {
        self.coords.iter().map(|&c| c as u64).sum()
    }

    /// Entrywise `self <= other`.
    pub fn le(&self, other: &LatticePoint) -> bool {
        self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b)
    }

    /// Mixed-radix index with the first coordinate least significant.
    pub fn index(&self) -> usize {
        let radix = self.bound as usize + 1;
        self.coords.iter().rev().fold(0, |acc, &c| acc * radix + c as usize)
    }

    pub fn from_index(mut index: usize, n: usize, bound: u32) -> Self {
        let radix = bound as usize + 1;
        let coords = (0..n)
            .map(|_| {
                let c = (index % radix) as u32;
                index /= radix;
                c
            })
            .collect();
        LatticePoint { bound, coords }
    }

    fn same_domain(&self, other: &LatticePoint) -> Result<()> {
        if self.dim() != other.dim() || self.bound != other.bound {
            return Err(LatmaxError::DomainMismatch(format!(
                "[{}]^{} vs [{}]^{}",
                self.bound,
                self.dim(),
                other.bound,
                other.dim()
            )));
        }
        Ok(())
    }
}

/// Number of points of `[bound]^n`, or `None` on overflow.
pub fn lattice_size(n: usize, bound: u32) -> Option<u64> {
    (bound as u64 + 1).checked_pow(n as u32)
}

/// Visits every point of `[bound]^n` in mixed-radix order.
pub fn for_each_lattice_point(n: usize, bound: u32, limit: u64, mut f: impl FnMut(&LatticePoint)) -> Result<u64> {
    let total = lattice_size(n, bound)
        .filter(|&t| t <= limit)
        .ok_or_else(|| LatmaxError::DomainTooLarge { region: format!("[{bound}]^{n}"), limit })?;
    let mut x = LatticePoint::bottom(n, bound);
    for _ in 0..total {
        f(&x);
        for c in x.coords.iter_mut() {
            if *c < bound {
                *c += 1;
                break;
            }
            *c = 0;
        }
    }
    Ok(total)
}

/// A point of either domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Lattice(LatticePoint),
    Ideal(Ideal),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Lattice(x) => write!(f, "{:?}", x.coords()),
            Point::Ideal(s) => write!(f, "{:?}", s.elements()),
        }
    }
}

/// Meet and join in either lattice.
pub trait MeetJoin: Sized {
    fn meet_join(&self, other: &Self) -> Result<(Self, Self)>;
}

impl MeetJoin for LatticePoint {
    fn meet_join(&self, other: &Self) -> Result<(Self, Self)> {
        self.same_domain(other)?;
        let (lo, hi) = self.coords.iter().zip(&other.coords).map(|(&a, &b)| (a.min(b), a.max(b))).unzip();
        Ok((LatticePoint { bound: self.bound, coords: lo }, LatticePoint { bound: self.bound, coords: hi }))
    }
}

impl MeetJoin for Ideal {
    fn meet_join(&self, other: &Self) -> Result<(Self, Self)> {
        if self.universe != other.universe {
            return Err(LatmaxError::DomainMismatch(format!(
                "ideals over {} and {} elements",
                self.universe, other.universe
            )));
        }
        Ok((
            Ideal { universe: self.universe, mask: self.mask & other.mask },
            Ideal { universe: self.universe, mask: self.mask | other.mask },
        ))
    }
}

impl MeetJoin for Point {
    fn meet_join(&self, other: &Self) -> Result<(Self, Self)> {
        match (self, other) {
            (Point::Lattice(a), Point::Lattice(b)) => {
                a.meet_join(b).map(|(m, j)| (Point::Lattice(m), Point::Lattice(j)))
            }
            (Point::Ideal(a), Point::Ideal(b)) => a.meet_join(b).map(|(m, j)| (Point::Ideal(m), Point::Ideal(j))),
            _ => Err(LatmaxError::DomainMismatch("lattice point vs ideal".into())),
        }
    }
}

pub fn meet_join<T: MeetJoin>(a: &T, b: &T) -> Result<(T, T)> {
    a.meet_join(b)
}

/// A total order of the elements compatible with the poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearExtension {
    order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Smallest available id first.
    Id,
    /// Uniformly random available element, from a seeded generator.
    Seeded(u64),
}

impl LinearExtension {
    /// Validates `order` against `poset`.
    pub fn new(poset: &Poset, order: Vec<usize>) -> Result<Self> {
        if order.len() != poset.size() {
            return Err(invalid(format!("extension has {} entries, poset has {}", order.len(), poset.size())));
        }
        let mut seen: Mask = 0;
        for &e in &order {
            if e >= poset.size() {
                return Err(LatmaxError::ElementOutOfRange { id: e, size: poset.size() });
            }
            if seen & bit(e) != 0 {
                return Err(invalid(format!("element {e} repeated in extension")));
            }
            if poset.below(e) & !seen != 0 {
                return Err(invalid(format!("element {e} placed before one of its predecessors")));
            }
            seen |= bit(e);
        }
        Ok(LinearExtension { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of every element, indexed by element id.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &e) in self.order.iter().enumerate() {
            pos[e] = p;
        }
        pos
    }

    /// Scans every cover relation.
    pub fn is_valid_for(&self, poset: &Poset) -> bool {
        if self.order.len() != poset.size() {
            return false;
        }
        let pos = self.positions();
        poset.cover_pairs().iter().all(|&(x, y)| pos[x] < pos[y])
    }
}

pub fn linear_extension(poset: &Poset, tie_break: TieBreak) -> LinearExtension {
    let mut rng = match tie_break {
        TieBreak::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        TieBreak::Id => None,
    };
    let mut placed: Mask = 0;
    let mut order = Vec::with_capacity(poset.size());
    while order.len() < poset.size() {
        let available: Vec<usize> = (0..poset.size()).filter(|&e| poset.addable(placed, e)).collect();
        let e = match rng.as_mut() {
            Some(r) => available[r.gen_range(0..available.len())],
            None => available[0],
        };
        placed |= bit(e);
        order.push(e);
    }
    LinearExtension { order }
}

/// Visits every ideal exactly once, depth-first over the id-order linear
/// extension (exclude branch before include branch). Fails as soon as more
/// than `limit` ideals have been produced.
pub fn for_each_ideal(poset: &Poset, limit: u64, mut f: impl FnMut(Ideal)) -> Result<u64> {
    let ext = linear_extension(poset, TieBreak::Id);
    let mut count = 0u64;
    fn dfs(
        poset: &Poset,
        order: &[usize],
        depth: usize,
        current: Mask,
        count: &mut u64,
        limit: u64,
        f: &mut dyn FnMut(Ideal),
    ) -> Result<()> {
        if depth == order.len() {
            *count += 1;
            if *count > limit {
                return Err(LatmaxError::DomainTooLarge { region: "ideal lattice".into(), limit });
            }
            f(Ideal { universe: poset.size(), mask: current });
            return Ok(());
        }
        let e = order[depth];
        dfs(poset, order, depth + 1, current, count, limit, f)?;
        if poset.below(e) & !current == 0 {
            dfs(poset, order, depth + 1, current | bit(e), count, limit, f)?;
        }
        Ok(())
    }
    dfs(poset, ext.order(), 0, 0, &mut count, limit, &mut f)?;
    Ok(count)
}

pub fn enumerate_ideals(poset: &Poset, limit: u64) -> Result<Vec<Ideal>> {
    let mut out = Vec::new();
    for_each_ideal(poset, limit, |s| out.push(s))?;
    Ok(out)
}

/// Maps `x` to the ideal of `n` disjoint chains of length `C` holding the
/// lowest `x_i` elements of chain `i`.
pub fn lattice_point_to_ideal(x: &LatticePoint) -> Result<Ideal> {
    let (n, c) = (x.dim(), x.bound() as usize);
    if n * c > MAX_ELEMENTS {
        return Err(LatmaxError::TooManyElements { size: n * c, max: MAX_ELEMENTS });
    }
    let mask = x.coords().iter().enumerate().fold(0, |m, (i, &k)| m | mask_of((0..k as usize).map(|t| i * c + t)));
    Ok(Ideal { universe: n * c, mask })
}

/// Inverse of [`lattice_point_to_ideal`]; `poset` must be the `n × C`
/// disjoint-chain poset.
pub fn ideal_to_lattice_point(poset: &Poset, ideal: &Ideal, n: usize, bound: u32) -> Result<LatticePoint> {
    let c = bound as usize;
    if !poset.is_disjoint_chains(n, c) {
        return Err(LatmaxError::DomainMismatch(format!("poset is not {n} disjoint chains of length {c}")));
    }
    if ideal.universe() != poset.size() || !poset.is_ideal(ideal.mask()) {
        return Err(LatmaxError::DomainMismatch("ideal does not belong to the chain poset".into()));
    }
    let coords = (0..n)
        .map(|i| {
            let chain = mask_of((0..c).map(|t| i * c + t));
            (ideal.mask() & chain).count_ones()
        })
        .collect();
    LatticePoint::new(coords, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig5() -> Poset {
        Poset::new(7, [(0, 1), (0, 2), (3, 4), (5, 6)]).unwrap()
    }

    #[test]
    fn meet_join_examples() {
        let a = LatticePoint::new(vec![2, 0, 1], 2).unwrap();
        let b = LatticePoint::new(vec![0, 2, 1], 2).unwrap();
        let (m, j) = meet_join(&a, &b).unwrap();
        assert_eq!(m.coords(), &[0, 0, 1]);
        assert_eq!(j.coords(), &[2, 2, 1]);
        assert_eq!(meet_join(&a, &a).unwrap(), (a.clone(), a.clone()));

        let p = fig5();
        let s1 = p.ideal(&[0]).unwrap();
        let s2 = p.ideal(&[0, 2]).unwrap();
        let (m, j) = meet_join(&s1, &s2).unwrap();
        assert_eq!((m, j), (s1, s2));
    }

    #[test]
    fn meet_join_domain_mismatch() {
        let a = LatticePoint::new(vec![1, 1], 2).unwrap();
        let b = LatticePoint::new(vec![1, 1], 3).unwrap();
        assert!(matches!(meet_join(&a, &b), Err(LatmaxError::DomainMismatch(_))));
        let c = LatticePoint::new(vec![1, 1, 1], 2).unwrap();
        assert!(meet_join(&a, &c).is_err());
        let i = Poset::antichain(2).unwrap().empty_ideal();
        let k = Poset::antichain(3).unwrap().empty_ideal();
        assert!(meet_join(&i, &k).is_err());
        assert!(meet_join(&Point::Lattice(a), &Point::Ideal(i)).is_err());
    }

    #[test]
    fn is_ideal_examples() {
        let p = fig5();
        assert!(p.check_ideal(&[0, 2]).unwrap());
        assert!(!p.check_ideal(&[2]).unwrap());
        assert!(p.check_ideal(&[]).unwrap());
        assert!(p.check_ideal(&(0..7).collect::<Vec<_>>()).unwrap());
        assert!(matches!(p.check_ideal(&[7]), Err(LatmaxError::ElementOutOfRange { id: 7, size: 7 })));
        assert!(matches!(p.ideal(&[2]), Err(LatmaxError::NotAnIdeal { element: 2, missing: 0 })));
    }

    #[test]
    fn poset_rejects_cycles_and_oversize() {
        assert!(matches!(Poset::new(3, [(0, 1), (1, 2), (2, 0)]), Err(LatmaxError::Cycle(_))));
        assert!(matches!(Poset::new(2, [(1, 1)]), Err(LatmaxError::Cycle(1))));
        assert!(matches!(Poset::new(65, []), Err(LatmaxError::TooManyElements { .. })));
        assert!(Poset::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn transitive_edges_are_not_covers() {
        let p = Poset::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(p.cover_pairs(), vec![(0, 1), (1, 2)]);
        assert!(p.leq(0, 2));
        assert!(!p.leq(2, 0));
    }

    #[test]
    fn linear_extension_examples() {
        let anti = Poset::antichain(3).unwrap();
        assert_eq!(linear_extension(&anti, TieBreak::Id).order(), &[0, 1, 2]);
        let chain = Poset::chain(3).unwrap();
        assert_eq!(linear_extension(&chain, TieBreak::Id).order(), &[0, 1, 2]);
        assert_eq!(linear_extension(&chain, TieBreak::Seeded(17)).order(), &[0, 1, 2]);
        let p = fig5();
        let ext = linear_extension(&p, TieBreak::Id);
        assert_eq!(ext.order(), &[0, 1, 2, 3, 4, 5, 6]);
        assert!(ext.is_valid_for(&p));
        let seeded = linear_extension(&p, TieBreak::Seeded(3));
        assert!(seeded.is_valid_for(&p));
        assert_eq!(seeded, linear_extension(&p, TieBreak::Seeded(3)));
        assert!(LinearExtension::new(&p, vec![1, 0, 2, 3, 4, 5, 6]).is_err());
    }

    #[test]
    fn ideal_counts() {
        assert_eq!(enumerate_ideals(&Poset::chain(3).unwrap(), 100).unwrap().len(), 4);
        assert_eq!(enumerate_ideals(&Poset::antichain(5).unwrap(), 100).unwrap().len(), 32);
        assert_eq!(enumerate_ideals(&Poset::disjoint_chains(3, 2).unwrap(), 100).unwrap().len(), 27);
        assert_eq!(enumerate_ideals(&Poset::antichain(0).unwrap(), 100).unwrap().len(), 1);
        let err = enumerate_ideals(&Poset::antichain(5).unwrap(), 31).unwrap_err();
        assert!(matches!(err, LatmaxError::DomainTooLarge { limit: 31, .. }));
    }

    #[test]
    fn chain_correspondence() {
        let zero = LatticePoint::bottom(3, 2);
        assert!(lattice_point_to_ideal(&zero).unwrap().is_empty());
        let top = LatticePoint::top(3, 2);
        assert_eq!(lattice_point_to_ideal(&top).unwrap().len(), 6);
        let x = LatticePoint::new(vec![2, 0, 1], 2).unwrap();
        let s = lattice_point_to_ideal(&x).unwrap();
        assert_eq!(s.len(), 3);
        let p = Poset::disjoint_chains(3, 2).unwrap();
        assert!(p.is_ideal(s.mask()));
        assert_eq!(ideal_to_lattice_point(&p, &s, 3, 2).unwrap(), x);
        let not_chains = Poset::antichain(6).unwrap();
        assert!(ideal_to_lattice_point(&not_chains, &not_chains.empty_ideal(), 3, 2).is_err());
    }

    #[test]
    fn mixed_radix_roundtrip() {
        for idx in 0..27 {
            assert_eq!(LatticePoint::from_index(idx, 3, 2).index(), idx);
        }
        assert_eq!(LatticePoint::new(vec![1, 0, 0], 2).unwrap().index(), 1);
        assert_eq!(LatticePoint::new(vec![0, 1, 0], 2).unwrap().index(), 3);
    }

    #[test]
    fn poset_json_roundtrip() {
        let p = fig5().with_labels((1..=7).map(|i| format!("x{i}")).collect()).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"elements\":7"));
        let back: Poset = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Poset>(r#"{"elements":2,"covers":[[0,1],[1,0]]}"#).is_err());
    }

    #[test]
    fn random_posets_are_valid() {
        for seed in 0..20 {
            let p = Poset::random(9, 0.3, seed).unwrap();
            let ext = linear_extension(&p, TieBreak::Id);
            assert!(ext.is_valid_for(&p));
            assert_eq!(p, Poset::random(9, 0.3, seed).unwrap());
        }
    }
}
