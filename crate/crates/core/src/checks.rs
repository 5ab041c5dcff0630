//! Exhaustive property checkers.
//!
//! Every checker tabulates the oracle over its whole domain once and then
//! scans the defining inequalities. A failing report carries a witness that
//! can be re-evaluated through the oracle with [`Witness::confirm`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::constraint::IndependenceOracle;
use crate::error::{LatmaxError, Result};
use crate::lattice::{
    bit, enumerate_ideals, enumeration_limit, for_each_lattice_point, mask_elements, Ideal, LatticePoint, Mask, Point,
    Poset,
};
use crate::numeric::Comparison;
use crate::oracle::{Domain, ValueOracle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub checks_performed: u64,
}

impl PropertyReport {
    fn new(property: &str) -> Self {
        PropertyReport { property: property.into(), holds: true, witness: None, checks_performed: 0 }
    }

    fn fail(&mut self, w: Witness) {
        if self.holds {
            self.holds = false;
            self.witness = Some(w);
        }
    }

    fn absorb(&mut self, other: PropertyReport) {
        self.checks_performed += other.checks_performed;
        if let Some(w) = other.witness {
            self.fail(w);
        }
    }
}

/// A violating tuple together with the values observed when it was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f(x) + f(y) < f(x ∨ y) + f(x ∧ y)`.
    Submodular { x: Point, y: Point, values: [f64; 4] },
    /// `f(x+χ_i) - f(x) < f(x+2χ_i) - f(x+χ_i)`.
    Concavity { x: LatticePoint, coord: usize, values: [f64; 3] },
    /// `f(x+χ_i) - f(x) < f(y+χ_i) - f(y)` for `x ≤ y`.
    DrLattice { x: LatticePoint, y: LatticePoint, coord: usize, values: [f64; 4] },
    /// `f(S+x) - f(S) < f(T+y) - f(T)` for `S ⊆ T`, `x ⪯ y`.
    DrIdeal { s: Ideal, t: Ideal, x: usize, y: usize, values: [f64; 4] },
    /// `f(upper) < f(lower)` along a cover step.
    Monotone { lower: Point, upper: Point, values: [f64; 2] },
    /// No independent ideal at all.
    EmptyFamily,
    /// `independent` is in the family but its sub-ideal `subset` is not.
    Heredity { independent: Ideal, subset: Ideal },
    /// No `e ∈ larger \ smaller` extends `smaller` inside the family.
    Exchange { smaller: Ideal, larger: Ideal },
}

impl Witness {
    /// Re-evaluates a function witness through `oracle`; true iff the
    /// violation is reproduced under `cmp`.
    pub fn confirm(&self, oracle: &ValueOracle, cmp: Comparison) -> Result<bool> {
        let f = |p: &Point| oracle.eval(p);
        match self {
            Witness::Submodular { x, y, .. } => {
                let (meet, join) = crate::lattice::meet_join(x, y)?;
                Ok(!cmp.sums_ge(&[f(x)?, f(y)?], &[f(&join)?, f(&meet)?]))
            }
            Witness::Concavity { x, coord, .. } => {
                let x1 = x.with(*coord, x.get(*coord) + 1);
                let x2 = x.with(*coord, x.get(*coord) + 2);
                let (v0, v1, v2) = (oracle.eval_lattice(x)?, oracle.eval_lattice(&x1)?, oracle.eval_lattice(&x2)?);
                Ok(!cmp.gains_ge(v1, v0, v2, v1))
            }
            Witness::DrLattice { x, y, coord, .. } => {
                if !x.le(y) {
                    return Ok(false);
                }
                let xi = x.with(*coord, x.get(*coord) + 1);
                let yi = y.with(*coord, y.get(*coord) + 1);
                Ok(!cmp.gains_ge(
                    oracle.eval_lattice(&xi)?,
                    oracle.eval_lattice(x)?,
                    oracle.eval_lattice(&yi)?,
                    oracle.eval_lattice(y)?,
                ))
            }
            Witness::DrIdeal { s, t, x, y, .. } => {
                let poset = oracle.poset().ok_or_else(|| LatmaxError::DomainMismatch("ideal witness".into()))?;
                if !s.is_subset(t) || !poset.leq(*x, *y) || !poset.addable(s.mask(), *x) || !poset.addable(t.mask(), *y)
                {
                    return Ok(false);
                }
                let sx = poset.ideal_from_mask(s.mask() | bit(*x))?;
                let ty = poset.ideal_from_mask(t.mask() | bit(*y))?;
                Ok(!cmp.gains_ge(
                    oracle.eval_ideal(&sx)?,
                    oracle.eval_ideal(s)?,
                    oracle.eval_ideal(&ty)?,
                    oracle.eval_ideal(t)?,
                ))
            }
            Witness::Monotone { lower, upper, .. } => Ok(!cmp.sums_ge(&[f(upper)?], &[f(lower)?])),
            Witness::EmptyFamily | Witness::Heredity { .. } | Witness::Exchange { .. } => {
                Err(LatmaxError::InvalidParameter("matroid witnesses are confirmed with confirm_family".into()))
            }
        }
    }

    /// Re-checks a matroid-axiom witness against the independence test.
    pub fn confirm_family(&self, poset: &Poset, family: &dyn IndependenceOracle) -> Result<bool> {
        match self {
            Witness::EmptyFamily => {
                let mut any = false;
                for s in enumerate_ideals(poset, enumeration_limit())? {
                    any |= family.is_independent(s.mask());
                }
                Ok(!any)
            }
            Witness::Heredity { independent, subset } => Ok(poset.is_ideal(subset.mask())
                && subset.is_subset(independent)
                && family.is_independent(independent.mask())
                && !family.is_independent(subset.mask())),
            Witness::Exchange { smaller, larger } => Ok(family.is_independent(smaller.mask())
                && family.is_independent(larger.mask())
                && smaller.len() < larger.len()
                && mask_elements(larger.mask() & !smaller.mask())
                    .all(|e| !(poset.addable(smaller.mask(), e) && family.is_independent(smaller.mask() | bit(e))))),
            _ => Err(LatmaxError::InvalidParameter("function witnesses are confirmed with confirm".into())),
        }
    }
}

/// Submodularity over the integer lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubmodularMode {
    /// `f(x+χ_i) + f(x+χ_j) ≥ f(x) + f(x+χ_i+χ_j)` for every `x`, `i ≠ j`
    /// (on ideals: every pair of distinct addable elements).
    #[default]
    LocalSquares,
    /// Every unordered pair of domain points.
    AllPairs,
}

/// How DR is verified on the integer lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrLatticeMode {
    /// Submodular plus coordinate-wise concave.
    #[default]
    Characterization,
    /// The defining inequality for every `x ≤ y` and coordinate.
    Definition,
}

/// How DR is verified on a distributive lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrDlMode {
    /// Two cover-local families: `f(S+x)-f(S) ≥ f(S+z+x)-f(S+z)` for
    /// distinct addable `x, z`, and `f(S+x)-f(S) ≥ f(S+x+y)-f(S+x)` for `y`
    /// covering `x`. Every instance of the definition is a telescoping chain
    /// of these steps.
    #[default]
    Local,
    /// Every `S ⊆ T`, `x ⪯ y` with `S+x`, `T+y` ideals.
    Exhaustive,
}

struct LatticeTable {
    n: usize,
    bound: u32,
    values: Vec<f64>,
}

impl LatticeTable {
    fn build(oracle: &ValueOracle) -> Result<Self> {
        let (n, bound) = oracle
            .lattice_dims()
            .ok_or_else(|| LatmaxError::DomainMismatch("integer-lattice checker on a distributive lattice".into()))?;
        let mut values = Vec::new();
        let mut err = None;
        for_each_lattice_point(n, bound, enumeration_limit(), |x| match oracle.eval_lattice(x) {
            Ok(v) => values.push(v),
            Err(e) => err = Some(e),
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(LatticeTable { n, bound, values })
    }

    fn radix_pow(&self, i: usize) -> usize {
        (self.bound as usize + 1).pow(i as u32)
    }

    fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..self.values.len()).map(|idx| LatticePoint::from_index(idx, self.n, self.bound))
    }
}

struct IdealTable {
    ideals: Vec<Ideal>,
    values: HashMap<Mask, f64>,
}

impl IdealTable {
    fn build(oracle: &ValueOracle) -> Result<Self> {
        let poset = oracle
            .poset()
            .ok_or_else(|| LatmaxError::DomainMismatch("distributive-lattice checker on an integer lattice".into()))?;
        let ideals = enumerate_ideals(poset, enumeration_limit())?;
        let mut values = HashMap::with_capacity(ideals.len());
        for s in &ideals {
            values.insert(s.mask(), oracle.eval_ideal(s)?);
        }
        Ok(IdealTable { ideals, values })
    }

    fn get(&self, m: Mask) -> f64 {
        self.values[&m]
    }
}

pub fn check_submodular(oracle: &ValueOracle, mode: SubmodularMode, cmp: Comparison) -> Result<PropertyReport> {
    match oracle.domain() {
        Domain::IntLattice { .. } => check_submodular_lattice(oracle, mode, cmp),
        Domain::Dl { poset } => check_submodular_dl(oracle, poset, mode, cmp),
    }
}

fn check_submodular_lattice(oracle: &ValueOracle, mode: SubmodularMode, cmp: Comparison) -> Result<PropertyReport> {
    let t = LatticeTable::build(oracle)?;
    let mut rep = PropertyReport::new("submodular");
    match mode {
        SubmodularMode::LocalSquares => {
            for x in t.points() {
                let base = x.index();
                for i in 0..t.n {
                    if x.get(i) == t.bound {
                        continue;
                    }
                    for j in i + 1..t.n {
                        if x.get(j) == t.bound {
                            continue;
                        }
                        let (pi, pj) = (t.radix_pow(i), t.radix_pow(j));
                        let (vi, vj, v0, vij) =
                            (t.values[base + pi], t.values[base + pj], t.values[base], t.values[base + pi + pj]);
                        rep.checks_performed += 1;
                        if !cmp.sums_ge(&[vi, vj], &[vij, v0]) {
                            rep.fail(Witness::Submodular {
                                x: Point::Lattice(x.with(i, x.get(i) + 1)),
                                y: Point::Lattice(x.with(j, x.get(j) + 1)),
                                values: [vi, vj, vij, v0],
                            });
                            return Ok(rep);
                        }
                    }
                }
            }
        }
        SubmodularMode::AllPairs => {
            let len = t.values.len() as u64;
            if len.saturating_mul(len) > enumeration_limit() {
                return Err(LatmaxError::DomainTooLarge {
                    region: "pairs of lattice points".into(),
                    limit: enumeration_limit(),
                });
            }
            let pts: Vec<LatticePoint> = t.points().collect();
            for (a, x) in pts.iter().enumerate() {
                for y in &pts[a + 1..] {
                    let (meet, join) = crate::lattice::meet_join(x, y)?;
                    let (vx, vy, vj, vm) =
                        (t.values[x.index()], t.values[y.index()], t.values[join.index()], t.values[meet.index()]);
                    rep.checks_performed += 1;
                    if !cmp.sums_ge(&[vx, vy], &[vj, vm]) {
                        rep.fail(Witness::Submodular {
                            x: Point::Lattice(x.clone()),
                            y: Point::Lattice(y.clone()),
                            values: [vx, vy, vj, vm],
                        });
                        return Ok(rep);
                    }
                }
            }
        }
    }
    Ok(rep)
}

fn check_submodular_dl(
    oracle: &ValueOracle,
    poset: &Poset,
    mode: SubmodularMode,
    cmp: Comparison,
) -> Result<PropertyReport> {
    let t = IdealTable::build(oracle)?;
    let mut rep = PropertyReport::new("submodular");
    let m = poset.size();
    match mode {
        SubmodularMode::LocalSquares => {
            for s in &t.ideals {
                let addable: Vec<usize> = (0..m).filter(|&e| poset.addable(s.mask(), e)).collect();
                for (a, &x) in addable.iter().enumerate() {
                    for &z in &addable[a + 1..] {
                        let sx = s.mask() | bit(x);
                        let sz = s.mask() | bit(z);
                        let vals = [t.get(sx), t.get(sz), t.get(sx | sz), t.get(s.mask())];
                        rep.checks_performed += 1;
                        if !cmp.sums_ge(&vals[..2], &vals[2..]) {
                            rep.fail(Witness::Submodular {
                                x: Point::Ideal(Ideal::from_raw(m, sx)),
                                y: Point::Ideal(Ideal::from_raw(m, sz)),
                                values: vals,
                            });
                            return Ok(rep);
                        }
                    }
                }
            }
        }
        SubmodularMode::AllPairs => {
            let len = t.ideals.len() as u64;
            if len.saturating_mul(len) > enumeration_limit() {
                return Err(LatmaxError::DomainTooLarge {
                    region: "pairs of ideals".into(),
                    limit: enumeration_limit(),
                });
            }
            for (a, s) in t.ideals.iter().enumerate() {
                for u in &t.ideals[a + 1..] {
                    let vals =
                        [t.get(s.mask()), t.get(u.mask()), t.get(s.mask() | u.mask()), t.get(s.mask() & u.mask())];
                    rep.checks_performed += 1;
                    if !cmp.sums_ge(&vals[..2], &vals[2..]) {
                        rep.fail(Witness::Submodular { x: Point::Ideal(*s), y: Point::Ideal(*u), values: vals });
                        return Ok(rep);
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Coordinate-wise concavity on the integer lattice.
pub fn check_coordinate_concave(oracle: &ValueOracle, cmp: Comparison) -> Result<PropertyReport> {
    let t = LatticeTable::build(oracle)?;
    let mut rep = PropertyReport::new("coordinate_concave");
    for x in t.points() {
        for i in 0..t.n {
            if x.get(i) + 2 > t.bound {
                continue;
            }
            let p = t.radix_pow(i);
            let base = x.index();
            let vals = [t.values[base], t.values[base + p], t.values[base + 2 * p]];
            rep.checks_performed += 1;
            if !cmp.gains_ge(vals[1], vals[0], vals[2], vals[1]) {
                rep.fail(Witness::Concavity { x, coord: i, values: vals });
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}

pub fn check_dr_int_lattice(oracle: &ValueOracle, mode: DrLatticeMode, cmp: Comparison) -> Result<PropertyReport> {
    let mut rep = PropertyReport::new("dr_submodular");
    match mode {
        DrLatticeMode::Characterization => {
            rep.absorb(check_submodular_lattice(oracle, SubmodularMode::LocalSquares, cmp)?);
            if rep.holds {
                rep.absorb(check_coordinate_concave(oracle, cmp)?);
            }
        }
        DrLatticeMode::Definition => {
            let t = LatticeTable::build(oracle)?;
            let len = t.values.len() as u64;
            if len.saturating_mul(len) > enumeration_limit() {
                return Err(LatmaxError::DomainTooLarge {
                    region: "pairs of lattice points".into(),
                    limit: enumeration_limit(),
                });
            }
            let pts: Vec<LatticePoint> = t.points().collect();
            for x in &pts {
                for y in pts.iter().filter(|y| x.le(y)) {
                    for i in 0..t.n {
                        if y.get(i) == t.bound {
                            continue;
                        }
                        let p = t.radix_pow(i);
                        let (xi, yi) = (x.index(), y.index());
                        let vals = [t.values[xi], t.values[xi + p], t.values[yi], t.values[yi + p]];
                        rep.checks_performed += 1;
                        if !cmp.gains_ge(vals[1], vals[0], vals[3], vals[2]) {
                            rep.fail(Witness::DrLattice { x: x.clone(), y: y.clone(), coord: i, values: vals });
                            return Ok(rep);
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

pub fn check_dr_dl(oracle: &ValueOracle, mode: DrDlMode, cmp: Comparison) -> Result<PropertyReport> {
    let t = IdealTable::build(oracle)?;
    let poset = oracle.poset().expect("table built from a poset oracle");
    let m = poset.size();
    let mut rep = PropertyReport::new("dr_submodular");
    let witness = |s: Mask, tm: Mask, x: usize, y: usize, vals: [f64; 4]| Witness::DrIdeal {
        s: Ideal::from_raw(m, s),
        t: Ideal::from_raw(m, tm),
        x,
        y,
        values: vals,
    };
    match mode {
        DrDlMode::Local => {
            for s in &t.ideals {
                let sm = s.mask();
                let addable: Vec<usize> = (0..m).filter(|&e| poset.addable(sm, e)).collect();
                for &x in &addable {
                    let (v_s, v_sx) = (t.get(sm), t.get(sm | bit(x)));
                    // grow the base by another addable element
                    for &z in addable.iter().filter(|&&z| z != x) {
                        let sz = sm | bit(z);
                        let vals = [v_s, v_sx, t.get(sz), t.get(sz | bit(x))];
                        rep.checks_performed += 1;
                        if !cmp.gains_ge(vals[1], vals[0], vals[3], vals[2]) {
                            rep.fail(witness(sm, sz, x, x, vals));
                            return Ok(rep);
                        }
                    }
                    // move up along a cover of x
                    let sx = sm | bit(x);
                    for y in mask_elements(poset.upper_covers(x)).filter(|&y| poset.addable(sx, y)) {
                        let vals = [v_s, v_sx, v_sx, t.get(sx | bit(y))];
                        rep.checks_performed += 1;
                        if !cmp.gains_ge(vals[1], vals[0], vals[3], vals[2]) {
                            rep.fail(witness(sm, sx, x, y, vals));
                            return Ok(rep);
                        }
                    }
                }
            }
        }
        DrDlMode::Exhaustive => {
            let len = t.ideals.len() as u64;
            if len.saturating_mul(len) > enumeration_limit() {
                return Err(LatmaxError::DomainTooLarge {
                    region: "pairs of ideals".into(),
                    limit: enumeration_limit(),
                });
            }
            // For every T and x: the largest gain f(T+y)-f(T) over addable y ⪰ x.
            let mut best: Vec<Vec<Option<(f64, usize)>>> = Vec::with_capacity(t.ideals.len());
            for tt in &t.ideals {
                let tm = tt.mask();
                let vt = t.get(tm);
                let gains: Vec<Option<f64>> =
                    (0..m).map(|y| poset.addable(tm, y).then(|| t.get(tm | bit(y)) - vt)).collect();
                let row = (0..m)
                    .map(|x| {
                        (0..m).filter(|&y| poset.leq(x, y)).filter_map(|y| gains[y].map(|g| (g, y))).fold(
                            None,
                            |acc: Option<(f64, usize)>, (g, y)| match acc {
                                Some((bg, _)) if bg >= g => acc,
                                _ => Some((g, y)),
                            },
                        )
                    })
                    .collect();
                best.push(row);
            }
            for (ti, tt) in t.ideals.iter().enumerate() {
                let tm = tt.mask();
                for s in t.ideals.iter().filter(|s| s.is_subset(tt)) {
                    let sm = s.mask();
                    for x in (0..m).filter(|&x| poset.addable(sm, x)) {
                        let Some((_, y)) = best[ti][x] else { continue };
                        let vals = [t.get(sm), t.get(sm | bit(x)), t.get(tm), t.get(tm | bit(y))];
                        rep.checks_performed += 1;
                        if !cmp.gains_ge(vals[1], vals[0], vals[3], vals[2]) {
                            rep.fail(witness(sm, tm, x, y, vals));
                            return Ok(rep);
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// DR on whichever domain the oracle lives on, with default modes.
pub fn check_dr(oracle: &ValueOracle, cmp: Comparison) -> Result<PropertyReport> {
    match oracle.domain() {
        Domain::IntLattice { .. } => check_dr_int_lattice(oracle, DrLatticeMode::Characterization, cmp),
        Domain::Dl { .. } => check_dr_dl(oracle, DrDlMode::Local, cmp),
    }
}

/// `f` non-decreasing along every cover step of the domain.
pub fn check_monotone(oracle: &ValueOracle, cmp: Comparison) -> Result<PropertyReport> {
    let mut rep = PropertyReport::new("monotone");
    match oracle.domain() {
        Domain::IntLattice { .. } => {
            let t = LatticeTable::build(oracle)?;
            for x in t.points() {
                for i in 0..t.n {
                    if x.get(i) == t.bound {
                        continue;
                    }
                    let (lo, hi) = (t.values[x.index()], t.values[x.index() + t.radix_pow(i)]);
                    rep.checks_performed += 1;
                    if !cmp.sums_ge(&[hi], &[lo]) {
                        let upper = Point::Lattice(x.with(i, x.get(i) + 1));
                        rep.fail(Witness::Monotone { lower: Point::Lattice(x), upper, values: [lo, hi] });
                        return Ok(rep);
                    }
                }
            }
        }
        Domain::Dl { poset } => {
            let t = IdealTable::build(oracle)?;
            let m = poset.size();
            for s in &t.ideals {
                for e in (0..m).filter(|&e| poset.addable(s.mask(), e)) {
                    let (lo, hi) = (t.get(s.mask()), t.get(s.mask() | bit(e)));
                    rep.checks_performed += 1;
                    if !cmp.sums_ge(&[hi], &[lo]) {
                        let upper = Point::Ideal(Ideal::from_raw(m, s.mask() | bit(e)));
                        rep.fail(Witness::Monotone { lower: Point::Ideal(*s), upper, values: [lo, hi] });
                        return Ok(rep);
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Nonemptiness, heredity (M1) and exchange (M2) of the independent ideals.
///
/// Heredity is checked on one-element removals; every sub-ideal of `Y` is
/// reached from `Y` by a sequence of such removals.
pub fn check_poset_matroid(poset: &Poset, family: &dyn IndependenceOracle) -> Result<PropertyReport> {
    let mut rep = PropertyReport::new("poset_matroid");
    let ideals = enumerate_ideals(poset, enumeration_limit())?;
    let independent: Vec<Ideal> = ideals.into_iter().filter(|s| family.is_independent(s.mask())).collect();
    rep.checks_performed += 1;
    if independent.is_empty() {
        rep.fail(Witness::EmptyFamily);
        return Ok(rep);
    }
    let m = poset.size();
    for y in &independent {
        for e in (0..m).filter(|&e| poset.removable(y.mask(), e)) {
            rep.checks_performed += 1;
            let x = y.mask() & !bit(e);
            if !family.is_independent(x) {
                rep.fail(Witness::Heredity { independent: *y, subset: Ideal::from_raw(m, x) });
                return Ok(rep);
            }
        }
    }
    let len = independent.len() as u64;
    if len.saturating_mul(len) > enumeration_limit() {
        return Err(LatmaxError::DomainTooLarge {
            region: "pairs of independent ideals".into(),
            limit: enumeration_limit(),
        });
    }
    for x in &independent {
        for y in independent.iter().filter(|y| y.len() > x.len()) {
            rep.checks_performed += 1;
            let extends = mask_elements(y.mask() & !x.mask())
                .any(|e| poset.addable(x.mask(), e) && family.is_independent(x.mask() | bit(e)));
            if !extends {
                rep.fail(Witness::Exchange { smaller: *x, larger: *y });
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}
