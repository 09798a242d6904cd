//! Finite groups as complete multiplication tables, with subgroups,
//! normal closures, quotients, homomorphisms and the subgroup lattice.
//!
//! Element 0 is always the identity. Groups are immutable after
//! construction and shared behind `Arc`; every operation is a pure
//! function, safe to call concurrently.

mod builtins;
mod lattice;

pub use builtins::{Builtin, GroupFile, GroupSpec, HomFile, HomImages};
pub use lattice::{all_normal_subgroups, all_subgroups, conjugacy_classes};

use std::sync::Arc;

use crate::{Error, Result};

/// Hard cap on materialized table size. Large enough for the symmetric
/// group on five letters; membership bitsets fit one `u128`.
pub const MAX_ORDER: usize = 128;

/// Exhaustive associativity validation up to this order; sampled above.
const ASSOC_EXHAUSTIVE: usize = 64;

/// Default bound for full subgroup-lattice enumeration.
pub const DEFAULT_LATTICE_BOUND: usize = 64;

pub type GroupRef = Arc<FiniteGroup>;
pub type Elem = u16;

/// A finite group given by its complete multiplication table.
#[derive(Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    /// Row-major: `table[i * order + j]` holds the index of `i * j`.
    table: Vec<Elem>,
    inverse: Vec<Elem>,
    names: Vec<String>,
    generators: Vec<Elem>,
    element_orders: Vec<u32>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}
impl Eq for FiniteGroup {}

/// Cache key: the table pins the group up to relabeling-free identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupKey(pub Vec<Elem>);

impl FiniteGroup {
    /// Validates a raw table and builds the group.
    pub fn from_table(
        name: impl Into<String>,
        names: Vec<String>,
        table: Vec<Elem>,
        generators: Option<Vec<Elem>>,
    ) -> Result<GroupRef> {
        let name = name.into();
        let order = names.len();
        if order == 0 {
            return Err(Error::InvalidInput("a group needs at least the identity".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::cap(format!("group {name:?}"), order, "table", MAX_ORDER));
        }
        if table.len() != order * order {
            return Err(Error::InvalidInput(format!(
                "table of {} entries for order {order}",
                table.len()
            )));
        }
        for (i, &x) in table.iter().enumerate() {
            if (x as usize) >= order {
                return Err(Error::InvalidInput(format!(
                    "table entry {x} out of range at row {}, column {}",
                    i / order,
                    i % order
                )));
            }
        }
        // Latin square: each row and each column is a permutation.
        for i in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for j in 0..order {
                let r = table[i * order + j] as usize;
                if seen_row[r] {
                    return Err(Error::InvalidInput(format!(
                        "row {i} is not a permutation: value {r} duplicated at column {j}"
                    )));
                }
                seen_row[r] = true;
                let c = table[j * order + i] as usize;
                if seen_col[c] {
                    return Err(Error::InvalidInput(format!(
                        "column {i} is not a permutation: value {c} duplicated at row {j}"
                    )));
                }
                seen_col[c] = true;
            }
        }
        // Identity at index 0.
        for j in 0..order {
            if table[j] as usize != j || table[j * order] as usize != j {
                return Err(Error::InvalidInput(format!(
                    "element 0 is not a two-sided identity (fails at element {j})"
                )));
            }
        }
        // Two-sided inverses.
        let mut inverse = vec![0 as Elem; order];
        for i in 0..order {
            let Some(j) = (0..order).find(|&j| table[i * order + j] == 0) else {
                return Err(Error::InvalidInput(format!("element {i} has no right inverse")));
            };
            if table[j * order + i] != 0 {
                return Err(Error::InvalidInput(format!(
                    "element {i} has right inverse {j} which is not a left inverse"
                )));
            }
            inverse[i] = j as Elem;
        }
        // Associativity, exhaustive at small orders and sampled above.
        let mul = |a: usize, b: usize| table[a * order + b] as usize;
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                return Err(Error::InvalidInput(format!(
                    "associativity fails at ({a}, {b}, {c})"
                )));
            }
            Ok(())
        };
        if order <= ASSOC_EXHAUSTIVE {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            // Deterministic sample: a fixed-seed SplitMix64 stream.
            let mut state = 0x9E3779B97F4A7C15u64;
            let mut next = move || {
                state = state.wrapping_add(0x9E3779B97F4A7C15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
                (z ^ (z >> 31)) as usize
            };
            for _ in 0..200_000 {
                check(next() % order, next() % order, next() % order)?;
            }
        }
        let mut element_orders = vec![0u32; order];
        for i in 0..order {
            let mut x = i;
            let mut k = 1u32;
            while x != 0 {
                x = mul(x, i);
                k += 1;
            }
            element_orders[i] = k;
        }
        let generators = match generators {
            Some(g) => {
                for &x in &g {
                    if (x as usize) >= order {
                        return Err(Error::InvalidInput(format!("generator {x} out of range")));
                    }
                }
                g
            }
            None => greedy_generators(order, &table),
        };
        let group = FiniteGroup {
            name,
            order,
            table,
            inverse,
            names,
            generators,
            element_orders,
        };
        // Marked generators must generate.
        let closure = group.closure_of(group.generators.iter().map(|&g| g as usize));
        if closure.count_ones() as usize != order {
            return Err(Error::InvalidInput(format!(
                "generators of {:?} only generate {} of {} elements",
                group.name,
                closure.count_ones(),
                order
            )));
        }
        Ok(Arc::new(group))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverse[a as usize]
    }

    pub fn conjugate(&self, g: Elem, x: Elem) -> Elem {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        let mut acc = 0 as Elem;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn element_order(&self, a: Elem) -> u32 {
        self.element_orders[a as usize]
    }

    pub fn element_name(&self, a: Elem) -> &str {
        &self.names[a as usize]
    }

    pub fn element_names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn key(&self) -> GroupKey {
        GroupKey(self.table.clone())
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order as Elem).map(|i| i)
    }

    pub fn exponent(&self) -> u64 {
        self.element_orders
            .iter()
            .fold(1u64, |acc, &k| num_integer::lcm(acc, k as u64))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order)
            .all(|a| (a..self.order).all(|b| self.table[a * self.order + b] == self.table[b * self.order + a]))
    }

    fn full_mask(&self) -> u128 {
        mask(self.order)
    }

    /// Product-closure of a seed set (as bitset) within the group.
    fn closure_of(&self, seed: impl IntoIterator<Item = usize>) -> u128 {
        let mut members: u128 = 1; // identity
        let mut queue: Vec<Elem> = vec![0];
        let mut gens: Vec<Elem> = Vec::new();
        for s in seed {
            let s = s as Elem;
            if members & (1 << s) == 0 {
                members |= 1 << s;
                queue.push(s);
            }
            gens.push(s);
        }
        // Close under products with the seed on both sides; in a finite
        // group this also closes inverses.
        let mut idx = 0;
        while idx < queue.len() {
            let x = queue[idx];
            idx += 1;
            for &g in &gens {
                for y in [self.mul(x, g), self.mul(g, x)] {
                    if members & (1 << y) == 0 {
                        members |= 1 << y;
                        queue.push(y);
                    }
                }
            }
        }
        members
    }
}

fn mask(order: usize) -> u128 {
    if order >= 128 {
        u128::MAX
    } else {
        (1u128 << order) - 1
    }
}

/// Greedy deterministic generating set for table-defined groups.
fn greedy_generators(order: usize, table: &[Elem]) -> Vec<Elem> {
    let mut gens: Vec<Elem> = Vec::new();
    let mut closed: u128 = 1;
    let mut queue: Vec<usize> = vec![0];
    let close = |gens: &[Elem], closed: &mut u128, queue: &mut Vec<usize>| {
        let mut idx = 0;
        while idx < queue.len() {
            let x = queue[idx];
            idx += 1;
            for &g in gens {
                let y = table[x * order + g as usize] as usize;
                if *closed & (1 << y) == 0 {
                    *closed |= 1 << y;
                    queue.push(y);
                }
            }
        }
    };
    for cand in 1..order {
        if closed & (1 << cand) != 0 {
            continue;
        }
        gens.push(cand as Elem);
        closed |= 1 << cand;
        queue.push(cand);
        close(&gens, &mut closed, &mut queue);
        if closed.count_ones() as usize == order {
            break;
        }
    }
    gens
}

/// A subgroup of a fixed parent group: a membership bitset plus the
/// generating witnesses it was built from.
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: GroupRef,
    members: u128,
    witnesses: Vec<Elem>,
}

impl Subgroup {
    pub fn parent(&self) -> &GroupRef {
        &self.parent
    }

    pub fn members_mask(&self) -> u128 {
        self.members
    }

    pub fn witnesses(&self) -> &[Elem] {
        &self.witnesses
    }

    pub fn order(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.members & (1 << x) != 0
    }

    pub fn elements(&self) -> Vec<Elem> {
        (0..self.parent.order() as Elem)
            .filter(|&x| self.contains(x))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.members == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members == self.parent.full_mask()
    }

    pub fn same_members(&self, other: &Subgroup) -> bool {
        self.members == other.members
    }

    pub fn subset_of(&self, other: &Subgroup) -> bool {
        self.members & !other.members == 0
    }

    pub fn is_normal(&self) -> bool {
        self.normality_witness().is_none()
    }

    /// A conjugation escaping the subgroup, if any: `(g, n, g n g^-1)`.
    pub fn normality_witness(&self) -> Option<(Elem, Elem, Elem)> {
        let g = &self.parent;
        for x in self.elements() {
            for c in g.elements() {
                let y = g.conjugate(c, x);
                if !self.contains(y) {
                    return Some((c, x, y));
                }
            }
        }
        None
    }

    /// Index-sorted display of members by name.
    pub fn describe(&self) -> String {
        let names: Vec<&str> = self
            .elements()
            .iter()
            .map(|&x| self.parent.element_name(x))
            .collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Lexicographic bitset comparison: membership compared from element 0
    /// upward, the set owning the first differing element sorting first.
    pub fn cmp_lex(&self, other: &Subgroup) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.order().cmp(&other.order()) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = self.members ^ other.members;
        if diff == 0 {
            return Ordering::Equal;
        }
        let first = diff.trailing_zeros();
        if self.members & (1 << first) != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

/// Smallest subgroup containing the seed; witnesses are the seed itself.
pub fn subgroup_closure(g: &GroupRef, seed: &[Elem]) -> Result<Subgroup> {
    check_elems(g, seed)?;
    let members = g.closure_of(seed.iter().map(|&x| x as usize));
    Ok(Subgroup {
        parent: g.clone(),
        members,
        witnesses: seed.to_vec(),
    })
}

/// Subgroup from a known-closed member set (validated).
pub fn subgroup_from_members(g: &GroupRef, members: &[Elem]) -> Result<Subgroup> {
    check_elems(g, members)?;
    let sub = subgroup_closure(g, members)?;
    let given: u128 = members.iter().fold(1u128, |m, &x| m | (1 << x));
    if sub.members != given {
        return Err(Error::InvalidInput(
            "member set is not closed under the group operation".into(),
        ));
    }
    Ok(sub)
}

/// Smallest normal subgroup of `g` containing the seed.
pub fn normal_closure(g: &GroupRef, seed: &[Elem]) -> Result<Subgroup> {
    check_elems(g, seed)?;
    // The subgroup generated by a conjugation-closed set is normal.
    let mut conjugates: Vec<usize> = Vec::new();
    let mut seen: u128 = 0;
    for &s in seed {
        for c in g.elements() {
            let y = g.conjugate(c, s);
            if seen & (1 << y) == 0 {
                seen |= 1 << y;
                conjugates.push(y as usize);
            }
        }
    }
    let members = g.closure_of(conjugates);
    Ok(Subgroup {
        parent: g.clone(),
        members,
        witnesses: seed.to_vec(),
    })
}

/// Subgroup generated by all commutators `[h, k]` over all member pairs.
/// All pairs are used, not just witnesses: `[H, K]` is not generated by
/// commutators of generators in general.
pub fn commutator_subgroup(g: &GroupRef, h: &Subgroup, k: &Subgroup) -> Result<Subgroup> {
    if !Arc::ptr_eq(h.parent(), g) && h.parent().as_ref() != g.as_ref() {
        return Err(Error::InvalidInput("H does not live in G".into()));
    }
    if !Arc::ptr_eq(k.parent(), g) && k.parent().as_ref() != g.as_ref() {
        return Err(Error::InvalidInput("K does not live in G".into()));
    }
    let mut seen: u128 = 0;
    let mut comms: Vec<Elem> = Vec::new();
    for a in h.elements() {
        for b in k.elements() {
            let c = g.commutator(a, b);
            if seen & (1 << c) == 0 {
                seen |= 1 << c;
                comms.push(c);
            }
        }
    }
    comms.sort_unstable();
    let members = g.closure_of(comms.iter().map(|&x| x as usize));
    Ok(Subgroup {
        parent: g.clone(),
        members,
        witnesses: comms,
    })
}

/// The whole group as a subgroup of itself.
pub fn whole_subgroup(g: &GroupRef) -> Subgroup {
    Subgroup {
        parent: g.clone(),
        members: g.full_mask(),
        witnesses: g.generators().to_vec(),
    }
}

/// The trivial subgroup.
pub fn trivial_subgroup(g: &GroupRef) -> Subgroup {
    Subgroup {
        parent: g.clone(),
        members: 1,
        witnesses: Vec::new(),
    }
}

fn check_elems(g: &GroupRef, xs: &[Elem]) -> Result<()> {
    for &x in xs {
        if (x as usize) >= g.order() {
            return Err(Error::InvalidInput(format!(
                "element index {x} out of range for a group of order {}",
                g.order()
            )));
        }
    }
    Ok(())
}

/// A total multiplicative map between two finite groups, validated on all
/// pairs at construction.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    source: GroupRef,
    target: GroupRef,
    images: Vec<Elem>,
}

impl Homomorphism {
    pub fn new(source: GroupRef, target: GroupRef, images: Vec<Elem>) -> Result<Self> {
        if images.len() != source.order() {
            return Err(Error::InvalidInput(format!(
                "{} images for a source of order {}",
                images.len(),
                source.order()
            )));
        }
        for &y in &images {
            if (y as usize) >= target.order() {
                return Err(Error::InvalidInput(format!("image {y} out of range")));
            }
        }
        if images[0] != 0 {
            return Err(Error::InvalidInput("identity must map to identity".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                let lhs = images[source.mul(a, b) as usize];
                let rhs = target.mul(images[a as usize], images[b as usize]);
                if lhs != rhs {
                    return Err(Error::InvalidInput(format!(
                        "not multiplicative at ({a}, {b}): f(ab) = {lhs}, f(a)f(b) = {rhs}"
                    )));
                }
            }
        }
        Ok(Homomorphism {
            source,
            target,
            images,
        })
    }

    pub fn identity(g: &GroupRef) -> Self {
        Homomorphism {
            source: g.clone(),
            target: g.clone(),
            images: g.elements().collect(),
        }
    }

    pub fn source(&self) -> &GroupRef {
        &self.source
    }

    pub fn target(&self) -> &GroupRef {
        &self.target
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.images[x as usize]
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen: u128 = 0;
        for &y in &self.images {
            seen |= 1 << y;
        }
        seen == mask(self.target.order())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: u128 = 0;
        for &y in &self.images {
            if seen & (1 << y) != 0 {
                return false;
            }
            seen |= 1 << y;
        }
        true
    }

    pub fn kernel(&self) -> Subgroup {
        let ker: Vec<Elem> = self
            .source
            .elements()
            .filter(|&x| self.images[x as usize] == 0)
            .collect();
        let members = ker.iter().fold(0u128, |m, &x| m | (1 << x));
        Subgroup {
            parent: self.source.clone(),
            members,
            witnesses: ker.into_iter().filter(|&x| x != 0).collect(),
        }
    }

    /// Image of a subgroup of the source, as a subgroup of the target.
    pub fn image_of(&self, sub: &Subgroup) -> Subgroup {
        let imgs: Vec<Elem> = sub.elements().iter().map(|&x| self.apply(x)).collect();
        let mut members: u128 = 0;
        for &y in &imgs {
            members |= 1 << y;
        }
        Subgroup {
            parent: self.target.clone(),
            members,
            witnesses: {
                let mut w: Vec<Elem> = imgs;
                w.sort_unstable();
                w.dedup();
                w.retain(|&y| y != 0);
                w
            },
        }
    }

    /// Preimage of a subgroup of the target.
    pub fn preimage_of(&self, sub: &Subgroup) -> Subgroup {
        let pre: Vec<Elem> = self
            .source
            .elements()
            .filter(|&x| sub.contains(self.apply(x)))
            .collect();
        let members = pre.iter().fold(0u128, |m, &x| m | (1 << x));
        Subgroup {
            parent: self.source.clone(),
            members,
            witnesses: pre.into_iter().filter(|&x| x != 0).collect(),
        }
    }

    /// `other` after `self` (requires matching middle group structure).
    pub fn compose(&self, other: &Homomorphism) -> Result<Homomorphism> {
        if self.target.as_ref() != other.source.as_ref() {
            return Err(Error::InvalidInput(
                "composition endpoints do not match".into(),
            ));
        }
        let images = self
            .images
            .iter()
            .map(|&y| other.images[y as usize])
            .collect();
        Ok(Homomorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            images,
        })
    }
}

/// Quotient of `g` by a normal subgroup, on canonical (minimal-index) coset
/// representatives, together with the projection.
pub fn quotient(g: &GroupRef, n: &Subgroup) -> Result<(GroupRef, Homomorphism)> {
    if n.parent().as_ref() != g.as_ref() {
        return Err(Error::InvalidInput("N does not live in G".into()));
    }
    if let Some((c, x, y)) = n.normality_witness() {
        return Err(Error::NotNormal(format!(
            "conjugating {} by {} gives {} outside the subgroup",
            g.element_name(x),
            g.element_name(c),
            g.element_name(y)
        )));
    }
    let order = g.order();
    let mut coset_of = vec![usize::MAX; order];
    let mut reps: Vec<Elem> = Vec::new();
    for x in 0..order as Elem {
        if coset_of[x as usize] != usize::MAX {
            continue;
        }
        let idx = reps.len();
        reps.push(x);
        for m in n.elements() {
            let y = g.mul(x, m);
            coset_of[y as usize] = idx;
        }
    }
    let q_order = reps.len();
    let mut table = vec![0 as Elem; q_order * q_order];
    for (i, &ri) in reps.iter().enumerate() {
        for (j, &rj) in reps.iter().enumerate() {
            table[i * q_order + j] = coset_of[g.mul(ri, rj) as usize] as Elem;
        }
    }
    let names: Vec<String> = reps
        .iter()
        .map(|&r| format!("[{}]", g.element_name(r)))
        .collect();
    let mut gens: Vec<Elem> = g
        .generators()
        .iter()
        .map(|&x| coset_of[x as usize] as Elem)
        .collect();
    gens.sort_unstable();
    gens.dedup();
    gens.retain(|&x| x != 0);
    let q = FiniteGroup::from_table(
        format!("{}/{}", g.name(), n.describe()),
        names,
        table,
        Some(gens),
    )?;
    let projection = Homomorphism {
        source: g.clone(),
        target: q.clone(),
        images: coset_of.iter().map(|&c| c as Elem).collect(),
    };
    Ok((q, projection))
}

/// Unique multiplicative extension of a generator assignment, if it exists.
///
/// Extension walks the Cayley graph from the identity; a disagreement
/// between two factorizations of the same element is reported with the
/// witness word.
pub fn hom_from_images(
    source: &GroupRef,
    target: &GroupRef,
    gen_images: &[(Elem, Elem)],
) -> Result<Homomorphism> {
    let mut assigned: Vec<Option<Elem>> = vec![None; source.generators().len()];
    for &(g, img) in gen_images {
        let Some(pos) = source.generators().iter().position(|&x| x == g) else {
            return Err(Error::InvalidInput(format!(
                "{} is not a marked generator of {}",
                source.element_name(g),
                source.name()
            )));
        };
        if (img as usize) >= target.order() {
            return Err(Error::InvalidInput(format!("image {img} out of range")));
        }
        assigned[pos] = Some(img);
    }
    if let Some(pos) = assigned.iter().position(|a| a.is_none()) {
        return Err(Error::InvalidInput(format!(
            "generator {} has no assigned image",
            source.element_name(source.generators()[pos])
        )));
    }
    let gens = source.generators();
    let imgs: Vec<Elem> = assigned.into_iter().map(|a| a.unwrap()).collect();
    let mut images: Vec<Option<Elem>> = vec![None; source.order()];
    let mut word: Vec<Option<String>> = vec![None; source.order()];
    images[0] = Some(0);
    word[0] = Some("e".to_string());
    let mut queue: Vec<Elem> = vec![0];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let fx = images[x as usize].unwrap();
        for (i, &g) in gens.iter().enumerate() {
            let y = source.mul(x, g);
            let fy = target.mul(fx, imgs[i]);
            let w = || {
                let base = word[x as usize].clone().unwrap();
                if base == "e" {
                    source.element_name(g).to_string()
                } else {
                    format!("{base}*{}", source.element_name(g))
                }
            };
            match images[y as usize] {
                None => {
                    images[y as usize] = Some(fy);
                    word[y as usize] = Some(w());
                    queue.push(y);
                }
                Some(prev) if prev != fy => {
                    return Err(Error::InconsistentImages(format!(
                        "element {} factors as {} (image {}) and as {} (image {})",
                        source.element_name(y),
                        word[y as usize].clone().unwrap(),
                        target.element_name(prev),
                        w(),
                        target.element_name(fy),
                    )));
                }
                Some(_) => {}
            }
        }
    }
    if images.iter().any(|i| i.is_none()) {
        return Err(Error::Internal(
            "generators failed to reach the whole source group".into(),
        ));
    }
    let images: Vec<Elem> = images.into_iter().map(|i| i.unwrap()).collect();
    // Full multiplicativity check; a failed extension is reported with the
    // first offending pair.
    Homomorphism::new(source.clone(), target.clone(), images).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::InconsistentImages(msg),
        other => other,
    })
}

/// Intersection of two subgroups of the same parent.
pub fn intersect(a: &Subgroup, b: &Subgroup) -> Subgroup {
    let members = a.members & b.members;
    let witnesses = (0..a.parent.order() as Elem)
        .filter(|&x| x != 0 && members & (1 << x) != 0)
        .collect();
    Subgroup {
        parent: a.parent.clone(),
        members,
        witnesses,
    }
}

/// Join (subgroup generated by the union) of two subgroups.
pub fn join(a: &Subgroup, b: &Subgroup) -> Subgroup {
    let seed: Vec<usize> = (0..a.parent.order())
        .filter(|&x| (a.members | b.members) & (1 << x) != 0)
        .collect();
    let members = a.parent.closure_of(seed.iter().copied());
    Subgroup {
        parent: a.parent.clone(),
        members,
        witnesses: seed.into_iter().map(|x| x as Elem).filter(|&x| x != 0).collect(),
    }
}

pub(crate) fn subgroup_from_mask(parent: &GroupRef, members: u128, witnesses: Vec<Elem>) -> Subgroup {
    Subgroup {
        parent: parent.clone(),
        members,
        witnesses,
    }
}

/// Re-indexes a subgroup as a standalone group (elements in ascending
/// parent order, so the identity stays at 0) plus the inclusion.
pub fn subgroup_as_group(sub: &Subgroup) -> Result<(GroupRef, Homomorphism)> {
    let parent = sub.parent();
    let elems = sub.elements();
    let mut index_of = vec![usize::MAX; parent.order()];
    for (i, &x) in elems.iter().enumerate() {
        index_of[x as usize] = i;
    }
    let n = elems.len();
    let mut table = vec![0 as Elem; n * n];
    for (i, &x) in elems.iter().enumerate() {
        for (j, &y) in elems.iter().enumerate() {
            table[i * n + j] = index_of[parent.mul(x, y) as usize] as Elem;
        }
    }
    let names: Vec<String> = elems
        .iter()
        .map(|&x| parent.element_name(x).to_string())
        .collect();
    let mut gens: Vec<Elem> = sub
        .witnesses()
        .iter()
        .map(|&x| index_of[x as usize] as Elem)
        .collect();
    gens.sort_unstable();
    gens.dedup();
    gens.retain(|&x| x != 0);
    let g = FiniteGroup::from_table(
        format!("{} in {}", sub.describe(), parent.name()),
        names,
        table,
        Some(gens),
    )?;
    let inclusion = Homomorphism {
        source: g.clone(),
        target: parent.clone(),
        images: elems,
    };
    Ok((g, inclusion))
}

/// Invariant factors of the abelianization `G/[G, G]`, in divisibility
/// order (a cyclic subgroup of maximal order in a finite abelian group is
/// a direct summand, so peeling one off and recursing is exact).
pub fn abelianization_invariants(g: &GroupRef) -> Result<Vec<u64>> {
    let whole = whole_subgroup(g);
    let derived = commutator_subgroup(g, &whole, &whole)?;
    let (ab, _) = quotient(g, &derived)?;
    let mut invs = abelian_invariants(&ab)?;
    invs.retain(|&d| d > 1);
    Ok(invs)
}

fn abelian_invariants(g: &GroupRef) -> Result<Vec<u64>> {
    if g.order() == 1 {
        return Ok(Vec::new());
    }
    let max_ord = g
        .elements()
        .map(|x| g.element_order(x))
        .max()
        .expect("nonempty");
    let x = g
        .elements()
        .find(|&x| g.element_order(x) == max_ord)
        .expect("max attained");
    let cyc = subgroup_closure(g, &[x])?;
    let (q, _) = quotient(g, &cyc)?;
    let mut invs = abelian_invariants(&q)?;
    invs.push(max_ord as u64);
    Ok(invs)
}

#[cfg(test)]
mod tests {
    use super::builtins::Builtin;
    use super::*;

    #[test]
    fn dihedral_basics() {
        let d4 = Builtin::parse("dihedral(4)").unwrap().build().unwrap();
        assert_eq!(d4.order(), 8);
        // r^2 has order 2 and generates the center
        let r2 = d4.mul(1, 1);
        let z = subgroup_closure(&d4, &[r2]).unwrap();
        assert_eq!(z.order(), 2);
        // a reflection's normal closure has order 4
        let s = 4 as Elem; // first reflection index in the builtin layout
        assert_eq!(d4.element_name(s), "s");
        let nc = normal_closure(&d4, &[s]).unwrap();
        assert_eq!(nc.order(), 4);
        assert!(nc.is_normal());
        assert!(nc.contains(r2));
    }

    #[test]
    fn closure_edge_cases() {
        let d4 = Builtin::parse("dihedral(4)").unwrap().build().unwrap();
        assert!(subgroup_closure(&d4, &[]).unwrap().is_trivial());
        let gens: Vec<Elem> = d4.generators().to_vec();
        assert!(subgroup_closure(&d4, &gens).unwrap().is_whole());
        assert!(normal_closure(&d4, &[]).unwrap().is_trivial());
    }

    #[test]
    fn abelian_normal_closure_is_plain_closure() {
        let g = Builtin::parse("direct_product(cyclic(2),cyclic(4))")
            .unwrap()
            .build()
            .unwrap();
        for x in g.elements() {
            let a = subgroup_closure(&g, &[x]).unwrap();
            let b = normal_closure(&g, &[x]).unwrap();
            assert!(a.same_members(&b));
        }
    }

    #[test]
    fn quaternion_commutators() {
        let q8 = Builtin::parse("quaternion8").unwrap().build().unwrap();
        assert_eq!(q8.order(), 8);
        // exactly one element of order 2
        let twos = q8.elements().filter(|&x| q8.element_order(x) == 2).count();
        assert_eq!(twos, 1);
        let whole = whole_subgroup(&q8);
        let derived = commutator_subgroup(&q8, &whole, &whole).unwrap();
        assert_eq!(derived.order(), 2);
        assert!(derived.contains(1)); // -1 sits at index 1
        let trivial = trivial_subgroup(&q8);
        assert!(commutator_subgroup(&q8, &whole, &trivial)
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn symmetric_three_derived() {
        let s3 = Builtin::parse("symmetric(3)").unwrap().build().unwrap();
        let whole = whole_subgroup(&s3);
        let derived = commutator_subgroup(&s3, &whole, &whole).unwrap();
        assert_eq!(derived.order(), 3);
    }

    #[test]
    fn commutator_symmetric_in_arguments() {
        let d4 = Builtin::parse("dihedral(4)").unwrap().build().unwrap();
        let h = normal_closure(&d4, &[4]).unwrap();
        let k = subgroup_closure(&d4, &[1]).unwrap();
        let hk = commutator_subgroup(&d4, &h, &k).unwrap();
        let kh = commutator_subgroup(&d4, &k, &h).unwrap();
        assert!(hk.same_members(&kh));
    }

    #[test]
    fn quotient_klein() {
        let d4 = Builtin::parse("dihedral(4)").unwrap().build().unwrap();
        let r2 = d4.mul(1, 1);
        let z = subgroup_closure(&d4, &[r2]).unwrap();
        let (q, pi) = quotient(&d4, &z).unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(q.exponent(), 2);
        // projection is surjective with kernel exactly N
        assert!(pi.is_surjective());
        assert!(pi.kernel().same_members(&z));
    }

    #[test]
    fn quotient_degenerate_ends() {
        let g = Builtin::parse("symmetric(3)").unwrap().build().unwrap();
        let (q, pi) = quotient(&g, &trivial_subgroup(&g)).unwrap();
        assert_eq!(q.order(), g.order());
        assert_eq!(pi.images(), g.elements().collect::<Vec<_>>());
        let (q, _) = quotient(&g, &whole_subgroup(&g)).unwrap();
        assert_eq!(q.order(), 1);
    }

    #[test]
    fn quotient_rejects_nonnormal() {
        let s3 = Builtin::parse("symmetric(3)").unwrap().build().unwrap();
        let t = s3
            .elements()
            .find(|&x| s3.element_order(x) == 2)
            .unwrap();
        let sub = subgroup_closure(&s3, &[t]).unwrap();
        assert!(matches!(quotient(&s3, &sub), Err(Error::NotNormal(_))));
    }

    #[test]
    fn hom_extension_and_failure() {
        let z4 = Builtin::parse("cyclic(4)").unwrap().build().unwrap();
        let z3 = Builtin::parse("cyclic(3)").unwrap().build().unwrap();
        // identity assignment extends to the identity map
        let id = hom_from_images(&z4, &z4, &[(1, 1)]).unwrap();
        assert_eq!(id.images(), z4.elements().collect::<Vec<_>>());
        // order-incompatible assignment fails
        assert!(matches!(
            hom_from_images(&z4, &z3, &[(1, 1)]),
            Err(Error::InconsistentImages(_))
        ));
        // everything to identity always works
        let trivial_map = hom_from_images(&z4, &z3, &[(1, 0)]).unwrap();
        assert!(trivial_map.images().iter().all(|&y| y == 0));
    }

    #[test]
    fn q8_abelianization_map_matches_quotient() {
        let q8 = Builtin::parse("quaternion8").unwrap().build().unwrap();
        let whole = whole_subgroup(&q8);
        let derived = commutator_subgroup(&q8, &whole, &whole).unwrap();
        let (ab, pi) = quotient(&q8, &derived).unwrap();
        // i and j map to the two distinct nontrivial classes
        let fi = pi.apply(2);
        let fj = pi.apply(4);
        let hom = hom_from_images(&q8, &ab, &[(2, fi), (4, fj)]).unwrap();
        assert_eq!(hom.images(), pi.images());
        assert_eq!(abelianization_invariants(&q8).unwrap(), vec![2, 2]);
    }

    #[test]
    fn bad_table_is_rejected() {
        // last row duplicates an entry
        let err = FiniteGroup::from_table(
            "broken",
            vec!["e".into(), "a".into()],
            vec![0, 1, 1, 1],
            None,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("not a permutation"), "{msg}");
    }

    #[test]
    fn intersect_and_join() {
        let q8 = Builtin::parse("quaternion8").unwrap().build().unwrap();
        let i = subgroup_closure(&q8, &[2]).unwrap();
        let j = subgroup_closure(&q8, &[4]).unwrap();
        let meet = intersect(&i, &j);
        assert_eq!(meet.order(), 2);
        let joined = join(&i, &j);
        assert!(joined.is_whole());
    }

    #[test]
    fn subgroup_as_group_keeps_structure() {
        let d4 = Builtin::parse("dihedral(4)").unwrap().build().unwrap();
        let rot = subgroup_closure(&d4, &[1]).unwrap();
        let (c4, incl) = subgroup_as_group(&rot).unwrap();
        assert_eq!(c4.order(), 4);
        assert_eq!(c4.element_order(1), 4);
        for x in c4.elements() {
            for y in c4.elements() {
                assert_eq!(
                    incl.apply(c4.mul(x, y)),
                    d4.mul(incl.apply(x), incl.apply(y))
                );
            }
        }
    }

    #[test]
    fn abelianization_examples() {
        let s3 = Builtin::parse("symmetric(3)").unwrap().build().unwrap();
        assert_eq!(abelianization_invariants(&s3).unwrap(), vec![2]);
        let z6 = Builtin::parse("cyclic(6)").unwrap().build().unwrap();
        assert_eq!(abelianization_invariants(&z6).unwrap(), vec![6]);
        let z2z4 = Builtin::parse("direct_product(cyclic(2),cyclic(4))")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(abelianization_invariants(&z2z4).unwrap(), vec![2, 4]);
    }
}
