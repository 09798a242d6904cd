//! Conjugacy classes and subgroup-lattice enumeration.

use std::collections::HashSet;

use super::{subgroup_from_mask, Elem, GroupRef, Subgroup};
use crate::{Error, Result};

/// Conjugacy classes as sorted element lists, ordered by minimal member.
pub fn conjugacy_classes(g: &GroupRef) -> Vec<Vec<Elem>> {
    let mut seen: u128 = 0;
    let mut classes = Vec::new();
    for x in g.elements() {
        if seen & (1 << x) != 0 {
            continue;
        }
        let mut class: Vec<Elem> = Vec::new();
        let mut class_mask: u128 = 0;
        for c in g.elements() {
            let y = g.conjugate(c, x);
            if class_mask & (1 << y) == 0 {
                class_mask |= 1 << y;
                class.push(y);
            }
        }
        class.sort_unstable();
        seen |= class_mask;
        classes.push(class);
    }
    classes
}

/// Complete list of normal subgroups, sorted by (order, lexicographic
/// bitset). Every normal subgroup is a union of conjugacy classes, so the
/// search walks closures of class unions instead of raw subsets.
pub fn all_normal_subgroups(g: &GroupRef, bound: usize) -> Result<Vec<Subgroup>> {
    if g.order() > bound {
        return Err(Error::cap_with_hint(
            format!("normal subgroup lattice of {}", g.name()),
            g.order(),
            "lattice",
            bound,
            "use normal closures of single elements instead",
        ));
    }
    let classes = conjugacy_classes(g);
    let class_masks: Vec<u128> = classes
        .iter()
        .map(|c| c.iter().fold(0u128, |m, &x| m | (1 << x)))
        .collect();
    let mut found: HashSet<u128> = HashSet::new();
    let mut queue: Vec<u128> = Vec::new();
    found.insert(1);
    queue.push(1);
    let mut head = 0;
    while head < queue.len() {
        let cur = queue[head];
        head += 1;
        for (ci, &cm) in class_masks.iter().enumerate() {
            if cm & cur == cm {
                continue; // class already inside
            }
            let seed: Vec<Elem> = (0..g.order() as Elem)
                .filter(|&x| (cur | cm) & (1 << x) != 0)
                .collect();
            // the subgroup generated by a union of conjugacy classes is
            // normal, so plain closure suffices
            let sub = super::subgroup_closure(g, &seed)?;
            let _ = ci;
            if found.insert(sub.members_mask()) {
                queue.push(sub.members_mask());
            }
        }
    }
    let mut subs: Vec<Subgroup> = found
        .into_iter()
        .map(|m| {
            let witnesses: Vec<Elem> = (1..g.order() as Elem)
                .filter(|&x| m & (1 << x) != 0)
                .collect();
            subgroup_from_mask(g, m, witnesses)
        })
        .collect();
    subs.sort_by(|a, b| a.cmp_lex(b));
    Ok(subs)
}

/// Complete list of subgroups (not only normal ones), sorted like
/// [`all_normal_subgroups`]. BFS by single-element extension.
pub fn all_subgroups(g: &GroupRef, bound: usize) -> Result<Vec<Subgroup>> {
    if g.order() > bound {
        return Err(Error::cap(
            format!("subgroup lattice of {}", g.name()),
            g.order(),
            "lattice",
            bound,
        ));
    }
    let mut found: HashSet<u128> = HashSet::new();
    let mut queue: Vec<u128> = Vec::new();
    found.insert(1);
    queue.push(1);
    let mut head = 0;
    while head < queue.len() {
        let cur = queue[head];
        head += 1;
        for x in 1..g.order() as Elem {
            if cur & (1 << x) != 0 {
                continue;
            }
            let mut seed: Vec<Elem> = (1..g.order() as Elem)
                .filter(|&y| cur & (1 << y) != 0)
                .collect();
            seed.push(x);
            let sub = super::subgroup_closure(g, &seed)?;
            if found.insert(sub.members_mask()) {
                queue.push(sub.members_mask());
            }
        }
    }
    let mut subs: Vec<Subgroup> = found
        .into_iter()
        .map(|m| {
            let witnesses: Vec<Elem> = (1..g.order() as Elem)
                .filter(|&x| m & (1 << x) != 0)
                .collect();
            subgroup_from_mask(g, m, witnesses)
        })
        .collect();
    subs.sort_by(|a, b| a.cmp_lex(b));
    Ok(subs)
}

#[cfg(test)]
mod tests {
    use super::super::builtins::Builtin;
    use super::super::{intersect, join, DEFAULT_LATTICE_BOUND};
    use super::*;

    #[test]
    fn cyclic_prime_has_two_normal_subgroups() {
        for p in [2usize, 3, 5, 7] {
            let g = Builtin::Cyclic(p).build().unwrap();
            assert_eq!(all_normal_subgroups(&g, DEFAULT_LATTICE_BOUND).unwrap().len(), 2);
        }
    }

    #[test]
    fn quaternion_normal_subgroups() {
        let q8 = Builtin::Quaternion8.build().unwrap();
        let subs = all_normal_subgroups(&q8, DEFAULT_LATTICE_BOUND).unwrap();
        // 1, <-1>, <i>, <j>, <k>, Q8
        assert_eq!(subs.len(), 6);
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 4, 4, 4, 8]);
        // in Q8 every subgroup is normal
        assert_eq!(all_subgroups(&q8, DEFAULT_LATTICE_BOUND).unwrap().len(), 6);
    }

    #[test]
    fn s3_normal_subgroups() {
        let s3 = Builtin::Symmetric(3).build().unwrap();
        let subs = all_normal_subgroups(&s3, DEFAULT_LATTICE_BOUND).unwrap();
        assert_eq!(subs.len(), 3);
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 3, 6]);
        // but S3 has 6 subgroups in total
        assert_eq!(all_subgroups(&s3, DEFAULT_LATTICE_BOUND).unwrap().len(), 6);
    }

    #[test]
    fn s4_normal_subgroup_count() {
        let s4 = Builtin::Symmetric(4).build().unwrap();
        let subs = all_normal_subgroups(&s4, DEFAULT_LATTICE_BOUND).unwrap();
        // 1, V4, A4, S4
        assert_eq!(subs.len(), 4);
    }

    #[test]
    fn klein_subspace_count() {
        let v = Builtin::ElementaryAbelian(2, 2).build().unwrap();
        assert_eq!(all_subgroups(&v, DEFAULT_LATTICE_BOUND).unwrap().len(), 5);
        let e8 = Builtin::ElementaryAbelian(2, 3).build().unwrap();
        // subspaces of F_2^3: 1 + 7 + 7 + 1
        assert_eq!(all_subgroups(&e8, DEFAULT_LATTICE_BOUND).unwrap().len(), 16);
    }

    #[test]
    fn normal_lattice_closed_under_meet_and_join() {
        for expr in ["dihedral(4)", "quaternion8", "symmetric(3)"] {
            let g = Builtin::parse(expr).unwrap().build().unwrap();
            let subs = all_normal_subgroups(&g, DEFAULT_LATTICE_BOUND).unwrap();
            let masks: HashSet<u128> = subs.iter().map(|s| s.members_mask()).collect();
            for a in &subs {
                for b in &subs {
                    assert!(masks.contains(&intersect(a, b).members_mask()));
                    assert!(masks.contains(&join(a, b).members_mask()));
                }
            }
        }
    }

    #[test]
    fn cap_refusal() {
        let g = Builtin::parse("symmetric(5)").unwrap().build().unwrap();
        assert!(matches!(
            all_normal_subgroups(&g, 64),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn classes_partition_the_group() {
        let g = Builtin::parse("dihedral(4)").unwrap().build().unwrap();
        let classes = conjugacy_classes(&g);
        let total: usize = classes.iter().map(|c| c.len()).sum();
        assert_eq!(total, g.order());
        // D4 has 5 conjugacy classes
        assert_eq!(classes.len(), 5);
    }
}
