//! The eight descending series, computed by their literal recursions.
//!
//! Lower-central-type series are 1-based (`A_1 = A`); derived-type series
//! are 0-based (`A^(0) = A`). Each chain records its base index so callers
//! cannot drift off by one. Chains are memoized per (group content, kind)
//! and verified (descending, each term normal) before being returned.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cache::Memo;
use crate::group::{
    commutator_subgroup, subgroup_closure, whole_subgroup, Elem, GroupKey, GroupRef, Subgroup,
};
use crate::report::{CheckLine, SuiteReport};
use crate::{Error, Result};

/// Which series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeriesKind {
    LowerCentral,
    RationalLowerCentral,
    PLowerCentral(u64),
    Derived,
    RationalDerived,
    PDerived(u64),
    TorsionFreeDerived,
    Cohn,
}

impl SeriesKind {
    /// Index of the term equal to the whole group.
    pub fn base_index(&self) -> usize {
        match self {
            SeriesKind::LowerCentral
            | SeriesKind::RationalLowerCentral
            | SeriesKind::PLowerCentral(_) => 1,
            _ => 0,
        }
    }

    pub fn is_central_type(&self) -> bool {
        self.base_index() == 1
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SeriesKind::PLowerCentral(p) | SeriesKind::PDerived(p) => {
                crate::linalg::CoeffRing::mod_p(*p).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// Shell-safe name, e.g. `lcs`, `plcs:2`, `pderived:3`.
    pub fn token(&self) -> String {
        match self {
            SeriesKind::LowerCentral => "lcs".into(),
            SeriesKind::RationalLowerCentral => "rlcs".into(),
            SeriesKind::PLowerCentral(p) => format!("plcs:{p}"),
            SeriesKind::Derived => "derived".into(),
            SeriesKind::RationalDerived => "rderived".into(),
            SeriesKind::PDerived(p) => format!("pderived:{p}"),
            SeriesKind::TorsionFreeDerived => "tfderived".into(),
            SeriesKind::Cohn => "cohn".into(),
        }
    }

    pub fn parse(s: &str) -> Result<SeriesKind> {
        let kind = match s {
            "lcs" => SeriesKind::LowerCentral,
            "rlcs" => SeriesKind::RationalLowerCentral,
            "derived" => SeriesKind::Derived,
            "rderived" => SeriesKind::RationalDerived,
            "tfderived" => SeriesKind::TorsionFreeDerived,
            "cohn" => SeriesKind::Cohn,
            other => {
                if let Some(p) = other.strip_prefix("plcs:") {
                    SeriesKind::PLowerCentral(
                        p.parse()
                            .map_err(|_| Error::Parse(format!("bad prime in {other:?}")))?,
                    )
                } else if let Some(p) = other.strip_prefix("pderived:") {
                    SeriesKind::PDerived(
                        p.parse()
                            .map_err(|_| Error::Parse(format!("bad prime in {other:?}")))?,
                    )
                } else {
                    return Err(Error::Parse(format!(
                        "unknown series kind {other:?}; expected one of lcs, rlcs, plcs:p, derived, rderived, pderived:p, tfderived, cohn"
                    )));
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.token())
    }
}

/// A computed chain of series terms.
#[derive(Debug, Clone)]
pub struct SeriesChain {
    kind: SeriesKind,
    group: GroupRef,
    base_index: usize,
    /// `terms[i]` is the term at paper index `base_index + i`.
    terms: Vec<Subgroup>,
    /// Offset in `terms` where the chain becomes constant.
    stable_at: usize,
}

impl SeriesChain {
    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn base_index(&self) -> usize {
        self.base_index
    }

    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    /// Term at the paper's index `n` (clamped past stabilization).
    pub fn term(&self, n: usize) -> Result<&Subgroup> {
        if n < self.base_index {
            return Err(Error::InvalidInput(format!(
                "term index {n} below the base index {} of {}",
                self.base_index, self.kind
            )));
        }
        let off = n - self.base_index;
        Ok(&self.terms[off.min(self.terms.len() - 1)])
    }

    /// Paper index at which the chain stabilizes.
    pub fn stable_index(&self) -> usize {
        self.base_index + self.stable_at
    }
}

type ChainResult = std::result::Result<Arc<SeriesChain>, String>;

fn memo() -> &'static Memo<(GroupKey, SeriesKind), ChainResult> {
    static MEMO: OnceLock<Memo<(GroupKey, SeriesKind), ChainResult>> = OnceLock::new();
    MEMO.get_or_init(Memo::new)
}

/// The series chain for `g`, extended until it stabilizes (all series here
/// stabilize on finite groups: each step either strictly shrinks or fixes
/// every later term).
pub fn full_chain(g: &GroupRef, kind: SeriesKind) -> Result<Arc<SeriesChain>> {
    kind.validate()?;
    let key = (g.key(), kind);
    let slot = memo().get_or_fill(key, || {
        compute_chain(g, kind).map(Arc::new).map_err(|e| e.to_string())
    });
    match slot.get().expect("filled") {
        Ok(chain) => Ok(chain.clone()),
        Err(e) => Err(Error::Internal(format!("series computation failed: {e}"))),
    }
}

fn compute_chain(g: &GroupRef, kind: SeriesKind) -> Result<SeriesChain> {
    let mut terms = vec![whole_subgroup(g)];
    loop {
        let prev = terms.last().unwrap();
        let next = next_term(g, kind, prev)?;
        if next.same_members(prev) {
            break;
        }
        if !next.subset_of(prev) {
            return Err(Error::Internal(format!(
                "{} recursion produced a non-descending step on {}",
                kind,
                g.name()
            )));
        }
        terms.push(next);
    }
    for t in &terms {
        if let Some((c, x, y)) = t.normality_witness() {
            return Err(Error::Internal(format!(
                "series term not normal in {}: {}^{} = {}",
                g.name(),
                g.element_name(x),
                g.element_name(c),
                g.element_name(y)
            )));
        }
    }
    let stable_at = terms.len() - 1;
    Ok(SeriesChain {
        kind,
        group: g.clone(),
        base_index: kind.base_index(),
        terms,
        stable_at,
    })
}

fn next_term(g: &GroupRef, kind: SeriesKind, prev: &Subgroup) -> Result<Subgroup> {
    let whole = whole_subgroup(g);
    match kind {
        SeriesKind::LowerCentral => commutator_subgroup(g, &whole, prev),
        SeriesKind::Derived => commutator_subgroup(g, prev, prev),
        SeriesKind::PLowerCentral(p) => {
            let comm = commutator_subgroup(g, prev, &whole)?;
            power_extended(g, prev, p, &comm)
        }
        SeriesKind::PDerived(p) => {
            let comm = commutator_subgroup(g, prev, prev)?;
            power_extended(g, prev, p, &comm)
        }
        SeriesKind::RationalLowerCentral => {
            let comm = commutator_subgroup(g, &whole, prev)?;
            root_set(g, &comm, None)
        }
        SeriesKind::RationalDerived => {
            let comm = commutator_subgroup(g, prev, prev)?;
            root_set(g, &comm, None)
        }
        SeriesKind::TorsionFreeDerived => {
            // Only the finite-group branch is materialized: the acting
            // quotient G/prev must be trivial, which holds at every step
            // here because the previous term never shrinks. Under that
            // hypothesis the coefficient ring is plain Z and the torsion
            // submodule of prev/[prev,prev] is everything of finite order,
            // i.e. the whole finite module.
            if !prev.is_whole() {
                return Err(Error::Internal(
                    "torsion-free derived step with a nontrivial acting quotient".into(),
                ));
            }
            let comm = commutator_subgroup(g, prev, prev)?;
            root_set(g, &comm, Some(prev))
        }
        SeriesKind::Cohn => {
            // Scalar annihilator search: x qualifies when some x^k with
            // 1 <= k <= order(x) lands in [prev, prev]; gamma = k * 1 has
            // augmentation k != 0. k = order(x) always succeeds on a
            // finite group, and the subgroup generated by the qualifying
            // set is taken afterwards.
            let comm = commutator_subgroup(g, prev, prev)?;
            let mut seed: Vec<Elem> = Vec::new();
            for x in prev.elements() {
                let ord = g.element_order(x) as u64;
                let mut hit = false;
                let mut pw = 0 as Elem;
                for _ in 1..=ord {
                    pw = g.mul(pw, x);
                    if comm.contains(pw) {
                        hit = true;
                        break;
                    }
                }
                if hit {
                    seed.push(x);
                }
            }
            subgroup_closure(g, &seed)
        }
    }
}

/// Subgroup generated by `p`-th powers of `prev` together with `extra`.
fn power_extended(g: &GroupRef, prev: &Subgroup, p: u64, extra: &Subgroup) -> Result<Subgroup> {
    let mut seed: Vec<Elem> = extra.elements();
    for x in prev.elements() {
        seed.push(g.pow(x, p));
    }
    seed.sort_unstable();
    seed.dedup();
    subgroup_closure(g, &seed)
}

/// Root set `{x : some positive power of x lies in target}` (restricted to
/// `within` when given), closed into a subgroup. For finite groups the raw
/// root set is already a subgroup; a mismatch would mean a computation bug
/// and is reported rather than silently repaired.
fn root_set(g: &GroupRef, target: &Subgroup, within: Option<&Subgroup>) -> Result<Subgroup> {
    let mut raw: Vec<Elem> = Vec::new();
    for x in g.elements() {
        if let Some(w) = within {
            if !w.contains(x) {
                continue;
            }
        }
        let ord = g.element_order(x) as u64;
        let mut pw = 0 as Elem;
        let mut hit = false;
        for _ in 1..=ord {
            pw = g.mul(pw, x);
            if target.contains(pw) {
                hit = true;
                break;
            }
        }
        if hit {
            raw.push(x);
        }
    }
    let closed = subgroup_closure(g, &raw)?;
    if closed.order() != raw.len() {
        return Err(Error::Internal(format!(
            "root set on {} is not closed: {} raw elements vs closure of order {}",
            g.name(),
            raw.len(),
            closed.order()
        )));
    }
    Ok(closed)
}

/// The paper-indexed `n`-th term of the series.
pub fn series_term(g: &GroupRef, kind: SeriesKind, n: usize) -> Result<Subgroup> {
    let chain = full_chain(g, kind)?;
    chain.term(n).cloned()
}

/// The chain truncated to `depth` terms (or to stabilization, whichever
/// comes first), as the paper indexes it.
pub fn series_chain(g: &GroupRef, kind: SeriesKind, depth: usize) -> Result<SeriesChain> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let chain = full_chain(g, kind)?;
    let take = depth.min(chain.terms.len());
    Ok(SeriesChain {
        kind,
        group: g.clone(),
        base_index: chain.base_index,
        terms: chain.terms[..take].to_vec(),
        stable_at: chain.stable_at.min(take - 1),
    })
}

/// The stabilization-level subgroup `Γ^n`: term `n + 1` for 1-based
/// (central-type) series and term `n` for 0-based (derived-type) series.
pub fn gamma_term(g: &GroupRef, kind: SeriesKind, n: usize) -> Result<Subgroup> {
    series_term(g, kind, n + kind.base_index())
}

/// Containment chain report: for all m <= n,
/// derived ⊆ cohn ⊆ tfderived ∩ rlcs(2^m) and
/// derived ⊆ rderived ⊆ tfderived.
pub fn containment_chain_check(g: &GroupRef, n: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(format!(
        "containment chains on {} up to level {n}",
        g.name()
    ));
    report.note(
        "rational, torsion-free and Cohn terms collapse to the whole group on finite groups; \
         the checks below recompute them from the literal recursions",
    );
    for m in 0..=n {
        let derived = series_term(g, SeriesKind::Derived, m)?;
        let cohn = series_term(g, SeriesKind::Cohn, m)?;
        let tf = series_term(g, SeriesKind::TorsionFreeDerived, m)?;
        let rder = series_term(g, SeriesKind::RationalDerived, m)?;
        let rlcs_idx = 1usize.checked_shl(m as u32).unwrap_or(usize::MAX).max(1);
        let rlcs = series_term(g, SeriesKind::RationalLowerCentral, rlcs_idx)?;
        let meet = crate::group::intersect(&tf, &rlcs);
        report.check(
            format!("derived({m}) ⊆ cohn({m})"),
            derived.subset_of(&cohn),
            format!("{} vs {}", derived.order(), cohn.order()),
        );
        report.check(
            format!("cohn({m}) ⊆ tfderived({m}) ∩ rlcs({rlcs_idx})"),
            cohn.subset_of(&meet),
            format!("{} vs {}", cohn.order(), meet.order()),
        );
        report.check(
            format!("derived({m}) ⊆ rderived({m})"),
            derived.subset_of(&rder),
            format!("{} vs {}", derived.order(), rder.order()),
        );
        report.check(
            format!("rderived({m}) ⊆ tfderived({m})"),
            rder.subset_of(&tf),
            format!("{} vs {}", rder.order(), tf.order()),
        );
    }
    Ok(report)
}

/// Verbal-series functoriality: `f(term(A, n)) ⊆ term(B, n)` for every
/// term of the four verbal kinds.
pub fn verbal_image_check(
    f: &crate::group::Homomorphism,
    kinds: &[SeriesKind],
    max_index: usize,
) -> Result<Vec<CheckLine>> {
    let mut lines = Vec::new();
    for &kind in kinds {
        for n in kind.base_index()..=max_index {
            let sa = series_term(f.source(), kind, n)?;
            let sb = series_term(f.target(), kind, n)?;
            let image = f.image_of(&sa);
            lines.push(CheckLine::new(
                format!(
                    "{}: f({}[{n}]) ⊆ {}[{n}]",
                    f.source().name(),
                    kind,
                    kind
                ),
                image.subset_of(&sb),
                format!("image order {}, target order {}", image.order(), sb.order()),
            ));
        }
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;

    fn build(expr: &str) -> GroupRef {
        Builtin::parse(expr).unwrap().build().unwrap()
    }

    fn orders(chain: &SeriesChain) -> Vec<usize> {
        chain.terms().iter().map(|t| t.order()).collect()
    }

    #[test]
    fn dihedral4_lower_central() {
        let g = build("dihedral(4)");
        let chain = series_chain(&g, SeriesKind::LowerCentral, 5).unwrap();
        assert_eq!(orders(&chain), vec![8, 2, 1]);
        assert_eq!(chain.base_index(), 1);
    }

    #[test]
    fn dihedral8_lower_central_class_three() {
        let g = build("dihedral(8)");
        let chain = series_chain(&g, SeriesKind::LowerCentral, 6).unwrap();
        assert_eq!(orders(&chain), vec![16, 4, 2, 1]);
    }

    #[test]
    fn s3_derived() {
        let g = build("symmetric(3)");
        let chain = series_chain(&g, SeriesKind::Derived, 3).unwrap();
        assert_eq!(orders(&chain), vec![6, 3, 1]);
        assert_eq!(chain.base_index(), 0);
    }

    #[test]
    fn odd_cyclic_square_closure() {
        // squaring is a bijection on an odd-order cyclic group
        let g = build("cyclic(3)");
        let term = series_term(&g, SeriesKind::PLowerCentral(2), 2).unwrap();
        assert!(term.is_whole());
    }

    #[test]
    fn q8_two_derived() {
        let g = build("quaternion8");
        let chain = series_chain(&g, SeriesKind::PDerived(2), 4).unwrap();
        // Q8 ⊃ {±1} ⊃ 1
        assert_eq!(orders(&chain), vec![8, 2, 1]);
    }

    #[test]
    fn finite_degeneracies() {
        for expr in ["quaternion8", "symmetric(3)", "dihedral(4)", "cyclic(6)"] {
            let g = build(expr);
            for kind in [
                SeriesKind::RationalLowerCentral,
                SeriesKind::RationalDerived,
                SeriesKind::TorsionFreeDerived,
                SeriesKind::Cohn,
            ] {
                let chain = full_chain(&g, kind).unwrap();
                assert_eq!(chain.terms().len(), 1, "{expr}/{kind} should be constant");
                assert!(chain.terms()[0].is_whole());
            }
        }
    }

    #[test]
    fn trivial_group_all_kinds() {
        let g = build("cyclic(1)");
        for kind in [
            SeriesKind::LowerCentral,
            SeriesKind::Derived,
            SeriesKind::PLowerCentral(2),
            SeriesKind::PDerived(3),
            SeriesKind::RationalLowerCentral,
            SeriesKind::Cohn,
        ] {
            let chain = series_chain(&g, kind, 4).unwrap();
            assert!(chain.terms().iter().all(|t| t.is_whole() && t.is_trivial()));
        }
    }

    #[test]
    fn gamma_offsets() {
        let g = build("dihedral(8)");
        // Γ^2 for the lower central series is the third term A_3
        let gamma2 = gamma_term(&g, SeriesKind::LowerCentral, 2).unwrap();
        assert_eq!(gamma2.order(), 2);
        // Γ^1 for the derived series is A^(1)
        let gamma1 = gamma_term(&g, SeriesKind::Derived, 1).unwrap();
        let direct = series_term(&g, SeriesKind::Derived, 1).unwrap();
        assert!(gamma1.same_members(&direct));
    }

    #[test]
    fn stabilization_clamps() {
        let g = build("symmetric(3)");
        let deep = series_term(&g, SeriesKind::Derived, 50).unwrap();
        assert!(deep.is_trivial());
    }

    #[test]
    fn central_property_and_p_quotients() {
        for expr in ["dihedral(8)", "quaternion8", "semidirect_cyclic(8,2,3)"] {
            let g = build(expr);
            let whole = whole_subgroup(&g);
            let lcs = full_chain(&g, SeriesKind::LowerCentral).unwrap();
            for w in lcs.terms().windows(2) {
                let comm = commutator_subgroup(&g, &whole, &w[0]).unwrap();
                assert!(comm.subset_of(&w[1]));
            }
            for p in [2u64, 3] {
                for kind in [SeriesKind::PLowerCentral(p), SeriesKind::PDerived(p)] {
                    let chain = full_chain(&g, kind).unwrap();
                    for w in chain.terms().windows(2) {
                        // successive quotients are elementary abelian p-groups:
                        // [T_n, T_n] ⊆ T_{n+1} and x^p ∈ T_{n+1} for x ∈ T_n
                        let comm = commutator_subgroup(&g, &w[0], &w[0]).unwrap();
                        assert!(comm.subset_of(&w[1]));
                        for x in w[0].elements() {
                            assert!(w[1].contains(g.pow(x, p)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn derived_descends_faster() {
        for expr in ["dihedral(8)", "symmetric(4)", "quaternion8"] {
            let g = build(expr);
            for n in 0..4 {
                let der = series_term(&g, SeriesKind::Derived, n).unwrap();
                let lcs = series_term(&g, SeriesKind::LowerCentral, n + 1).unwrap();
                assert!(der.subset_of(&lcs), "{expr} at {n}");
                let pder = series_term(&g, SeriesKind::PDerived(2), n).unwrap();
                let plcs = series_term(&g, SeriesKind::PLowerCentral(2), n + 1).unwrap();
                assert!(pder.subset_of(&plcs), "{expr} at {n} (p = 2)");
            }
        }
    }

    #[test]
    fn containment_chain_reports_pass() {
        for expr in ["quaternion8", "symmetric(3)", "cyclic(1)"] {
            let g = build(expr);
            let report = containment_chain_check(&g, 3).unwrap();
            assert!(report.all_passed(), "{expr}: {report:?}");
        }
    }

    #[test]
    fn kind_tokens_round_trip() {
        for kind in [
            SeriesKind::LowerCentral,
            SeriesKind::RationalLowerCentral,
            SeriesKind::PLowerCentral(2),
            SeriesKind::Derived,
            SeriesKind::RationalDerived,
            SeriesKind::PDerived(3),
            SeriesKind::TorsionFreeDerived,
            SeriesKind::Cohn,
        ] {
            assert_eq!(SeriesKind::parse(&kind.token()).unwrap(), kind);
        }
        assert!(SeriesKind::parse("plcs:4").is_err());
    }
}
