//! Group construction: builtin families, permutation closures, raw tables,
//! and the JSON file formats for groups and homomorphisms.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{hom_from_images, Elem, FiniteGroup, GroupRef, Homomorphism, MAX_ORDER};
use crate::{Error, Result};

/// Builtin families. `dihedral(n)` has order `2n`; `heisenberg(p)` is the
/// unitriangular 3x3 group over `Z_p`, order `p^3`; `semidirect_cyclic(n,
/// m, k)` is `Z_n x| Z_m` with the `Z_m` generator acting by multiplication
/// by `k` (requires `k^m = 1 mod n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    Cyclic(usize),
    Dihedral(usize),
    Quaternion8,
    ElementaryAbelian(u64, u32),
    Heisenberg(u64),
    Symmetric(usize),
    DirectProduct(Box<Builtin>, Box<Builtin>),
    SemidirectCyclic { n: usize, m: usize, k: usize },
}

impl Builtin {
    /// Parses expressions like `dihedral(4)`, `elementary_abelian(2,3)` or
    /// `direct_product(cyclic(2),cyclic(4))`.
    pub fn parse(s: &str) -> Result<Builtin> {
        let s = s.trim();
        let (head, args) = match s.find('(') {
            None => (s, Vec::new()),
            Some(open) => {
                if !s.ends_with(')') {
                    return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
                }
                let inner = &s[open + 1..s.len() - 1];
                (&s[..open], split_args(inner)?)
            }
        };
        let want = |n: usize| -> Result<()> {
            if args.len() != n {
                return Err(Error::Parse(format!(
                    "{head} expects {n} argument(s), got {}",
                    args.len()
                )));
            }
            Ok(())
        };
        let num = |i: usize| -> Result<usize> {
            args[i]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {:?} in {s:?}", args[i])))
        };
        match head {
            "cyclic" => {
                want(1)?;
                Ok(Builtin::Cyclic(num(0)?))
            }
            "dihedral" => {
                want(1)?;
                Ok(Builtin::Dihedral(num(0)?))
            }
            "quaternion8" => {
                want(0)?;
                Ok(Builtin::Quaternion8)
            }
            "elementary_abelian" => {
                want(2)?;
                Ok(Builtin::ElementaryAbelian(num(0)? as u64, num(1)? as u32))
            }
            "heisenberg" => {
                want(1)?;
                Ok(Builtin::Heisenberg(num(0)? as u64))
            }
            "symmetric" => {
                want(1)?;
                Ok(Builtin::Symmetric(num(0)?))
            }
            "direct_product" => {
                want(2)?;
                Ok(Builtin::DirectProduct(
                    Box::new(Builtin::parse(&args[0])?),
                    Box::new(Builtin::parse(&args[1])?),
                ))
            }
            "semidirect_cyclic" => {
                want(3)?;
                Ok(Builtin::SemidirectCyclic {
                    n: num(0)?,
                    m: num(1)?,
                    k: num(2)?,
                })
            }
            other => Err(Error::Parse(format!("unknown builtin {other:?}"))),
        }
    }

    pub fn expr(&self) -> String {
        match self {
            Builtin::Cyclic(n) => format!("cyclic({n})"),
            Builtin::Dihedral(n) => format!("dihedral({n})"),
            Builtin::Quaternion8 => "quaternion8".to_string(),
            Builtin::ElementaryAbelian(p, k) => format!("elementary_abelian({p},{k})"),
            Builtin::Heisenberg(p) => format!("heisenberg({p})"),
            Builtin::Symmetric(n) => format!("symmetric({n})"),
            Builtin::DirectProduct(a, b) => format!("direct_product({},{})", a.expr(), b.expr()),
            Builtin::SemidirectCyclic { n, m, k } => format!("semidirect_cyclic({n},{m},{k})"),
        }
    }

    pub fn build(&self) -> Result<GroupRef> {
        match self {
            Builtin::Cyclic(n) => build_cyclic(*n),
            Builtin::Dihedral(n) => build_dihedral(*n),
            Builtin::Quaternion8 => build_quaternion8(),
            Builtin::ElementaryAbelian(p, k) => build_elementary_abelian(*p, *k),
            Builtin::Heisenberg(p) => build_heisenberg(*p),
            Builtin::Symmetric(n) => build_symmetric(*n),
            Builtin::DirectProduct(a, b) => {
                let ga = a.build()?;
                let gb = b.build()?;
                build_direct_product(&ga, &gb)
            }
            Builtin::SemidirectCyclic { n, m, k } => build_semidirect_cyclic(*n, *m, *k),
        }
    }
}

fn split_args(s: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                args.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        args.push(cur.trim().to_string());
    }
    Ok(args)
}

fn check_order(name: &str, order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidInput(format!("{name} would be empty")));
    }
    if order > MAX_ORDER {
        return Err(Error::cap(name.to_string(), order, "table", MAX_ORDER));
    }
    Ok(())
}

fn build_cyclic(n: usize) -> Result<GroupRef> {
    check_order(&format!("cyclic({n})"), n)?;
    let table: Vec<Elem> = (0..n)
        .flat_map(|i| (0..n).map(move |j| ((i + j) % n) as Elem))
        .collect();
    let names = (0..n)
        .map(|i| match i {
            0 => "e".to_string(),
            1 => "g".to_string(),
            _ => format!("g{i}"),
        })
        .collect();
    let gens = if n > 1 { vec![1] } else { vec![] };
    FiniteGroup::from_table(format!("cyclic({n})"), names, table, Some(gens))
}

fn build_dihedral(n: usize) -> Result<GroupRef> {
    if n == 0 {
        return Err(Error::InvalidInput("dihedral(0) is not a group".into()));
    }
    let order = 2 * n;
    check_order(&format!("dihedral({n})"), order)?;
    // element (i, e) = r^i s^e at index e*n + i; s r = r^{-1} s
    let idx = |i: usize, e: usize| (e * n + i) as Elem;
    let mut table = vec![0 as Elem; order * order];
    for i in 0..n {
        for e in 0..2 {
            for j in 0..n {
                for d in 0..2 {
                    // r^i s^e r^j s^d = r^{i + (-1)^e j} s^{e+d}
                    let jj = if e == 0 { j } else { (n - j) % n };
                    let prod = idx((i + jj) % n, (e + d) % 2);
                    table[idx(i, e) as usize * order + idx(j, d) as usize] = prod;
                }
            }
        }
    }
    let names: Vec<String> = (0..order)
        .map(|x| {
            let (i, e) = (x % n, x / n);
            match (i, e) {
                (0, 0) => "e".to_string(),
                (1, 0) => "r".to_string(),
                (_, 0) => format!("r{i}"),
                (0, 1) => "s".to_string(),
                (1, 1) => "rs".to_string(),
                (_, 1) => format!("r{i}s"),
                _ => unreachable!(),
            }
        })
        .collect();
    let gens = if n > 1 {
        vec![1, n as Elem]
    } else {
        vec![n as Elem]
    };
    FiniteGroup::from_table(format!("dihedral({n})"), names, table, Some(gens))
}

fn build_quaternion8() -> Result<GroupRef> {
    // indices: 0:+1 1:-1 2:+i 3:-i 4:+j 5:-j 6:+k 7:-k
    let unit_mul = |a: usize, b: usize| -> (usize, bool) {
        // units 0 = 1, 1 = i, 2 = j, 3 = k; returns (unit, negative)
        match (a, b) {
            (0, x) => (x, false),
            (x, 0) => (x, false),
            (1, 1) | (2, 2) | (3, 3) => (0, true),
            (1, 2) => (3, false),
            (2, 1) => (3, true),
            (2, 3) => (1, false),
            (3, 2) => (1, true),
            (3, 1) => (2, false),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    };
    let mut table = vec![0 as Elem; 64];
    for x in 0..8 {
        for y in 0..8 {
            let (ua, sa) = (x / 2, x % 2 == 1);
            let (ub, sb) = (y / 2, y % 2 == 1);
            let (u, neg) = unit_mul(ua, ub);
            let sign = (sa ^ sb) ^ neg;
            table[x * 8 + y] = (u * 2 + sign as usize) as Elem;
        }
    }
    let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    FiniteGroup::from_table("quaternion8", names, table, Some(vec![2, 4]))
}

fn build_elementary_abelian(p: u64, k: u32) -> Result<GroupRef> {
    let name = format!("elementary_abelian({p},{k})");
    if p < 2 {
        return Err(Error::InvalidInput(format!("{name}: p must be prime")));
    }
    crate::linalg::CoeffRing::mod_p(p)?;
    let order = (p as usize)
        .checked_pow(k)
        .filter(|&o| o <= MAX_ORDER)
        .ok_or_else(|| Error::cap(name.clone(), usize::MAX, "table", MAX_ORDER))?;
    check_order(&name, order)?;
    let pu = p as usize;
    let digits = |mut x: usize| -> Vec<usize> {
        (0..k).map(|_| {
            let d = x % pu;
            x /= pu;
            d
        }).collect()
    };
    let mut table = vec![0 as Elem; order * order];
    for i in 0..order {
        let di = digits(i);
        for j in 0..order {
            let dj = digits(j);
            let mut sum = 0usize;
            for t in (0..k as usize).rev() {
                sum = sum * pu + (di[t] + dj[t]) % pu;
            }
            table[i * order + j] = sum as Elem;
        }
    }
    let names = (0..order)
        .map(|i| {
            let d = digits(i);
            format!(
                "({})",
                d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    let gens: Vec<Elem> = (0..k as usize).map(|t| pu.pow(t as u32) as Elem).collect();
    FiniteGroup::from_table(name, names, table, Some(gens))
}

fn build_heisenberg(p: u64) -> Result<GroupRef> {
    let name = format!("heisenberg({p})");
    crate::linalg::CoeffRing::mod_p(p)?;
    let pu = p as usize;
    let order = pu * pu * pu;
    check_order(&name, order)?;
    // (a, b, c) ~ upper unitriangular [[1,a,c],[0,1,b],[0,0,1]]
    // (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')
    let idx = |a: usize, b: usize, c: usize| a + pu * b + pu * pu * c;
    let mut table = vec![0 as Elem; order * order];
    for a in 0..pu {
        for b in 0..pu {
            for c in 0..pu {
                let x = idx(a, b, c);
                for a2 in 0..pu {
                    for b2 in 0..pu {
                        for c2 in 0..pu {
                            let y = idx(a2, b2, c2);
                            let prod = idx((a + a2) % pu, (b + b2) % pu, (c + c2 + a * b2) % pu);
                            table[x * order + y] = prod as Elem;
                        }
                    }
                }
            }
        }
    }
    let names = (0..order)
        .map(|x| {
            let (a, b, c) = (x % pu, (x / pu) % pu, x / (pu * pu));
            format!("({a},{b},{c})")
        })
        .collect();
    let gens = vec![idx(1, 0, 0) as Elem, idx(0, 1, 0) as Elem];
    FiniteGroup::from_table(name, names, table, Some(gens))
}

fn build_symmetric(n: usize) -> Result<GroupRef> {
    let name = format!("symmetric({n})");
    if n > 5 {
        return Err(Error::InvalidInput(format!(
            "{name}: only degrees up to 5 are materialized"
        )));
    }
    let perms = all_permutations(n.max(1));
    let order = perms.len();
    check_order(&name, order)?;
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, p) in perms.iter().enumerate() {
        index.insert(p.clone(), i);
    }
    let mut table = vec![0 as Elem; order * order];
    for (i, p) in perms.iter().enumerate() {
        for (j, q) in perms.iter().enumerate() {
            // (p * q)(x) = p(q(x))
            let prod: Vec<usize> = (0..p.len()).map(|x| p[q[x]]).collect();
            table[i * order + j] = index[&prod] as Elem;
        }
    }
    let names = perms.iter().map(|p| cycle_notation(p)).collect();
    let gens: Vec<Elem> = if n >= 2 {
        let mut transposition: Vec<usize> = (0..n).collect();
        transposition.swap(0, 1);
        let cycle: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
        let mut g = vec![index[&transposition] as Elem];
        if n > 2 {
            g.push(index[&cycle] as Elem);
        }
        g
    } else {
        vec![]
    };
    FiniteGroup::from_table(name, names, table, Some(gens))
}

/// Permutations of `0..n` in lexicographic order; the identity comes first.
fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

fn cycle_notation(p: &[usize]) -> String {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut parts = Vec::new();
    for start in 0..n {
        if seen[start] || p[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut x = p[start];
        while x != start {
            seen[x] = true;
            cyc.push(x);
            x = p[x];
        }
        parts.push(format!(
            "({})",
            cyc.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        ));
    }
    if parts.is_empty() {
        "e".to_string()
    } else {
        parts.join("")
    }
}

fn build_direct_product(a: &GroupRef, b: &GroupRef) -> Result<GroupRef> {
    let (na, nb) = (a.order(), b.order());
    let order = na * nb;
    let name = format!("{}x{}", a.name(), b.name());
    check_order(&name, order)?;
    let idx = |x: usize, y: usize| x * nb + y;
    let mut table = vec![0 as Elem; order * order];
    for xa in 0..na {
        for xb in 0..nb {
            for ya in 0..na {
                for yb in 0..nb {
                    let prod = idx(
                        a.mul(xa as Elem, ya as Elem) as usize,
                        b.mul(xb as Elem, yb as Elem) as usize,
                    );
                    table[idx(xa, xb) * order + idx(ya, yb)] = prod as Elem;
                }
            }
        }
    }
    let names = (0..order)
        .map(|x| {
            format!(
                "({},{})",
                a.element_name((x / nb) as Elem),
                b.element_name((x % nb) as Elem)
            )
        })
        .collect();
    let mut gens: Vec<Elem> = a
        .generators()
        .iter()
        .map(|&g| idx(g as usize, 0) as Elem)
        .collect();
    gens.extend(b.generators().iter().map(|&g| idx(0, g as usize) as Elem));
    FiniteGroup::from_table(name, names, table, Some(gens))
}

fn build_semidirect_cyclic(n: usize, m: usize, k: usize) -> Result<GroupRef> {
    let name = format!("semidirect_cyclic({n},{m},{k})");
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput(format!("{name}: moduli must be positive")));
    }
    let order = n * m;
    check_order(&name, order)?;
    // validate k^m = 1 mod n
    let mut pw = 1usize % n;
    for _ in 0..m {
        pw = (pw * (k % n)) % n;
    }
    if pw != 1 % n {
        return Err(Error::InvalidInput(format!(
            "{name}: k^m = {pw} mod {n}, expected 1; the action is not well-defined"
        )));
    }
    // powers of k mod n
    let mut kp = vec![1usize % n; m];
    for b in 1..m {
        kp[b] = (kp[b - 1] * (k % n)) % n;
    }
    // (a, b): x^a t^b, (a,b)(a',b') = (a + a' k^b mod n, b + b' mod m)
    let idx = |a: usize, b: usize| b * n + a;
    let mut table = vec![0 as Elem; order * order];
    for a in 0..n {
        for b in 0..m {
            for a2 in 0..n {
                for b2 in 0..m {
                    let prod = idx((a + a2 * kp[b]) % n, (b + b2) % m);
                    table[idx(a, b) * order + idx(a2, b2)] = prod as Elem;
                }
            }
        }
    }
    let names = (0..order)
        .map(|x| {
            let (a, b) = (x % n, x / n);
            match (a, b) {
                (0, 0) => "e".to_string(),
                (a, 0) => format!("x{a}"),
                (0, b) => format!("t{b}"),
                (a, b) => format!("x{a}t{b}"),
            }
        })
        .collect();
    let mut gens = Vec::new();
    if n > 1 {
        gens.push(idx(1, 0) as Elem);
    }
    if m > 1 {
        gens.push(idx(0, 1) as Elem);
    }
    FiniteGroup::from_table(name, names, table, Some(gens))
}

/// Builds a group from permutation generators on `0..degree` by closure.
pub fn build_permutation_group(
    name: impl Into<String>,
    degree: usize,
    generators: &[Vec<usize>],
) -> Result<GroupRef> {
    let name = name.into();
    for (i, p) in generators.iter().enumerate() {
        if p.len() != degree {
            return Err(Error::InvalidInput(format!(
                "generator {i} has length {}, expected degree {degree}",
                p.len()
            )));
        }
        let mut seen = vec![false; degree];
        for &x in p {
            if x >= degree || seen[x] {
                return Err(Error::InvalidInput(format!(
                    "generator {i} is not a permutation of 0..{degree}"
                )));
            }
            seen[x] = true;
        }
    }
    let identity: Vec<usize> = (0..degree).collect();
    let mut elems: Vec<Vec<usize>> = vec![identity.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    index.insert(identity, 0);
    let mut head = 0usize;
    while head < elems.len() {
        let cur = elems[head].clone();
        head += 1;
        for g in generators {
            // right multiplication: (cur * g)(x) = cur(g(x))
            let next: Vec<usize> = (0..degree).map(|x| cur[g[x]]).collect();
            if !index.contains_key(&next) {
                if elems.len() == MAX_ORDER {
                    return Err(Error::cap(
                        format!("permutation group {name:?}"),
                        elems.len() + 1,
                        "table",
                        MAX_ORDER,
                    ));
                }
                index.insert(next.clone(), elems.len());
                elems.push(next);
            }
        }
    }
    let order = elems.len();
    let mut table = vec![0 as Elem; order * order];
    for (i, p) in elems.iter().enumerate() {
        for (j, q) in elems.iter().enumerate() {
            let prod: Vec<usize> = (0..degree).map(|x| p[q[x]]).collect();
            table[i * order + j] = index[&prod] as Elem;
        }
    }
    let names = elems.iter().map(|p| cycle_notation(p)).collect();
    let gens: Vec<Elem> = generators
        .iter()
        .map(|g| index[g] as Elem)
        .filter(|&i| i != 0)
        .collect();
    FiniteGroup::from_table(name, names, table, Some(gens))
}

/// How a group is specified before construction.
#[derive(Debug, Clone)]
pub enum GroupSpec {
    Table {
        name: String,
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
    },
    Permutation {
        name: String,
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    Builtin { name: String, builtin: Builtin },
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupRef> {
        match self {
            GroupSpec::Table {
                name,
                elements,
                table,
            } => {
                let order = elements.len();
                let mut flat = Vec::with_capacity(order * order);
                if table.len() != order {
                    return Err(Error::InvalidInput(format!(
                        "table has {} rows for {} elements",
                        table.len(),
                        order
                    )));
                }
                for row in table {
                    if row.len() != order {
                        return Err(Error::InvalidInput(format!(
                            "table row of length {} for {} elements",
                            row.len(),
                            order
                        )));
                    }
                    for &x in row {
                        if x >= order {
                            return Err(Error::InvalidInput(format!("table entry {x} out of range")));
                        }
                        flat.push(x as Elem);
                    }
                }
                FiniteGroup::from_table(name.clone(), elements.clone(), flat, None)
            }
            GroupSpec::Permutation {
                name,
                degree,
                generators,
            } => build_permutation_group(name.clone(), *degree, generators),
            GroupSpec::Builtin { name, builtin } => {
                let g = builtin.build()?;
                if name.is_empty() || name == g.name() {
                    Ok(g)
                } else {
                    // rebuild with the requested display name
                    FiniteGroup::from_table(
                        name.clone(),
                        g.element_names().to_vec(),
                        g.table().to_vec(),
                        Some(g.generators().to_vec()),
                    )
                }
            }
        }
    }
}

/// On-disk group format (JSON).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupFile {
    Table {
        name: String,
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
    },
    Permutation {
        name: String,
        degree: usize,
        generators: Vec<Vec<usize>>,
    },
    Builtin {
        name: String,
        builtin: String,
        #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
        params: serde_json::Map<String, serde_json::Value>,
    },
}

impl GroupFile {
    pub fn to_spec(&self) -> Result<GroupSpec> {
        match self {
            GroupFile::Table {
                name,
                elements,
                table,
            } => Ok(GroupSpec::Table {
                name: name.clone(),
                elements: elements.clone(),
                table: table.clone(),
            }),
            GroupFile::Permutation {
                name,
                degree,
                generators,
            } => Ok(GroupSpec::Permutation {
                name: name.clone(),
                degree: *degree,
                generators: generators.clone(),
            }),
            GroupFile::Builtin {
                name,
                builtin,
                params,
            } => {
                let expr = if params.is_empty() {
                    builtin.clone()
                } else {
                    // parameters may come structured; render them in the
                    // canonical positional order for the family
                    let get = |key: &str| -> Result<String> {
                        params
                            .get(key)
                            .map(render_param)
                            .transpose()?
                            .ok_or_else(|| {
                                Error::Parse(format!("builtin {builtin:?} missing param {key:?}"))
                            })
                    };
                    match builtin.as_str() {
                        "cyclic" | "dihedral" | "heisenberg" | "symmetric" => {
                            format!("{builtin}({})", get("n").or_else(|_| get("p"))?)
                        }
                        "elementary_abelian" => format!("{builtin}({},{})", get("p")?, get("k")?),
                        "semidirect_cyclic" => {
                            format!("{builtin}({},{},{})", get("n")?, get("m")?, get("k")?)
                        }
                        "direct_product" => {
                            format!("{builtin}({},{})", get("left")?, get("right")?)
                        }
                        other => return Err(Error::Parse(format!("unknown builtin {other:?}"))),
                    }
                };
                Ok(GroupSpec::Builtin {
                    name: name.clone(),
                    builtin: Builtin::parse(&expr)?,
                })
            }
        }
    }

    pub fn load(path: &Path) -> Result<GroupRef> {
        let text = std::fs::read_to_string(path)?;
        let file: GroupFile = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        file.to_spec()?.build()
    }
}

fn render_param(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Object(map) => {
            // nested builtin: {"builtin": "...", "params": {...}}
            let inner = GroupFile::Builtin {
                name: String::new(),
                builtin: map
                    .get("builtin")
                    .and_then(|b| b.as_str())
                    .ok_or_else(|| Error::Parse("nested builtin needs a name".into()))?
                    .to_string(),
                params: map
                    .get("params")
                    .and_then(|p| p.as_object())
                    .cloned()
                    .unwrap_or_default(),
            };
            match inner.to_spec()? {
                GroupSpec::Builtin { builtin, .. } => Ok(builtin.expr()),
                _ => unreachable!(),
            }
        }
        other => Err(Error::Parse(format!("bad builtin parameter {other}"))),
    }
}

/// On-disk homomorphism format (JSON); paths are relative to the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomFile {
    pub source: String,
    pub target: String,
    pub images: HomImages,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomImages {
    pub by: String,
    pub map: Vec<usize>,
}

impl HomFile {
    pub fn load(path: &Path) -> Result<Homomorphism> {
        let text = std::fs::read_to_string(path)?;
        let file: HomFile = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let source = GroupFile::load(&base.join(&file.source))?;
        let target = GroupFile::load(&base.join(&file.target))?;
        let map: Vec<Elem> = file.images.map.iter().map(|&x| x as Elem).collect();
        match file.images.by.as_str() {
            "elements" => Homomorphism::new(source, target, map),
            "generators" => {
                if map.len() != source.generators().len() {
                    return Err(Error::InvalidInput(format!(
                        "{} generator images for {} generators",
                        map.len(),
                        source.generators().len()
                    )));
                }
                let pairs: Vec<(Elem, Elem)> = source
                    .generators()
                    .iter()
                    .copied()
                    .zip(map.iter().copied())
                    .collect();
                hom_from_images(&source, &target, &pairs)
            }
            other => Err(Error::Parse(format!(
                "images.by must be \"generators\" or \"elements\", got {other:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for expr in [
            "cyclic(6)",
            "dihedral(4)",
            "quaternion8",
            "elementary_abelian(2,3)",
            "heisenberg(3)",
            "symmetric(4)",
            "direct_product(cyclic(2),cyclic(4))",
            "semidirect_cyclic(8,2,3)",
            "direct_product(direct_product(cyclic(2),cyclic(2)),cyclic(4))",
        ] {
            let b = Builtin::parse(expr).unwrap();
            assert_eq!(b.expr(), expr);
            b.build().unwrap();
        }
    }

    #[test]
    fn builtin_orders() {
        let cases = [
            ("cyclic(1)", 1),
            ("cyclic(12)", 12),
            ("dihedral(1)", 2),
            ("dihedral(8)", 16),
            ("quaternion8", 8),
            ("elementary_abelian(3,2)", 9),
            ("heisenberg(3)", 27),
            ("symmetric(4)", 24),
            ("symmetric(5)", 120),
            ("semidirect_cyclic(8,2,3)", 16),
        ];
        for (expr, order) in cases {
            let g = Builtin::parse(expr).unwrap().build().unwrap();
            assert_eq!(g.order(), order, "{expr}");
        }
    }

    #[test]
    fn semidirect_validates_action() {
        // 2^2 = 4 != 1 mod 5
        assert!(Builtin::parse("semidirect_cyclic(5,2,2)")
            .unwrap()
            .build()
            .is_err());
        // 2^4 = 16 = 1 mod 5
        let g = Builtin::parse("semidirect_cyclic(5,4,2)")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(g.order(), 20);
        assert!(!g.is_abelian());
    }

    #[test]
    fn permutation_closure_three_cycle() {
        let g = build_permutation_group("c3", 3, &[vec![1, 2, 0]]).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.element_order(1), 3);
    }

    #[test]
    fn heisenberg2_is_dihedral4_sized() {
        let g = Builtin::parse("heisenberg(2)").unwrap().build().unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        assert_eq!(g.exponent(), 4);
    }

    #[test]
    fn group_file_json() {
        let text = r#"{ "kind": "builtin", "name": "K4", "builtin": "elementary_abelian", "params": {"p": 2, "k": 2} }"#;
        let file: GroupFile = serde_json::from_str(text).unwrap();
        let g = file.to_spec().unwrap().build().unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.name(), "K4");

        let text = r#"{ "kind": "table", "name": "z2", "elements": ["e", "a"], "table": [[0,1],[1,0]] }"#;
        let file: GroupFile = serde_json::from_str(text).unwrap();
        let g = file.to_spec().unwrap().build().unwrap();
        assert_eq!(g.order(), 2);

        let text = r#"{ "kind": "permutation", "name": "v", "degree": 4, "generators": [[1,0,3,2],[2,3,0,1]] }"#;
        let file: GroupFile = serde_json::from_str(text).unwrap();
        let g = file.to_spec().unwrap().build().unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.exponent(), 2);
    }

    #[test]
    fn symmetric_identity_first() {
        let s4 = Builtin::parse("symmetric(4)").unwrap().build().unwrap();
        assert_eq!(s4.element_name(0), "e");
        assert_eq!(s4.element_order(0), 1);
    }
}
