//! Independent brute-force ground truth: exhaustive cactus censuses over
//! adjacency matrices, exhaustive structure enumeration for small grammars,
//! Burnside orbit counting over explicit string orbits, and the classical
//! rooted-tree recurrence.
//!
//! Nothing here shares operator or series code with the counting engine;
//! agreement between the two is the evidence the acceptance suite wants.

use crate::grammar::{GrammarExpr, GrammarSystem, OmegaSpec};
use crate::sampler::Structure;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("census limited to {limit} vertices, {requested} requested")]
    CensusGuard { limit: usize, requested: usize },
    #[error("structure enumeration limited to size {limit}, {requested} requested")]
    StructureGuard { limit: usize, requested: usize },
    #[error("structure enumeration exceeded {0} objects")]
    StructureExplosion(usize),
    #[error("orbit enumeration needs q^m <= {limit}, got {requested}")]
    BurnsideGuard { limit: u64, requested: u64 },
    #[error("grammar root uses subtraction; exhaustive enumeration needs a plain class")]
    SignedRoot,
    #[error("grammar is not well-founded at size {0}")]
    IllFounded(usize),
}

const CENSUS_LIMIT: usize = 7;
const STRUCTURE_SIZE_LIMIT: usize = 12;
const STRUCTURE_COUNT_LIMIT: usize = 2_000_000;
const BURNSIDE_LIMIT: u64 = 10_000_000;

/// Exhaustive per-size counts for a cactus family.
#[derive(Debug, Clone)]
pub struct CensusResult {
    pub omega: OmegaSpec,
    pub rooted: bool,
    pub max_n: usize,
    /// labeled counts, index 0..=max_n
    pub labeled: Vec<u64>,
    /// unlabeled counts, index 0..=max_n
    pub unlabeled: Vec<u64>,
    pub elapsed: Duration,
}

impl CensusResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n,labeled,unlabeled");
        for n in 0..=self.max_n {
            let _ = writeln!(out, "{},{},{}", n, self.labeled[n], self.unlabeled[n]);
        }
        out
    }
}

/// Labeled census by exhaustive enumeration of adjacency matrices, filtered
/// to connected cacti with every cycle length in Ω and bridges admitted only
/// when 2 is. Rooted labeled counts are n times the unrooted ones.
pub fn census_labeled_cacti(
    omega: &OmegaSpec,
    max_n: usize,
    rooted: bool,
) -> Result<CensusResult, OracleError> {
    census(omega, max_n, rooted)
}

/// Unlabeled census: the labeled census deduplicated by canonical form
/// (minimum adjacency encoding over vertex permutations). The rooted
/// variant dedupes (graph, root) pairs.
pub fn census_unlabeled_cacti(
    omega: &OmegaSpec,
    max_n: usize,
    rooted: bool,
) -> Result<CensusResult, OracleError> {
    census(omega, max_n, rooted)
}

pub fn census(
    omega: &OmegaSpec,
    max_n: usize,
    rooted: bool,
) -> Result<CensusResult, OracleError> {
    if max_n > CENSUS_LIMIT {
        return Err(OracleError::CensusGuard {
            limit: CENSUS_LIMIT,
            requested: max_n,
        });
    }
    let start = Instant::now();
    let mut labeled = vec![0u64; max_n + 1];
    let mut unlabeled = vec![0u64; max_n + 1];
    for n in 1..=max_n {
        let (lab, unlab) = census_size(omega, n, rooted);
        labeled[n] = lab;
        unlabeled[n] = unlab;
    }
    Ok(CensusResult {
        omega: omega.clone(),
        rooted,
        max_n,
        labeled,
        unlabeled,
        elapsed: start.elapsed(),
    })
}

fn census_size(omega: &OmegaSpec, n: usize, rooted: bool) -> (u64, u64) {
    if n == 1 {
        // the single-vertex cactus, vacuously fine for any omega
        return (1, 1);
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let bits = pairs.len();
    // a cactus on n vertices has at most floor(3(n-1)/2) edges
    let max_edges = 3 * (n - 1) / 2;
    let mut labeled = 0u64;
    let mut unlabeled = 0u64;
    let mut unlabeled_rooted = 0u64;
    // every labeled relabeling of classes counted so far
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    for mask in 0u64..(1u64 << bits) {
        if (mask.count_ones() as usize) > max_edges {
            continue;
        }
        let mut adj = vec![0u16; n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << b) != 0 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        if !is_connected_bitset(&adj) || !is_cactus_in_omega(&adj, omega) {
            continue;
        }
        labeled += 1;
        if seen.contains(&mask) {
            continue;
        }
        // new isomorphism class: walk its relabeling orbit once, tracking
        // a canonical (mask, root image) per root for the rooted dedup
        unlabeled += 1;
        let mut best_root: Vec<(u64, usize)> = vec![(u64::MAX, usize::MAX); n];
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            let mut relabeled = 0u64;
            for (b, &(i, j)) in pairs.iter().enumerate() {
                // new vertex i plays the role of old vertex p[i]
                if adj[p[i]] & (1 << p[j]) != 0 {
                    relabeled |= 1 << b;
                }
            }
            seen.insert(relabeled);
            for (new_label, &old_label) in p.iter().enumerate() {
                let candidate = (relabeled, new_label);
                if candidate < best_root[old_label] {
                    best_root[old_label] = candidate;
                }
            }
        });
        if rooted {
            let distinct: BTreeSet<(u64, usize)> = best_root.into_iter().collect();
            unlabeled_rooted += distinct.len() as u64;
        }
    }
    if rooted {
        (labeled * n as u64, unlabeled_rooted)
    } else {
        (labeled, unlabeled)
    }
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}

fn is_connected_bitset(adj: &[u16]) -> bool {
    let n = adj.len();
    let mut seen = 1u16;
    let mut frontier = 1u16;
    while frontier != 0 {
        let mut next = 0u16;
        for v in 0..n {
            if frontier & (1 << v) != 0 {
                next |= adj[v];
            }
        }
        next &= !seen;
        seen |= next;
        frontier = next;
    }
    seen.count_ones() as usize == n
}

/// Definition-level cactus check: enumerate every simple cycle and require
/// them pairwise edge-disjoint; cycle lengths must lie in Ω and edges on no
/// cycle are bridges, admitted only when 2 is in Ω.
fn is_cactus_in_omega(adj: &[u16], omega: &OmegaSpec) -> bool {
    let n = adj.len();
    let mut cycle_edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut all_cycles: Vec<Vec<usize>> = Vec::new();
    // enumerate simple cycles anchored at their minimum vertex, walking only
    // to vertices larger than the anchor, second vertex < last vertex to
    // visit each cycle once per orientation class
    let mut path: Vec<usize> = Vec::new();
    for anchor in 0..n {
        path.push(anchor);
        dfs_cycles(adj, anchor, anchor, &mut path, &mut all_cycles);
        path.pop();
    }
    for cycle in &all_cycles {
        if !omega.contains(cycle.len() as u64) {
            return false;
        }
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let key = (a.min(b), a.max(b));
            let count = cycle_edges.entry(key).or_insert(0);
            *count += 1;
            if *count > 1 {
                return false;
            }
        }
    }
    if !omega.contains(2) {
        // bridges are 2-gons; reject any edge on no cycle
        for i in 0..n {
            for j in (i + 1)..n {
                if adj[i] & (1 << j) != 0 && !cycle_edges.contains_key(&(i, j)) {
                    return false;
                }
            }
        }
    }
    true
}

fn dfs_cycles(
    adj: &[u16],
    anchor: usize,
    current: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let n = adj.len();
    for next in (anchor + 1)..n {
        if adj[current] & (1 << next) == 0 {
            continue;
        }
        if path.contains(&next) {
            continue;
        }
        // closing edge back to the anchor?
        if path.len() >= 2 && adj[next] & (1 << anchor) != 0 {
            // canonical orientation: second vertex smaller than last
            let mut cycle = path.clone();
            cycle.push(next);
            if cycle[1] < cycle[cycle.len() - 1] {
                out.push(cycle);
            }
        }
        path.push(next);
        dfs_cycles(adj, anchor, next, path, out);
        path.pop();
    }
}

/// Exhaustively enumerate every structure of the given size generated by a
/// grammar whose root is a single class (no signed combination).
pub fn enumerate_structures(
    system: &GrammarSystem,
    size: usize,
) -> Result<Vec<Structure>, OracleError> {
    if size > STRUCTURE_SIZE_LIMIT {
        return Err(OracleError::StructureGuard {
            limit: STRUCTURE_SIZE_LIMIT,
            requested: size,
        });
    }
    if system.root().len() != 1 || system.root()[0].0 != 1 {
        return Err(OracleError::SignedRoot);
    }
    let mut ctx = EnumCtx {
        system,
        memo: BTreeMap::new(),
        in_progress: BTreeSet::new(),
        produced: 0,
    };
    let root = system.root()[0].1.clone();
    ctx.enum_expr(&GrammarExpr::Ref(root), size)
}

struct EnumCtx<'a> {
    system: &'a GrammarSystem,
    memo: BTreeMap<(String, usize), Vec<Structure>>,
    in_progress: BTreeSet<(String, usize)>,
    produced: usize,
}

impl EnumCtx<'_> {
    fn bump(&mut self, added: usize) -> Result<(), OracleError> {
        self.produced += added;
        if self.produced > STRUCTURE_COUNT_LIMIT {
            return Err(OracleError::StructureExplosion(STRUCTURE_COUNT_LIMIT));
        }
        Ok(())
    }

    fn enum_expr(&mut self, expr: &GrammarExpr, size: usize) -> Result<Vec<Structure>, OracleError> {
        match expr {
            GrammarExpr::Atom => Ok(if size == 1 {
                vec![Structure::atom()]
            } else {
                vec![]
            }),
            GrammarExpr::One => Ok(if size == 0 {
                vec![Structure::Tuple(vec![])]
            } else {
                vec![]
            }),
            GrammarExpr::Ref(name) => {
                let key = (name.clone(), size);
                if let Some(cached) = self.memo.get(&key) {
                    return Ok(cached.clone());
                }
                if !self.in_progress.insert(key.clone()) {
                    return Err(OracleError::IllFounded(size));
                }
                let body = self.system.rule(name).expect("validated ref").clone();
                let result = self.enum_expr(&body, size);
                self.in_progress.remove(&key);
                let result = result?;
                self.memo.insert(key, result.clone());
                Ok(result)
            }
            GrammarExpr::Sum(terms) => {
                let mut out = Vec::new();
                for t in terms {
                    out.extend(self.enum_expr(t, size)?);
                }
                self.bump(out.len())?;
                Ok(out)
            }
            GrammarExpr::Prod(factors) => self.enum_prod(factors, size),
            GrammarExpr::Op { op, card, arg } => {
                let mut out = Vec::new();
                // no component may be empty (validation guarantees val >= 1)
                for m in 0..=size {
                    if m == 0 {
                        if card.admits(0, &self.system.omega) && !op.forbids_empty() && size == 0 {
                            out.push(Structure::Node {
                                op: *op,
                                children: vec![],
                            });
                        }
                        continue;
                    }
                    if m > size || !card.admits(m as u64, &self.system.omega) {
                        continue;
                    }
                    let tuples = self.enum_tuples(arg, m, size)?;
                    let mut seen = BTreeSet::new();
                    for children in tuples {
                        let node = Structure::Node {
                            op: *op,
                            children,
                        }
                        .canonical();
                        seen.insert(node);
                    }
                    self.bump(seen.len())?;
                    out.extend(seen);
                }
                Ok(out)
            }
        }
    }

    /// All ordered m-tuples of arg-objects with total size `size`.
    fn enum_tuples(
        &mut self,
        arg: &GrammarExpr,
        m: usize,
        size: usize,
    ) -> Result<Vec<Vec<Structure>>, OracleError> {
        if m == 0 {
            return Ok(if size == 0 { vec![vec![]] } else { vec![] });
        }
        let mut out = Vec::new();
        // each component has size >= 1
        for first in 1..=(size.saturating_sub(m - 1)) {
            let heads = self.enum_expr(arg, first)?;
            if heads.is_empty() {
                continue;
            }
            let tails = self.enum_tuples(arg, m - 1, size - first)?;
            for tail in &tails {
                for head in &heads {
                    let mut tuple = Vec::with_capacity(m);
                    tuple.push(head.clone());
                    tuple.extend(tail.iter().cloned());
                    out.push(tuple);
                }
            }
            self.bump(heads.len() * tails.len())?;
        }
        Ok(out)
    }

    fn enum_prod(
        &mut self,
        factors: &[GrammarExpr],
        size: usize,
    ) -> Result<Vec<Structure>, OracleError> {
        fn helper(
            ctx: &mut EnumCtx,
            factors: &[GrammarExpr],
            size: usize,
        ) -> Result<Vec<Vec<Structure>>, OracleError> {
            match factors {
                [] => Ok(if size == 0 { vec![vec![]] } else { vec![] }),
                [first, rest @ ..] => {
                    let mut out = Vec::new();
                    for s in 0..=size {
                        let heads = ctx.enum_expr(first, s)?;
                        if heads.is_empty() {
                            continue;
                        }
                        let tails = helper(ctx, rest, size - s)?;
                        for tail in &tails {
                            for head in &heads {
                                let mut tuple = Vec::with_capacity(factors.len());
                                tuple.push(head.clone());
                                tuple.extend(tail.iter().cloned());
                                out.push(tuple);
                            }
                        }
                        ctx.bump(heads.len() * tails.len())?;
                    }
                    Ok(out)
                }
            }
        }
        Ok(helper(self, factors, size)?
            .into_iter()
            .map(Structure::Tuple)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryGroup {
    Trivial,
    Cyclic,
    Reversal,
    Dihedral,
    /// All permutations of the positions; orbits are multisets.
    Symmetric,
}

impl SymmetryGroup {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "trivial" => Some(SymmetryGroup::Trivial),
            "cyclic" => Some(SymmetryGroup::Cyclic),
            "reversal" => Some(SymmetryGroup::Reversal),
            "dihedral" => Some(SymmetryGroup::Dihedral),
            "symmetric" => Some(SymmetryGroup::Symmetric),
            _ => None,
        }
    }
}

/// Orbits of all q^m strings under the chosen position group, counted by
/// explicit orbit partition.
pub fn burnside_orbits(m: usize, q: usize, group: SymmetryGroup) -> Result<u64, OracleError> {
    let total = (q as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if total > BURNSIDE_LIMIT {
        return Err(OracleError::BurnsideGuard {
            limit: BURNSIDE_LIMIT,
            requested: total,
        });
    }
    if m == 0 {
        return Ok(1);
    }
    let mut canonical: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut string = vec![0u8; m];
    loop {
        let canon = canonical_string(&string, group);
        canonical.insert(canon);
        // increment base-q counter
        let mut i = 0;
        loop {
            if i == m {
                return Ok(canonical.len() as u64);
            }
            string[i] += 1;
            if (string[i] as usize) < q {
                break;
            }
            string[i] = 0;
            i += 1;
        }
    }
}

fn canonical_string(s: &[u8], group: SymmetryGroup) -> Vec<u8> {
    let m = s.len();
    let mut best = s.to_vec();
    let mut consider = |candidate: Vec<u8>| {
        if candidate < best {
            best = candidate;
        }
    };
    match group {
        SymmetryGroup::Trivial => {}
        SymmetryGroup::Cyclic => {
            for shift in 1..m {
                consider(rotate(s, shift));
            }
        }
        SymmetryGroup::Reversal => {
            let mut rev = s.to_vec();
            rev.reverse();
            consider(rev);
        }
        SymmetryGroup::Dihedral => {
            let mut rev = s.to_vec();
            rev.reverse();
            for shift in 0..m {
                consider(rotate(s, shift));
                consider(rotate(&rev, shift));
            }
        }
        SymmetryGroup::Symmetric => {
            let mut sorted = s.to_vec();
            sorted.sort_unstable();
            consider(sorted);
        }
    }
    best
}

fn rotate(s: &[u8], shift: usize) -> Vec<u8> {
    let m = s.len();
    (0..m).map(|i| s[(i + shift) % m]).collect()
}

/// Labeled orbit count for strings of q colors on m labeled positions:
/// non-identity moves fix nothing once labels are distinct, so the count is
/// q^m m! / |image|, with the group's faithful permutation image.
pub fn labeled_orbit_count(m: usize, q: usize, group: SymmetryGroup) -> BigInt {
    if m == 0 {
        return BigInt::one();
    }
    let image_size: u64 = match group {
        SymmetryGroup::Trivial => 1,
        SymmetryGroup::Cyclic => m as u64,
        SymmetryGroup::Reversal => {
            if m >= 2 {
                2
            } else {
                1
            }
        }
        SymmetryGroup::Dihedral => match m {
            1 => 1,
            2 => 2,
            _ => 2 * m as u64,
        },
        SymmetryGroup::Symmetric => factorial(m),
    };
    let mut total = BigInt::from(q).pow(m as u32) * BigInt::from(factorial(m));
    total /= BigInt::from(image_size);
    total
}

fn factorial(m: usize) -> u64 {
    (2..=m as u64).product::<u64>().max(1)
}

/// Rooted unlabeled trees on 1..=max_n vertices via the classical recurrence
/// r_{n+1} = (1/n) sum_k (sum_{d|k} d r_d) r_{n+1-k}; index 0 holds 0.
pub fn rooted_tree_counts(max_n: usize) -> Vec<BigInt> {
    let mut r = vec![BigInt::zero(); max_n + 1];
    if max_n == 0 {
        return r;
    }
    r[1] = BigInt::one();
    let mut c = vec![BigInt::zero(); max_n + 1];
    for n in 1..max_n {
        // c_k = sum over divisors d of k of d * r_d
        if c[n].is_zero() {
            let mut acc = BigInt::zero();
            for d in 1..=n {
                if n % d == 0 {
                    acc += BigInt::from(d) * &r[d];
                }
            }
            c[n] = acc;
        }
        let mut acc = BigInt::zero();
        for k in 1..=n {
            if c[k].is_zero() {
                let mut ck = BigInt::zero();
                for d in 1..=k {
                    if k % d == 0 {
                        ck += BigInt::from(d) * &r[d];
                    }
                }
                c[k] = ck;
            }
            acc += &c[k] * &r[n + 1 - k];
        }
        let (quot, rem) = num_integer::Integer::div_rem(&acc, &BigInt::from(n));
        debug_assert!(rem.is_zero());
        r[n + 1] = quot;
    }
    r
}

/// Chi-square statistic of observed counts against the uniform expectation.
pub fn chi_square_uniform(observed: &[u64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let k = observed.len() as f64;
    let expected = total as f64 / k;
    observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Critical value of the chi-square distribution at significance 1e-3
/// (Wilson-Hilferty approximation; adequate for the margins involved).
pub fn chi_square_critical_999(df: usize) -> f64 {
    let k = df as f64;
    let z = 3.090232306167813; // standard normal quantile at 0.999
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}
