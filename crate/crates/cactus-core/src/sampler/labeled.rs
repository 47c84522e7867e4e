//! Exact-size uniform sampler for labeled free rooted cacti.
//!
//! The class decomposes as G = Z * Set_{>=1}(B) with B = USeq_{Omega-1}(C)
//! and C = Z + G: a root vertex carries a nonempty set of polygons, each an
//! undirected sequence of further vertex classes. All tables hold labeled
//! counts (EGF coefficients times n!) with binomial convolutions. The only
//! non-integer factor, the 1/2 of an undirected sequence, is kept integral
//! by scaling the B table by two; with distinct labels every sequence of
//! two or more components has exactly two orientations, so sampling an
//! ordered sequence and forgetting the direction stays uniform.

use super::plane::pick_weighted;
use super::rng::RandomSource;
use super::structure::Structure;
use super::SampleError;
use crate::grammar::{OmegaSpec, OperatorKind};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone)]
pub struct LabeledFreeRootedSampler {
    omega: OmegaSpec,
    order: usize,
    binom: Vec<Vec<BigInt>>,
    /// C = Z + G
    c: Vec<BigInt>,
    /// G = Z * Set_{>=1}(B)
    g: Vec<BigInt>,
    /// Set(B)
    set_b: Vec<BigInt>,
    /// 2 * B where B = USeq_{Omega-1}(C)
    b2: Vec<BigInt>,
    /// C^j for j = 0..=a_max
    cpow: Vec<Vec<BigInt>>,
    /// Seq(C)
    tc: Vec<BigInt>,
}

impl LabeledFreeRootedSampler {
    pub fn build(omega: OmegaSpec, order: usize) -> Result<Self, SampleError> {
        let a_max = match &omega {
            OmegaSpec::Finite(members) => members
                .iter()
                .map(|&m| (m as usize).saturating_sub(1))
                .filter(|&a| a <= order)
                .max()
                .unwrap_or(0),
            OmegaSpec::AtLeast(c) => ((*c as usize).saturating_sub(1)).max(2),
        };
        let len = order + 1;
        let mut binom = vec![vec![BigInt::zero(); len]; len];
        for n in 0..len {
            binom[n][0] = BigInt::one();
            for k in 1..=n {
                binom[n][k] = &binom[n - 1][k - 1]
                    + if k < n {
                        binom[n - 1][k].clone()
                    } else {
                        BigInt::zero()
                    };
            }
        }
        let zero = BigInt::zero();
        let mut c = vec![zero.clone(); len];
        let mut g = vec![zero.clone(); len];
        let mut set_b = vec![zero.clone(); len];
        let mut b2 = vec![zero.clone(); len];
        let mut cpow = vec![vec![zero.clone(); len]; a_max + 1];
        let mut tc = vec![zero.clone(); len];
        cpow[0][0] = BigInt::one();
        set_b[0] = BigInt::one();
        tc[0] = BigInt::one();

        for n in 1..=order {
            g[n] = if n >= 2 {
                BigInt::from(n) * &set_b[n - 1]
            } else {
                BigInt::zero()
            };
            c[n] = if n == 1 { BigInt::one() } else { BigInt::zero() } + &g[n];
            for j in 1..=a_max {
                let mut acc = BigInt::zero();
                for t in 1..=n {
                    if !c[t].is_zero() && !cpow[j - 1][n - t].is_zero() {
                        acc += &binom[n][t] * &c[t] * &cpow[j - 1][n - t];
                    }
                }
                cpow[j][n] = acc;
            }
            let mut acc = BigInt::zero();
            for t in 1..=n {
                if !c[t].is_zero() && !tc[n - t].is_zero() {
                    acc += &binom[n][t] * &c[t] * &tc[n - t];
                }
            }
            tc[n] = acc;
            b2[n] = self_b2(&omega, a_max, &cpow, &tc, &binom, n);
            // component containing the smallest label
            let mut acc = BigInt::zero();
            for t in 1..=n {
                if !b2[t].is_zero() && !set_b[n - t].is_zero() {
                    acc += &binom[n - 1][t - 1] * &b2[t] * &set_b[n - t];
                }
            }
            let (quot, rem) = num_integer::Integer::div_rem(&acc, &BigInt::from(2));
            if !rem.is_zero() {
                return Err(SampleError::Internal(
                    "set recurrence produced a half-integer".into(),
                ));
            }
            set_b[n] = quot;
        }

        Ok(LabeledFreeRootedSampler {
            omega,
            order,
            binom,
            c,
            g,
            set_b,
            b2,
            cpow,
            tc,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of labeled free rooted cacti on n vertices.
    pub fn count(&self, n: usize) -> Option<&BigInt> {
        self.g.get(n)
    }

    pub fn nearest_realizable(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for delta in 1..=self.order {
            if n >= delta && n - delta >= 1 && !self.g[n - delta].is_zero() {
                out.push(n - delta);
            }
            if n + delta <= self.order && !self.g[n + delta].is_zero() {
                out.push(n + delta);
            }
            if !out.is_empty() {
                break;
            }
        }
        out
    }

    /// Draw one uniform labeled free rooted cactus on labels 1..=n.
    pub fn sample(&self, n: usize, rng: &mut RandomSource) -> Result<Structure, SampleError> {
        if n > self.order {
            return Err(SampleError::OrderTooSmall {
                have: self.order,
                need: n,
            });
        }
        if n < 2 || self.g[n].is_zero() {
            return Err(SampleError::Unrealizable {
                size: n,
                nearest: self.nearest_realizable(n),
            });
        }
        let labels: Vec<u32> = (1..=n as u32).collect();
        self.draw_rooted(&labels, rng)
    }

    fn draw_rooted(
        &self,
        labels: &[u32],
        rng: &mut RandomSource,
    ) -> Result<Structure, SampleError> {
        let root_idx = rng.below(labels.len() as u64) as usize;
        let root = labels[root_idx];
        let rest: Vec<u32> = labels
            .iter()
            .copied()
            .filter(|&l| l != root)
            .collect();
        let comps = self.draw_polygon_set(&rest, rng)?;
        Ok(Structure::Tuple(vec![
            Structure::labeled_atom(root),
            Structure::Node {
                op: OperatorKind::Set,
                children: comps,
            },
        ]))
    }

    /// Set_{>=1}(B) over a nonempty label set: split off the component that
    /// contains the smallest label, recurse on the rest.
    fn draw_polygon_set(
        &self,
        labels: &[u32],
        rng: &mut RandomSource,
    ) -> Result<Vec<Structure>, SampleError> {
        let n = labels.len();
        let weights: Vec<BigInt> = (1..=n)
            .map(|t| &self.binom[n - 1][t - 1] * &self.b2[t] * &self.set_b[n - t])
            .collect();
        let t = 1 + pick_weighted(rng, &weights)?;
        let (mine, rest) = split_with_smallest(labels, t, rng);
        let mut out = vec![self.draw_polygon(&mine, rng)?];
        if !rest.is_empty() {
            out.extend(self.draw_polygon_set(&rest, rng)?);
        }
        Ok(out)
    }

    /// USeq_{Omega-1}(C): sampled as an ordered sequence; the stored order
    /// is the orientation representative.
    fn draw_polygon(
        &self,
        labels: &[u32],
        rng: &mut RandomSource,
    ) -> Result<Structure, SampleError> {
        let n = labels.len();
        let comps = match &self.omega {
            OmegaSpec::Finite(members) => {
                let arities: Vec<usize> = members
                    .iter()
                    .map(|&m| (m as usize).saturating_sub(1))
                    .filter(|&a| a >= 1 && a <= n)
                    .collect();
                // doubled weights: orientation degeneracy is 1 for a <= 1
                let weights: Vec<BigInt> = arities
                    .iter()
                    .map(|&a| {
                        let w = self.cpow[a][n].clone();
                        if a <= 1 {
                            w * BigInt::from(2)
                        } else {
                            w
                        }
                    })
                    .collect();
                let a = arities[pick_weighted(rng, &weights)?];
                self.draw_vertex_sequence_exact(a, labels, rng)?
            }
            OmegaSpec::AtLeast(c) => {
                let a = (*c as usize).saturating_sub(1);
                if a == 1 {
                    // single components are not halved; everything longer is
                    let single = &self.c[n] * BigInt::from(2);
                    let longer = self.seq_at_least(2, n);
                    let weights = vec![single, longer];
                    if pick_weighted(rng, &weights)? == 0 {
                        vec![self.draw_component(labels, rng)?]
                    } else {
                        self.draw_vertex_sequence_at_least(2, labels, rng)?
                    }
                } else {
                    self.draw_vertex_sequence_at_least(a, labels, rng)?
                }
            }
        };
        Ok(Structure::Node {
            op: OperatorKind::USeq,
            children: comps,
        })
    }

    /// Labeled count of Seq_{>=j}(C) at size n.
    fn seq_at_least(&self, j: usize, n: usize) -> BigInt {
        let mut acc = BigInt::zero();
        for u in 0..=n {
            if !self.cpow[j][u].is_zero() && !self.tc[n - u].is_zero() {
                acc += &self.binom[n][u] * &self.cpow[j][u] * &self.tc[n - u];
            }
        }
        acc
    }

    fn draw_vertex_sequence_at_least(
        &self,
        j: usize,
        labels: &[u32],
        rng: &mut RandomSource,
    ) -> Result<Vec<Structure>, SampleError> {
        let n = labels.len();
        // split labels between the mandatory C^j prefix and the Seq(C) tail
        let weights: Vec<BigInt> = (0..=n)
            .map(|u| &self.binom[n][u] * &self.cpow[j][u] * &self.tc[n - u])
            .collect();
        let u = pick_weighted(rng, &weights)?;
        let (prefix, tail) = split_uniform(labels, u, rng);
        let mut out = self.draw_vertex_sequence_exact(j, &prefix, rng)?;
        let mut rest = tail;
        while !rest.is_empty() {
            let m = rest.len();
            let weights: Vec<BigInt> = (1..=m)
                .map(|t| &self.binom[m][t] * &self.c[t] * &self.tc[m - t])
                .collect();
            let t = 1 + pick_weighted(rng, &weights)?;
            let (mine, remaining) = split_uniform(&rest, t, rng);
            out.push(self.draw_component(&mine, rng)?);
            rest = remaining;
        }
        Ok(out)
    }

    fn draw_vertex_sequence_exact(
        &self,
        a: usize,
        labels: &[u32],
        rng: &mut RandomSource,
    ) -> Result<Vec<Structure>, SampleError> {
        let mut out = Vec::with_capacity(a);
        let mut rest = labels.to_vec();
        for i in (1..=a).rev() {
            let m = rest.len();
            let weights: Vec<BigInt> = (1..=m)
                .map(|t| &self.binom[m][t] * &self.c[t] * &self.cpow[i - 1][m - t])
                .collect();
            let t = 1 + pick_weighted(rng, &weights)?;
            let (mine, remaining) = split_uniform(&rest, t, rng);
            out.push(self.draw_component(&mine, rng)?);
            rest = remaining;
        }
        Ok(out)
    }

    /// C = Z + G on a label set.
    fn draw_component(
        &self,
        labels: &[u32],
        rng: &mut RandomSource,
    ) -> Result<Structure, SampleError> {
        if labels.len() == 1 {
            Ok(Structure::labeled_atom(labels[0]))
        } else {
            self.draw_rooted(labels, rng)
        }
    }
}

fn self_b2(
    omega: &OmegaSpec,
    a_max: usize,
    cpow: &[Vec<BigInt>],
    tc: &[BigInt],
    binom: &[Vec<BigInt>],
    n: usize,
) -> BigInt {
    match omega {
        OmegaSpec::Finite(members) => {
            let mut acc = BigInt::zero();
            for &m in members {
                let a = (m as usize).saturating_sub(1);
                if a >= 1 && a <= a_max {
                    if a <= 1 {
                        acc += &cpow[a][n] * BigInt::from(2);
                    } else {
                        acc += &cpow[a][n];
                    }
                }
            }
            acc
        }
        OmegaSpec::AtLeast(c) => {
            let a = (*c as usize).saturating_sub(1);
            let from = a.max(2);
            let mut acc = BigInt::zero();
            // Seq_{>=from}(C) = C^from * Seq(C)
            for u in 0..=n {
                if !cpow[from][u].is_zero() && !tc[n - u].is_zero() {
                    acc += &binom[n][u] * &cpow[from][u] * &tc[n - u];
                }
            }
            if a == 1 {
                acc += &cpow[1][n] * BigInt::from(2);
            }
            acc
        }
    }
}

/// Uniform split: the first part keeps the smallest label and gets t - 1
/// more labels chosen uniformly; both parts stay sorted.
fn split_with_smallest(labels: &[u32], t: usize, rng: &mut RandomSource) -> (Vec<u32>, Vec<u32>) {
    let mut pool: Vec<u32> = labels[1..].to_vec();
    let mut mine = vec![labels[0]];
    for _ in 1..t {
        let i = rng.below(pool.len() as u64) as usize;
        mine.push(pool.swap_remove(i));
    }
    mine.sort_unstable();
    pool.sort_unstable();
    (mine, pool)
}

/// Uniform t-subset split of a sorted label slice; both parts stay sorted.
fn split_uniform(labels: &[u32], t: usize, rng: &mut RandomSource) -> (Vec<u32>, Vec<u32>) {
    let mut pool: Vec<u32> = labels.to_vec();
    let mut mine = Vec::with_capacity(t);
    for _ in 0..t {
        let i = rng.below(pool.len() as u64) as usize;
        mine.push(pool.swap_remove(i));
    }
    mine.sort_unstable();
    pool.sort_unstable();
    (mine, pool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Mode;
    use crate::templates::{family_counts, Embedding, FamilySpec, Form, Rooting};
    use std::collections::BTreeMap;

    #[test]
    fn tables_match_engine_counts() {
        for omega in [
            OmegaSpec::finite([2]).unwrap(),
            OmegaSpec::finite([3]).unwrap(),
            OmegaSpec::at_least(2).unwrap(),
            OmegaSpec::at_least(3).unwrap(),
        ] {
            let sampler = LabeledFreeRootedSampler::build(omega.clone(), 12).unwrap();
            let engine = family_counts(
                &FamilySpec {
                    embedding: Embedding::Free,
                    rooting: Rooting::Rooted,
                    labeling: Mode::Labeled,
                    omega: omega.clone(),
                    form: Form::Simplified,
                },
                12,
            )
            .unwrap();
            for n in 0..=12 {
                assert_eq!(
                    sampler.count(n).unwrap(),
                    &engine.counts[n],
                    "omega {omega} n={n}"
                );
            }
        }
    }

    #[test]
    fn labeled_triangle_roots_are_uniform() {
        let omega = OmegaSpec::finite([3]).unwrap();
        let sampler = LabeledFreeRootedSampler::build(omega, 4).unwrap();
        assert_eq!(sampler.count(3).unwrap(), &BigInt::from(3));
        let mut rng = RandomSource::new(1234);
        let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
        let draws = 3000;
        for _ in 0..draws {
            let s = sampler.sample(3, &mut rng).unwrap();
            match &s {
                Structure::Tuple(parts) => match &parts[0] {
                    Structure::Atom(Some(root)) => *seen.entry(*root).or_default() += 1,
                    other => panic!("unexpected {other}"),
                },
                other => panic!("unexpected {other}"),
            }
        }
        assert_eq!(seen.len(), 3);
        for (_, count) in seen {
            // 3000 draws over 3 categories: expect ~1000 each
            assert!((800..1200).contains(&count));
        }
    }

    #[test]
    fn rooted_labeled_edge() {
        let omega = OmegaSpec::finite([2]).unwrap();
        let sampler = LabeledFreeRootedSampler::build(omega, 3).unwrap();
        assert_eq!(sampler.count(2).unwrap(), &BigInt::from(2));
        let mut rng = RandomSource::new(3);
        let s = sampler.sample(2, &mut rng).unwrap();
        assert_eq!(s.size(), 2);
        let mut labels = s.labels();
        labels.sort_unstable();
        assert_eq!(labels, vec![1, 2]);
    }

    #[test]
    fn unrealizable_size() {
        let omega = OmegaSpec::finite([5]).unwrap();
        let sampler = LabeledFreeRootedSampler::build(omega, 8).unwrap();
        assert!(matches!(
            sampler.sample(4, &mut RandomSource::new(1)),
            Err(SampleError::Unrealizable { size: 4, .. })
        ));
    }

    #[test]
    fn labeled_uniformity_over_rooted_graphs() {
        use crate::oracle::{chi_square_critical_999, chi_square_uniform};
        use crate::sampler::structure_to_graph;
        // pure triangles on 5 labeled vertices: 15 graphs x 5 roots = 75
        // equally likely rooted objects
        let omega = OmegaSpec::finite([3]).unwrap();
        let sampler = LabeledFreeRootedSampler::build(omega, 5).unwrap();
        assert_eq!(sampler.count(5).unwrap(), &BigInt::from(75));
        let mut rng = RandomSource::new(0xFACADE);
        let mut observed: BTreeMap<(Vec<(u32, u32)>, u32), u64> = BTreeMap::new();
        let draws = 30_000;
        for _ in 0..draws {
            let s = sampler.sample(5, &mut rng).unwrap();
            let root = match &s {
                Structure::Tuple(parts) => match &parts[0] {
                    Structure::Atom(Some(r)) => *r,
                    other => panic!("unexpected {other}"),
                },
                other => panic!("unexpected {other}"),
            };
            let g = structure_to_graph(&s).unwrap();
            *observed.entry((g.edges(), root)).or_default() += 1;
        }
        assert_eq!(observed.len(), 75);
        let counts: Vec<u64> = observed.values().copied().collect();
        let statistic = chi_square_uniform(&counts);
        let critical = chi_square_critical_999(74);
        assert!(
            statistic <= critical,
            "chi-square {statistic:.2} exceeds {critical:.2}"
        );
    }
}
