//! Exact-size uniform sampler for unlabeled plane rooted cacti.
//!
//! The class decomposes as G = Z * Cyc_{>=1}(S) with S = Seq_{Omega-1}(Q)
//! and Q = Z * Seq(S): a root vertex carries a nonempty cyclic arrangement
//! of polygons, every other vertex a linear one. All tables are integers:
//! instead of the log series l = log(1/(1-S)) itself we store
//! L[n] = n * l_n = sum_t t * s_t * r_{n-t}.
//!
//! A cycle of components is drawn by the divisor-weighted necklace scheme.
//! Jointly over the divisor d and the component count m = d * j the weight
//! is phi(d) * [x^k] S(x^d)^{m/d} / m, realized hierarchically: pick d with
//! weight phi(d) * L[k/d], then a (1/j)-weighted component sequence of size
//! k/d via first-component pointing plus a uniform rotation, replicate it
//! d times, and rotate uniformly once more.

use super::rng::RandomSource;
use super::structure::Structure;
use super::SampleError;
use crate::grammar::{OmegaSpec, OperatorKind};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct PlaneRootedSampler {
    omega: OmegaSpec,
    order: usize,
    /// rooted non-root vertex class Q = Z * Seq(S)
    q: Vec<BigInt>,
    /// entered polygon class S = Seq_{Omega-1}(Q)
    s: Vec<BigInt>,
    /// Seq(S)
    r: Vec<BigInt>,
    /// Seq(Q)
    tq: Vec<BigInt>,
    /// n * [x^n] log(1/(1-S))
    lint: Vec<BigInt>,
    /// Q^j for j = 0..=a_max
    qpow: Vec<Vec<BigInt>>,
    counts: Vec<BigInt>,
}

impl PlaneRootedSampler {
    /// Build counting tables up to `order`.
    pub fn build(omega: OmegaSpec, order: usize) -> Result<Self, SampleError> {
        let a_max = match &omega {
            OmegaSpec::Finite(members) => members
                .iter()
                .map(|&m| (m as usize).saturating_sub(1))
                .filter(|&a| a <= order)
                .max()
                .unwrap_or(0),
            OmegaSpec::AtLeast(c) => (*c as usize).saturating_sub(1),
        };
        let len = order + 1;
        let zero = BigInt::zero();
        let mut q = vec![zero.clone(); len];
        let mut s = vec![zero.clone(); len];
        let mut r = vec![zero.clone(); len];
        let mut tq = vec![zero.clone(); len];
        let mut lint = vec![zero.clone(); len];
        let mut qpow = vec![vec![zero.clone(); len]; a_max + 1];
        qpow[0][0] = BigInt::one();
        r[0] = BigInt::one();
        tq[0] = BigInt::one();

        for n in 1..=order {
            q[n] = r[n - 1].clone();
            for j in 1..=a_max {
                let mut acc = BigInt::zero();
                // Q has valuation 1, so Q^{j-1} vanishes below order j-1
                for t in 1..=(n + 1 - j.min(n)) {
                    if !q[t].is_zero() && !qpow[j - 1][n - t].is_zero() {
                        acc += &q[t] * &qpow[j - 1][n - t];
                    }
                }
                qpow[j][n] = acc;
            }
            let mut acc = BigInt::zero();
            for t in 1..=n {
                if !q[t].is_zero() && !tq[n - t].is_zero() {
                    acc += &q[t] * &tq[n - t];
                }
            }
            tq[n] = acc;
            s[n] = match &omega {
                OmegaSpec::Finite(members) => {
                    let mut acc = BigInt::zero();
                    for &m in members {
                        let a = (m as usize).saturating_sub(1);
                        if a >= 1 && a <= a_max {
                            acc += &qpow[a][n];
                        }
                    }
                    acc
                }
                OmegaSpec::AtLeast(_) => {
                    // S = Q^{a_max} * Seq(Q)
                    let mut acc = BigInt::zero();
                    for t in 0..=n {
                        if !qpow[a_max][t].is_zero() && !tq[n - t].is_zero() {
                            acc += &qpow[a_max][t] * &tq[n - t];
                        }
                    }
                    acc
                }
            };
            let mut racc = BigInt::zero();
            let mut lacc = BigInt::zero();
            for t in 1..=n {
                if s[t].is_zero() || r[n - t].is_zero() {
                    continue;
                }
                let prod = &s[t] * &r[n - t];
                lacc += &prod * BigInt::from(t);
                racc += prod;
            }
            r[n] = racc;
            lint[n] = lacc;
        }

        let mut counts = vec![BigInt::zero(); len];
        for n in 2..=order {
            let k = n - 1;
            let mut total = BigInt::zero();
            for d in divisors(k) {
                total += BigInt::from(crate::engine::euler_phi(d as u64)) * &lint[k / d];
            }
            let (quot, rem) = num_integer::Integer::div_rem(&total, &BigInt::from(k));
            if !rem.is_zero() {
                return Err(SampleError::Internal(
                    "cycle count not divisible by its length".into(),
                ));
            }
            counts[n] = quot;
        }
        Ok(PlaneRootedSampler {
            omega,
            order,
            q,
            s,
            r,
            tq,
            lint,
            qpow,
            counts,
        })
    }

    pub fn omega(&self) -> &OmegaSpec {
        &self.omega
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of plane rooted cacti of the given size.
    pub fn count(&self, n: usize) -> Option<&BigInt> {
        self.counts.get(n)
    }

    /// Realizable sizes near `n`, for error reporting.
    pub fn nearest_realizable(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for delta in 1..=self.order {
            if n >= delta && !self.counts[n - delta].is_zero() {
                out.push(n - delta);
            }
            if n + delta <= self.order && !self.counts[n + delta].is_zero() {
                out.push(n + delta);
            }
            if !out.is_empty() {
                break;
            }
        }
        out
    }

    /// Draw one uniform plane rooted cactus structure of size exactly `n`.
    pub fn sample(&self, n: usize, rng: &mut RandomSource) -> Result<Structure, SampleError> {
        if n > self.order {
            return Err(SampleError::OrderTooSmall {
                have: self.order,
                need: n,
            });
        }
        if n < 2 || self.counts[n].is_zero() {
            return Err(SampleError::Unrealizable {
                size: n,
                nearest: self.nearest_realizable(n),
            });
        }
        let k = n - 1;
        let divs = divisors(k);
        let d = {
            let weights: Vec<BigInt> = divs
                .iter()
                .map(|&d| BigInt::from(crate::engine::euler_phi(d as u64)) * &self.lint[k / d])
                .collect();
            divs[pick_weighted(rng, &weights)?]
        };
        let base = k / d;
        // (1/j)-weighted sequence of size `base` by first-component pointing
        let t = {
            let weights: Vec<BigInt> = (1..=base)
                .map(|t| BigInt::from(t) * &self.s[t] * &self.r[base - t])
                .collect();
            1 + pick_weighted(rng, &weights)?
        };
        let mut comps = vec![self.draw_polygon(t, rng)?];
        comps.extend(self.draw_polygon_sequence(base - t, rng)?);
        let j = comps.len();
        comps.rotate_left(rng.below(j as u64) as usize);
        let mut all = Vec::with_capacity(d * j);
        for _ in 0..d {
            all.extend(comps.iter().cloned());
        }
        all.rotate_left(rng.below((d * j) as u64) as usize);
        Ok(Structure::Tuple(vec![
            Structure::atom(),
            Structure::Node {
                op: OperatorKind::Cyc,
                children: all,
            },
        ]))
    }

    /// An S-object: a polygon entered from a vertex, i.e. a sequence of
    /// Omega-1 many Q components, total size `t`.
    fn draw_polygon(&self, t: usize, rng: &mut RandomSource) -> Result<Structure, SampleError> {
        let comps = match &self.omega {
            OmegaSpec::Finite(members) => {
                let arities: Vec<usize> = members
                    .iter()
                    .map(|&m| (m as usize).saturating_sub(1))
                    .filter(|&a| a >= 1 && a <= t)
                    .collect();
                let weights: Vec<BigInt> =
                    arities.iter().map(|&a| self.qpow[a][t].clone()).collect();
                let a = arities[pick_weighted(rng, &weights)?];
                self.draw_vertex_sequence_exact(a, t, rng)?
            }
            OmegaSpec::AtLeast(_) => {
                let a = self.qpow.len() - 1;
                // split between the mandatory Q^a prefix and the Seq(Q) tail
                let weights: Vec<BigInt> = (0..=t)
                    .map(|u| &self.qpow[a][u] * &self.tq[t - u])
                    .collect();
                let u = pick_weighted(rng, &weights)?;
                let mut comps = self.draw_vertex_sequence_exact(a, u, rng)?;
                comps.extend(self.draw_vertex_sequence(t - u, rng)?);
                comps
            }
        };
        Ok(Structure::Node {
            op: OperatorKind::Seq,
            children: comps,
        })
    }

    /// Exactly `a` Q components with total size `t`.
    fn draw_vertex_sequence_exact(
        &self,
        a: usize,
        t: usize,
        rng: &mut RandomSource,
    ) -> Result<Vec<Structure>, SampleError> {
        let mut out = Vec::with_capacity(a);
        let mut rest = t;
        for i in (1..=a).rev() {
            let weights: Vec<BigInt> = (1..=rest)
                .map(|u| &self.q[u] * &self.qpow[i - 1][rest - u])
                .collect();
            let u = 1 + pick_weighted(rng, &weights)?;
            out.push(self.draw_vertex(u, rng)?);
            rest -= u;
        }
        Ok(out)
    }

    /// Geometric Seq(Q) of total size `t`.
    fn draw_vertex_sequence(
        &self,
        t: usize,
        rng: &mut RandomSource,
    ) -> Result<Vec<Structure>, SampleError> {
        let mut out = Vec::new();
        let mut rest = t;
        while rest > 0 {
            let weights: Vec<BigInt> = (1..=rest)
                .map(|u| &self.q[u] * &self.tq[rest - u])
                .collect();
            let u = 1 + pick_weighted(rng, &weights)?;
            out.push(self.draw_vertex(u, rng)?);
            rest -= u;
        }
        Ok(out)
    }

    /// Geometric Seq(S) of total size `t`.
    fn draw_polygon_sequence(
        &self,
        t: usize,
        rng: &mut RandomSource,
    ) -> Result<Vec<Structure>, SampleError> {
        let mut out = Vec::new();
        let mut rest = t;
        while rest > 0 {
            let weights: Vec<BigInt> = (1..=rest)
                .map(|u| &self.s[u] * &self.r[rest - u])
                .collect();
            let u = 1 + pick_weighted(rng, &weights)?;
            out.push(self.draw_polygon(u, rng)?);
            rest -= u;
        }
        Ok(out)
    }

    /// A Q object: a vertex with a linear arrangement of polygons.
    fn draw_vertex(&self, t: usize, rng: &mut RandomSource) -> Result<Structure, SampleError> {
        let hangs = self.draw_polygon_sequence(t - 1, rng)?;
        Ok(Structure::Tuple(vec![
            Structure::atom(),
            Structure::Node {
                op: OperatorKind::Seq,
                children: hangs,
            },
        ]))
    }
}

pub(super) fn divisors(k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= k {
        if k % d == 0 {
            out.push(d);
            if d != k / d {
                out.push(k / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Index drawn with probability proportional to `weights[i]`.
pub(super) fn pick_weighted(
    rng: &mut RandomSource,
    weights: &[BigInt],
) -> Result<usize, SampleError> {
    let mut total = BigInt::zero();
    for w in weights {
        if w.is_negative() {
            return Err(SampleError::Internal("negative weight".into()));
        }
        total += w;
    }
    if total.is_zero() {
        return Err(SampleError::Internal("all weights are zero".into()));
    }
    let total: BigUint = total.to_biguint().expect("nonnegative");
    let mut x = BigInt::from(rng.below_big(&total));
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return Ok(i);
        }
        x -= w;
    }
    Err(SampleError::Internal("weight walk overran".into()))
}
