//! Partitions and disjoint chains of the vertex set, the shell constants
//! `D_m, K_m` (resp. `K̂_m, D̂_m`) derived from them, and numerical checks of
//! the Poincaré-type estimates those constants certify.
//!
//! For a partition `S_0, ..., S_n`:
//!
//! ```text
//! D_m = sup_{v in S_m}     w_{S_{m+1}}(v) / nu(v)
//! K_m = inf_{v in S_{m+1}} w_{S_m}(v)     / nu(v)
//! a^p = sum_{m=0}^{n} prod_{j<m} D_j/K_j
//! ```
//!
//! and `delta` is either a max-formula (`p = 1`) or a nested Hölder sum
//! (`1 < p < inf`). A disjoint chain uses the outward-oriented `K̂_m, D̂_m`
//! and the analogous `â`, `δ̂`. Products over empty ranges are 1, sums 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Exponent, Signal, VertexSet, WeightedGraph};
use crate::scalar::{pow, root, within_slack, Real};

fn validate_shells<T: Real>(g: &WeightedGraph<T>, shells: &[VertexSet], exhaustive: bool) -> Result<()> {
    if shells.is_empty() {
        return Err(Error::InvalidShells("at least the initial set is required".into()));
    }
    let mut owner = vec![None; g.len()];
    for (m, s) in shells.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::InvalidShells(format!("shell S_{m} is empty")));
        }
        g.check_set(s)?;
        for v in s.iter() {
            if let Some(prev) = owner[v] {
                return Err(Error::InvalidShells(format!(
                    "vertex `{}` appears in S_{prev} and S_{m}",
                    g.name(v)
                )));
            }
            owner[v] = Some(m);
        }
    }
    if exhaustive {
        let missing: Vec<String> = (0..g.len())
            .filter(|&v| owner[v].is_none())
            .map(|v| g.name(v).to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidShells(format!("not exhaustive, missing {}", missing.join(", "))));
        }
    }
    Ok(())
}

/// Shells produced by repeated closure: `S_m = b(cl^{m-1}(S_0))`, stopping
/// when no new vertex is reached.
fn closure_shells<T: Real>(g: &WeightedGraph<T>, s0: &VertexSet) -> Vec<VertexSet> {
    let mut covered = s0.mask(g.len());
    let mut shells = vec![s0.clone()];
    loop {
        let last = shells.last().expect("non-empty");
        let next: VertexSet = last
            .iter()
            .flat_map(|v| g.neighbors(v).iter().map(|&(u, _)| u))
            .filter(|&u| !covered[u])
            .collect();
        if next.is_empty() {
            break;
        }
        for v in next.iter() {
            covered[v] = true;
        }
        shells.push(next);
    }
    shells
}

/// An ordered partition `S_0, ..., S_n` of the whole vertex set.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Partition {
    shells: Vec<VertexSet>,
}

impl Partition {
    /// Validates that the shells are non-empty, pairwise disjoint and cover `V(G)`.
    pub fn new<T: Real>(g: &WeightedGraph<T>, shells: Vec<VertexSet>) -> Result<Self> {
        validate_shells(g, &shells, true)?;
        Ok(Partition { shells })
    }

    /// Closure partition grown from `s0`. Fails, listing them, if some
    /// vertices cannot be reached from `s0`.
    pub fn closure<T: Real>(g: &WeightedGraph<T>, s0: &VertexSet) -> Result<Self> {
        if s0.is_empty() {
            return Err(Error::InvalidShells("initial set is empty".into()));
        }
        g.check_set(s0)?;
        let shells = closure_shells(g, s0);
        let reached: usize = shells.iter().map(VertexSet::len).sum();
        if reached < g.len() {
            let seen = VertexSet::new(shells.iter().flat_map(|s| s.iter()));
            return Err(Error::Unreachable(g.set_names(&seen.complement(g.len()))));
        }
        Ok(Partition { shells })
    }

    /// The two-set partition `(S_0, V \ S_0)` (just `(S_0)` when `S_0 = V`).
    pub fn two_set<T: Real>(g: &WeightedGraph<T>, s0: &VertexSet) -> Result<Self> {
        let rest = s0.complement(g.len());
        let mut shells = vec![s0.clone()];
        if !rest.is_empty() {
            shells.push(rest);
        }
        Self::new(g, shells)
    }

    pub fn shells(&self) -> &[VertexSet] {
        &self.shells
    }

    /// `n(S)`: number of shells minus one.
    pub fn length(&self) -> usize {
        self.shells.len() - 1
    }

    pub fn initial(&self) -> &VertexSet {
        &self.shells[0]
    }
}

/// An ordered sequence of pairwise disjoint, non-empty vertex sets whose
/// union may be a proper subset of `V(G)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SubsetChain {
    shells: Vec<VertexSet>,
}

impl SubsetChain {
    pub fn new<T: Real>(g: &WeightedGraph<T>, shells: Vec<VertexSet>) -> Result<Self> {
        validate_shells(g, &shells, false)?;
        Ok(SubsetChain { shells })
    }

    /// Longest prefix of the closure shells of `s0` on which every `K̂_m` is
    /// positive, i.e. every vertex of `S_m` has a neighbour in `S_{m+1}`.
    /// The result is always well defined (possibly of length 0).
    pub fn closure_prefix<T: Real>(g: &WeightedGraph<T>, s0: &VertexSet) -> Result<Self> {
        if s0.is_empty() {
            return Err(Error::InvalidShells("initial set is empty".into()));
        }
        g.check_set(s0)?;
        let all = closure_shells(g, s0);
        let mut shells = vec![all[0].clone()];
        for m in 0..all.len() - 1 {
            let next = all[m + 1].mask(g.len());
            if all[m].iter().any(|v| g.subset_weight_masked(&next, v) <= T::zero()) {
                break;
            }
            shells.push(all[m + 1].clone());
        }
        Ok(SubsetChain { shells })
    }

    pub fn from_partition(p: &Partition) -> Self {
        SubsetChain { shells: p.shells.clone() }
    }

    pub fn shells(&self) -> &[VertexSet] {
        &self.shells
    }

    pub fn length(&self) -> usize {
        self.shells.len() - 1
    }

    pub fn initial(&self) -> &VertexSet {
        &self.shells[0]
    }
}

/// `sup_{v in from} w_{to}(v)/nu(v)` or `inf_{...}` depending on `sup`.
fn extremal_ratio<T: Real>(g: &WeightedGraph<T>, from: &VertexSet, to: &VertexSet, sup: bool) -> T {
    let mask = to.mask(g.len());
    let ratios = from
        .iter()
        .map(|v| g.subset_weight_masked(&mask, v) / g.vertex_weight(v));
    if sup {
        ratios.fold(T::neg_infinity(), T::max)
    } else {
        ratios.fold(T::infinity(), T::min)
    }
}

/// `sum_{m=0}^{n} prod_{j<m} r_j`.
fn product_sum<T: Real>(r: &[T]) -> T {
    let mut prod = T::one();
    let mut sum = T::zero();
    for m in 0..=r.len() {
        sum += prod;
        if m < r.len() {
            prod *= r[m];
        }
    }
    sum
}

/// `max_{k in starts} (1/denom(k)) sum_{m=k}^{n} prod_{i=k}^{m-1} r_i`, the `p = 1` coefficient.
fn max_formula<T: Real>(n: usize, starts: impl Iterator<Item = usize>, denom: impl Fn(usize) -> T, r: &[T]) -> T {
    let mut best = T::zero();
    for k in starts {
        let mut prod = T::one();
        let mut sum = T::zero();
        for &ratio in &r[k..n] {
            sum += prod;
            prod *= ratio;
        }
        sum += prod;
        best = best.max(sum / denom(k));
    }
    best
}

/// Forward gradient coefficient `delta_{S,p}`.
fn forward_delta<T: Real>(d: &[T], k: &[T], p: T) -> T {
    let n = k.len();
    let r: Vec<T> = d.iter().zip(k).map(|(&d, &k)| d / k).collect();
    if n == 0 {
        return T::zero();
    }
    if p == T::one() {
        return max_formula(n, 1..=n, |j| k[j - 1], &r);
    }
    // q/p = 1/(p-1), p/q = p-1
    let e = (p - T::one()).recip();
    let outer = p - T::one();
    let mut total = T::zero();
    for m in 1..=n {
        let mut prod = T::one();
        let mut inner = T::zero();
        for j in (1..=m).rev() {
            if j < m {
                prod *= r[j];
            }
            inner += pow(k[j - 1].recip(), e) * pow(prod, e);
        }
        total += pow(inner, outer);
    }
    root(total, p)
}

/// Reverse gradient coefficient `δ̂_{Ŝ,p}`.
fn reverse_delta<T: Real>(khat: &[T], dhat: &[T], p: T) -> T {
    let n = khat.len();
    let rho: Vec<T> = khat.iter().zip(dhat).map(|(&k, &d)| k / d).collect();
    if n == 0 {
        return T::zero();
    }
    if p == T::one() {
        return max_formula(n, 0..n, |j| khat[j], &rho);
    }
    let e = (p - T::one()).recip();
    let outer = p - T::one();
    let mut total = T::zero();
    for m in 1..=n {
        let mut prod = T::one();
        let mut inner = T::zero();
        for j in (0..m).rev() {
            prod *= rho[j];
            inner += pow(khat[j].recip(), e) * pow(prod, e);
        }
        total += pow(inner, outer);
    }
    root(total, p)
}

/// Shell constants of a partition for a fixed exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionConstants<T: Real> {
    pub p: Exponent<T>,
    #[serde(rename = "D")]
    pub d: Vec<T>,
    #[serde(rename = "K")]
    pub k: Vec<T>,
    pub delta: Option<T>,
    pub a: Option<T>,
    pub admissible: bool,
}

impl<T: Real> PartitionConstants<T> {
    pub fn delta(&self) -> Result<T> {
        self.delta.ok_or_else(|| self.inadmissible())
    }

    pub fn a(&self) -> Result<T> {
        self.a.ok_or_else(|| self.inadmissible())
    }

    fn inadmissible(&self) -> Error {
        let index = self.k.iter().position(|&k| k <= T::zero()).unwrap_or(0);
        Error::Inadmissible { index }
    }

    pub fn ratios(&self) -> Vec<T> {
        self.d.iter().zip(&self.k).map(|(&d, &k)| d / k).collect()
    }
}

/// Computes `D_m, K_m` and, for an admissible partition, `delta_{S,p}` and `a_{S,p}`.
pub fn partition_constants<T: Real>(g: &WeightedGraph<T>, part: &Partition, p: Exponent<T>) -> Result<PartitionConstants<T>> {
    let pv = p.value()?;
    Exponent::finite(pv)?;
    let s = part.shells();
    let n = part.length();
    let d: Vec<T> = (0..n).map(|m| extremal_ratio(g, &s[m], &s[m + 1], true)).collect();
    let k: Vec<T> = (0..n).map(|m| extremal_ratio(g, &s[m + 1], &s[m], false)).collect();
    let admissible = k.iter().all(|&x| x > T::zero());
    let (delta, a) = if admissible {
        let r: Vec<T> = d.iter().zip(&k).map(|(&d, &k)| d / k).collect();
        (Some(forward_delta(&d, &k, pv)), Some(root(product_sum(&r), pv)))
    } else {
        (None, None)
    };
    Ok(PartitionConstants { p, d, k, delta, a, admissible })
}

/// Shell constants of a disjoint chain for a fixed exponent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainConstants<T: Real> {
    pub p: Exponent<T>,
    #[serde(rename = "Khat")]
    pub khat: Vec<T>,
    #[serde(rename = "Dhat")]
    pub dhat: Vec<T>,
    pub delta_hat: Option<T>,
    pub a_hat: Option<T>,
    pub well_defined: bool,
}

impl<T: Real> ChainConstants<T> {
    pub fn delta_hat(&self) -> Result<T> {
        self.delta_hat.ok_or_else(|| self.ill_defined())
    }

    pub fn a_hat(&self) -> Result<T> {
        self.a_hat.ok_or_else(|| self.ill_defined())
    }

    fn ill_defined(&self) -> Error {
        let m = (0..self.khat.len())
            .find(|&m| self.khat[m] <= T::zero() || self.dhat[m] <= T::zero())
            .unwrap_or(0);
        Error::IllDefinedChain(format!("Khat_{m} = {}, Dhat_{m} = {}", self.khat[m], self.dhat[m]))
    }
}

/// Computes `K̂_m, D̂_m` and, when all are positive, `δ̂` and `â`.
pub fn chain_constants<T: Real>(g: &WeightedGraph<T>, chain: &SubsetChain, p: Exponent<T>) -> Result<ChainConstants<T>> {
    let pv = p.value()?;
    Exponent::finite(pv)?;
    let s = chain.shells();
    let n = chain.length();
    let khat: Vec<T> = (0..n).map(|m| extremal_ratio(g, &s[m], &s[m + 1], false)).collect();
    let dhat: Vec<T> = (0..n).map(|m| extremal_ratio(g, &s[m + 1], &s[m], true)).collect();
    let well_defined = khat.iter().chain(&dhat).all(|&x| x > T::zero());
    let (delta_hat, a_hat) = if well_defined {
        let rho: Vec<T> = khat.iter().zip(&dhat).map(|(&k, &d)| k / d).collect();
        (Some(reverse_delta(&khat, &dhat, pv)), Some(root(product_sum(&rho), pv)))
    } else {
        (None, None)
    };
    Ok(ChainConstants { p, khat, dhat, delta_hat, a_hat, well_defined })
}

/// Which inequality a [`VerificationRecord`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `||f|| <= a ||f|_{S0}|| + delta ||grad f||`
    PoincareForward,
    /// `||f|_{V\S0}|| <= delta ||grad f||` for `f|_{S0} = 0`
    PoincareZeroOnS0,
    /// `||f|_{V\S0}||_inf <= n ||grad f||_inf` for `f|_{S0} = 0`
    PoincareZeroOnS0Sup,
    /// `â ||f|_{S0}|| <= ||f|| + δ̂ ||grad f||`
    Reverse,
    /// `||f|_{S0}|| <= δ̂/(â-1) ||grad f||` for `f` supported on `S0`
    ReverseSupportedOnS0,
    /// `||grad f||_2 <= sqrt(2 omega) ||f||_2` for `f` in `PW_omega`
    Bernstein,
    /// Lower half of the sampling norm equivalence.
    SamplingLower,
    /// Upper half of the sampling norm equivalence.
    SamplingUpper,
    /// Lower frame bound on `sum_v |<f, theta_v>|^2`.
    FrameLower,
    /// Upper frame bound on `sum_v |<f, theta_v>|^2`.
    FrameUpper,
}

/// Constants attached to a verification record.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RecordConstants<T: Real> {
    Partition(PartitionConstants<T>),
    Chain(ChainConstants<T>),
    Length { n: usize },
    Bandwidth { omega: T, epsilon: T },
    Sampling {
        omega: T,
        epsilon: T,
        delta: T,
        a: T,
        delta_hat: T,
        a_hat: T,
    },
}

/// Outcome of checking one inequality `lhs <= rhs` on a concrete signal.
///
/// `lhs` is always the side the inequality claims to be smaller.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRecord<T: Real> {
    pub check: CheckKind,
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
    pub constants: RecordConstants<T>,
    pub passed: bool,
}

impl<T: Real> VerificationRecord<T> {
    pub fn new(check: CheckKind, lhs: T, rhs: T, constants: RecordConstants<T>) -> Self {
        VerificationRecord {
            check,
            lhs,
            rhs,
            slack: rhs - lhs,
            constants,
            passed: within_slack(lhs, rhs),
        }
    }
}

fn admissible_constants<T: Real>(g: &WeightedGraph<T>, part: &Partition, p: T) -> Result<PartitionConstants<T>> {
    let c = partition_constants(g, part, Exponent::finite(p)?)?;
    if !c.admissible {
        return Err(c.inadmissible());
    }
    Ok(c)
}

fn defined_chain_constants<T: Real>(g: &WeightedGraph<T>, chain: &SubsetChain, p: T) -> Result<ChainConstants<T>> {
    let c = chain_constants(g, chain, Exponent::finite(p)?)?;
    if !c.well_defined {
        return Err(c.ill_defined());
    }
    Ok(c)
}

/// `||f||_{p,nu} <= a ||f|_{S0}||_{p,nu} + delta ||grad_w f||_p`.
pub fn poincare_forward_check<T: Real>(
    g: &WeightedGraph<T>,
    part: &Partition,
    f: &Signal<T>,
    p: T,
) -> Result<VerificationRecord<T>> {
    g.check_signal(f)?;
    let c = admissible_constants(g, part, p)?;
    let e = Exponent::Finite(p);
    let lhs = g.lp_norm(f, e)?;
    let rhs = c.a()? * g.lp_norm_on(f, part.initial(), e)? + c.delta()? * g.weighted_gradient_norm(f, e)?;
    Ok(VerificationRecord::new(CheckKind::PoincareForward, lhs, rhs, RecordConstants::Partition(c)))
}

/// Poincaré inequality for signals vanishing on `S0`. For finite `p` the
/// coefficient is `delta_{S,p}`; for `p = infinity` it is the length `n`.
pub fn poincare_zero_on_s0_check<T: Real>(
    g: &WeightedGraph<T>,
    part: &Partition,
    f: &Signal<T>,
    p: Exponent<T>,
) -> Result<VerificationRecord<T>> {
    g.check_signal(f)?;
    if let Some(v) = part.initial().iter().find(|&v| f.get(v) != T::zero()) {
        return Err(Error::Precondition(format!(
            "signal must vanish on the initial set, f({}) = {}",
            g.name(v),
            f.get(v)
        )));
    }
    let outside = part.initial().complement(g.len());
    let lhs = g.lp_norm_on(f, &outside, p)?;
    match p {
        Exponent::Infinity => {
            let n = part.length();
            let rhs = T::from_usize(n).expect("small integer") * g.weighted_gradient_norm(f, p)?;
            Ok(VerificationRecord::new(CheckKind::PoincareZeroOnS0Sup, lhs, rhs, RecordConstants::Length { n }))
        }
        Exponent::Finite(pv) => {
            let c = admissible_constants(g, part, pv)?;
            let rhs = c.delta()? * g.weighted_gradient_norm(f, p)?;
            Ok(VerificationRecord::new(CheckKind::PoincareZeroOnS0, lhs, rhs, RecordConstants::Partition(c)))
        }
    }
}

/// `â ||f|_{S0}|| <= ||f|| + δ̂ ||grad_w f||`.
pub fn reverse_check<T: Real>(
    g: &WeightedGraph<T>,
    chain: &SubsetChain,
    f: &Signal<T>,
    p: T,
) -> Result<VerificationRecord<T>> {
    g.check_signal(f)?;
    let c = defined_chain_constants(g, chain, p)?;
    let e = Exponent::Finite(p);
    let lhs = c.a_hat()? * g.lp_norm_on(f, chain.initial(), e)?;
    let rhs = g.lp_norm(f, e)? + c.delta_hat()? * g.weighted_gradient_norm(f, e)?;
    Ok(VerificationRecord::new(CheckKind::Reverse, lhs, rhs, RecordConstants::Chain(c)))
}

/// `||f|_{S0}|| <= δ̂/(â - 1) ||grad_w f||` for `f` vanishing off `S0`; needs `â > 1`.
pub fn supported_on_s0_check<T: Real>(
    g: &WeightedGraph<T>,
    chain: &SubsetChain,
    f: &Signal<T>,
    p: T,
) -> Result<VerificationRecord<T>> {
    g.check_signal(f)?;
    let s0 = chain.initial();
    if let Some(v) = (0..g.len()).find(|&v| !s0.contains(v) && f.get(v) != T::zero()) {
        return Err(Error::Precondition(format!(
            "signal must vanish off the initial set, f({}) = {}",
            g.name(v),
            f.get(v)
        )));
    }
    let c = defined_chain_constants(g, chain, p)?;
    let a_hat = c.a_hat()?;
    if a_hat <= T::one() {
        return Err(Error::Precondition(format!("requires a_hat > 1, got {a_hat}")));
    }
    let e = Exponent::Finite(p);
    let lhs = g.lp_norm_on(f, s0, e)?;
    let rhs = c.delta_hat()? / (a_hat - T::one()) * g.weighted_gradient_norm(f, e)?;
    Ok(VerificationRecord::new(CheckKind::ReverseSupportedOnS0, lhs, rhs, RecordConstants::Chain(c)))
}

/// Per-shell diagnostics for `m >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellRecord<T: Real> {
    pub m: usize,
    /// `||f_m||_{p,nu}`
    pub norm: T,
    /// `phi_{m,p}`
    pub phi: T,
    /// `(D_{m-1}/K_{m-1})^{1/p} ||f_{m-1}|| + phi_m`
    pub step_bound: T,
    /// `(prod_{j<m} D_j/K_j)^{1/p} ||f_0|| + sum_{j=1}^{m} phi_j (prod_{i=j}^{m-1} D_i/K_i)^{1/p}`
    pub cumulative_bound: T,
    pub passed: bool,
}

/// Checks the one-step and cumulative shell estimates of the forward proof.
pub fn shell_estimate_check<T: Real>(
    g: &WeightedGraph<T>,
    part: &Partition,
    f: &Signal<T>,
    p: T,
) -> Result<Vec<ShellRecord<T>>> {
    g.check_signal(f)?;
    let c = admissible_constants(g, part, p)?;
    let e = Exponent::Finite(p);
    let s = part.shells();
    let n = part.length();
    let r = c.ratios();
    let x = f.values();
    let norms: Vec<T> = s.iter().map(|sm| g.lp_norm_on(f, sm, e)).collect::<Result<_>>()?;
    let phi: Vec<T> = (1..=n)
        .map(|m| {
            let prev = s[m - 1].mask(g.len());
            let sum: T = s[m]
                .iter()
                .flat_map(|u| {
                    g.neighbors(u)
                        .iter()
                        .filter(|(v, _)| prev[*v])
                        .map(move |&(v, w)| pow((x[u] - x[v]).abs(), p) * w)
                })
                .sum();
            root(sum / c.k[m - 1], p)
        })
        .collect();

    let inv_p = p.recip();
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let step_bound = pow(r[m - 1], inv_p) * norms[m - 1] + phi[m - 1];
        let head: T = r[..m].iter().fold(T::one(), |acc, &x| acc * x);
        let mut cumulative_bound = pow(head, inv_p) * norms[0];
        for j in 1..=m {
            let tail: T = r[j..m].iter().fold(T::one(), |acc, &x| acc * x);
            cumulative_bound += phi[j - 1] * pow(tail, inv_p);
        }
        out.push(ShellRecord {
            m,
            norm: norms[m],
            phi: phi[m - 1],
            step_bound,
            cumulative_bound,
            passed: within_slack(norms[m], step_bound) && within_slack(norms[m], cumulative_bound),
        });
    }
    Ok(out)
}
