//! Sampling on `kZ` emulated on cycles `C_{k m}`: closed-form shell constants,
//! the Fourier symbol `2 - 2cos(xi)` of the Laplacian, and a comparison of the
//! graph sampling bounds with the exact Shannon identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators;
use crate::graph::{Exponent, Signal, VertexSet, WeightedGraph};
use crate::partition::{chain_constants, partition_constants, Partition, SubsetChain};
use crate::scalar::{within_slack, Real};
use crate::spectral::SpectralDecomposition;

/// Shell constants of `S = kZ` with `p = 2`, `k = 2n + 1`.
///
/// `D0 = 2, K0 = 1, D_m = K_m = 1` and `K̂0 = 2, K̂_m = D̂_m = 1`, which give
/// `delta = δ̂ = sqrt(n(n+1)/2)` and `a = â = sqrt(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineConstants<T: Real> {
    pub k: usize,
    pub n: usize,
    pub delta: T,
    pub a: T,
    pub delta_hat: T,
    pub a_hat: T,
}

fn int<T: Real>(x: usize) -> T {
    T::from_usize(x).expect("small integer")
}

/// Closed-form constants for odd `k >= 3`.
pub fn integer_constants<T: Real>(k: usize) -> Result<LineConstants<T>> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::Domain(format!("closed-form constants need an odd k >= 3, got {k}")));
    }
    let n = (k - 1) / 2;
    let delta = (int::<T>(n * (n + 1)) / T::lit(2.0)).sqrt();
    let a = int::<T>(k).sqrt();
    Ok(LineConstants { k, n, delta, a, delta_hat: delta, a_hat: a })
}

/// Residue class `0 mod k` on `C_N`.
pub fn residue_set(n_vertices: usize, k: usize) -> VertexSet {
    VertexSet::new((0..n_vertices).step_by(k))
}

/// Constants of `S = kZ` computed by the generic code on `C_{k periods}` with
/// closure shells, for any `k >= 2`.
pub fn generic_line_constants<T: Real>(k: usize, periods: usize) -> Result<LineConstants<T>> {
    if k < 2 || k * periods < 3 {
        return Err(Error::Domain(format!("need k >= 2 and k * periods >= 3, got k = {k}, periods = {periods}")));
    }
    let g = generators::cycle::<T>(k * periods);
    let s0 = residue_set(g.len(), k);
    let part = Partition::closure(&g, &s0)?;
    let chain = SubsetChain::closure_prefix(&g, &s0)?;
    let p = Exponent::Finite(T::lit(2.0));
    let pc = partition_constants(&g, &part, p)?;
    let cc = chain_constants(&g, &chain, p)?;
    Ok(LineConstants {
        k,
        n: part.length(),
        delta: pc.delta()?,
        a: pc.a()?,
        delta_hat: cc.delta_hat()?,
        a_hat: cc.a_hat()?,
    })
}

/// `2 - 2cos(xi)` for `xi` in `[0, pi]`.
pub fn band_map<T: Real>(xi: T) -> Result<T> {
    if !(xi >= T::zero() && xi <= T::PI()) {
        return Err(Error::Domain(format!("frequency {xi} outside [0, pi]")));
    }
    Ok(T::lit(2.0) - T::lit(2.0) * xi.cos())
}

/// Inverse of `xi -> sqrt(2 - 2cos(xi))` on `[0, pi]`, defined on `[0, 2]`.
pub fn psi<T: Real>(omega: T) -> Result<T> {
    let two = T::lit(2.0);
    if !(omega >= T::zero() && omega <= two) {
        return Err(Error::Domain(format!("{omega} outside [0, 2]")));
    }
    Ok((T::one() - omega * omega / two).max(-T::one()).acos())
}

/// `C_N` together with its exact real Fourier eigenbasis.
#[derive(Clone, Debug)]
pub struct CycleModel<T: Real> {
    pub graph: WeightedGraph<T>,
    /// Frequency `2 pi j / N` of each basis vector, in the order of the decomposition.
    pub frequencies: Vec<T>,
    pub decomposition: SpectralDecomposition<T>,
}

/// Basis order: `1`, then `cos, sin` for `j = 1, 2, ...`, and the alternating
/// vector last when `N` is even. Eigenvalues `2 - 2cos(2 pi j/N)` are then ascending.
pub fn cycle_model<T: Real>(n: usize) -> Result<CycleModel<T>> {
    if n < 3 {
        return Err(Error::Domain(format!("cycle needs at least 3 vertices, got {n}")));
    }
    let nf = int::<T>(n);
    let two = T::lit(2.0);
    let tau = two * T::PI();
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    let mut frequencies = Vec::with_capacity(n);
    let mut push = |xi: T, v: Vec<T>, values: &mut Vec<T>| {
        values.push(two - two * xi.cos());
        frequencies.push(xi);
        vectors.extend(v);
    };
    push(T::zero(), vec![nf.sqrt().recip(); n], &mut values);
    let scale = (two / nf).sqrt();
    for j in 1..n.div_ceil(2) {
        let xi = tau * int::<T>(j) / nf;
        let cos = (0..n).map(|x| scale * (xi * int::<T>(x)).cos()).collect();
        let sin = (0..n).map(|x| scale * (xi * int::<T>(x)).sin()).collect();
        push(xi, cos, &mut values);
        push(xi, sin, &mut values);
    }
    if n.is_multiple_of(2) {
        let alt = (0..n).map(|x| if x % 2 == 0 { T::one() } else { -T::one() } / nf.sqrt()).collect();
        push(T::PI(), alt, &mut values);
    }
    // cos is decreasing on [0, pi], so the eigenvalues above are ascending up to rounding.
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    Ok(CycleModel {
        graph: generators::cycle(n),
        frequencies,
        decomposition: SpectralDecomposition::from_parts(values, vectors)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShannonIdentity<T: Real> {
    /// `sqrt(k) ||f|_S||_2`
    pub lhs: T,
    /// `||f||_2`
    pub rhs: T,
    /// `|lhs - rhs| / rhs`
    pub error: T,
    /// Whether no two retained Fourier modes alias on `S`.
    pub alias_free: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphBounds<T: Real> {
    /// `(1 - x)/sqrt(k)` with `x = (k+1)/2 sqrt(2 - 2cos(omega))`.
    pub lower: T,
    /// `(1 + x)/sqrt(k)`.
    pub upper: T,
    /// `||f|_S||_2 / ||f||_2`
    pub observed: T,
    /// `x < 1`.
    pub applicable: bool,
    /// `None` when not applicable.
    pub passed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tightness<T: Real> {
    /// `upper / lower`
    pub ratio: T,
    /// `1 + 2(k+1) sqrt(2 - 2cos(omega))`
    pub cap: T,
    /// `(k+1) sqrt(2 - 2cos(omega)) < 1`.
    pub applicable: bool,
    pub passed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Oversampling<T: Real> {
    /// `pi / k`, the largest bandwidth `kZ` samples exactly.
    pub shannon_critical: T,
    /// `acos(1 - 2/(k+1)^2)`, where the graph estimate stops being informative.
    pub graph_critical: T,
    /// `shannon_critical / graph_critical`
    pub factor: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoReport<T: Real> {
    pub k: usize,
    pub omega: T,
    pub vertices: usize,
    pub seed: u64,
    pub constants: LineConstants<T>,
    pub shannon_identity: ShannonIdentity<T>,
    pub graph_bounds: GraphBounds<T>,
    pub tightness: Tightness<T>,
    /// `(k+1)/2 sqrt(2 - 2cos(omega))`.
    pub eta_estimate: T,
    /// `(B - A)/(A + B)` for the squared bounds `A = lower^2`, `B = upper^2`.
    pub eta_from_frame_bounds: T,
    pub oversampling: Oversampling<T>,
    pub passed: bool,
}

/// `x = (k+1)/2 sqrt(2 - 2cos(omega))`.
fn spread<T: Real>(k: usize, omega: T) -> T {
    int::<T>(k + 1) / T::lit(2.0) * (T::lit(2.0) - T::lit(2.0) * omega.cos()).sqrt()
}

fn oversampling<T: Real>(k: usize) -> Oversampling<T> {
    let shannon_critical = T::PI() / int::<T>(k);
    let kp1 = int::<T>(k + 1);
    let graph_critical = (T::one() - T::lit(2.0) / (kp1 * kp1)).acos();
    Oversampling { shannon_critical, graph_critical, factor: shannon_critical / graph_critical }
}

fn check_admissible<T: Real>(k: usize, omega: T) -> Result<()> {
    if k == 0 || omega.is_nan() || omega < T::zero() || int::<T>(k) * omega > T::PI() {
        return Err(Error::ShannonInadmissible { k, omega: omega.as_f64() });
    }
    Ok(())
}

/// Draws a random real signal on `C_{k periods}` whose Fourier modes satisfy
/// `|xi_j| <= omega`, and compares `||f|_{kZ}||` with the Shannon identity and
/// the graph sampling bounds.
pub fn shannon_demo<T: Real>(k: usize, omega: T, periods: usize, seed: u64) -> Result<DemoReport<T>> {
    check_admissible(k, omega)?;
    let constants = integer_constants::<T>(k)?;
    let n = k * periods;
    let model = cycle_model::<T>(n)?;
    let dec = &model.decomposition;
    let tol = T::boundary_tol() * (T::one() + omega);
    let modes: Vec<usize> = (0..n).filter(|&j| model.frequencies[j] <= omega + tol).collect();
    let top = modes
        .iter()
        .map(|&j| (model.frequencies[j] * int::<T>(n) / (T::lit(2.0) * T::PI())).round().to_usize().unwrap_or(0))
        .max()
        .unwrap_or(0);
    // Modes j and j' collide on kZ iff j = j' mod periods.
    let alias_free = 2 * top < periods;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<T> = modes.iter().map(|_| T::lit(rng.gen_range(-1.0..=1.0))).collect();
    let f = dec.synthesize(&modes, &coeffs);
    let s = residue_set(n, k);
    let on_s = f.restricted(&s).norm2();
    let full = f.norm2();
    let sqrt_k = int::<T>(k).sqrt();
    let lhs = sqrt_k * on_s;
    let error = if full > T::zero() { (lhs - full).abs() / full } else { T::zero() };
    let shannon_identity = ShannonIdentity {
        lhs,
        rhs: full,
        error,
        alias_free,
        passed: !alias_free || error <= T::membership_tol(),
    };

    let x = spread(k, omega);
    let lower = (T::one() - x) / sqrt_k;
    let upper = (T::one() + x) / sqrt_k;
    let observed = if full > T::zero() { on_s / full } else { sqrt_k.recip() };
    let applicable = x < T::one();
    let graph_bounds = GraphBounds {
        lower,
        upper,
        observed,
        applicable,
        passed: applicable.then(|| within_slack(lower, observed) && within_slack(observed, upper)),
    };
    let tightness = tightness(x);
    let a = lower * lower;
    let b = upper * upper;
    let passed = shannon_identity.passed && graph_bounds.passed != Some(false) && tightness.passed != Some(false);
    Ok(DemoReport {
        k,
        omega,
        vertices: n,
        seed,
        constants,
        shannon_identity,
        graph_bounds,
        tightness,
        eta_estimate: x,
        eta_from_frame_bounds: (b - a) / (a + b),
        oversampling: oversampling(k),
        passed,
    })
}

fn tightness<T: Real>(x: T) -> Tightness<T> {
    let two = T::lit(2.0);
    let applicable = two * x < T::one();
    let ratio = (T::one() + x) / (T::one() - x);
    let cap = T::one() + two * two * x;
    Tightness { ratio, cap, applicable, passed: applicable.then(|| within_slack(ratio, cap)) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TightnessReport<T: Real> {
    pub k: usize,
    pub omega: T,
    pub lower: T,
    pub upper: T,
    pub tightness: Tightness<T>,
    pub eta_estimate: T,
    pub eta_from_frame_bounds: T,
    pub oversampling: Oversampling<T>,
}

/// Bounds, tightness ratio and its cap; requires `(k+1) sqrt(2 - 2cos(omega)) < 1`.
pub fn oversampling_report<T: Real>(k: usize, omega: T) -> Result<TightnessReport<T>> {
    check_admissible(k, omega)?;
    let x = spread(k, omega);
    if T::lit(2.0) * x >= T::one() {
        return Err(Error::TightnessNotApplicable((T::lit(2.0) * x).as_f64()));
    }
    let sqrt_k = int::<T>(k).sqrt();
    let lower = (T::one() - x) / sqrt_k;
    let upper = (T::one() + x) / sqrt_k;
    let (a, b) = (lower * lower, upper * upper);
    Ok(TightnessReport {
        k,
        omega,
        lower,
        upper,
        tightness: tightness(x),
        eta_estimate: x,
        eta_from_frame_bounds: (b - a) / (a + b),
        oversampling: oversampling(k),
    })
}

/// Real signal on `C_N` with the given Fourier mode coefficients, for tests
/// that need a hand-picked bandlimited signal.
pub fn fourier_signal<T: Real>(model: &CycleModel<T>, coeffs: &[(usize, T)]) -> Signal<T> {
    let (idx, c): (Vec<usize>, Vec<T>) = coeffs.iter().copied().unzip();
    model.decomposition.synthesize(&idx, &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        let c = integer_constants::<f64>(5).unwrap();
        assert_eq!((c.n, c.delta, c.a, c.a_hat), (2, 3f64.sqrt(), 5f64.sqrt(), 5f64.sqrt()));
        assert_eq!(c.delta_hat, 3f64.sqrt());
        let c3 = integer_constants::<f64>(3).unwrap();
        assert_eq!((c3.delta, c3.a), (1.0, 3f64.sqrt()));
        assert!(integer_constants::<f64>(4).is_err());
        assert!(integer_constants::<f64>(1).is_err());
    }

    /// The chain coefficient on `kZ` cannot vanish at `k = 3`: `f = delta_0`
    /// has `||f|_S|| = ||f|| = 1` and `||grad f|| = 2`, so
    /// `sqrt(3) <= 1 + 2 δ̂` forces `δ̂ > 0`.
    #[test]
    fn reverse_coefficient_is_positive_for_k3() {
        let g = generators::cycle::<f64>(9);
        let s0 = residue_set(9, 3);
        let chain = SubsetChain::closure_prefix(&g, &s0).unwrap();
        let f = Signal::dirac(9, 0);
        let grad = g.weighted_gradient_norm(&f, Exponent::Finite(2.0)).unwrap();
        assert_eq!(grad, 2.0);
        let a_hat = 3f64.sqrt();
        // With a zero gradient coefficient the estimate would read sqrt(3) <= 1.
        assert!(a_hat * 1.0 > 1.0 + 0.0 * grad);
        let c = integer_constants::<f64>(3).unwrap();
        assert!(a_hat <= 1.0 + c.delta_hat * grad);
        assert!(crate::partition::reverse_check(&g, &chain, &f, 2.0).unwrap().passed);
    }

    #[test]
    fn closed_form_matches_generic() {
        for k in [3usize, 5, 7, 9] {
            for m in [3usize, 4, 6] {
                let closed = integer_constants::<f64>(k).unwrap();
                let generic = generic_line_constants::<f64>(k, m).unwrap();
                assert_eq!(closed, generic, "k = {k}, m = {m}");
            }
        }
        let even = generic_line_constants::<f64>(4, 5).unwrap();
        assert!(even.delta > 0.0 && even.a > 0.0);
    }

    #[test]
    fn band_map_and_psi() {
        assert_eq!(band_map(0.0).unwrap(), 0.0);
        assert_eq!(band_map(PI).unwrap(), 4.0);
        assert!((band_map(PI / 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((psi(2f64.sqrt()).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(band_map(-0.1).is_err() && band_map(3.2).is_err());
        assert!(psi(2.1).is_err() && psi(-0.1).is_err());
        for i in 0..=100 {
            let xi = PI * i as f64 / 100.0;
            assert!((psi(band_map(xi).unwrap().sqrt()).unwrap() - xi).abs() < 1e-7);
        }
    }

    #[test]
    fn cycle_model_matches_dense_solver() {
        for n in [3usize, 4, 9, 16] {
            let m = cycle_model::<f64>(n).unwrap();
            let dense = SpectralDecomposition::decompose(&m.graph).unwrap();
            for (x, y) in m.decomposition.eigenvalues().iter().zip(dense.eigenvalues()) {
                assert!((x - y).abs() < 1e-10);
            }
            for j in 0..n {
                let u = Signal::new(m.decomposition.eigenvector(j).to_vec());
                let lu = m.graph.apply_laplacian(&u).unwrap();
                assert!(lu.sub(&u.scaled(m.decomposition.eigenvalue(j))).norm2() < 1e-10);
                assert!((u.norm2() - 1.0).abs() < 1e-12);
            }
        }
        let four = cycle_model::<f64>(4).unwrap();
        for (x, y) in four.decomposition.eigenvalues().iter().zip([0.0, 2.0, 2.0, 4.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn demo_examples() {
        let r = shannon_demo::<f64>(5, 0.1, 45, 0).unwrap();
        assert_eq!(r.vertices, 225);
        assert!(r.shannon_identity.alias_free && r.shannon_identity.error < 1e-8);
        assert!(r.graph_bounds.applicable && r.graph_bounds.passed == Some(true));
        assert!(r.passed);

        let wide = shannon_demo::<f64>(5, PI / 5.0, 45, 0).unwrap();
        assert!(!wide.graph_bounds.applicable && wide.graph_bounds.passed.is_none());
        assert!((wide.oversampling.factor - 1.876).abs() < 1e-3);

        assert!(matches!(shannon_demo::<f64>(5, 0.7, 45, 0), Err(Error::ShannonInadmissible { .. })));
        let big = oversampling::<f64>(101);
        assert!((big.factor - 1.586).abs() < 1e-3);
    }

    #[test]
    fn tightness_report() {
        let r = oversampling_report::<f64>(5, 0.05).unwrap();
        assert!((r.tightness.cap - (1.0 + 12.0 * (2.0 - 2.0 * 0.05f64.cos()).sqrt())).abs() < 1e-14);
        assert!(r.tightness.ratio <= r.tightness.cap);
        let tiny = oversampling_report::<f64>(5, 1e-9).unwrap();
        assert!((tiny.tightness.ratio - 1.0).abs() < 1e-7 && (tiny.tightness.cap - 1.0).abs() < 1e-7);
        // (k+1) sqrt(2 - 2cos w) = 0.99
        let w = psi(0.99 / 6.0).unwrap();
        let edge = oversampling_report::<f64>(5, w).unwrap();
        assert!(edge.tightness.applicable && edge.tightness.ratio <= edge.tightness.cap);
        assert!(matches!(oversampling_report::<f64>(5, 0.2), Err(Error::TightnessNotApplicable(_))));
    }
}
