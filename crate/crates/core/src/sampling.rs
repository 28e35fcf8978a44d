//! Frame bounds for sampling on `S0`, the frame vectors `theta_v = P_omega delta_v`,
//! Plancherel-Polya checks and the iterative frame algorithm.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Exponent, Signal, VertexSet, WeightedGraph};
use crate::partition::{chain_constants, partition_constants, CheckKind, Partition, RecordConstants, SubsetChain, VerificationRecord};
use crate::scalar::Real;
use crate::spectral::{PwProjector, SpectralDecomposition};

/// Constants of the two-set partition `(S0, V \ S0)` with `p = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSetConstants<T: Real> {
    #[serde(rename = "K0")]
    pub k0: T,
    #[serde(rename = "D0")]
    pub d0: T,
    #[serde(rename = "K0_hat")]
    pub k0_hat: T,
    #[serde(rename = "D0_hat")]
    pub d0_hat: T,
}

pub fn two_set_constants<T: Real>(g: &WeightedGraph<T>, s0: &VertexSet) -> Result<TwoSetConstants<T>> {
    if s0.is_empty() || s0.len() == g.len() {
        return Err(Error::Domain("S0 must be a non-empty proper subset of the vertices".into()));
    }
    let part = Partition::two_set(g, s0)?;
    let two = Exponent::Finite(T::lit(2.0));
    let pc = partition_constants(g, &part, two)?;
    let cc = chain_constants(g, &SubsetChain::from_partition(&part), two)?;
    Ok(TwoSetConstants { k0: pc.k[0], d0: pc.d[0], k0_hat: cc.khat[0], d0_hat: cc.dhat[0] })
}

/// Frame bounds of `{theta_v}_{v in S0}` on `PW_omega` from the two-set constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameBounds<T: Real> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
    pub eta: T,
    /// `2/B`, exclusive upper limit of admissible relaxations.
    pub relaxation_max: T,
    /// `2/(A+B)`, the relaxation at which `eta` is the proven contraction factor.
    pub default_relaxation: T,
    pub omega: T,
    pub epsilon: T,
    #[serde(rename = "K0")]
    pub k0: T,
    #[serde(rename = "D0")]
    pub d0: T,
    #[serde(rename = "K0_hat")]
    pub k0_hat: T,
    #[serde(rename = "D0_hat")]
    pub d0_hat: T,
}

impl<T: Real> FrameBounds<T> {
    /// `A = (1 - sqrt(2 omega/K0))^2 / (1 + D0/K0)`,
    /// `B = (1 + sqrt(2 omega/D̂0))^2 / (1 + K̂0/D̂0)`.
    pub fn new(k0: T, d0: T, k0_hat: T, d0_hat: T, omega: T) -> Result<Self> {
        let two = T::lit(2.0);
        if !(k0 >= T::zero() && d0 >= T::zero()) {
            return Err(Error::Domain(format!("K0 = {k0} and D0 = {d0} must be non-negative")));
        }
        if !(k0_hat > T::zero() && d0_hat > T::zero()) {
            return Err(Error::Domain(format!("K0_hat = {k0_hat} and D0_hat = {d0_hat} must be positive")));
        }
        if omega.is_nan() || omega < T::zero() {
            return Err(Error::Domain(format!("bandwidth must be non-negative, got {omega}")));
        }
        if omega >= k0 / two {
            return Err(Error::UniquenessCondition { omega: omega.as_f64(), limit: (k0 / two).as_f64() });
        }
        let lower = T::one() - (two * omega / k0).sqrt();
        let upper = T::one() + (two * omega / d0_hat).sqrt();
        let a = lower * lower / (T::one() + d0 / k0);
        let b = upper * upper / (T::one() + k0_hat / d0_hat);
        Ok(FrameBounds {
            a,
            b,
            eta: (b - a) / (a + b),
            relaxation_max: two / b,
            default_relaxation: two / (a + b),
            omega,
            epsilon: (two * omega).sqrt(),
            k0,
            d0,
            k0_hat,
            d0_hat,
        })
    }

    pub fn from_constants(c: &TwoSetConstants<T>, omega: T) -> Result<Self> {
        Self::new(c.k0, c.d0, c.k0_hat, c.d0_hat, omega)
    }

    /// Contraction factor `max(|1 - nu A|, |1 - nu B|)` of one step with relaxation `nu`.
    pub fn contraction(&self, relaxation: T) -> T {
        (T::one() - relaxation * self.a).abs().max((T::one() - relaxation * self.b).abs())
    }
}

pub fn frame_bounds<T: Real>(g: &WeightedGraph<T>, s0: &VertexSet, omega: T) -> Result<FrameBounds<T>> {
    FrameBounds::from_constants(&two_set_constants(g, s0)?, omega)
}

/// `theta_v = P_omega delta_v` for every `v` in `s0`.
pub fn sampling_frame_vectors<T: Real>(
    dec: &SpectralDecomposition<T>,
    omega: T,
    s0: &VertexSet,
) -> Result<BTreeMap<usize, Signal<T>>> {
    let pw = PwProjector::new(dec, omega)?;
    let n = dec.len();
    s0.iter()
        .map(|v| {
            if v >= n {
                return Err(Error::VertexOutOfRange { index: v, len: n });
            }
            Ok((v, pw.project(&Signal::dirac(n, v))?))
        })
        .collect()
}

/// Extreme eigenvalues of the frame operator `f -> sum_v <f, theta_v> theta_v`
/// restricted to `PW_omega`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactFrameBounds<T: Real> {
    pub lambda_min: T,
    pub lambda_max: T,
    pub dimension: usize,
}

impl<T: Real> ExactFrameBounds<T> {
    pub fn eta(&self) -> T {
        (self.lambda_max - self.lambda_min) / (self.lambda_max + self.lambda_min)
    }
}

/// In eigen-coordinates of `PW_omega` the frame operator is `U^T U` with
/// `U` the band eigenvectors restricted to `s0`.
pub fn exact_frame_bounds<T: Real>(dec: &SpectralDecomposition<T>, omega: T, s0: &VertexSet) -> Result<ExactFrameBounds<T>> {
    let pw = PwProjector::new(dec, omega)?;
    let band = pw.band();
    let d = band.len();
    if d == 0 {
        return Err(Error::Domain(format!("PW_omega is trivial for omega = {omega}")));
    }
    let mut gram = vec![T::zero(); d * d];
    for a in 0..d {
        for b in 0..=a {
            let (ua, ub) = (dec.eigenvector(band[a]), dec.eigenvector(band[b]));
            let x: T = s0.iter().map(|v| ua[v] * ub[v]).sum();
            gram[a * d + b] = x;
            gram[b * d + a] = x;
        }
    }
    let eig = T::symmetric_eigen(&gram, d)?;
    Ok(ExactFrameBounds { lambda_min: eig.values[0], lambda_max: eig.values[d - 1], dimension: d })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlancherelPolyaReport<T: Real> {
    /// `sum_{v in S0} |<f, theta_v>|^2`
    pub frame_sum: T,
    /// `||f|_{S0}||_2^2`, equal to `frame_sum` for `f` in `PW_omega`.
    pub restriction_sq: T,
    pub records: Vec<VerificationRecord<T>>,
    pub passed: bool,
}

/// Checks, for `f` in `PW_omega` and `epsilon = sqrt(2 omega)`,
///
/// ```text
/// (1 - eps delta)/a ||f|| <= ||f|_{S0}|| <= (1 + eps δ̂)/â ||f||
/// ```
///
/// and the squared frame form with `sum_v |<f, theta_v>|^2` in the middle.
pub fn plancherel_polya_check<T: Real>(
    g: &WeightedGraph<T>,
    dec: &SpectralDecomposition<T>,
    omega: T,
    part: &Partition,
    chain: &SubsetChain,
    f: &Signal<T>,
) -> Result<PlancherelPolyaReport<T>> {
    g.check_signal(f)?;
    if part.initial() != chain.initial() {
        return Err(Error::Precondition("partition and chain must share the initial set".into()));
    }
    let two = T::lit(2.0);
    let e = Exponent::Finite(two);
    let pc = partition_constants(g, part, e)?;
    let cc = chain_constants(g, chain, e)?;
    let (delta, a) = (pc.delta()?, pc.a()?);
    let (delta_hat, a_hat) = (cc.delta_hat()?, cc.a_hat()?);
    let epsilon = (two * omega.max(T::zero())).sqrt();
    if epsilon * delta >= T::one() {
        return Err(Error::InsufficientDensity((epsilon * delta).as_f64()));
    }
    let pw = PwProjector::new(dec, omega)?;
    pw.check_membership(f)?;

    let s0 = part.initial();
    let theta = sampling_frame_vectors(dec, omega, s0)?;
    let frame_sum: T = theta.values().map(|t| {
        let x = f.dot(t);
        x * x
    }).sum();
    let restricted = g.lp_norm_on(f, s0, e)?;
    let norm = f.norm2();
    let lower = (T::one() - epsilon * delta) / a;
    let upper = (T::one() + epsilon * delta_hat) / a_hat;
    let constants = RecordConstants::Sampling { omega, epsilon, delta, a, delta_hat, a_hat };
    let records = vec![
        VerificationRecord::new(CheckKind::SamplingLower, lower * norm, restricted, constants.clone()),
        VerificationRecord::new(CheckKind::SamplingUpper, restricted, upper * norm, constants.clone()),
        VerificationRecord::new(CheckKind::FrameLower, lower * lower * norm * norm, frame_sum, constants.clone()),
        VerificationRecord::new(CheckKind::FrameUpper, frame_sum, upper * upper * norm * norm, constants),
    ];
    let passed = records.iter().all(|r| r.passed);
    Ok(PlancherelPolyaReport { frame_sum, restriction_sq: restricted * restricted, records, passed })
}

/// Stopping parameters of the frame algorithm.
#[derive(Clone, Copy, Debug)]
pub struct ReconstructOptions<T> {
    /// Defaults to `2/(A+B)`.
    pub relaxation: Option<T>,
    /// Stop once `||g_n - g_{n-1}|| <= tol * max(1, ||samples||)`.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for ReconstructOptions<T> {
    fn default() -> Self {
        ReconstructOptions { relaxation: None, tol: T::lit(1e-10), max_iter: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionTrace<T: Real> {
    pub bounds: FrameBounds<T>,
    pub relaxation: T,
    /// `max(|1 - nu A|, |1 - nu B|)`.
    pub contraction: T,
    /// `||f - g_n||_2` for `n = 0, 1, ...`, present when the true signal is known.
    pub errors: Option<Vec<T>>,
    /// `||(samples - g_n)|_{S0}||_2` for `n = 0, 1, ...`.
    pub residuals: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub signal: Signal<T>,
}

/// Frame algorithm `g_n = g_{n-1} + nu sum_{v in S0} (samples[v] - g_{n-1}(v)) theta_v`
/// from `g_0 = 0`. `S0` is the key set of `samples`.
pub fn frame_reconstruct<T: Real>(
    dec: &SpectralDecomposition<T>,
    bounds: &FrameBounds<T>,
    samples: &BTreeMap<usize, T>,
    options: &ReconstructOptions<T>,
    truth: Option<&Signal<T>>,
) -> Result<ReconstructionTrace<T>> {
    let n = dec.len();
    if let Some(&v) = samples.keys().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { index: v, len: n });
    }
    if let Some(f) = truth {
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: f.len() });
        }
    }
    let relaxation = options.relaxation.unwrap_or(bounds.default_relaxation);
    if !(relaxation > T::zero() && relaxation < bounds.relaxation_max) {
        return Err(Error::Relaxation { value: relaxation.as_f64(), max: bounds.relaxation_max.as_f64() });
    }
    let pw = PwProjector::new(dec, bounds.omega)?;
    let band = pw.band();
    let vertices: Vec<usize> = samples.keys().copied().collect();
    let values: Vec<T> = samples.values().copied().collect();
    // rows[i][b] = u_{band[b]}(vertices[i])
    let rows: Vec<Vec<T>> = vertices
        .iter()
        .map(|&v| band.iter().map(|&j| dec.eigenvector(j)[v]).collect())
        .collect();
    let sample_norm = values.iter().map(|&x| x * x).sum::<T>().sqrt();
    let stop = options.tol * T::one().max(sample_norm);

    let mut coeffs = vec![T::zero(); band.len()];
    let truth_coeffs = match truth {
        Some(f) => Some(dec.coefficients(f)?),
        None => None,
    };
    let error_of = |c: &[T]| -> Option<T> {
        truth_coeffs.as_ref().map(|tc| {
            // ||f - g||^2 = sum over all modes; g lives on the band only.
            let mut total = T::zero();
            let mut in_band = vec![false; n];
            for (b, &j) in band.iter().enumerate() {
                in_band[j] = true;
                let d = tc[j] - c[b];
                total += d * d;
            }
            for j in (0..n).filter(|&j| !in_band[j]) {
                total += tc[j] * tc[j];
            }
            total.sqrt()
        })
    };
    let residual_of = |c: &[T]| -> Vec<T> {
        rows.iter()
            .zip(&values)
            .map(|(row, &s)| s - row.iter().zip(c).map(|(&u, &x)| u * x).sum::<T>())
            .collect()
    };
    let norm = |r: &[T]| r.iter().map(|&x| x * x).sum::<T>().sqrt();

    let mut errors = truth.map(|_| vec![error_of(&coeffs).expect("truth present")]);
    let mut residual = residual_of(&coeffs);
    let mut residuals = vec![norm(&residual)];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iter {
        iterations += 1;
        // Coefficient update: nu U^T r, and ||g_n - g_{n-1}|| = ||nu U^T r||.
        let mut change = T::zero();
        for b in 0..band.len() {
            let step = relaxation * rows.iter().zip(&residual).map(|(row, &r)| row[b] * r).sum::<T>();
            coeffs[b] += step;
            change += step * step;
        }
        residual = residual_of(&coeffs);
        residuals.push(norm(&residual));
        if let Some(errs) = errors.as_mut() {
            errs.push(error_of(&coeffs).expect("truth present"));
        }
        if change.sqrt() <= stop {
            converged = true;
            break;
        }
    }
    Ok(ReconstructionTrace {
        bounds: *bounds,
        relaxation,
        contraction: bounds.contraction(relaxation),
        errors,
        residuals,
        iterations,
        converged,
        signal: dec.synthesize(band, &coeffs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use rand::SeedableRng;

    fn c15() -> (WeightedGraph<f64>, SpectralDecomposition<f64>, VertexSet) {
        let g = generators::cycle::<f64>(15);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        (g, dec, VertexSet::new((0..15).step_by(3)))
    }

    #[test]
    fn bound_formulas() {
        let b = FrameBounds::<f64>::new(1.0, 2.0, 2.0, 1.0, 0.0).unwrap();
        assert!((b.a - 1.0 / 3.0).abs() < 1e-15 && (b.b - 1.0 / 3.0).abs() < 1e-15);
        assert!(b.eta.abs() < 1e-15);

        let b = FrameBounds::new(1.0, 2.0, 2.0, 1.0, 0.1).unwrap();
        let s = 0.2f64.sqrt();
        assert!((b.a - (1.0 - s).powi(2) / 3.0).abs() < 1e-15);
        assert!((b.b - (1.0 + s).powi(2) / 3.0).abs() < 1e-15);
        assert!((b.eta - (b.b - b.a) / (b.a + b.b)).abs() < 1e-15);
        assert!(0.0 < b.a && b.a <= b.b && (0.0..1.0).contains(&b.eta));

        assert!(matches!(FrameBounds::new(1.0, 2.0, 2.0, 1.0, 0.5), Err(Error::UniquenessCondition { .. })));
        assert!(FrameBounds::new(1.0, 2.0, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn cycle_two_set_constants_and_exact_bounds() {
        let (g, dec, s0) = c15();
        let c = two_set_constants(&g, &s0).unwrap();
        assert_eq!((c.k0, c.d0, c.k0_hat, c.d0_hat), (1.0, 2.0, 2.0, 1.0));
        let b = FrameBounds::from_constants(&c, 0.4).unwrap();
        let r = 0.8f64.sqrt();
        assert!((b.a - (1.0 - r).powi(2) / 3.0).abs() < 1e-15 && (b.a - 0.0037155).abs() < 1e-6);
        assert!((b.b - (1.0 + r).powi(2) / 3.0).abs() < 1e-15 && (b.b - 1.1962848).abs() < 1e-6);
        let ex = exact_frame_bounds(&dec, 0.4, &s0).unwrap();
        assert_eq!(ex.dimension, 3);
        assert!((ex.lambda_min - 1.0 / 3.0).abs() < 1e-12 && (ex.lambda_max - 1.0 / 3.0).abs() < 1e-12);
        assert!(b.a <= ex.lambda_min && ex.lambda_max <= b.b);
    }

    #[test]
    fn frame_vectors_reproduce_samples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let g = generators::random_connected::<f64, _>(18, 0.25, 0.5, 1.5, &mut rng);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let s0 = VertexSet::new([0, 3, 7, 11]);
        let pw = PwProjector::new(&dec, 1.2).unwrap();
        let theta = sampling_frame_vectors(&dec, 1.2, &s0).unwrap();
        for _ in 0..5 {
            let f = pw.random_signal(&mut rng);
            for (&v, t) in &theta {
                assert!((f.dot(t) - f.get(v)).abs() < 1e-10);
            }
        }
        let full = sampling_frame_vectors(&dec, dec.largest(), &s0).unwrap();
        for (&v, t) in &full {
            assert!(t.sub(&Signal::dirac(18, v)).norm2() < 1e-10);
        }
        let flat = sampling_frame_vectors(&dec, 0.0, &s0).unwrap();
        for t in flat.values() {
            assert!(t.values().iter().all(|&x| (x - 1.0 / 18.0).abs() < 1e-12));
        }
    }

    #[test]
    fn plancherel_polya_star_and_cycle() {
        let star = generators::star::<f64>(10);
        let dec = SpectralDecomposition::decompose(&star).unwrap();
        let s0 = VertexSet::new([0]);
        let part = Partition::closure(&star, &s0).unwrap();
        let chain = SubsetChain::from_partition(&part);
        let f = Signal::constant(11, 2.5);
        let r = plancherel_polya_check(&star, &dec, 0.25, &part, &chain, &f).unwrap();
        assert!(r.passed, "{r:?}");
        let zero = plancherel_polya_check(&star, &dec, 0.25, &part, &chain, &Signal::zeros(11)).unwrap();
        assert!(zero.records.iter().all(|x| x.lhs == 0.0 && x.rhs == 0.0));

        let (g, dec, s0) = c15();
        let part = Partition::two_set(&g, &s0).unwrap();
        let chain = SubsetChain::from_partition(&part);
        let pw = PwProjector::new(&dec, 0.4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let bounds = frame_bounds(&g, &s0, 0.4).unwrap();
        for _ in 0..10 {
            let f = pw.random_signal(&mut rng);
            let r = plancherel_polya_check(&g, &dec, 0.4, &part, &chain, &f).unwrap();
            assert!(r.passed);
            assert!((r.frame_sum - r.restriction_sq).abs() < 1e-10);
            // two-set frame form equals the FrameBounds A and B
            let nf = f.norm2().powi(2);
            assert!((r.records[2].lhs - bounds.a * nf).abs() < 1e-12);
            assert!((r.records[3].rhs - bounds.b * nf).abs() < 1e-12);
        }
        let bad = plancherel_polya_check(&g, &dec, 0.6, &part, &chain, &Signal::zeros(15));
        assert!(matches!(bad, Err(Error::InsufficientDensity(_))));
    }

    #[test]
    fn reconstruction_cases() {
        let (g, dec, s0) = c15();
        let bounds = frame_bounds(&g, &s0, 0.4).unwrap();
        let zeros: BTreeMap<usize, f64> = s0.iter().map(|v| (v, 0.0)).collect();
        let tr = frame_reconstruct(&dec, &bounds, &zeros, &ReconstructOptions::default(), None).unwrap();
        assert!(tr.converged && tr.iterations == 1 && tr.signal.norm2() == 0.0);

        let pw = PwProjector::new(&dec, 0.4).unwrap();
        let f = pw.random_signal(&mut rand_chacha::ChaCha8Rng::seed_from_u64(2));
        let samples: BTreeMap<usize, f64> = s0.iter().map(|v| (v, f.get(v))).collect();
        let tr = frame_reconstruct(&dec, &bounds, &samples, &ReconstructOptions::default(), Some(&f)).unwrap();
        assert!(tr.converged);
        let errs = tr.errors.as_ref().unwrap();
        for (n, e) in errs.iter().enumerate() {
            assert!(*e <= bounds.eta.powi(n as i32) * f.norm2() * (1.0 + 1e-9) + 1e-12);
        }
        assert!(tr.signal.sub(&f).norm2() <= 1e-8 * f.norm2());

        let opts = ReconstructOptions { relaxation: Some(bounds.relaxation_max), ..Default::default() };
        assert!(matches!(frame_reconstruct(&dec, &bounds, &samples, &opts, None), Err(Error::Relaxation { .. })));
    }

    #[test]
    fn star_constant_reconstruction() {
        let g = generators::star::<f64>(10);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let s0 = VertexSet::new([0]);
        let bounds = frame_bounds(&g, &s0, 0.25).unwrap();
        let f = Signal::constant(11, 3.0);
        let samples = BTreeMap::from([(0, 3.0)]);
        let tr = frame_reconstruct(&dec, &bounds, &samples, &ReconstructOptions::default(), Some(&f)).unwrap();
        assert!(tr.converged);
        for (n, e) in tr.errors.as_ref().unwrap().iter().enumerate() {
            assert!(*e <= bounds.eta.powi(n as i32) * f.norm2() + 1e-12);
        }
        assert!(tr.signal.sub(&f).norm2() < 1e-8);
    }

    #[test]
    fn uniqueness_below_half_k0() {
        let (g, dec, s0) = c15();
        let pw = PwProjector::new(&dec, 0.4).unwrap();
        let bounds = frame_bounds(&g, &s0, 0.4).unwrap();
        for v in s0.complement(15).iter() {
            let f = pw.project(&Signal::dirac(15, v)).unwrap();
            let on_s0 = g.lp_norm_on(&f, &s0, Exponent::Finite(2.0)).unwrap();
            assert!(on_s0 * on_s0 >= bounds.a * f.norm2().powi(2));
        }
    }
}
