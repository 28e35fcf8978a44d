//! Laplacian eigendecomposition, Paley-Wiener projections and the relations
//! between shell constants and the spectrum.
//!
//! Everything here works in `l2` with unit vertex weights, where the
//! Laplacian is a symmetric matrix. `PW_omega` is the span of the
//! eigenvectors with eigenvalue `<= omega`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Exponent, Signal, VertexSet, WeightedGraph};
use crate::partition::{chain_constants, partition_constants, CheckKind, Partition, RecordConstants, SubsetChain, VerificationRecord};
use crate::scalar::{serialize_extended, within_slack, Real};

/// Largest graph the dense eigensolver accepts by default.
pub const DENSE_LIMIT: usize = 4096;

/// `|x - b| <= BOUNDARY_TOL (1 + |b|)`.
fn at_boundary<T: Real>(x: T, b: T) -> bool {
    (x - b).abs() <= T::boundary_tol() * (T::one() + b.abs())
}

/// Ascending eigenvalues and an orthonormal eigenbasis of the Laplacian.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    eigenvalues: Vec<T>,
    /// Column-major, eigenvector `j` at `[j*n, (j+1)*n)`.
    eigenvectors: Vec<T>,
    n: usize,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn decompose(g: &WeightedGraph<T>) -> Result<Self> {
        Self::decompose_with_limit(g, DENSE_LIMIT)
    }

    pub fn decompose_with_limit(g: &WeightedGraph<T>, limit: usize) -> Result<Self> {
        if !g.has_unit_vertex_weights() {
            return Err(Error::NonUnitVertexWeights);
        }
        let n = g.len();
        if n > limit {
            return Err(Error::Capacity { vertices: n, limit });
        }
        let eig = T::symmetric_eigen(&g.laplacian_matrix(), n)?;
        // The Laplacian is positive semidefinite; negative values are rounding.
        let eigenvalues = eig.values.into_iter().map(|x| x.max(T::zero())).collect();
        Ok(SpectralDecomposition { eigenvalues, eigenvectors: eig.vectors, n })
    }

    /// Builds a decomposition from a known eigensystem (eigenvalues ascending,
    /// eigenvectors orthonormal and column-major).
    pub fn from_parts(eigenvalues: Vec<T>, eigenvectors: Vec<T>) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: eigenvectors.len() });
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("eigenvalues must be ascending".into()));
        }
        Ok(SpectralDecomposition { eigenvalues, eigenvectors, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, j: usize) -> T {
        self.eigenvalues[j]
    }

    pub fn eigenvector(&self, j: usize) -> &[T] {
        &self.eigenvectors[j * self.n..(j + 1) * self.n]
    }

    pub fn largest(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    fn check(&self, f: &Signal<T>) -> Result<()> {
        if f.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: f.len() });
        }
        Ok(())
    }

    /// `<f, u_j>` for every `j`.
    pub fn coefficients(&self, f: &Signal<T>) -> Result<Vec<T>> {
        self.check(f)?;
        Ok((0..self.n)
            .map(|j| self.eigenvector(j).iter().zip(f.values()).map(|(&u, &x)| u * x).sum())
            .collect())
    }

    /// `sum_j c_j u_j` over the listed indices.
    pub fn synthesize(&self, indices: &[usize], coeffs: &[T]) -> Signal<T> {
        let mut out = vec![T::zero(); self.n];
        for (&j, &c) in indices.iter().zip(coeffs) {
            for (o, &u) in out.iter_mut().zip(self.eigenvector(j)) {
                *o += c * u;
            }
        }
        Signal::new(out)
    }

    /// `||L^t f||_2` computed spectrally; `0^0` is taken as 1.
    pub fn laplacian_power_norm(&self, f: &Signal<T>, t: T) -> Result<T> {
        let c = self.coefficients(f)?;
        Ok(c.iter()
            .zip(&self.eigenvalues)
            .map(|(&c, &l)| {
                let s = if t == T::zero() { T::one() } else { l.powf(t) };
                let x = s * c;
                x * x
            })
            .sum::<T>()
            .sqrt())
    }

    /// Number of eigenvalues, with multiplicity, in `[lo, hi)` (or `[lo, hi]`).
    ///
    /// An eigenvalue within `1e-10 (1 + |b|)` of a boundary `b` is treated as
    /// equal to `b`.
    pub fn count_eigenvalues(&self, lo: T, hi: T, half_open: bool) -> Result<usize> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(self
            .eigenvalues
            .iter()
            .filter(|&&x| {
                let above_lo = x >= lo || at_boundary(x, lo);
                let below_hi = if hi.is_infinite() {
                    true
                } else if half_open {
                    x < hi && !at_boundary(x, hi)
                } else {
                    x <= hi || at_boundary(x, hi)
                };
                above_lo && below_hi
            })
            .count())
    }

    /// Indices `J(omega) = {j : lambda_j <= omega}`.
    pub fn band(&self, omega: T) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| {
                let x = self.eigenvalues[j];
                x <= omega || at_boundary(x, omega)
            })
            .collect()
    }
}

/// Orthogonal projection onto `PW_omega`.
#[derive(Clone, Debug)]
pub struct PwProjector<'a, T> {
    dec: &'a SpectralDecomposition<T>,
    omega: T,
    band: Vec<usize>,
}

impl<'a, T: Real> PwProjector<'a, T> {
    pub fn new(dec: &'a SpectralDecomposition<T>, omega: T) -> Result<Self> {
        if omega.is_nan() || omega < T::zero() {
            return Err(Error::Domain(format!("bandwidth must be non-negative, got {omega}")));
        }
        Ok(PwProjector { dec, omega, band: dec.band(omega) })
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn decomposition(&self) -> &'a SpectralDecomposition<T> {
        self.dec
    }

    /// `J(omega)`.
    pub fn band(&self) -> &[usize] {
        &self.band
    }

    pub fn dimension(&self) -> usize {
        self.band.len()
    }

    /// Coefficients `<f, u_j>` for `j` in `J(omega)`.
    pub fn band_coefficients(&self, f: &Signal<T>) -> Result<Vec<T>> {
        self.dec.check(f)?;
        Ok(self
            .band
            .iter()
            .map(|&j| self.dec.eigenvector(j).iter().zip(f.values()).map(|(&u, &x)| u * x).sum())
            .collect())
    }

    pub fn project(&self, f: &Signal<T>) -> Result<Signal<T>> {
        let c = self.band_coefficients(f)?;
        Ok(self.dec.synthesize(&self.band, &c))
    }

    /// Fails with the largest eigenvalue whose component exceeds
    /// `MEMBERSHIP_TOL * max(1, ||f||)` outside the band.
    pub fn check_membership(&self, f: &Signal<T>) -> Result<()> {
        let c = self.dec.coefficients(f)?;
        let tol = T::membership_tol() * T::one().max(f.norm2());
        let cut = self.band.len();
        if let Some(j) = (cut..self.dec.len()).rev().find(|&j| c[j].abs() > tol) {
            return Err(Error::NotBandlimited {
                eigenvalue: self.dec.eigenvalue(j).as_f64(),
                omega: self.omega.as_f64(),
            });
        }
        Ok(())
    }

    /// Random element of `PW_omega`: coefficients uniform in `[-1, 1]`.
    pub fn random_signal<R: Rng + ?Sized>(&self, rng: &mut R) -> Signal<T> {
        let c: Vec<T> = self.band.iter().map(|_| T::lit(rng.gen_range(-1.0..=1.0))).collect();
        self.dec.synthesize(&self.band, &c)
    }
}

/// `||grad f||_2 = sqrt(2) ||L^{1/2} f||_2` together with
/// `||grad f||_2 <= sqrt(2 omega) ||f||_2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernsteinCheck<T: Real> {
    pub gradient_norm: T,
    /// `sqrt(2) ||L^{1/2} f||_2`
    pub spectral_norm: T,
    pub identity_error: T,
    pub identity_passed: bool,
    pub record: VerificationRecord<T>,
}

impl<T: Real> BernsteinCheck<T> {
    pub fn passed(&self) -> bool {
        self.identity_passed && self.record.passed
    }
}

pub fn bernstein_check<T: Real>(
    g: &WeightedGraph<T>,
    dec: &SpectralDecomposition<T>,
    f: &Signal<T>,
    omega: T,
) -> Result<BernsteinCheck<T>> {
    g.check_signal(f)?;
    let pw = PwProjector::new(dec, omega)?;
    pw.check_membership(f)?;
    let two = T::lit(2.0);
    let gradient_norm = g.weighted_gradient_norm(f, Exponent::Finite(two))?;
    let spectral_norm = two.sqrt() * dec.laplacian_power_norm(f, T::lit(0.5))?;
    let identity_error = (gradient_norm - spectral_norm).abs();
    let scale = T::one().max(f.norm2());
    let epsilon = (two * omega).sqrt();
    let record = VerificationRecord::new(
        CheckKind::Bernstein,
        gradient_norm,
        epsilon * f.norm2(),
        RecordConstants::Bandwidth { omega, epsilon },
    );
    Ok(BernsteinCheck {
        gradient_norm,
        spectral_norm,
        identity_error,
        identity_passed: identity_error <= T::membership_tol() * scale,
        record,
    })
}

/// `Lambda_D(M)`: least eigenvalue of the principal Laplacian submatrix on `M`.
pub fn dirichlet_eigenvalue<T: Real>(g: &WeightedGraph<T>, m: &VertexSet) -> Result<T> {
    if m.is_empty() {
        return Err(Error::Domain("Dirichlet eigenvalue of the empty set".into()));
    }
    g.check_set(m)?;
    let n = g.len();
    let full = g.laplacian_matrix();
    let idx = m.as_slice();
    let k = idx.len();
    let mut sub = Vec::with_capacity(k * k);
    for &i in idx {
        for &j in idx {
            sub.push(full[i * n + j]);
        }
    }
    let eig = T::symmetric_eigen(&sub, k)?;
    Ok(eig.values[0].max(T::zero()))
}

/// A unit-norm `f` in `PW_omega` vanishing on `s0`, if one exists.
pub fn vanishing_signal<T: Real>(dec: &SpectralDecomposition<T>, omega: T, s0: &VertexSet) -> Result<Option<Signal<T>>> {
    let pw = PwProjector::new(dec, omega)?;
    let band = pw.band();
    let d = band.len();
    if d == 0 {
        return Ok(None);
    }
    // Gram matrix of the band eigenvectors restricted to s0.
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
    if eig.values[0] > T::membership_tol() {
        return Ok(None);
    }
    let f = dec.synthesize(band, eig.vector(0));
    let norm = f.norm2();
    Ok(Some(f.scaled(norm.recip())))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountCheck {
    /// `N[0, threshold)`
    pub below: usize,
    /// `N[threshold, inf)`
    pub above: usize,
    pub s0_size: usize,
    pub n: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaBound<T: Real> {
    pub k: usize,
    pub lambda_k: T,
    pub bound: T,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirichletBound<T: Real> {
    pub value: T,
    pub bound: T,
    pub passed: bool,
}

/// Checks on a nonzero bandlimited signal whose zero set contains `S0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroSetChecks<T: Real> {
    /// Smallest `omega` with `f` in `PW_omega`.
    pub omega: T,
    /// `1/sqrt(2 omega) <= delta`
    pub z1: VerificationRecord<T>,
    /// `1/sqrt(2 omega) <= δ̂/(â - 1)`; reported only, see the crate README.
    pub z2: Option<VerificationRecord<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport<T: Real> {
    pub delta: T,
    /// `(2 delta^2)^{-1}`, infinite when `delta = 0`.
    #[serde(serialize_with = "serialize_extended")]
    pub threshold: T,
    pub counts: CountCheck,
    /// `None` when `S0 = V`.
    pub lambda_k_bound: Option<LambdaBound<T>>,
    /// `None` when `S0 = V`.
    pub dirichlet: Option<DirichletBound<T>>,
    pub zero_set_checks: Option<ZeroSetChecks<T>>,
    pub passed: bool,
}

/// Eigenvalue counting, `lambda_k` and Dirichlet bounds implied by an
/// admissible partition, plus the zero-set checks for an optional signal.
pub fn spectral_geometry_report<T: Real>(
    g: &WeightedGraph<T>,
    dec: &SpectralDecomposition<T>,
    part: &Partition,
    zero_signal: Option<&Signal<T>>,
) -> Result<GeometryReport<T>> {
    let two = T::lit(2.0);
    let c = partition_constants(g, part, Exponent::Finite(two))?;
    let delta = c.delta()?;
    let threshold = if delta == T::zero() {
        T::infinity()
    } else {
        (two * delta * delta).recip()
    };
    let n = g.len();
    let s0 = part.initial();
    let below = dec.count_eigenvalues(T::zero(), threshold, true)?;
    let counts = CountCheck {
        below,
        above: n - below,
        s0_size: s0.len(),
        n,
        passed: below <= s0.len(),
    };

    let rest = s0.complement(n);
    let (lambda_k_bound, dirichlet) = if rest.is_empty() {
        (None, None)
    } else {
        let k = s0.len();
        let lambda_k = dec.eigenvalue(k);
        let lb = LambdaBound { k, lambda_k, bound: threshold, passed: within_slack(threshold, lambda_k) };
        let value = dirichlet_eigenvalue(g, &rest)?;
        let db = DirichletBound { value, bound: threshold, passed: within_slack(threshold, value) };
        (Some(lb), Some(db))
    };

    let zero_set_checks = match zero_signal {
        None => None,
        Some(f) => Some(zero_set_checks(g, dec, part, f, delta)?),
    };

    let passed = counts.passed
        && lambda_k_bound.as_ref().is_none_or(|b| b.passed)
        && dirichlet.as_ref().is_none_or(|b| b.passed)
        && zero_set_checks.as_ref().is_none_or(|z| z.z1.passed);
    Ok(GeometryReport { delta, threshold, counts, lambda_k_bound, dirichlet, zero_set_checks, passed })
}

fn zero_set_checks<T: Real>(
    g: &WeightedGraph<T>,
    dec: &SpectralDecomposition<T>,
    part: &Partition,
    f: &Signal<T>,
    delta: T,
) -> Result<ZeroSetChecks<T>> {
    g.check_signal(f)?;
    let scale = T::one().max(f.norm2());
    if f.norm2() <= T::membership_tol() {
        return Err(Error::Precondition("zero-set checks need a nonzero signal".into()));
    }
    if let Some(v) = part.initial().iter().find(|&v| f.get(v).abs() > T::membership_tol() * scale) {
        return Err(Error::Precondition(format!(
            "signal must vanish on the initial set, f({}) = {}",
            g.name(v),
            f.get(v)
        )));
    }
    let c = dec.coefficients(f)?;
    let tol = T::membership_tol() * scale;
    let top = (0..dec.len()).rev().find(|&j| c[j].abs() > tol).unwrap_or(0);
    let omega = dec.eigenvalue(top);
    let two = T::lit(2.0);
    let epsilon = (two * omega).sqrt();
    let lhs = epsilon.recip();
    let z1 = VerificationRecord::new(CheckKind::PoincareZeroOnS0, lhs, delta, RecordConstants::Bandwidth { omega, epsilon });
    let chain = SubsetChain::from_partition(part);
    let cc = chain_constants(g, &chain, Exponent::Finite(two))?;
    let z2 = match (cc.delta_hat, cc.a_hat) {
        (Some(dh), Some(ah)) if ah > T::one() => Some(VerificationRecord::new(
            CheckKind::ReverseSupportedOnS0,
            lhs,
            dh / (ah - T::one()),
            RecordConstants::Chain(cc.clone()),
        )),
        _ => None,
    };
    Ok(ZeroSetChecks { omega, z1, z2 })
}
