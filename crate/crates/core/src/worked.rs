//! The star, wheel and integer-line examples as self-checking reports.

use serde::Serialize;

use crate::error::Result;
use crate::generators;
use crate::graph::{Exponent, Signal, VertexSet};
use crate::partition::{chain_constants, partition_constants, poincare_forward_check, ChainConstants, Partition, PartitionConstants, SubsetChain};
use crate::scalar::{within_slack, Real};
use crate::shannon::{cycle_model, generic_line_constants, integer_constants, LineConstants};
use crate::spectral::SpectralDecomposition;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarReport<T: Real> {
    pub leaves: usize,
    pub constants: PartitionConstants<T>,
    pub chain: ChainConstants<T>,
    pub eigenvalues: Vec<T>,
    /// Largest deviation from `{0, 1 (N-1 times), N+1}`.
    pub spectrum_error: T,
    pub lambda_1: T,
    /// `K0/2`
    pub lambda_1_bound: T,
    /// `1 <= sqrt(N+1)|f(v0)|/||f|| + ||grad f||/||f||` at `f = 1`.
    pub constant_rhs: T,
    pub passed: bool,
}

/// Star with centre `v0` and `S0 = {v0}`.
pub fn star_report<T: Real>(leaves: usize) -> Result<StarReport<T>> {
    let g = generators::star::<T>(leaves);
    let s0 = VertexSet::new([0]);
    let part = Partition::closure(&g, &s0)?;
    let two = Exponent::Finite(T::lit(2.0));
    let constants = partition_constants(&g, &part, two)?;
    let chain = chain_constants(&g, &SubsetChain::from_partition(&part), two)?;
    let dec = SpectralDecomposition::decompose(&g)?;
    let nl = T::from_usize(leaves).expect("small integer");
    let expected = |j: usize| {
        if j == 0 {
            T::zero()
        } else if j == leaves {
            nl + T::one()
        } else {
            T::one()
        }
    };
    let spectrum_error = dec
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(j, &x)| (x - expected(j)).abs())
        .fold(T::zero(), T::max);
    let f = Signal::constant(g.len(), T::one());
    let norm = f.norm2();
    let constant_rhs = (nl + T::one()).sqrt() * f.get(0).abs() / norm + g.weighted_gradient_norm(&f, two)? / norm;
    let lambda_1 = dec.eigenvalue(1);
    let lambda_1_bound = constants.k[0] / T::lit(2.0);
    let passed = spectrum_error <= T::membership_tol()
        && within_slack(T::one(), constant_rhs)
        && within_slack(constant_rhs, T::one())
        && lambda_1 >= lambda_1_bound;
    Ok(StarReport {
        leaves,
        constants,
        chain,
        eigenvalues: dec.eigenvalues().to_vec(),
        spectrum_error,
        lambda_1,
        lambda_1_bound,
        constant_rhs,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WheelLift<T: Real> {
    /// Fourier index `j` of the cycle eigenfunction (frequency `2 pi j/N`).
    pub j: usize,
    pub cycle_eigenvalue: T,
    /// `||L u - (lambda + 1) u||_2` on the wheel.
    pub residual: T,
    /// `sqrt(1 + 1/N) + sqrt(2) sqrt((lambda + 1)/N)`
    pub rhs: T,
    /// Generic forward Poincaré check on the lift.
    pub poincare_passed: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WheelReport<T: Real> {
    pub rim: usize,
    pub constants: PartitionConstants<T>,
    pub max_residual: T,
    pub lifts: Vec<WheelLift<T>>,
    pub passed: bool,
}

/// Wheel with `S0` the rim; every nonconstant cycle eigenfunction, extended
/// by zero at the hub, is an eigenfunction with eigenvalue shifted by one.
pub fn wheel_report<T: Real>(rim: usize) -> Result<WheelReport<T>> {
    let g = generators::wheel::<T>(rim);
    let s0 = VertexSet::new(1..=rim);
    let part = Partition::closure(&g, &s0)?;
    let two = T::lit(2.0);
    let constants = partition_constants(&g, &part, Exponent::Finite(two))?;
    let model = cycle_model::<T>(rim)?;
    let nf = T::from_usize(rim).expect("small integer");
    let base = (T::one() + nf.recip()).sqrt();
    let mut lifts = Vec::with_capacity(rim - 1);
    for idx in 1..rim {
        let lambda = model.decomposition.eigenvalue(idx);
        let mut values = vec![T::zero(); rim + 1];
        values[1..].copy_from_slice(model.decomposition.eigenvector(idx));
        let lift = Signal::new(values);
        let lu = g.apply_laplacian(&lift)?;
        let residual = lu.sub(&lift.scaled(lambda + T::one())).norm2();
        let rhs = base + two.sqrt() * ((lambda + T::one()) / nf).sqrt();
        let poincare_passed = poincare_forward_check(&g, &part, &lift, two)?.passed;
        let j = (model.frequencies[idx] * nf / (two * T::PI())).round().to_usize().unwrap_or(0);
        lifts.push(WheelLift {
            j,
            cycle_eigenvalue: lambda,
            residual,
            rhs,
            poincare_passed,
            passed: residual <= T::membership_tol() && within_slack(T::one(), rhs) && poincare_passed,
        });
    }
    let max_residual = lifts.iter().map(|l| l.residual).fold(T::zero(), T::max);
    let passed = lifts.iter().all(|l| l.passed);
    Ok(WheelReport { rim, constants, max_residual, lifts, passed })
}

/// For each Fourier index `j`, whether the wheel inequality's right side
/// decreases strictly along the given reports (ordered by rim size).
pub fn wheel_rhs_monotone<T: Real>(reports: &[WheelReport<T>], max_j: usize) -> bool {
    (1..=max_j).all(|j| {
        let rhs: Vec<T> = reports
            .iter()
            .filter_map(|r| r.lifts.iter().find(|l| l.j == j).map(|l| l.rhs))
            .collect();
        rhs.len() == reports.len() && rhs.windows(2).all(|w| w[1] < w[0])
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineReport<T: Real> {
    pub closed_form: LineConstants<T>,
    pub generic: LineConstants<T>,
    pub matches: bool,
}

pub fn line_report<T: Real>(k: usize, periods: usize) -> Result<LineReport<T>> {
    let closed_form = integer_constants::<T>(k)?;
    let generic = generic_line_constants::<T>(k, periods)?;
    let tol = T::check_tol();
    let close = |x: T, y: T| (x - y).abs() <= tol * T::one().max(x.abs());
    let matches = closed_form.n == generic.n
        && close(closed_form.delta, generic.delta)
        && close(closed_form.a, generic.a)
        && close(closed_form.delta_hat, generic.delta_hat)
        && close(closed_form.a_hat, generic.a_hat);
    Ok(LineReport { closed_form, generic, matches })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExamplesReport<T: Real> {
    pub star: StarReport<T>,
    pub wheel: Vec<WheelReport<T>>,
    pub wheel_rhs_monotone: bool,
    pub line: Vec<LineReport<T>>,
    pub passed: bool,
}

/// Star `N = 10`, wheels `N = 10, 50, 200`, lines `k = 3, 5, 7`.
pub fn examples_report<T: Real>() -> Result<ExamplesReport<T>> {
    let star = star_report(10)?;
    let wheel = [10, 50, 200].into_iter().map(wheel_report).collect::<Result<Vec<_>>>()?;
    let wheel_rhs_monotone = wheel_rhs_monotone(&wheel, 5);
    let line = [3, 5, 7].into_iter().map(|k| line_report(k, 5)).collect::<Result<Vec<_>>>()?;
    let passed = star.passed && wheel.iter().all(|w| w.passed) && wheel_rhs_monotone && line.iter().all(|l| l.matches);
    Ok(ExamplesReport { star, wheel, wheel_rhs_monotone, line, passed })
}
