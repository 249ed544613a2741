//! Continuous-momentum model of the entangling two-photon detector:
//! discretize the post-measurement two-atom momentum kernel on a
//! quadrature grid and compare its Schmidt spectrum against the analytic
//! geometric spectrum of the Gaussian-by-Gaussian case.

use nalgebra::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::postselect::BipartiteAmplitude;
use crate::scalar::{real, to_f64, Real};
use crate::schmidt::{schmidt, SchmidtReport};

/// Production grids should use at least this many points.
pub const PRODUCTION_MIN_POINTS: usize = 33;
/// Default grid resolution.
pub const DEFAULT_POINTS: usize = 257;
/// Default extent is this multiple of the widest width in play.
pub const DEFAULT_EXTENT_FACTOR: f64 = 8.0;
/// A sweep row whose oracle mismatch exceeds this is under-resolved.
pub const SWEEP_MISMATCH_LIMIT: f64 = 0.05;
/// Relative errors are measured against `max(oracle, this floor)`;
/// entropies below the floor count as zero for comparison purposes.
pub const SWEEP_ENTROPY_FLOOR: f64 = 1e-4;
/// Oracle spectrum truncation threshold on the Schmidt coefficients.
pub const ORACLE_TRUNCATION: f64 = 1e-14;

/// Uniform symmetric momentum grid on `[-extent, +extent]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumGrid<T: Real> {
    points: usize,
    extent: T,
    nodes: Vec<T>,
    weight: T,
}

impl<T: Real> MomentumGrid<T> {
    pub fn new(points: usize, extent: T) -> Result<Self> {
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "grid needs an odd point count >= 3, got {points}"
            )));
        }
        if extent <= T::zero() {
            return Err(Error::invalid("grid extent must be positive"));
        }
        let weight = real::<T>(2.0) * extent / real((points - 1) as f64);
        let half = (points - 1) / 2;
        // Node k*weight for integer k keeps the grid exactly symmetric
        // about zero, which the delta-sum acceptance relies on.
        let nodes: Vec<T> = (0..points)
            .map(|i| real::<T>(i as f64 - half as f64) * weight)
            .collect();
        Ok(MomentumGrid {
            points,
            extent,
            nodes,
            weight,
        })
    }

    /// Default grid for the given source/acceptance widths: 257 points,
    /// extent `8 * max(width)`.
    pub fn default_for_widths(sigma: T, delta: T) -> Result<Self> {
        Self::new(DEFAULT_POINTS, real::<T>(DEFAULT_EXTENT_FACTOR) * sigma.max(delta))
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn extent(&self) -> T {
        self.extent
    }

    #[inline]
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Quadrature weight (grid spacing).
    #[inline]
    pub fn weight(&self) -> T {
        self.weight
    }
}

/// Initial momentum wavefunction of an emitted photon.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceWavefunction<T: Real> {
    /// `exp(-p^2 / (4 sigma^2))` up to normalization.
    Gaussian { sigma: T },
    /// Arbitrary complex samples on the grid nodes.
    Custom { values: CVector<T> },
}

impl<T: Real> SourceWavefunction<T> {
    pub fn gaussian(sigma: T) -> Result<Self> {
        if sigma <= T::zero() {
            return Err(Error::invalid("source width sigma must be positive"));
        }
        Ok(SourceWavefunction::Gaussian { sigma })
    }

    pub fn custom(values: CVector<T>) -> Self {
        SourceWavefunction::Custom { values }
    }

    /// Samples on the grid, L2-normalized: `sum |psi_i|^2 * weight = 1`.
    pub fn sample(&self, grid: &MomentumGrid<T>) -> Result<CVector<T>> {
        let raw: CVector<T> = match self {
            SourceWavefunction::Gaussian { sigma } => {
                let denom = real::<T>(4.0) * *sigma * *sigma;
                CVector::from_iterator(
                    grid.points(),
                    grid.nodes()
                        .iter()
                        .map(|&p| Complex::new((-p * p / denom).exp(), T::zero())),
                )
            }
            SourceWavefunction::Custom { values } => {
                if values.len() != grid.points() {
                    return Err(Error::DimensionMismatch {
                        context: "custom wavefunction samples vs grid",
                        expected: grid.points(),
                        got: values.len(),
                    });
                }
                values.clone()
            }
        };
        let norm_sqr: T = raw
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            * grid.weight();
        if norm_sqr.is_zero() {
            return Err(Error::invalid("source wavefunction has zero norm on the grid"));
        }
        let scale = Complex::new(T::one() / norm_sqr.sqrt(), T::zero());
        Ok(raw.map(|c| c * scale))
    }
}

/// Detector acceptance function `g(p_a, p_b)`.
#[derive(Clone, Debug, PartialEq)]
pub enum AcceptanceFunction<T: Real> {
    /// `exp(-(p_a + p_b)^2 / (4 delta^2))`.
    SumGaussian { delta: T },
    /// Idealized `delta(p_a + p_b)`, realized on-grid as the
    /// anti-diagonal; its entanglement diverges with grid resolution.
    DeltaSum,
    /// `u(p_a) * v(p_b)`.
    Separable { u: CVector<T>, v: CVector<T> },
    /// Arbitrary samples on grid x grid.
    Custom { values: CMatrix<T> },
}

impl<T: Real> AcceptanceFunction<T> {
    pub fn sum_gaussian(delta: T) -> Result<Self> {
        if delta <= T::zero() {
            return Err(Error::invalid("acceptance width delta must be positive"));
        }
        Ok(AcceptanceFunction::SumGaussian { delta })
    }

    fn sample(&self, grid: &MomentumGrid<T>) -> Result<CMatrix<T>> {
        let n = grid.points();
        match self {
            AcceptanceFunction::SumGaussian { delta } => {
                let denom = real::<T>(4.0) * *delta * *delta;
                Ok(CMatrix::from_fn(n, n, |i, j| {
                    let s = grid.nodes()[i] + grid.nodes()[j];
                    Complex::new((-s * s / denom).exp(), T::zero())
                }))
            }
            AcceptanceFunction::DeltaSum => Ok(CMatrix::from_fn(n, n, |i, j| {
                if i + j == n - 1 {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::zero()
                }
            })),
            AcceptanceFunction::Separable { u, v } => {
                if u.len() != n || v.len() != n {
                    return Err(Error::DimensionMismatch {
                        context: "separable acceptance samples vs grid",
                        expected: n,
                        got: u.len().min(v.len()),
                    });
                }
                Ok(CMatrix::from_fn(n, n, |i, j| u[i] * v[j]))
            }
            AcceptanceFunction::Custom { values } => {
                if values.nrows() != n || values.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        context: "custom acceptance samples vs grid",
                        expected: n,
                        got: values.nrows(),
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

/// Unnormalized discretized kernel
/// `K(p1, p2) = [g(p1,p2) + g(p2,p1)] * G1(p1) * G2(p2) * weight`.
///
/// The exchange symmetrization is what caps separable acceptances at
/// Schmidt rank 2.
pub(crate) fn raw_kernel<T: Real>(
    g1: &SourceWavefunction<T>,
    g2: &SourceWavefunction<T>,
    g: &AcceptanceFunction<T>,
    grid: &MomentumGrid<T>,
) -> Result<CMatrix<T>> {
    let s1 = g1.sample(grid)?;
    let s2 = g2.sample(grid)?;
    let acc = g.sample(grid)?;
    let n = grid.points();
    let w = Complex::new(grid.weight(), T::zero());
    let k = CMatrix::from_fn(n, n, |i, j| (acc[(i, j)] + acc[(j, i)]) * s1[i] * s2[j] * w);
    if k.iter().all(|c| c.norm_sqr().is_zero()) {
        return Err(Error::ZeroPostSelection);
    }
    Ok(k)
}

/// Post-measurement two-atom momentum kernel, Frobenius-normalized.
///
/// Fails with [`Error::ZeroPostSelection`] when the acceptance is
/// disjoint from the source support.
pub fn build_etpd_kernel<T: Real>(
    g1: &SourceWavefunction<T>,
    g2: &SourceWavefunction<T>,
    g: &AcceptanceFunction<T>,
    grid: &MomentumGrid<T>,
) -> Result<BipartiteAmplitude<T>> {
    BipartiteAmplitude::unnormalized(raw_kernel(g1, g2, g, grid)?).normalize()
}

/// Singular-value ratio of the Gaussian-by-Gaussian kernel
/// `exp(-a(p1^2+p2^2) - 2b p1 p2)` with `a = 1/(4 sigma^2) + 1/(4 delta^2)`
/// and `b = 1/(4 delta^2)`: `mu = b / (a + sqrt(a^2 - b^2))`.
pub fn gaussian_kernel_mu<T: Real>(sigma: T, delta: T) -> Result<T> {
    if sigma <= T::zero() || delta <= T::zero() {
        return Err(Error::invalid("widths must be positive"));
    }
    let quarter = real::<T>(0.25);
    let a = quarter / (sigma * sigma) + quarter / (delta * delta);
    let b = quarter / (delta * delta);
    Ok(b / (a + (a * a - b * b).sqrt()))
}

/// Analytic Schmidt report of the Gaussian source / Gaussian acceptance
/// kernel: singular values form the geometric sequence `s_n ∝ mu^n`, so
/// the Schmidt coefficients are `lambda_n = (1 - mu^2) mu^{2n}` and the
/// entropy has the closed form
/// `S = -log2(1 - nu) - nu/(1 - nu) * log2(nu)` with `nu = mu^2`.
pub fn gaussian_schmidt_oracle<T: Real>(sigma: T, delta: T) -> Result<SchmidtReport<T>> {
    let mu = gaussian_kernel_mu(sigma, delta)?;
    let nu = mu * mu;
    let cutoff = real::<T>(ORACLE_TRUNCATION);
    let mut singular = Vec::new();
    let mut lambda = T::one() - nu;
    loop {
        singular.push(lambda.sqrt());
        lambda *= nu;
        if lambda < cutoff || singular.len() > 4096 {
            break;
        }
    }
    SchmidtReport::from_singular_values(&singular)
}

/// Closed-form entropy of the geometric Schmidt spectrum with
/// coefficient ratio `nu`.
pub fn geometric_spectrum_entropy<T: Real>(nu: T) -> T {
    if nu <= T::zero() {
        return T::zero();
    }
    let ln2 = T::ln_2();
    let one = T::one();
    -(one - nu).ln() / ln2 - (nu / (one - nu)) * (nu.ln() / ln2)
}

/// One row of the width sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<T: Real> {
    pub ratio: T,
    pub entropy_ebits: T,
    pub oracle_entropy_ebits: T,
    pub rel_err: T,
}

/// Entanglement versus `sigma/delta` for Gaussian sources and a Gaussian
/// sum acceptance.
///
/// The entropy depends on the widths only through their ratio, so each
/// row is normalized to `max(sigma, delta) = 1` in grid units; the
/// default grid then resolves the whole `[0.1, 10]` range. Rows whose
/// numerical entropy strays more than 5% from the analytic oracle fail
/// with [`Error::GridUnderResolved`].
pub fn entanglement_vs_width_sweep<T: Real>(
    ratios: &[T],
    grid: &MomentumGrid<T>,
) -> Result<Vec<SweepRow<T>>> {
    if ratios.is_empty() {
        return Err(Error::invalid("sweep needs at least one ratio"));
    }
    if ratios.iter().any(|&r| r <= T::zero()) {
        return Err(Error::invalid("sweep ratios must be positive"));
    }
    if ratios.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep ratios must be sorted strictly ascending"));
    }
    ratios.iter().map(|&r| sweep_row(r, grid)).collect()
}

/// Sweep rows as CSV with columns
/// `ratio,entropy_ebits,oracle_entropy_ebits,rel_err`.
pub fn sweep_to_csv<T: Real>(rows: &[SweepRow<T>]) -> String {
    let mut out = String::from("ratio,entropy_ebits,oracle_entropy_ebits,rel_err\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::json::fmt_float(row.ratio),
            crate::json::fmt_float(row.entropy_ebits),
            crate::json::fmt_float(row.oracle_entropy_ebits),
            crate::json::fmt_float(row.rel_err),
        ));
    }
    out
}

fn sweep_row<T: Real>(ratio: T, grid: &MomentumGrid<T>) -> Result<SweepRow<T>> {
    let one = T::one();
    let (sigma, delta) = if ratio <= one { (ratio, one) } else { (one, one / ratio) };
    let kernel = build_etpd_kernel(
        &SourceWavefunction::gaussian(sigma)?,
        &SourceWavefunction::gaussian(sigma)?,
        &AcceptanceFunction::sum_gaussian(delta)?,
        grid,
    )?;
    let entropy = schmidt(&kernel)?.entropy_ebits();
    let oracle = gaussian_schmidt_oracle(sigma, delta)?.entropy_ebits();
    let scale = oracle.abs().max(real(SWEEP_ENTROPY_FLOOR));
    let rel_err = (entropy - oracle).abs() / scale;
    if rel_err > real(SWEEP_MISMATCH_LIMIT) {
        return Err(Error::GridUnderResolved {
            mismatch: to_f64(rel_err),
            suggested_points: 2 * (grid.points() - 1) + 1,
            suggested_extent: DEFAULT_EXTENT_FACTOR * to_f64(sigma.max(delta)),
        });
    }
    Ok(SweepRow {
        ratio,
        entropy_ebits: entropy,
        oracle_entropy_ebits: oracle,
        rel_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_complex_normal;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn default_grid() -> MomentumGrid<f64> {
        MomentumGrid::default_for_widths(1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_is_symmetric_with_center_node() {
        let grid = MomentumGrid::<f64>::new(5, 2.0).unwrap();
        assert_eq!(grid.nodes(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(grid.weight(), 1.0);
        assert!(MomentumGrid::<f64>::new(4, 2.0).is_err());
        assert!(MomentumGrid::<f64>::new(5, 0.0).is_err());
    }

    #[test]
    fn sources_are_grid_normalized() {
        let grid = default_grid();
        for sigma in [0.2, 1.0, 3.0] {
            let s = SourceWavefunction::gaussian(sigma)
                .unwrap()
                .sample(&grid)
                .unwrap();
            let norm: f64 = s.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.weight();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn oracle_mu_at_equal_widths() {
        // a = 2b there, so mu = 1/(2 + sqrt(3)).
        let mu = gaussian_kernel_mu(1.0, 1.0).unwrap();
        assert_relative_eq!(mu, 1.0 / (2.0 + 3.0f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(mu, 0.268, epsilon = 1e-3);
    }

    #[test]
    fn oracle_closed_form_matches_spectrum_sum() {
        for (sigma, delta) in [(1.0, 1.0), (1.0, 0.2), (0.3, 1.0)] {
            let report = gaussian_schmidt_oracle(sigma, delta).unwrap();
            let mu = gaussian_kernel_mu(sigma, delta).unwrap();
            let closed = geometric_spectrum_entropy(mu * mu);
            assert_relative_eq!(report.entropy_ebits(), closed, epsilon = 1e-9);
            let total: f64 = report.schmidt_coefficients().iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn wide_acceptance_means_no_entanglement() {
        let report = gaussian_schmidt_oracle(1.0, 100.0).unwrap();
        assert!(report.entropy_ebits() < 1e-3);
    }

    #[test]
    fn numeric_kernel_matches_oracle_at_equal_widths() {
        let grid = default_grid();
        let kernel = build_etpd_kernel(
            &SourceWavefunction::gaussian(1.0).unwrap(),
            &SourceWavefunction::gaussian(1.0).unwrap(),
            &AcceptanceFunction::sum_gaussian(1.0).unwrap(),
            &grid,
        )
        .unwrap();
        let numeric = schmidt(&kernel).unwrap().entropy_ebits();
        let oracle = gaussian_schmidt_oracle(1.0, 1.0).unwrap().entropy_ebits();
        assert_relative_eq!(numeric, oracle, max_relative = 1e-2);
    }

    #[test]
    fn separable_acceptance_is_rank_two() {
        let grid = MomentumGrid::<f64>::new(129, 8.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(54);
        let u = CVector::<f64>::from_fn(grid.points(), |_, _| random_complex_normal(&mut rng));
        let v = CVector::<f64>::from_fn(grid.points(), |_, _| random_complex_normal(&mut rng));
        let kernel = build_etpd_kernel(
            &SourceWavefunction::gaussian(1.0).unwrap(),
            &SourceWavefunction::gaussian(0.7).unwrap(),
            &AcceptanceFunction::Separable { u, v },
            &grid,
        )
        .unwrap();
        let report = schmidt(&kernel).unwrap();
        assert!(report.numerical_rank() <= 2);
        assert!(report.entropy_ebits() <= 1.0 + 1e-9);
    }

    #[test]
    fn delta_sum_entropy_grows_with_resolution() {
        let mut last = 0.0;
        for points in [65usize, 129, 257] {
            let grid = MomentumGrid::<f64>::new(points, 8.0).unwrap();
            let kernel = build_etpd_kernel(
                &SourceWavefunction::gaussian(1.0).unwrap(),
                &SourceWavefunction::gaussian(1.0).unwrap(),
                &AcceptanceFunction::DeltaSum,
                &grid,
            )
            .unwrap();
            let entropy = schmidt(&kernel).unwrap().entropy_ebits();
            assert!(entropy > last, "entropy should diverge with resolution");
            last = entropy;
        }
    }

    #[test]
    fn delta_sum_spectrum_is_source_profile() {
        // With g = delta(p1 + p2) the singular values are the
        // anti-diagonal magnitudes |G1(p) G2(-p)|.
        let grid = MomentumGrid::<f64>::new(65, 6.0).unwrap();
        let g1 = SourceWavefunction::gaussian(1.0).unwrap();
        let g2 = SourceWavefunction::gaussian(0.5).unwrap();
        let kernel = build_etpd_kernel(&g1, &g2, &AcceptanceFunction::DeltaSum, &grid).unwrap();
        let report = schmidt(&kernel).unwrap();

        let s1 = g1.sample(&grid).unwrap();
        let s2 = g2.sample(&grid).unwrap();
        let n = grid.points();
        let mut profile: Vec<f64> = (0..n)
            .map(|i| (s1[i] * s2[n - 1 - i]).norm_sqr().sqrt())
            .collect();
        profile.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let scale: f64 = profile.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (got, want) in report.singular_values().iter().zip(&profile) {
            assert_relative_eq!(*got, want / scale, epsilon = 1e-10);
        }
    }

    #[test]
    fn near_monochromatic_sources_are_almost_product() {
        let grid = default_grid();
        let kernel = build_etpd_kernel(
            &SourceWavefunction::gaussian(0.05).unwrap(),
            &SourceWavefunction::gaussian(0.05).unwrap(),
            &AcceptanceFunction::sum_gaussian(1.0).unwrap(),
            &grid,
        )
        .unwrap();
        assert!(schmidt(&kernel).unwrap().entropy_ebits() < 0.05);
    }

    #[test]
    fn disjoint_acceptance_is_zero_post_selection() {
        let grid = MomentumGrid::<f64>::new(33, 4.0).unwrap();
        let zero = AcceptanceFunction::Custom {
            values: CMatrix::<f64>::zeros(33, 33),
        };
        let g = SourceWavefunction::gaussian(1.0).unwrap();
        assert!(matches!(
            build_etpd_kernel(&g, &g, &zero, &grid),
            Err(Error::ZeroPostSelection)
        ));
    }

    #[test]
    fn exchange_of_sources_leaves_entropy_unchanged() {
        let grid = default_grid();
        let a = SourceWavefunction::gaussian(0.6).unwrap();
        let b = SourceWavefunction::gaussian(1.0).unwrap();
        let g = AcceptanceFunction::sum_gaussian(0.8).unwrap();
        let s_ab = schmidt(&build_etpd_kernel(&a, &b, &g, &grid).unwrap())
            .unwrap()
            .entropy_ebits();
        let s_ba = schmidt(&build_etpd_kernel(&b, &a, &g, &grid).unwrap())
            .unwrap()
            .entropy_ebits();
        assert_relative_eq!(s_ab, s_ba, epsilon = 1e-10);
    }

    #[test]
    fn sweep_is_monotone_and_oracle_tight() {
        let grid = default_grid();
        let rows = entanglement_vs_width_sweep(&[0.1, 0.3, 1.0, 3.0, 10.0], &grid).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].entropy_ebits > pair[0].entropy_ebits - 1e-6);
        }
        for row in &rows {
            assert!(row.rel_err < 0.01, "ratio {}: rel {}", row.ratio, row.rel_err);
        }
        assert!(rows.last().unwrap().entropy_ebits > 2.0);
    }

    #[test]
    fn sweep_csv_has_ratio_columns() {
        let grid = default_grid();
        let rows = entanglement_vs_width_sweep(&[0.5, 1.0], &grid).unwrap();
        let csv = sweep_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "ratio,entropy_ebits,oracle_entropy_ebits,rel_err"
        );
        assert_eq!(lines.count(), 2);
        assert!(csv.contains("5.0000000000000000e-1"));
    }

    #[test]
    fn tiny_ratio_has_tiny_entropy() {
        let grid = default_grid();
        let rows = entanglement_vs_width_sweep(&[0.01], &grid).unwrap();
        assert!(rows[0].entropy_ebits < 1e-3);
    }

    #[test]
    fn under_resolved_grid_is_reported() {
        let grid = MomentumGrid::<f64>::new(5, 8.0).unwrap();
        match entanglement_vs_width_sweep(&[1.0], &grid) {
            Err(Error::GridUnderResolved { suggested_points, .. }) => {
                assert!(suggested_points > 5)
            }
            other => panic!("expected GridUnderResolved, got {other:?}"),
        }
    }

    #[test]
    fn sweep_rejects_unsorted_ratios() {
        let grid = default_grid();
        assert!(entanglement_vs_width_sweep(&[1.0, 0.5], &grid).is_err());
        assert!(entanglement_vs_width_sweep(&[-1.0, 0.5], &grid).is_err());
        assert!(entanglement_vs_width_sweep::<f64>(&[], &grid).is_err());
    }

    #[test]
    fn grid_refinement_is_stable() {
        for ratio in [1.0, 5.0] {
            let coarse = entanglement_vs_width_sweep(&[ratio], &default_grid()).unwrap()[0]
                .entropy_ebits;
            let fine_grid = MomentumGrid::<f64>::new(513, 8.0).unwrap();
            let fine = entanglement_vs_width_sweep(&[ratio], &fine_grid).unwrap()[0].entropy_ebits;
            assert!((fine - coarse).abs() / coarse < 0.005);
        }
    }
}
