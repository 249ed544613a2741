//! Schmidt decomposition of bipartite amplitudes and entanglement
//! entropy in ebits (log base 2).

use crate::error::{Error, Result};
use crate::json::{fmt_float, fmt_float_array};
use crate::linalg::{c_re, svd_sorted, CMatrix};
use crate::postselect::BipartiteAmplitude;
use crate::scalar::{real, Real};

/// Schmidt coefficients below this cutoff do not count toward the
/// numerical rank.
pub const RANK_CUTOFF: f64 = 1e-10;
/// Slack on entropy bound comparisons.
pub const BOUND_TOL: f64 = 1e-9;

/// Singular values, Schmidt coefficients, entropy and numerical rank of a
/// bipartite amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtReport<T: Real> {
    singular_values: Vec<T>,
    schmidt_coefficients: Vec<T>,
    entropy_ebits: T,
    numerical_rank: usize,
}

impl<T: Real> SchmidtReport<T> {
    /// Builds a report from raw singular values (any scale, any order).
    pub fn from_singular_values(raw: &[T]) -> Result<Self> {
        let total: T = raw.iter().map(|&s| s * s).fold(T::zero(), |a, b| a + b);
        if total.is_zero() {
            return Err(Error::ZeroMatrix);
        }
        let mut singular_values: Vec<T> = raw.to_vec();
        singular_values.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
        let norm = total.sqrt();
        for s in &mut singular_values {
            *s /= norm;
        }
        let schmidt_coefficients: Vec<T> = singular_values.iter().map(|&s| s * s).collect();
        let entropy_ebits = entropy_from_coefficients(&schmidt_coefficients);
        let cutoff = real(RANK_CUTOFF);
        let numerical_rank = schmidt_coefficients.iter().filter(|&&l| l > cutoff).count();
        Ok(SchmidtReport {
            singular_values,
            schmidt_coefficients,
            entropy_ebits,
            numerical_rank,
        })
    }

    /// Singular values of the normalized amplitude, descending.
    pub fn singular_values(&self) -> &[T] {
        &self.singular_values
    }

    /// Schmidt coefficients `lambda_k = s_k^2` (they sum to one).
    pub fn schmidt_coefficients(&self) -> &[T] {
        &self.schmidt_coefficients
    }

    #[inline]
    pub fn entropy_ebits(&self) -> T {
        self.entropy_ebits
    }

    #[inline]
    pub fn numerical_rank(&self) -> usize {
        self.numerical_rank
    }

    /// `{"singular_values":[...],"lambda":[...],"entropy_ebits":x,"rank":r}`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"singular_values\":{},\"lambda\":{},\"entropy_ebits\":{},\"rank\":{}}}",
            fmt_float_array(&self.singular_values),
            fmt_float_array(&self.schmidt_coefficients),
            fmt_float(self.entropy_ebits),
            self.numerical_rank
        )
    }
}

/// `-sum lambda log2 lambda`, with `0 log 0 := 0`.
pub fn entropy_from_coefficients<T: Real>(lambda: &[T]) -> T {
    let ln2 = T::ln_2();
    lambda
        .iter()
        .filter(|&&l| l > T::zero())
        .map(|&l| -l * (l.ln() / ln2))
        .fold(T::zero(), |a, b| a + b)
}

/// Schmidt decomposition of a bipartite amplitude; the matrix is
/// Frobenius-normalized before the SVD, so the coefficients always sum
/// to one.
pub fn schmidt<T: Real>(c: &BipartiteAmplitude<T>) -> Result<SchmidtReport<T>> {
    let normalized = if c.is_normalized() { c.clone() } else { c.normalize()? };
    let singular = crate::linalg::singular_values_sorted(normalized.matrix());
    SchmidtReport::from_singular_values(&singular)
}

/// Outcome of checking an entropy upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T: Real> {
    pub satisfied: bool,
    pub entropy_ebits: T,
    pub bound_ebits: T,
    /// `bound - entropy`; negative when the bound is violated.
    pub margin: T,
}

/// True iff the amplitude's entropy is at most `bound_ebits` within
/// [`BOUND_TOL`].
pub fn entropy_upper_bound_check<T: Real>(
    c: &BipartiteAmplitude<T>,
    bound_ebits: T,
) -> Result<BoundReport<T>> {
    let entropy = schmidt(c)?.entropy_ebits();
    Ok(BoundReport {
        satisfied: entropy <= bound_ebits + real(BOUND_TOL),
        entropy_ebits: entropy,
        bound_ebits,
        margin: bound_ebits - entropy,
    })
}

/// The singular-value-equalizing local filter of a full-rank amplitude.
#[derive(Clone, Debug)]
pub struct LocalFilter<T: Real> {
    /// Left Schmidt basis the gains act in.
    pub schmidt_basis: CMatrix<T>,
    /// Diagonal gains `s_min / s_k` applied in that basis.
    pub gains: Vec<T>,
    /// Filtered, renormalized amplitude.
    pub filtered: BipartiteAmplitude<T>,
    /// Schmidt report of the filtered amplitude (flat spectrum).
    pub report: SchmidtReport<T>,
    /// `min(lambda)/max(lambda)` of the input; a rough relative
    /// success-probability diagnostic for the filtering, not a physical
    /// probability model.
    pub success_penalty: T,
}

/// Equalizes the Schmidt spectrum of a full-rank square amplitude by a
/// local operation on the first subsystem: divide out the singular
/// values in the Schmidt basis. The filtered state is maximally
/// entangled with entropy `log2(rank)`.
pub fn max_entangle_local_filter<T: Real>(
    c: &BipartiteAmplitude<T>,
) -> Result<LocalFilter<T>> {
    let n = c.nrows();
    if c.matrix().ncols() != n {
        return Err(Error::invalid("local filter needs a square amplitude"));
    }
    let normalized = if c.is_normalized() { c.clone() } else { c.normalize()? };
    let svd = svd_sorted(normalized.matrix())?;
    let s = &svd.singular_values;
    let report_in = SchmidtReport::from_singular_values(s)?;
    if report_in.numerical_rank() < n {
        return Err(Error::RankDeficient {
            rank: report_in.numerical_rank(),
            dim: n,
        });
    }
    let s_min = s[s.len() - 1];
    let gains: Vec<T> = s.iter().map(|&sk| s_min / sk).collect();

    // F = U diag(gains) U†
    let mut diag = CMatrix::<T>::zeros(n, n);
    for k in 0..n {
        diag[(k, k)] = c_re(gains[k]);
    }
    let filter = &svd.u * diag * svd.u.adjoint();
    let filtered = BipartiteAmplitude::unnormalized(&filter * normalized.matrix()).normalize()?;
    let report = schmidt(&filtered)?;

    let lambda = report_in.schmidt_coefficients();
    let success_penalty = lambda[lambda.len() - 1] / lambda[0];
    Ok(LocalFilter {
        schmidt_basis: svd.u,
        gains,
        filtered,
        report,
        success_penalty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, random_complex_normal};
    use approx::assert_relative_eq;
    use nalgebra::Complex;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn amplitude(m: CMatrix<f64>) -> BipartiteAmplitude<f64> {
        BipartiteAmplitude::unnormalized(m)
    }

    #[test]
    fn bell_state_has_one_ebit() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        m[(1, 0)] = Complex::new(1.0, 0.0);
        let report = schmidt(&amplitude(m)).unwrap();
        assert_relative_eq!(report.entropy_ebits(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(report.schmidt_coefficients()[0], 0.5, epsilon = 1e-14);
        assert_eq!(report.numerical_rank(), 2);
    }

    #[test]
    fn symmetric_three_detector_spectrum() {
        // C ∝ 1 - delta_ij has singular values {2, 1, 1}, so
        // lambda = {2/3, 1/6, 1/6} and S = 1.2516...
        let mut m = CMatrix::<f64>::from_element(3, 3, Complex::new(1.0, 0.0));
        for k in 0..3 {
            m[(k, k)] = Complex::zero();
        }
        let report = schmidt(&amplitude(m)).unwrap();
        let lambda = report.schmidt_coefficients();
        assert_relative_eq!(lambda[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(lambda[1], 1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(lambda[2], 1.0 / 6.0, epsilon = 1e-12);
        let expected = entropy_from_coefficients(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert_relative_eq!(report.entropy_ebits(), expected, epsilon = 1e-12);
        assert_relative_eq!(report.entropy_ebits(), 1.2516, epsilon = 1e-3);
    }

    #[test]
    fn identity_amplitude_is_maximally_entangled() {
        for n in [2usize, 3, 4, 7] {
            let report = schmidt(&amplitude(CMatrix::<f64>::identity(n, n))).unwrap();
            assert_relative_eq!(report.entropy_ebits(), (n as f64).log2(), epsilon = 1e-12);
            assert_eq!(report.numerical_rank(), n);
        }
    }

    #[test]
    fn zero_matrix_is_rejected() {
        assert!(matches!(
            schmidt(&amplitude(CMatrix::<f64>::zeros(2, 2))),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn coefficients_sum_to_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for n in 2..=6 {
            let m = CMatrix::<f64>::from_fn(n, n, |_, _| random_complex_normal(&mut rng));
            let report = schmidt(&amplitude(m)).unwrap();
            let total: f64 = report.schmidt_coefficients().iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
            assert!(report.entropy_ebits() >= 0.0);
            assert!(report.entropy_ebits() <= (n as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn entropy_is_invariant_under_local_unitaries() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..10 {
            let m = CMatrix::<f64>::from_fn(4, 4, |_, _| random_complex_normal(&mut rng));
            let u = haar_unitary::<f64, _>(4, &mut rng);
            let v = haar_unitary::<f64, _>(4, &mut rng);
            let s0 = schmidt(&amplitude(m.clone())).unwrap().entropy_ebits();
            let s1 = schmidt(&amplitude(&u * m * &v)).unwrap().entropy_ebits();
            assert_relative_eq!(s0, s1, epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_two_entropy_is_at_most_one_ebit() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..50 {
            let a = crate::linalg::CVector::<f64>::from_fn(6, |_, _| random_complex_normal(&mut rng));
            let b = crate::linalg::CVector::<f64>::from_fn(6, |_, _| random_complex_normal(&mut rng));
            let c = crate::linalg::CVector::<f64>::from_fn(6, |_, _| random_complex_normal(&mut rng));
            let d = crate::linalg::CVector::<f64>::from_fn(6, |_, _| random_complex_normal(&mut rng));
            let m = &a * b.transpose() + &c * d.transpose();
            let report = schmidt(&amplitude(m)).unwrap();
            assert!(report.entropy_ebits() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn separable_outer_product_has_zero_entropy() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let a = crate::linalg::CVector::<f64>::from_fn(5, |_, _| random_complex_normal(&mut rng));
        let b = crate::linalg::CVector::<f64>::from_fn(5, |_, _| random_complex_normal(&mut rng));
        let report = schmidt(&amplitude(&a * b.transpose())).unwrap();
        assert!(report.entropy_ebits() < 1e-9);
        assert_eq!(report.numerical_rank(), 1);
    }

    #[test]
    fn bound_check_reports_margin() {
        let mut m = CMatrix::<f64>::from_element(3, 3, Complex::new(1.0, 0.0));
        for k in 0..3 {
            m[(k, k)] = Complex::zero();
        }
        let c = amplitude(m);
        let b = entropy_upper_bound_check(&c, 3.0f64.log2()).unwrap();
        assert!(b.satisfied);
        assert_relative_eq!(b.margin, 3.0f64.log2() - b.entropy_ebits, epsilon = 1e-14);
        assert_relative_eq!(b.margin, 0.333, epsilon = 1e-3);

        let bell = {
            let mut m = CMatrix::<f64>::zeros(2, 2);
            m[(0, 1)] = Complex::new(1.0, 0.0);
            m[(1, 0)] = Complex::new(1.0, 0.0);
            amplitude(m)
        };
        let b = entropy_upper_bound_check(&bell, 1.0).unwrap();
        assert!(b.satisfied);
        assert!(b.margin.abs() < 1e-12);

        let four = amplitude(CMatrix::<f64>::identity(4, 4));
        let b = entropy_upper_bound_check(&four, 1.0).unwrap();
        assert!(!b.satisfied);
        assert!(b.margin < 0.0);
    }

    #[test]
    fn filter_on_maximally_entangled_is_identity_gains() {
        let c = amplitude(CMatrix::<f64>::identity(2, 2));
        let f = max_entangle_local_filter(&c).unwrap();
        assert!(f.gains.iter().all(|&g| (g - 1.0).abs() < 1e-12));
        assert_relative_eq!(f.report.entropy_ebits(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(f.success_penalty, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn filter_equalizes_symmetric_three_detector_state() {
        let mut m = CMatrix::<f64>::from_element(3, 3, Complex::new(1.0, 0.0));
        for k in 0..3 {
            m[(k, k)] = Complex::zero();
        }
        let f = max_entangle_local_filter(&amplitude(m)).unwrap();
        assert_relative_eq!(f.report.entropy_ebits(), 3.0f64.log2(), epsilon = 1e-9);
    }

    #[test]
    fn filter_equalizes_diagonal_rank_two() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 0)] = Complex::new(0.9, 0.0);
        m[(1, 1)] = Complex::new(0.1, 0.0);
        let f = max_entangle_local_filter(&amplitude(m)).unwrap();
        assert_relative_eq!(f.report.entropy_ebits(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn filter_rejects_rank_deficient_states() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        match max_entangle_local_filter(&amplitude(m)) {
            Err(Error::RankDeficient { rank: 1, dim: 2 }) => {}
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn report_json_shape() {
        let report = schmidt(&amplitude(CMatrix::<f64>::identity(2, 2))).unwrap();
        let text = report.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["rank"], 2);
        assert!(value["singular_values"].as_array().unwrap().len() == 2);
        assert!(value["lambda"].as_array().unwrap().len() == 2);
    }
}
