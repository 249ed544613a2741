//! Post-selected coincidence projections.
//!
//! The N-fold coincidence amplitude of N photons behind a linear network
//! is a matrix permanent; restricting the two atomic photons to fixed
//! detectors (or fixed emission ports) leaves a permanent of the
//! remaining (N-2)x(N-2) block. `permanent` evaluates Ryser's
//! inclusion-exclusion formula; the `_bruteforce` variants enumerate
//! permutations directly and exist as independent oracles.

use nalgebra::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::json::complex_matrix_fields;
use crate::linalg::{frobenius_norm, CMatrix, CVector};
use crate::optics::LinearNetwork;
use crate::scalar::{real, Real};

/// Ryser cost guard: 2^20 subsets is the desk-scale ceiling.
pub const PERMANENT_MAX_N: usize = 20;
/// Brute-force enumeration guard (9! = 362_880 permutations).
pub const BRUTEFORCE_MAX_N: usize = 9;
/// Brute-force coincidence projection guard.
pub const PROJECT_BRUTEFORCE_MAX_N: usize = 8;

/// Per-photon amplitudes over optical ports; rows are photons, and the
/// two atomic rows carry the which-atom tags.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonEnsemble<T: Real> {
    amplitudes: CMatrix<T>,
    atomic_rows: (usize, usize),
    epsilon: T,
}

impl<T: Real> PhotonEnsemble<T> {
    /// Default excitation probability carried as metadata.
    pub const DEFAULT_EPSILON: f64 = 0.1;

    pub fn new(amplitudes: CMatrix<T>, atomic_rows: (usize, usize), epsilon: T) -> Result<Self> {
        let n = amplitudes.nrows();
        if n != amplitudes.ncols() {
            return Err(Error::DimensionMismatch {
                context: "coincidence projection needs n_photons == n_ports",
                expected: n,
                got: amplitudes.ncols(),
            });
        }
        if n < 2 {
            return Err(Error::invalid("an ensemble needs at least two photons"));
        }
        let (r1, r2) = atomic_rows;
        if r1 == r2 || r1 >= n || r2 >= n {
            return Err(Error::invalid(format!(
                "atomic rows ({r1}, {r2}) must be distinct rows of a {n}-photon ensemble"
            )));
        }
        for k in 0..n {
            if amplitudes.row(k).iter().all(|c| c.norm_sqr().is_zero()) {
                return Err(Error::invalid(format!("photon row {k} has zero norm")));
            }
        }
        if epsilon <= T::zero() || epsilon >= T::one() {
            return Err(Error::invalid("epsilon must lie in (0, 1)"));
        }
        Ok(PhotonEnsemble {
            amplitudes,
            atomic_rows,
            epsilon,
        })
    }

    /// Ensemble with the canonical atomic rows (0, 1) and default epsilon.
    pub fn canonical(amplitudes: CMatrix<T>) -> Result<Self> {
        Self::new(amplitudes, (0, 1), real(Self::DEFAULT_EPSILON))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.amplitudes.nrows()
    }

    #[inline]
    pub fn amplitudes(&self) -> &CMatrix<T> {
        &self.amplitudes
    }

    #[inline]
    pub fn atomic_rows(&self) -> (usize, usize) {
        self.atomic_rows
    }

    #[inline]
    pub fn epsilon(&self) -> T {
        self.epsilon
    }
}

/// The atoms' joint amplitude matrix after post-selection.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteAmplitude<T: Real> {
    matrix: CMatrix<T>,
    normalized: bool,
}

impl<T: Real> BipartiteAmplitude<T> {
    pub fn unnormalized(matrix: CMatrix<T>) -> Self {
        BipartiteAmplitude {
            matrix,
            normalized: false,
        }
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Squared Frobenius norm; for an unnormalized coincidence projection
    /// this is the relative coincidence weight of the post-selection.
    pub fn weight(&self) -> T {
        let f = frobenius_norm(&self.matrix);
        f * f
    }

    /// Frobenius-normalized copy.
    pub fn normalize(&self) -> Result<Self> {
        let norm = frobenius_norm(&self.matrix);
        if norm.is_zero() {
            return Err(Error::ZeroMatrix);
        }
        Ok(BipartiteAmplitude {
            matrix: self.matrix.map(|c| c / Complex::new(norm, T::zero())),
            normalized: true,
        })
    }

    /// `{"n":..,"normalized":..,"re":[[..]],"im":[[..]]}`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"n\":{},\"normalized\":{},{}}}",
            self.nrows(),
            self.normalized,
            complex_matrix_fields(&self.matrix)
        )
    }
}

/// Permanent by Ryser's inclusion-exclusion formula with Gray-code
/// subset updates, O(2^n * n). The permanent of the empty matrix is 1.
pub fn permanent<T: Real>(m: &CMatrix<T>) -> Result<Complex<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid("permanent requires a square matrix"));
    }
    if n > PERMANENT_MAX_N {
        return Err(Error::PermanentSizeGuard {
            n,
            limit: PERMANENT_MAX_N,
        });
    }
    if n == 0 {
        return Ok(Complex::one());
    }

    let mut row_sums = vec![Complex::<T>::zero(); n];
    let mut total = Complex::<T>::zero();
    let mut prev_gray: usize = 0;
    let mut parity_even = true; // parity of |S| (empty set so far)
    for s in 1usize..(1usize << n) {
        let gray = s ^ (s >> 1);
        let changed = gray ^ prev_gray;
        let j = changed.trailing_zeros() as usize;
        if gray & changed != 0 {
            for (k, sum) in row_sums.iter_mut().enumerate() {
                *sum += m[(k, j)];
            }
        } else {
            for (k, sum) in row_sums.iter_mut().enumerate() {
                *sum -= m[(k, j)];
            }
        }
        parity_even = !parity_even;
        prev_gray = gray;

        let mut prod = Complex::<T>::one();
        for sum in &row_sums {
            prod *= *sum;
        }
        // sign = (-1)^(n - |S|)
        let negate = if n.is_multiple_of(2) { !parity_even } else { parity_even };
        if negate {
            total -= prod;
        } else {
            total += prod;
        }
    }
    Ok(total)
}

/// Permanent by direct permutation enumeration; reference oracle.
pub fn permanent_bruteforce<T: Real>(m: &CMatrix<T>) -> Result<Complex<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid("permanent requires a square matrix"));
    }
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::PermanentSizeGuard {
            n,
            limit: BRUTEFORCE_MAX_N,
        });
    }
    let mut total = Complex::<T>::zero();
    let mut perm: Vec<usize> = (0..n).collect();
    for_each_permutation(&mut perm, 0, &mut |p| {
        let mut prod = Complex::<T>::one();
        for (k, &col) in p.iter().enumerate() {
            prod *= m[(k, col)];
        }
        total += prod;
    });
    Ok(total)
}

/// Visits every permutation of `items[at..]` in place.
fn for_each_permutation<F: FnMut(&[usize])>(items: &mut Vec<usize>, at: usize, visit: &mut F) {
    if at == items.len() {
        visit(items);
        return;
    }
    for k in at..items.len() {
        items.swap(at, k);
        for_each_permutation(items, at + 1, visit);
        items.swap(at, k);
    }
}

/// Detector-label coincidence projection: `C[i][j]` is the coincidence
/// amplitude restricted to "atom-1 photon at detector i, atom-2 photon at
/// detector j", i.e. the permutation sum with `sigma(r1) = i`,
/// `sigma(r2) = j`. The diagonal vanishes (a coincidence never sends two
/// photons to one detector). Result is unnormalized.
pub fn coincidence_project<T: Real>(ens: &PhotonEnsemble<T>) -> Result<BipartiteAmplitude<T>> {
    let n = ens.n();
    let m = ens.amplitudes();
    let (r1, r2) = ens.atomic_rows();
    let other_rows: Vec<usize> = (0..n).filter(|&k| k != r1 && k != r2).collect();

    let mut c = CMatrix::<T>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let factor = m[(r1, i)] * m[(r2, j)];
            if factor.norm_sqr().is_zero() {
                continue;
            }
            let minor = minor_matrix(m, &other_rows, i, j);
            c[(i, j)] = factor * permanent(&minor)?;
        }
    }
    nonzero_projection(c)
}

/// Oracle for [`coincidence_project`]: explicit sum over permutations.
pub fn coincidence_project_bruteforce<T: Real>(
    ens: &PhotonEnsemble<T>,
) -> Result<BipartiteAmplitude<T>> {
    let n = ens.n();
    if n > PROJECT_BRUTEFORCE_MAX_N {
        return Err(Error::PermanentSizeGuard {
            n,
            limit: PROJECT_BRUTEFORCE_MAX_N,
        });
    }
    let m = ens.amplitudes();
    let (r1, r2) = ens.atomic_rows();
    let mut c = CMatrix::<T>::zeros(n, n);
    let mut perm: Vec<usize> = (0..n).collect();
    for_each_permutation(&mut perm, 0, &mut |p| {
        let mut prod = Complex::<T>::one();
        for (k, &col) in p.iter().enumerate() {
            prod *= m[(k, col)];
        }
        c[(p[r1], p[r2])] += prod;
    });
    nonzero_projection(c)
}

/// Source-basis coincidence projection through a network.
///
/// The atomic recoil labels are the emission ports, which downstream
/// optics cannot relabel: `C[d1][d2]` is the N-fold coincidence amplitude
/// with atom 1 resolved onto emission port `d1` and atom 2 onto `d2`,
///
/// ```text
/// C[d1][d2] = M[r1][d1] * M[r2][d2] * perm([T e_d1; T e_d2; T m_k ...])
/// ```
///
/// With the identity network this reduces exactly to
/// [`coincidence_project`]. Unlike the detector-label projection the
/// diagonal need not vanish.
pub fn coincidence_project_through<T: Real>(
    ens: &PhotonEnsemble<T>,
    net: &LinearNetwork<T>,
) -> Result<BipartiteAmplitude<T>> {
    let n = ens.n();
    if net.count() != n {
        return Err(Error::DimensionMismatch {
            context: "network ports vs ensemble ports",
            expected: n,
            got: net.count(),
        });
    }
    let m = ens.amplitudes();
    let t = net.transfer();
    let (r1, r2) = ens.atomic_rows();

    // Rows of the coincidence matrix for the non-atomic photons are fixed:
    // the transformed amplitude vectors T m_k.
    let mut base = CMatrix::<T>::zeros(n, n);
    for k in 0..n {
        if k == r1 || k == r2 {
            continue;
        }
        for i in 0..n {
            let mut acc = Complex::<T>::zero();
            for d in 0..n {
                acc += t[(i, d)] * m[(k, d)];
            }
            base[(k, i)] = acc;
        }
    }

    let mut c = CMatrix::<T>::zeros(n, n);
    for d1 in 0..n {
        for d2 in 0..n {
            let factor = m[(r1, d1)] * m[(r2, d2)];
            if factor.norm_sqr().is_zero() {
                continue;
            }
            let mut coincidence = base.clone();
            for i in 0..n {
                coincidence[(r1, i)] = t[(i, d1)];
                coincidence[(r2, i)] = t[(i, d2)];
            }
            c[(d1, d2)] = factor * permanent(&coincidence)?;
        }
    }
    nonzero_projection(c)
}

/// Oracle for [`coincidence_project_through`]: explicit permutation sum.
pub fn coincidence_project_through_bruteforce<T: Real>(
    ens: &PhotonEnsemble<T>,
    net: &LinearNetwork<T>,
) -> Result<BipartiteAmplitude<T>> {
    let n = ens.n();
    if n > PROJECT_BRUTEFORCE_MAX_N {
        return Err(Error::PermanentSizeGuard {
            n,
            limit: PROJECT_BRUTEFORCE_MAX_N,
        });
    }
    if net.count() != n {
        return Err(Error::DimensionMismatch {
            context: "network ports vs ensemble ports",
            expected: n,
            got: net.count(),
        });
    }
    let m = ens.amplitudes();
    let t = net.transfer();
    let (r1, r2) = ens.atomic_rows();
    let ancilla: Vec<usize> = (0..n).filter(|&k| k != r1 && k != r2).collect();

    let mut c = CMatrix::<T>::zeros(n, n);
    for d1 in 0..n {
        for d2 in 0..n {
            let factor = m[(r1, d1)] * m[(r2, d2)];
            if factor.norm_sqr().is_zero() {
                continue;
            }
            let mut acc = Complex::<T>::zero();
            let mut perm: Vec<usize> = (0..n).collect();
            for_each_permutation(&mut perm, 0, &mut |p| {
                let mut prod = t[(p[r1], d1)] * t[(p[r2], d2)];
                for &k in &ancilla {
                    let mut row = Complex::<T>::zero();
                    for d in 0..n {
                        row += t[(p[k], d)] * m[(k, d)];
                    }
                    prod *= row;
                }
                acc += prod;
            });
            c[(d1, d2)] = factor * acc;
        }
    }
    nonzero_projection(c)
}

fn nonzero_projection<T: Real>(c: CMatrix<T>) -> Result<BipartiteAmplitude<T>> {
    if c.iter().all(|x| x.norm_sqr().is_zero()) {
        return Err(Error::ZeroPostSelection);
    }
    Ok(BipartiteAmplitude::unnormalized(c))
}

fn minor_matrix<T: Real>(
    m: &CMatrix<T>,
    rows: &[usize],
    skip_col_a: usize,
    skip_col_b: usize,
) -> CMatrix<T> {
    let k = rows.len();
    let cols: Vec<usize> = (0..m.ncols())
        .filter(|&c| c != skip_col_a && c != skip_col_b)
        .collect();
    CMatrix::from_fn(k, k, |a, b| m[(rows[a], cols[b])])
}

/// Transforms every photon row by the network: detectors read output
/// ports, so `amplitudes' = amplitudes * transfer^T`.
pub fn apply_network_to_ensemble<T: Real>(
    ens: &PhotonEnsemble<T>,
    net: &LinearNetwork<T>,
) -> Result<PhotonEnsemble<T>> {
    if net.count() != ens.n() {
        return Err(Error::DimensionMismatch {
            context: "network ports vs ensemble ports",
            expected: ens.n(),
            got: net.count(),
        });
    }
    let transformed = ens.amplitudes() * net.transfer().transpose();
    if (0..transformed.nrows())
        .any(|k| transformed.row(k).iter().all(|c| c.norm_sqr().is_zero()))
    {
        // A photon fully absorbed by an attenuator can never fire a
        // detector, so the N-fold coincidence has zero amplitude.
        return Err(Error::ZeroPostSelection);
    }
    PhotonEnsemble::new(transformed, ens.atomic_rows(), ens.epsilon())
}

/// Post-measurement amplitude after one symmetric single-photon
/// detection: `w1 |psi1>|0> + w2 |0>|psi2>`, normalized. Basis index 0 is
/// the motional ground state.
pub fn single_detection_state<T: Real>(
    psi1: &CVector<T>,
    psi2: &CVector<T>,
    w1: Complex<T>,
    w2: Complex<T>,
) -> Result<BipartiteAmplitude<T>> {
    let d = psi1.len();
    if psi2.len() != d {
        return Err(Error::DimensionMismatch {
            context: "motional state dimensions",
            expected: d,
            got: psi2.len(),
        });
    }
    if d < 2 {
        return Err(Error::invalid("motional space needs dimension >= 2"));
    }
    let mut a = CMatrix::<T>::zeros(d, d);
    for i in 0..d {
        a[(i, 0)] += w1 * psi1[i];
        a[(0, i)] += w2 * psi2[i];
    }
    BipartiteAmplitude::unnormalized(a).normalize()
}
