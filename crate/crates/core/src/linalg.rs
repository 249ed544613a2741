//! Dense complex matrix helpers: norms, unitarity checks, Haar-random
//! unitaries and a sorted SVD wrapper.

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Dense complex matrix over the working scalar.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex column vector over the working scalar.
pub type CVector<T> = DVector<Complex<T>>;

/// Unit complex number `e^{i phi}`.
#[inline]
pub fn cis<T: Real>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}

#[inline]
pub fn c_re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Max-norm (largest entry modulus).
pub fn max_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .map(|c| c.norm_sqr().sqrt())
        .fold(T::zero(), |a, b| a.max(b))
}

/// Frobenius norm.
pub fn frobenius_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .map(|c| c.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// Max-norm of `M†M − 1`; zero for exactly unitary matrices.
pub fn unitarity_deviation<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let gram = m.adjoint() * m;
    let mut dev = T::zero();
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { Complex::one() } else { Complex::zero() };
            dev = dev.max((gram[(i, j)] - expect).norm_sqr().sqrt());
        }
    }
    dev
}

/// Largest singular value (spectral norm).
pub fn spectral_norm<T: Real>(m: &CMatrix<T>) -> T {
    singular_values_sorted(m)
        .first()
        .copied()
        .unwrap_or_else(T::zero)
}

/// Singular values in descending order.
pub fn singular_values_sorted<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let sv = m.clone().singular_values();
    let mut s: Vec<T> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    s
}

/// Full SVD with singular values sorted descending and the factors
/// permuted to match.
pub struct SortedSvd<T: Real> {
    pub u: CMatrix<T>,
    pub singular_values: Vec<T>,
    pub v_t: CMatrix<T>,
}

pub fn svd_sorted<T: Real>(m: &CMatrix<T>) -> Result<SortedSvd<T>> {
    let svd = m
        .clone()
        .try_svd(true, true, T::default_epsilon(), 0)
        .ok_or_else(|| Error::invalid("SVD did not converge"))?;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let s: Vec<T> = svd.singular_values.iter().copied().collect();

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).expect("finite singular values"));

    let singular_values: Vec<T> = order.iter().map(|&k| s[k]).collect();
    let u_cols: Vec<_> = order.iter().map(|&k| u.column(k).into_owned()).collect();
    let v_rows: Vec<_> = order.iter().map(|&k| v_t.row(k).into_owned()).collect();
    Ok(SortedSvd {
        u: CMatrix::from_columns(&u_cols),
        singular_values,
        v_t: CMatrix::from_rows(&v_rows),
    })
}

/// Haar-distributed random unitary: complex Ginibre matrix, QR, then the
/// R-diagonal phase fix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    assert!(n >= 1, "haar_unitary needs n >= 1");
    let g = CMatrix::<T>::from_fn(n, n, |_, _| random_complex_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let mag = d.norm_sqr().sqrt();
        let phase = if mag > T::zero() { d / c_re(mag) } else { Complex::one() };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Standard complex Gaussian entry (both quadratures N(0,1)).
pub fn random_complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(real(re), real(im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [1, 2, 5, 8] {
            let u = haar_unitary::<f64, _>(n, &mut rng);
            assert!(unitarity_deviation(&u) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn sorted_svd_reconstructs() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let m = CMatrix::<f64>::from_fn(4, 4, |_, _| random_complex_normal(&mut rng));
        let svd = svd_sorted(&m).unwrap();
        assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let sigma = CMatrix::<f64>::from_fn(4, 4, |i, j| {
            if i == j {
                c_re(svd.singular_values[i])
            } else {
                Complex::zero()
            }
        });
        let back = &svd.u * sigma * &svd.v_t;
        assert!(max_norm(&(&back - &m)) < 1e-12);
    }

    #[test]
    fn spectral_norm_of_identity() {
        let id = CMatrix::<f64>::identity(3, 3);
        assert!((spectral_norm(&id) - 1.0).abs() < 1e-14);
    }
}
