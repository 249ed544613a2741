//! Optical mode bookkeeping: port bases, elementary linear-optical
//! elements, network composition and the triangular (Reck-style)
//! decomposition of unitaries into beam splitters and phase shifters.
//!
//! Convention fixed here once and used by every test: a beam splitter on
//! ports `(a, b)` with mixing angle `theta` and phase `phi` acts on the
//! 2x2 block as
//!
//! ```text
//! [  cos(theta)            e^{i phi} sin(theta) ]
//! [ -e^{-i phi} sin(theta)        cos(theta)    ]
//! ```

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c_re, cis, max_norm, spectral_norm, unitarity_deviation, CMatrix};
use crate::scalar::{real, to_f64, Real};

/// Unitarity tolerance demanded of `reck_decompose` inputs.
pub const RECK_INPUT_TOL: f64 = 1e-8;
/// Max-norm round-trip error guaranteed by `reck_decompose`.
pub const RECK_ROUNDTRIP_TOL: f64 = 1e-10;
/// Slack on singular values when checking that a network is passive.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// A labelled set of optical ports (modes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortBasis {
    count: usize,
    labels: Option<Vec<String>>,
}

impl PortBasis {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("port basis needs at least one port"));
        }
        Ok(PortBasis { count, labels: None })
    }

    pub fn with_labels(count: usize, labels: Vec<String>) -> Result<Self> {
        let mut basis = Self::new(count)?;
        if labels.len() != count {
            return Err(Error::DimensionMismatch {
                context: "port labels",
                expected: count,
                got: labels.len(),
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::invalid(format!("duplicate port label `{a}`")));
            }
        }
        basis.labels = Some(labels);
        Ok(basis)
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    fn check_port(&self, port: usize) -> Result<()> {
        if port >= self.count {
            return Err(Error::PortOutOfRange {
                port,
                count: self.count,
            });
        }
        Ok(())
    }
}

/// An elementary linear-optical element.
///
/// Serializes to the netlist record format, e.g.
/// `{"kind":"beam_splitter","ports":[0,1],"theta":0.785...,"phi":0.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkElement<T> {
    BeamSplitter { ports: [usize; 2], theta: T, phi: T },
    PhaseShifter { port: usize, phi: T },
    Attenuator { port: usize, t: T },
}

impl<T: Real> NetworkElement<T> {
    pub fn beam_splitter(port_a: usize, port_b: usize, theta: T, phi: T) -> Self {
        NetworkElement::BeamSplitter {
            ports: [port_a, port_b],
            theta,
            phi,
        }
    }

    pub fn phase_shifter(port: usize, phi: T) -> Self {
        NetworkElement::PhaseShifter { port, phi }
    }

    pub fn attenuator(port: usize, t: T) -> Self {
        NetworkElement::Attenuator { port, t }
    }

    /// True for the lossless kinds (beam splitter, phase shifter).
    pub fn is_unitary(&self) -> bool {
        !matches!(self, NetworkElement::Attenuator { .. })
    }
}

/// Full-basis matrix of a single element: identity outside the affected
/// 1x1 or 2x2 block.
pub fn element_matrix<T: Real>(e: &NetworkElement<T>, basis: &PortBasis) -> Result<CMatrix<T>> {
    let n = basis.count();
    let mut m = CMatrix::<T>::identity(n, n);
    match *e {
        NetworkElement::BeamSplitter {
            ports: [a, b],
            theta,
            phi,
        } => {
            basis.check_port(a)?;
            basis.check_port(b)?;
            if a == b {
                return Err(Error::invalid("beam splitter ports must differ"));
            }
            let c = c_re(theta.cos());
            let s = theta.sin();
            m[(a, a)] = c;
            m[(a, b)] = cis(phi) * s;
            m[(b, a)] = -cis(-phi) * s;
            m[(b, b)] = c;
        }
        NetworkElement::PhaseShifter { port, phi } => {
            basis.check_port(port)?;
            m[(port, port)] = cis(phi);
        }
        NetworkElement::Attenuator { port, t } => {
            basis.check_port(port)?;
            if t < T::zero() || t > T::one() {
                return Err(Error::invalid(format!(
                    "attenuator amplitude factor {} outside [0, 1]",
                    to_f64(t)
                )));
            }
            m[(port, port)] = c_re(t);
        }
    }
    Ok(m)
}

/// A passive linear-optical network: a (sub)unitary port-to-port transfer
/// matrix, plus the element list it was built from (empty when the matrix
/// was specified directly).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearNetwork<T: Real> {
    transfer: CMatrix<T>,
    elements: Vec<NetworkElement<T>>,
}

impl<T: Real> LinearNetwork<T> {
    /// Identity network on `n` ports.
    pub fn identity(n: usize) -> Result<Self> {
        PortBasis::new(n)?;
        Ok(LinearNetwork {
            transfer: CMatrix::identity(n, n),
            elements: Vec::new(),
        })
    }

    /// Wraps a directly-specified transfer matrix, enforcing passivity
    /// (all singular values <= 1 within [`PHYSICALITY_TOL`]).
    pub fn from_matrix(transfer: CMatrix<T>) -> Result<Self> {
        if transfer.nrows() != transfer.ncols() || transfer.nrows() == 0 {
            return Err(Error::invalid("transfer matrix must be square and non-empty"));
        }
        let top = spectral_norm(&transfer);
        if top > T::one() + real(PHYSICALITY_TOL) {
            return Err(Error::invalid(format!(
                "transfer matrix is not passive: top singular value {:.3e}",
                to_f64(top)
            )));
        }
        Ok(LinearNetwork {
            transfer,
            elements: Vec::new(),
        })
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.transfer.nrows()
    }

    #[inline]
    pub fn transfer(&self) -> &CMatrix<T> {
        &self.transfer
    }

    pub fn elements(&self) -> &[NetworkElement<T>] {
        &self.elements
    }

    /// `true` when the transfer matrix is unitary within `tol` (max-norm
    /// of `T†T − 1`).
    pub fn is_unitary(&self, tol: T) -> bool {
        unitarity_deviation(&self.transfer) <= tol
    }

    /// Netlist serialization: a JSON array of element records.
    pub fn to_netlist_json(&self) -> String
    where
        T: Serialize,
    {
        netlist_to_json(&self.elements)
    }
}

/// Composes elements in application order (first element acts first).
pub fn compose<T: Real>(
    elements: &[NetworkElement<T>],
    basis: &PortBasis,
) -> Result<LinearNetwork<T>> {
    let n = basis.count();
    let mut transfer = CMatrix::<T>::identity(n, n);
    for e in elements {
        transfer = element_matrix(e, basis)? * transfer;
    }
    Ok(LinearNetwork {
        transfer,
        elements: elements.to_vec(),
    })
}

/// Netlist serialization of an element list.
pub fn netlist_to_json<T: Real + Serialize>(elements: &[NetworkElement<T>]) -> String {
    serde_json::to_string(elements).expect("netlist serializes")
}

/// Parses a netlist JSON array back into elements.
pub fn netlist_from_json<T: Real + serde::de::DeserializeOwned>(
    text: &str,
) -> Result<Vec<NetworkElement<T>>> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad netlist: {e}")))
}

/// Decomposes a unitary into beam splitters plus trailing phase shifters.
///
/// Row-by-row Givens elimination against the pivot row: the returned list
/// contains at most `n(n-1)/2` beam splitters and exactly `n` phase
/// shifters, and `compose(&reck_decompose(u)?, ..)` reproduces `u` within
/// [`RECK_ROUNDTRIP_TOL`] in max-norm.
pub fn reck_decompose<T: Real>(u: &CMatrix<T>) -> Result<Vec<NetworkElement<T>>> {
    let n = u.nrows();
    if n == 0 || u.ncols() != n {
        return Err(Error::invalid("reck_decompose requires a square matrix"));
    }
    let deviation = unitarity_deviation(u);
    if deviation > real(RECK_INPUT_TOL) {
        return Err(Error::NotUnitary {
            deviation: to_f64(deviation),
            tolerance: RECK_INPUT_TOL,
        });
    }

    // Eliminate below-diagonal entries column by column with Givens
    // rotations G(a=j, b=i); the working matrix ends up diagonal because
    // a triangular unitary matrix is diagonal.
    let mut w = u.clone();
    let mut givens: Vec<(usize, usize, T, T)> = Vec::new();
    for j in 0..n {
        for i in (j + 1)..n {
            let pivot = w[(j, j)];
            let target = w[(i, j)];
            let t_mag = target.norm_sqr().sqrt();
            if t_mag.is_zero() {
                continue;
            }
            let p_mag = pivot.norm_sqr().sqrt();
            let theta = t_mag.atan2(p_mag);
            let phi = arg(pivot) - arg(target);
            apply_givens_rows(&mut w, j, i, theta, phi);
            givens.push((j, i, theta, phi));
        }
    }

    let mut elements: Vec<NetworkElement<T>> = Vec::with_capacity(n + givens.len());
    for k in 0..n {
        elements.push(NetworkElement::phase_shifter(k, arg(w[(k, k)])));
    }
    // W = G_m ... G_1 U is diagonal, so U = G_1† ... G_m† D; inverses in
    // reverse order, each realized as a beam splitter with negated angle.
    for &(a, b, theta, phi) in givens.iter().rev() {
        elements.push(NetworkElement::beam_splitter(a, b, -theta, phi));
    }
    Ok(elements)
}

/// Left-multiplies rows (a, b) of `w` by the beam-splitter block.
fn apply_givens_rows<T: Real>(w: &mut CMatrix<T>, a: usize, b: usize, theta: T, phi: T) {
    let c = c_re(theta.cos());
    let s = theta.sin();
    let e_pos = cis(phi) * s;
    let e_neg = cis(-phi) * s;
    for col in 0..w.ncols() {
        let wa = w[(a, col)];
        let wb = w[(b, col)];
        w[(a, col)] = c * wa + e_pos * wb;
        w[(b, col)] = -e_neg * wa + c * wb;
    }
}

fn arg<T: Real>(c: Complex<T>) -> T {
    if c.norm_sqr().is_zero() {
        T::zero()
    } else {
        c.im.atan2(c.re)
    }
}

/// Real Householder completion of the uniform row `(1,..,1)/sqrt(n)` to a
/// unitary; symmetric and involutive, it maps the uniform vector to port 0.
pub fn symmetric_collector_unitary<T: Real>(n: usize) -> Result<CMatrix<T>> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "symmetric collector needs n >= 2, got {n}"
        )));
    }
    let inv_sqrt_n = T::one() / real::<T>(n as f64).sqrt();
    // v = u - e_0 where u is the uniform unit vector.
    let mut v = vec![inv_sqrt_n; n];
    v[0] -= T::one();
    let v_norm_sqr: T = v.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b);
    let two = real::<T>(2.0);
    let mut h = CMatrix::<T>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] -= c_re(two * v[i] * v[j] / v_norm_sqr);
        }
    }
    Ok(h)
}

/// Max-norm distance between a composed element list and a target matrix.
pub fn reconstruction_error<T: Real>(
    elements: &[NetworkElement<T>],
    target: &CMatrix<T>,
) -> Result<T> {
    let basis = PortBasis::new(target.nrows())?;
    let net = compose(elements, &basis)?;
    Ok(max_norm(&(net.transfer() - target)))
}
