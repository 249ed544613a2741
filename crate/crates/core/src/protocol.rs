//! Canned experiment constructions: single-detection, two photons
//! through an arbitrary network, the symmetric N-detector ring, the
//! filter construction that saturates the log2(N) bound, and the
//! continuous two-photon-detector kernel.

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::etpd::{
    gaussian_schmidt_oracle, AcceptanceFunction, MomentumGrid, SourceWavefunction,
};
use crate::linalg::{c_re, haar_unitary, random_complex_normal, CMatrix, CVector};
use crate::optics::{
    compose, reck_decompose, symmetric_collector_unitary, LinearNetwork, NetworkElement, PortBasis,
};
use crate::postselect::{
    apply_network_to_ensemble, coincidence_project, coincidence_project_through,
    single_detection_state, BipartiteAmplitude, PhotonEnsemble,
};
use crate::scalar::{real, to_f64, Real};
use crate::schmidt::{schmidt, SchmidtReport};

/// Smallest and largest supported coincidence size (Ryser cost guard).
pub const MIN_N: usize = 2;
pub const MAX_N: usize = 12;
/// Default motional-space dimension for the single-detection protocol.
pub const DEFAULT_SINGLE_DETECTION_DIM: usize = 8;

/// Which experiment to run.
#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolKind<T: Real> {
    /// One symmetric detector clicks; random motional states and weights.
    SingleDetection { dim: usize },
    /// Two photons, a 2-port network, two detectors. `None` draws a
    /// Haar-random network from the seed.
    TwoPhotonTwoDetector {
        network: Option<Vec<NetworkElement<T>>>,
    },
    /// N photons arriving uniformly at N symmetric detectors.
    SymmetricN { n: usize },
    /// The symmetric configuration with the collector/filter sandwich
    /// tuned to equalize the Schmidt spectrum.
    SaturatingN { n: usize },
    /// Continuous two-photon-detector kernel with Gaussian sources.
    Etpd {
        sigma: T,
        delta: T,
        points: usize,
        extent: Option<T>,
    },
}

/// A fully-specified, reproducible experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec<T: Real> {
    pub kind: ProtocolKind<T>,
    pub seed: u64,
}

impl<T: Real> ProtocolSpec<T> {
    pub fn new(kind: ProtocolKind<T>, seed: u64) -> Result<Self> {
        let spec = ProtocolSpec { kind, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ProtocolKind::SingleDetection { dim } => {
                if *dim < 2 {
                    return Err(Error::invalid("single_detection needs dim >= 2"));
                }
            }
            ProtocolKind::TwoPhotonTwoDetector { .. } => {}
            ProtocolKind::SymmetricN { n } | ProtocolKind::SaturatingN { n } => {
                if *n < MIN_N || *n > MAX_N {
                    return Err(Error::invalid(format!(
                        "n out of range [{MIN_N},{MAX_N}]: got {n}"
                    )));
                }
            }
            ProtocolKind::Etpd {
                sigma,
                delta,
                points,
                extent,
            } => {
                if *sigma <= T::zero() || *delta <= T::zero() {
                    return Err(Error::invalid("etpd widths must be positive"));
                }
                if *points < 3 || points % 2 == 0 {
                    return Err(Error::invalid("etpd grid points must be odd and >= 3"));
                }
                if let Some(e) = extent {
                    if *e <= T::zero() {
                        return Err(Error::invalid("etpd grid extent must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Protocol name as used in reports and CSV rows.
    pub fn name(&self) -> &'static str {
        match self.kind {
            ProtocolKind::SingleDetection { .. } => "single_detection",
            ProtocolKind::TwoPhotonTwoDetector { .. } => "two_photon_two_detector",
            ProtocolKind::SymmetricN { .. } => "symmetric_n",
            ProtocolKind::SaturatingN { .. } => "saturating_n",
            ProtocolKind::Etpd { .. } => "etpd",
        }
    }

    /// Coincidence size, where the protocol has one.
    pub fn n(&self) -> Option<usize> {
        match self.kind {
            ProtocolKind::SingleDetection { .. } => None,
            ProtocolKind::TwoPhotonTwoDetector { .. } => Some(2),
            ProtocolKind::SymmetricN { n } | ProtocolKind::SaturatingN { n } => Some(n),
            ProtocolKind::Etpd { .. } => None,
        }
    }
}

/// N photons with equal amplitude and phase at every detector.
pub fn build_symmetric_ensemble<T: Real>(n: usize) -> Result<PhotonEnsemble<T>> {
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(Error::invalid(format!(
            "n out of range [{MIN_N},{MAX_N}]: got {n}"
        )));
    }
    let amp = T::one() / real::<T>(n as f64).sqrt();
    let m = CMatrix::from_element(n, n, Complex::new(amp, T::zero()));
    PhotonEnsemble::canonical(m)
}

/// Filter sandwich: collect the uniform mode onto port 0, attenuate it by
/// `t`, and rotate back so the detectors stay in the original basis. The
/// collector legs are emitted as their beam-splitter/phase-shifter
/// netlists, so the whole network is made of elementary components.
pub fn saturating_network<T: Real>(n: usize, t: T) -> Result<LinearNetwork<T>> {
    let basis = PortBasis::new(n)?;
    let collector = symmetric_collector_unitary::<T>(n)?;
    // The Householder collector is its own inverse.
    let leg = reck_decompose(&collector)?;
    let mut elements = leg.clone();
    elements.push(NetworkElement::attenuator(0, t));
    elements.extend(leg);
    compose(&elements, &basis)
}

/// Per-photon filter amplitude that equalizes the saturating spectrum:
/// the uniform-mode component of the two-atom amplitude carries both
/// photons, so it scales by `t^2`, and `t = 1/sqrt(n-1)` brings its
/// coefficient from `n-1` down to 1.
pub fn saturating_filter_amplitude<T: Real>(n: usize) -> T {
    if n <= 2 {
        T::one()
    } else {
        T::one() / real::<T>((n - 1) as f64).sqrt()
    }
}

/// The symmetric ensemble plus the tuned filter network; projecting the
/// pair in the source basis yields a maximally entangled state with
/// entropy `log2(n)`.
pub fn build_saturating_protocol<T: Real>(
    n: usize,
) -> Result<(PhotonEnsemble<T>, LinearNetwork<T>)> {
    let ensemble = build_symmetric_ensemble::<T>(n)?;
    let network = saturating_network(n, saturating_filter_amplitude::<T>(n))?;
    Ok((ensemble, network))
}

/// Everything a protocol run produces.
#[derive(Clone, Debug)]
pub struct ProtocolOutcome<T: Real> {
    pub amplitude: BipartiteAmplitude<T>,
    pub report: SchmidtReport<T>,
    /// Squared Frobenius norm of the unnormalized post-selected
    /// amplitude: the relative coincidence weight of the run.
    pub coincidence_weight: T,
    /// Analytic oracle entropy and relative mismatch, for the Gaussian
    /// continuous-detector protocol.
    pub oracle_entropy_ebits: Option<T>,
    pub oracle_rel_err: Option<T>,
}

/// Runs a protocol: builds the configuration, applies networks, projects
/// on the coincidence, normalizes and reports. Deterministic for a fixed
/// spec (including seed).
pub fn run_protocol<T: Real>(spec: &ProtocolSpec<T>) -> Result<ProtocolOutcome<T>> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    match &spec.kind {
        ProtocolKind::SingleDetection { dim } => {
            let psi1 = random_motional_state::<T>(*dim, &mut rng);
            let psi2 = random_motional_state::<T>(*dim, &mut rng);
            let w1 = random_complex_normal::<T, _>(&mut rng);
            let w2 = random_complex_normal::<T, _>(&mut rng);
            let amplitude = single_detection_state(&psi1, &psi2, w1, w2)?;
            let report = schmidt(&amplitude)?;
            // |w1 psi1>|0> + |0>|w2 psi2> overlap only in the (0, 0) cell.
            let cross = w1 * psi1[0] * (w2 * psi2[0]).conj();
            let weight = w1.norm_sqr() + w2.norm_sqr() + real::<T>(2.0) * cross.re;
            Ok(ProtocolOutcome {
                amplitude,
                report,
                coincidence_weight: weight,
                oracle_entropy_ebits: None,
                oracle_rel_err: None,
            })
        }
        ProtocolKind::TwoPhotonTwoDetector { network } => {
            let rows = CMatrix::<T>::from_fn(2, 2, |_, _| random_complex_normal(&mut rng));
            let ensemble = PhotonEnsemble::canonical(normalize_rows(rows))?;
            let net = match network {
                Some(elements) => compose(elements, &PortBasis::new(2)?)?,
                None => LinearNetwork::from_matrix(haar_unitary(2, &mut rng))?,
            };
            let moved = apply_network_to_ensemble(&ensemble, &net)?;
            let projected = coincidence_project(&moved)?;
            finish_coincidence(projected)
        }
        ProtocolKind::SymmetricN { n } => {
            let ensemble = build_symmetric_ensemble::<T>(*n)?;
            finish_coincidence(coincidence_project(&ensemble)?)
        }
        ProtocolKind::SaturatingN { n } => {
            let (ensemble, network) = build_saturating_protocol::<T>(*n)?;
            finish_coincidence(coincidence_project_through(&ensemble, &network)?)
        }
        ProtocolKind::Etpd {
            sigma,
            delta,
            points,
            extent,
        } => {
            let extent = match extent {
                Some(e) => *e,
                None => real::<T>(crate::etpd::DEFAULT_EXTENT_FACTOR) * sigma.max(*delta),
            };
            let grid = MomentumGrid::new(*points, extent)?;
            let g1 = SourceWavefunction::gaussian(*sigma)?;
            let g2 = SourceWavefunction::gaussian(*sigma)?;
            let acc = AcceptanceFunction::sum_gaussian(*delta)?;
            let raw = crate::etpd::raw_kernel(&g1, &g2, &acc, &grid)?;
            let unnormalized = BipartiteAmplitude::unnormalized(raw);
            let weight = unnormalized.weight();
            let amplitude = unnormalized.normalize()?;
            let report = schmidt(&amplitude)?;

            let oracle = gaussian_schmidt_oracle(*sigma, *delta)?.entropy_ebits();
            let scale = oracle.abs().max(real(crate::etpd::SWEEP_ENTROPY_FLOOR));
            let rel_err = (report.entropy_ebits() - oracle).abs() / scale;
            if rel_err > real(crate::etpd::SWEEP_MISMATCH_LIMIT) {
                return Err(Error::GridUnderResolved {
                    mismatch: to_f64(rel_err),
                    suggested_points: 2 * (points - 1) + 1,
                    suggested_extent: crate::etpd::DEFAULT_EXTENT_FACTOR
                        * to_f64(sigma.max(*delta)),
                });
            }
            Ok(ProtocolOutcome {
                amplitude,
                report,
                coincidence_weight: weight,
                oracle_entropy_ebits: Some(oracle),
                oracle_rel_err: Some(rel_err),
            })
        }
    }
}

fn finish_coincidence<T: Real>(projected: BipartiteAmplitude<T>) -> Result<ProtocolOutcome<T>> {
    let weight = projected.weight();
    let amplitude = projected.normalize()?;
    let report = schmidt(&amplitude)?;
    Ok(ProtocolOutcome {
        amplitude,
        report,
        coincidence_weight: weight,
        oracle_entropy_ebits: None,
        oracle_rel_err: None,
    })
}

fn random_motional_state<T: Real>(dim: usize, rng: &mut ChaCha12Rng) -> CVector<T> {
    let v = CVector::<T>::from_fn(dim, |_, _| random_complex_normal(rng));
    let norm = v.norm();
    v.map(|c| c / c_re(norm))
}

fn normalize_rows<T: Real>(mut m: CMatrix<T>) -> CMatrix<T> {
    for k in 0..m.nrows() {
        let norm: T = m
            .row(k)
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if !norm.is_zero() {
            for j in 0..m.ncols() {
                m[(k, j)] /= c_re(norm);
            }
        }
    }
    m
}
