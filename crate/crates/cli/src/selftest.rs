//! Built-in oracle suites: every fast path checked against its
//! independent reference, printed one PASS/FAIL line per suite.

use std::time::Instant;

use ebitsim_core::linalg::{frobenius_norm, haar_unitary, max_norm, random_complex_normal, CMatrix};
use ebitsim_core::optics::{compose, reck_decompose, symmetric_collector_unitary, PortBasis};
use ebitsim_core::postselect::{
    coincidence_project, coincidence_project_bruteforce, coincidence_project_through,
    coincidence_project_through_bruteforce, permanent, permanent_bruteforce, PhotonEnsemble,
};
use ebitsim_core::protocol::{run_protocol, saturating_network, ProtocolKind, ProtocolSpec};
use ebitsim_core::schmidt::schmidt;
use ebitsim_core::{etpd, optics, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

type Suite = (&'static str, fn() -> Result<String, String>);

const SUITES: &[Suite] = &[
    ("permanent_ryser_vs_bruteforce", permanent_suite),
    ("coincidence_fast_vs_bruteforce", coincidence_suite),
    ("projection_through_consistency", through_suite),
    ("reck_round_trip", reck_suite),
    ("collector_unitarity", collector_suite),
    ("symmetric_three_photon", symmetric_suite),
    ("saturating_log2n", saturating_suite),
    ("filter_strength_negative", filter_suite),
    ("gaussian_oracle_vs_svd", gaussian_suite),
    ("two_photon_bound", two_photon_suite),
    ("single_detection_bound", single_detection_suite),
];

/// Runs every suite; returns false if any failed.
pub fn run_all() -> bool {
    let mut all_ok = true;
    for (name, suite) in SUITES {
        let start = Instant::now();
        match suite() {
            Ok(detail) => println!(
                "selftest {name}: PASS ({detail}; {:.2} s)",
                start.elapsed().as_secs_f64()
            ),
            Err(reason) => {
                all_ok = false;
                println!("selftest {name}: FAIL ({reason})");
            }
        }
    }
    all_ok
}

fn random_ensemble(n: usize, seed: u64) -> PhotonEnsemble<Scalar> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m = CMatrix::<Scalar>::from_fn(n, n, |_, _| random_complex_normal(&mut rng));
    PhotonEnsemble::canonical(m).expect("random ensemble is valid")
}

fn permanent_suite() -> Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    let mut worst: Scalar = 0.0;
    for k in 0..30usize {
        let n = 2 + k % 6;
        let m = CMatrix::<Scalar>::from_fn(n, n, |_, _| random_complex_normal(&mut rng));
        let fast = permanent(&m).map_err(|e| e.to_string())?;
        let slow = permanent_bruteforce(&m).map_err(|e| e.to_string())?;
        let rel = (fast - slow).norm_sqr().sqrt() / slow.norm_sqr().sqrt();
        if rel > 1e-12 {
            return Err(format!("n = {n}: rel {rel:.2e}"));
        }
        worst = worst.max(rel);
    }
    Ok(format!("30 matrices, worst rel {worst:.2e}"))
}

fn coincidence_suite() -> Result<String, String> {
    let mut worst: Scalar = 0.0;
    for n in 2..=6usize {
        let ens = random_ensemble(n, 10 + n as u64);
        let fast = coincidence_project(&ens).map_err(|e| e.to_string())?;
        let slow = coincidence_project_bruteforce(&ens).map_err(|e| e.to_string())?;
        let rel = frobenius_norm(&(fast.matrix() - slow.matrix())) / frobenius_norm(slow.matrix());
        if rel > 1e-12 {
            return Err(format!("n = {n}: rel {rel:.2e}"));
        }
        worst = worst.max(rel);
    }
    Ok(format!("n = 2..6, worst rel {worst:.2e}"))
}

fn through_suite() -> Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for n in 2..=6usize {
        let ens = random_ensemble(n, 20 + n as u64);
        let id = optics::LinearNetwork::identity(n).map_err(|e| e.to_string())?;
        let through = coincidence_project_through(&ens, &id).map_err(|e| e.to_string())?;
        let plain = coincidence_project(&ens).map_err(|e| e.to_string())?;
        let rel = frobenius_norm(&(through.matrix() - plain.matrix()))
            / frobenius_norm(plain.matrix());
        if rel > 1e-12 {
            return Err(format!("identity consistency n = {n}: rel {rel:.2e}"));
        }

        let net = optics::LinearNetwork::from_matrix(haar_unitary(n, &mut rng))
            .map_err(|e| e.to_string())?;
        let fast = coincidence_project_through(&ens, &net).map_err(|e| e.to_string())?;
        let slow =
            coincidence_project_through_bruteforce(&ens, &net).map_err(|e| e.to_string())?;
        let rel =
            frobenius_norm(&(fast.matrix() - slow.matrix())) / frobenius_norm(slow.matrix());
        if rel > 1e-12 {
            return Err(format!("bruteforce n = {n}: rel {rel:.2e}"));
        }
    }
    Ok("identity + bruteforce agreement, n = 2..6".to_string())
}

fn reck_suite() -> Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(4);
    let mut worst: Scalar = 0.0;
    for k in 0..10usize {
        let n = 2 + k % 5;
        let u = haar_unitary::<Scalar, _>(n, &mut rng);
        let elements = reck_decompose(&u).map_err(|e| e.to_string())?;
        let net = compose(&elements, &PortBasis::new(n).unwrap()).map_err(|e| e.to_string())?;
        let err = max_norm(&(net.transfer() - &u));
        if err > 1e-10 {
            return Err(format!("n = {n}: error {err:.2e}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("10 unitaries, worst error {worst:.2e}"))
}

fn collector_suite() -> Result<String, String> {
    for n in 2..=8usize {
        let u = symmetric_collector_unitary::<Scalar>(n).map_err(|e| e.to_string())?;
        let dev = ebitsim_core::linalg::unitarity_deviation(&u);
        if dev > 1e-12 {
            return Err(format!("n = {n}: deviation {dev:.2e}"));
        }
    }
    Ok("n = 2..8 unitary".to_string())
}

fn symmetric_suite() -> Result<String, String> {
    let out = run_protocol(&ProtocolSpec::new(ProtocolKind::<Scalar>::SymmetricN { n: 3 }, 0).unwrap())
        .map_err(|e| e.to_string())?;
    let entropy = out.report.entropy_ebits();
    if (entropy - 1.2516).abs() > 1e-3 {
        return Err(format!("entropy {entropy}"));
    }
    Ok(format!("entropy {entropy:.6}"))
}

fn saturating_suite() -> Result<String, String> {
    for n in 2..=6usize {
        let out = run_protocol(&ProtocolSpec::new(ProtocolKind::<Scalar>::SaturatingN { n }, 0).unwrap())
            .map_err(|e| e.to_string())?;
        let gap = (out.report.entropy_ebits() - (n as Scalar).log2()).abs();
        if gap > 1e-9 {
            return Err(format!("n = {n}: gap {gap:.2e}"));
        }
    }
    Ok("entropy = log2 n within 1e-9, n = 2..6".to_string())
}

fn filter_suite() -> Result<String, String> {
    for n in [3usize, 4] {
        let ens = ebitsim_core::protocol::build_symmetric_ensemble::<Scalar>(n)
            .map_err(|e| e.to_string())?;
        let wrong = saturating_network(n, 1.0 / (n - 1) as Scalar).map_err(|e| e.to_string())?;
        let c = coincidence_project_through(&ens, &wrong)
            .and_then(|c| c.normalize())
            .map_err(|e| e.to_string())?;
        let entropy = schmidt(&c).map_err(|e| e.to_string())?.entropy_ebits();
        if entropy >= (n as Scalar).log2() - 0.05 {
            return Err(format!("n = {n}: wrong filter still gives {entropy}"));
        }
    }
    Ok("t = 1/(n-1) fails to equalize, as documented".to_string())
}

fn gaussian_suite() -> Result<String, String> {
    let grid = etpd::MomentumGrid::default_for_widths(1.0, 1.0).map_err(|e| e.to_string())?;
    let rows = etpd::entanglement_vs_width_sweep(&[0.3, 1.0, 3.0], &grid)
        .map_err(|e| e.to_string())?;
    let worst = rows
        .iter()
        .map(|r| r.rel_err)
        .fold(0.0 as Scalar, Scalar::max);
    if worst > 0.01 {
        return Err(format!("worst rel err {worst:.2e}"));
    }
    Ok(format!("3 ratios, worst rel err {worst:.2e}"))
}

fn two_photon_suite() -> Result<String, String> {
    for seed in 0..40u64 {
        let out = run_protocol(
            &ProtocolSpec::new(ProtocolKind::<Scalar>::TwoPhotonTwoDetector { network: None }, seed)
                .unwrap(),
        )
        .map_err(|e| e.to_string())?;
        if out.report.entropy_ebits() > 1.0 + 1e-9 {
            return Err(format!("seed {seed}: {}", out.report.entropy_ebits()));
        }
    }
    Ok("40 random networks at or below 1 ebit".to_string())
}

fn single_detection_suite() -> Result<String, String> {
    for seed in 0..60u64 {
        let out = run_protocol(
            &ProtocolSpec::new(ProtocolKind::<Scalar>::SingleDetection { dim: 8 }, seed).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        if out.report.entropy_ebits() > 1.0 + 1e-9 {
            return Err(format!("seed {seed}: {}", out.report.entropy_ebits()));
        }
    }
    Ok("60 random draws at or below 1 ebit".to_string())
}
