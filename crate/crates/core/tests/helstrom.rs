//! Minimum error from the full Helstrom trace norm of explicit L-photon
//! density matrices, compared with the closed form and the Gram oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use twosource_core::{gamma_trace_norm_oracle, min_error_conditional, OverlapStats, Priors};

/// One-photon states in the basis {φ+, φ−, u}: φ± are the symmetric and
/// antisymmetric combinations of the shifted PSFs (the eigenvectors of
/// ρ2) and u completes the span of the centred PSF ψ1.
fn single_photon(stats: &OverlapStats) -> (DMatrix<f64>, DMatrix<f64>) {
    let a = stats.chi / stats.lambda_plus.sqrt();
    let b = (1.0 - a * a).max(0.0).sqrt();
    let psi1 = DMatrix::from_column_slice(3, 1, &[a, 0.0, b]);
    let rho1 = &psi1 * psi1.transpose();
    let rho2 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![stats.lambda_plus, stats.lambda_minus, 0.0]));
    (rho1, rho2)
}

fn tensor_power(m: &DMatrix<f64>, l: u64) -> DMatrix<f64> {
    let mut out = DMatrix::from_element(1, 1, 1.0);
    for _ in 0..l {
        out = out.kronecker(m);
    }
    out
}

fn helstrom(stats: &OverlapStats, priors: Priors, l: u64) -> f64 {
    let (r1, r2) = single_photon(stats);
    let gamma = tensor_power(&r2, l) * priors.p2 - tensor_power(&r1, l) * priors.p1;
    let norm: f64 = SymmetricEigen::new(gamma).eigenvalues.iter().map(|v| v.abs()).sum();
    0.5 * (1.0 - norm)
}

#[test]
fn full_trace_norm_matches_closed_form() {
    for &d in &[0.0, 0.25, 1.0, 2.0, 4.0] {
        let stats = OverlapStats::gaussian(d).unwrap();
        for &p1 in &[0.1, 0.5, 0.9] {
            let priors = Priors::from_p1(p1).unwrap();
            for l in 0..=3 {
                let brute = helstrom(&stats, priors, l);
                let closed = min_error_conditional(&stats, priors, l).p_error;
                assert!((brute - closed).abs() < 1e-12, "d={d} p1={p1} L={l}: {brute} vs {closed}");
                if l >= 1 {
                    let gram = gamma_trace_norm_oracle(&stats, priors, l).unwrap();
                    assert!((brute - gram).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn paper_example_against_brute_force_at_three_photons() {
    let stats = OverlapStats::gaussian(2.0).unwrap();
    let brute = helstrom(&stats, Priors::equal(), 3);
    assert!((brute - min_error_conditional(&stats, Priors::equal(), 3).p_error).abs() < 1e-13);
}
