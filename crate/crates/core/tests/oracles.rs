//! Reference values computed independently with mpmath at 30 digits.

use num_complex::Complex64;

use degenspec::degeneration::{c_w_kernel, elliptic_sum_s, CwKernel};
use degenspec::geometry::Geodesic;
use degenspec::hplane::heat_kernel_h;
use degenspec::selberg::{selberg_logderiv_series, selberg_z_prime_one, selberg_zeta_product};
use degenspec::special_fn::QuadConfig;
use degenspec::traces::elliptic_cone_u;

fn close(got: f64, want: f64, rel: f64) {
    assert!(
        (got - want).abs() <= rel * want.abs().max(1e-300),
        "got {got:.17e}, want {want:.17e}, rel err {:.2e}",
        ((got - want) / want).abs()
    );
}

#[test]
fn elliptic_sum_reference() {
    close(elliptic_sum_s(5).unwrap(), 0.550552768188469415, 1e-13);
    close(elliptic_sum_s(12).unwrap(), 0.830657798859891898, 1e-13);
    close(elliptic_sum_s(101).unwrap(), 1.50902442221512408, 1e-13);
}

#[test]
fn cw_kernel_reference() {
    let c = |t, w, b| c_w_kernel(&CwKernel::new(t, w, b).unwrap()).unwrap();
    close(c(1.25, 0.0, 0.0), 0.318309886183790672, 1e-10);
    close(c(1.25, 1.0, 0.3), 0.137754001723352632, 1e-10);
    close(c(5.0, 0.5, 0.1), 0.725285725650638962, 1e-10);
}

#[test]
fn single_cone_trace_reference() {
    let cfg = QuadConfig::tight();
    for &(q, t, want) in &[
        (2u64, 1.0, 0.0812358244156086482),
        (3, 1.0, 0.135104504967408603),
        (5, 0.1, 0.361509698942928401),
        (7, 10.0, 0.0133964010974706997),
    ] {
        close(elliptic_cone_u(q, t, cfg).unwrap(), want, 1e-10);
    }
}

#[test]
fn small_time_limit_of_cone_trace() {
    for &q in &[2u64, 3, 7] {
        let want = (q * q - 1) as f64 / (12.0 * q as f64);
        close(elliptic_cone_u(q, 1e-6, QuadConfig::tight()).unwrap(), want, 1e-4);
    }
}

#[test]
fn selberg_reference() {
    let one = [Geodesic::new(1.0, 1)];
    let s = Complex64::new(2.0, 0.0);
    close(selberg_logderiv_series(&one, s).unwrap().value.re, 0.238282804673090399, 1e-12);
    close(selberg_zeta_product(&one, s, 1e-15).unwrap().re, 0.797994382053908822, 1e-12);
    close(selberg_z_prime_one(&one).unwrap().value, 0.413762401933519629, 1e-10);
    let two = [Geodesic::new(1.0, 1), Geodesic::new(1.5, 2)];
    close(selberg_z_prime_one(&two).unwrap().value, 0.502771265640071312, 1e-10);
}

#[test]
fn plane_heat_kernel_reference() {
    close(heat_kernel_h(1.0, 0.0).unwrap(), 0.0575357552057219746, 1e-10);
    close(heat_kernel_h(1.0, 1.0).unwrap(), 0.0414911839578222173, 1e-10);
}
