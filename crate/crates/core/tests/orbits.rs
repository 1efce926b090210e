use std::f64::consts::PI;

use sepint_core::dynamics::{drift_report, integrate, orbit_report, Control, OrbitOptions, OrbitReport, Scheme};
use sepint_core::observables::{PhasePoint, PolarPoint};
use sepint_core::potentials::{ttw, PotentialSpec, RadialKind};

fn pq(rep: &OrbitReport) -> (i64, u64) {
    let r = rep.rational.as_ref().expect("rational approximant");
    (r.p, r.q)
}

fn kepler() -> PotentialSpec {
    PotentialSpec::radial_only(RadialKind::Kepler { a: -1.0 })
}

/// Laplace–Runge–Lenz vector for `V = −1/r`.
fn lrl(s: &PhasePoint) -> [f64; 2] {
    let (lz, r) = (s.lz(), s.r());
    [s.py * lz - s.x / r, -s.px * lz - s.y / r]
}

#[test]
fn kepler_lrl_vector_is_conserved_over_a_hundred_periods() {
    let init = PhasePoint::new(1.0, 0.0, 0.0, 0.9);
    let energy = 0.5 * 0.81 - 1.0;
    let a = -1.0 / (2.0 * energy);
    let period = 2.0 * PI * a * a.sqrt();
    let control = Control { stride: 50, ..Control::default() };
    let traj = integrate(&kepler(), init, 100.0 * period, &control).unwrap();
    let a0 = lrl(&init);
    let e = a0[0].hypot(a0[1]);
    assert!((e - 0.19).abs() < 1e-12);
    let worst = traj
        .samples
        .iter()
        .map(|s| {
            let a = lrl(s);
            (a[0] - a0[0]).hypot(a[1] - a0[1])
        })
        .fold(0.0_f64, f64::max);
    assert!(worst < 1e-8, "LRL drift {worst:e}");
    assert!(traj.energy_drift < 1e-10);
}

#[test]
fn kepler_orbit_closes_with_unit_rotation_number() {
    let init = PhasePoint::new(1.0, 0.0, 0.1, 0.9);
    let (rep, _) = orbit_report(&kepler(), init, 10, &OrbitOptions::default()).unwrap();
    assert!(rep.closed, "closure {:?}", rep.closure_distance);
    assert_eq!(pq(&rep), (1, 1));
    assert!((rep.rotation_number.unwrap() - 1.0).abs() < 1e-8);
}

fn ttw_init() -> PhasePoint {
    PhasePoint::from_polar(PolarPoint {
        r: 1.0,
        theta: 0.5,
        pr: 0.2,
        lz: 0.4,
    })
}

#[test]
fn ttw_report_does_not_depend_on_the_time_origin() {
    let v = ttw(1.0, 0.1, 0.1, 2, 1).unwrap();
    let opts = OrbitOptions::default();
    let (a, traj) = orbit_report(&v, ttw_init(), 10, &opts).unwrap();
    // restart from a state a little way along the same orbit
    let later = traj.samples[traj.samples.len() / 3];
    let (b, _) = orbit_report(&v, later, 10, &opts).unwrap();
    assert!(a.closed && b.closed, "{a:#?}\n{b:#?}\n{later:?}");
    assert_eq!(pq(&a), pq(&b));
    assert!((a.rotation_number.unwrap() - b.rotation_number.unwrap()).abs() < 1e-8);
    let pa = a.period_estimate.unwrap();
    let pb = b.period_estimate.unwrap();
    assert!((pa - pb).abs() < 1e-6 * pa);
}

#[test]
fn ttw_integrals_hold_and_a_wrong_x_drifts() {
    let v = ttw(1.0, 0.1, 0.1, 2, 1).unwrap();
    let control = Control { stride: 20, ..Control::default() };
    let traj = integrate(&v, ttw_init(), 50.0, &control).unwrap();
    let wrong = ttw(1.0, 0.3, 0.1, 2, 1).unwrap();
    let drift = drift_report(
        &traj,
        &[
            ("H".into(), v.hamiltonian().unwrap()),
            ("X".into(), v.x_integral().unwrap()),
            ("X_wrong".into(), wrong.x_integral().unwrap()),
        ],
    )
    .unwrap();
    assert!(drift["H"] < 1e-8, "{drift:?}");
    assert!(drift["X"] < 1e-8, "{drift:?}");
    assert!(drift["X_wrong"] > 1e-2, "{drift:?}");
}

#[test]
fn leapfrog_and_yoshida_agree_on_the_closed_orbit() {
    let v = ttw(1.0, 0.1, 0.1, 2, 1).unwrap();
    let mut opts = OrbitOptions::default();
    opts.control.scheme = Scheme::Leapfrog;
    opts.control.dt = 2e-4;
    opts.control.drift_budget = 1e-6;
    opts.closure_tol = 1e-3;
    let (lf, _) = orbit_report(&v, ttw_init(), 6, &opts).unwrap();
    assert_eq!(pq(&lf), (2, 1));
}

#[test]
fn init_inside_the_excluded_disc_is_rejected() {
    let init = PhasePoint::new(1e-6, 0.0, 0.0, 1.0);
    assert!(integrate(&kepler(), init, 1.0, &Control::default()).is_err());
}

#[test]
fn hyperbolic_kepler_orbit_escapes_cleanly() {
    let opts = OrbitOptions {
        escape_factor: 20.0,
        ..OrbitOptions::default()
    };
    let (rep, traj) = orbit_report(&kepler(), PhasePoint::new(1.0, 0.0, 0.0, 1.6), 5, &opts).unwrap();
    assert!(!rep.bounded);
    assert!(!rep.closed);
    assert!(traj.energy_drift < 1e-10);
}

#[test]
fn blowing_up_at_an_angular_pole_is_not_an_escape() {
    // S = -0.05 / sin²θ pulls the orbit into the wall at θ = 0
    let v = sepint_core::potentials::ttw_k(1.0, 0.0, -0.05, 1.0);
    let init = PhasePoint::from_polar(PolarPoint {
        r: 1.0,
        theta: 0.3,
        pr: 0.0,
        lz: -0.05,
    });
    assert!(orbit_report(&v, init, 5, &OrbitOptions::default()).is_err());
}
