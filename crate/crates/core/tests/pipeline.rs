use std::f64::consts::PI;

use gapwave::export::{write_signal, write_zero_set};
use gapwave::hardy::{decompose, lattice_crossings, phase_curve, tail_split};
use gapwave::heat::{simple_zero_time, zero_trajectory};
use gapwave::limit_sets::examples::{default_schedule, example2_build, integer_zero_set, normalized_f};
use gapwave::oscillation::{default_zero_tol, s_count, sign_change_places};
use gapwave::signals::{random_highpass, synth_trig};
use gapwave::{GapSpec, Grid, TrigPoly};

#[test]
fn random_signal_through_every_stage() {
    let p = random_highpass(&GapSpec::high_pass(2.0).unwrap(), 2..=7, 2.0 * PI, 11).unwrap();
    let grid = Grid::periodic(0.0, 16.0 * 2.0 * PI, 16 * 512).unwrap();
    let f = synth_trig(&p, grid).unwrap();

    let eval = |x: f64| p.eval(x);
    let rep = sign_change_places(&f, default_zero_tol(&f), Some(&eval)).unwrap();
    let d = decompose(&f);
    assert!(d.reconstruction_error(&f) < 1e-10);
    let curve = phase_curve(&d, 1e-9).unwrap();
    for r in [5.0, 17.3, 40.0, 95.1] {
        assert_eq!(lattice_crossings(&curve, r).unwrap(), s_count(&rep, r).unwrap());
        assert!(s_count(&rep, r).unwrap() as f64 >= 2.0 * (r / (2.0 * PI)).floor() * 2.0);
    }

    let t = simple_zero_time(&f, 0.01, 30.0).unwrap();
    assert!(t.t > 0.0 && t.t <= 0.01);
    let traj = zero_trajectory(&f, &[0.0, 0.1, 0.5, 2.0]).unwrap();
    let counts: Vec<usize> = traj.iter().map(|(_, z)| z.len()).collect();
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
}

#[test]
fn log_modulus_split() {
    let p = TrigPoly::cos(3, 1.0, 2.0 * PI)
        .unwrap()
        .add(&TrigPoly::cos(5, 0.3, 2.0 * PI).unwrap())
        .unwrap();
    let grid = Grid::periodic(-400.0 * PI, 800.0 * PI, 400 * 256).unwrap();
    let d = decompose(&synth_trig(&p, grid).unwrap());
    let u = gapwave::SampledSignal::new(grid, d.h_real_axis.iter().map(|h| h.norm().ln()).collect()).unwrap();
    let pair = tail_split(&u, 0.4, u.max_abs()).unwrap();
    let split = pair.split.unwrap();
    assert!(split.tail < 0.4 * 0.4 / 8.0);
    assert!(split.r0 > 1.0 && split.r0 < 400.0 * PI);
}

#[test]
fn example2_exports_consistent_zero_set() {
    let ex = example2_build(0.1, &default_schedule(320.0), 320.0).unwrap();
    let mut buf = Vec::new();
    write_zero_set(&mut buf, &ex.zeros).unwrap();
    let lines = String::from_utf8(buf).unwrap();
    assert_eq!(lines.lines().count(), ex.zeros.positions.len());

    for &n in ex.zeros.positions.iter().take(20) {
        assert!(normalized_f(&ex.zeros, n as f64).abs() < 1e-9);
    }
    assert!(ex.zeros.positions.len() < 321);

    let mut csv = Vec::new();
    write_signal(&mut csv, &ex.f).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with("x,value"));
}

#[test]
fn integer_zero_set_rejects_decreasing_counts() {
    assert!(integer_zero_set(&[0.0, 1.2, 0.9]).is_err());
}
