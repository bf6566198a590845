use std::f64::consts::PI;

use gapwave::heat::heat_convolve;
use gapwave::oscillation::{default_zero_tol, s_count, sign_change_places};
use gapwave::signals::{apply_gap_mask, random_highpass, spectrum_of, synth_trig, verify_gap};
use gapwave::sturm::check_sturm_bound;
use gapwave::{GapSpec, Grid, SampledSignal, TrigPoly};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::periodic(0.0, 8.0 * PI, 512).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(values in prop::collection::vec(-10.0f64..10.0, 512)) {
        let s = SampledSignal::new(grid(), values).unwrap();
        let e = s.energy();
        prop_assert!((spectrum_of(&s).energy() - e).abs() <= 1e-10 * e.max(1.0));
    }

    #[test]
    fn masked_roundtrip(values in prop::collection::vec(-1.0f64..1.0, 512), a in 0.3f64..5.0) {
        let gap = GapSpec::high_pass(a).unwrap();
        let s = SampledSignal::new(grid(), values).unwrap();
        let masked = apply_gap_mask(&spectrum_of(&s), &gap).synthesize().unwrap();
        prop_assert!(verify_gap(&masked, &gap, 1e-3).unwrap().in_gap_energy_ratio < 1e-20);
        let again = apply_gap_mask(&spectrum_of(&masked), &gap).synthesize().unwrap();
        let err = masked.values.iter().zip(&again.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn s_count_is_monotone(seed in 0u64..10_000, r1 in 0.5f64..20.0, dr in 0.0f64..20.0) {
        let p = random_highpass(&GapSpec::high_pass(1.0).unwrap(), 1..=6, 2.0 * PI, seed).unwrap();
        let g = Grid::new(-0.1, 0.01, 4100).unwrap();
        let s = synth_trig(&p, g).unwrap();
        let rep = sign_change_places(&s, default_zero_tol(&s), None).unwrap();
        prop_assert!(s_count(&rep, r1).unwrap() <= s_count(&rep, r1 + dr).unwrap());
    }

    #[test]
    fn hilbert_twice_negates(seed in any::<u64>()) {
        let p = random_highpass(&GapSpec::high_pass(1.0).unwrap(), 1..=9, 2.0 * PI, seed).unwrap();
        let p = p.add(&TrigPoly::cos(0, 0.7, 2.0 * PI).unwrap()).unwrap();
        let hh = p.hilbert().hilbert();
        for i in 0..50 {
            let x = i as f64 * 0.13;
            prop_assert!((hh.eval(x) + p.eval(x) - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_semigroup(values in prop::collection::vec(-1.0f64..1.0, 512), t in 0.0f64..1.0, s in 0.0f64..1.0) {
        let f = SampledSignal::new(grid(), values).unwrap();
        let two_step = heat_convolve(&heat_convolve(&f, t).unwrap(), s).unwrap();
        let one_step = heat_convolve(&f, t + s).unwrap();
        let err = two_step.values.iter().zip(&one_step.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn sturm_bound_random(seed in any::<u64>(), m in 1u32..8, extra in 0u32..8) {
        let p = random_highpass(&GapSpec::high_pass(m as f64).unwrap(), m..=m + extra, 2.0 * PI, seed).unwrap();
        let c = check_sturm_bound(&p).unwrap();
        prop_assert_eq!(c.m, m);
        prop_assert!(c.pass, "{} sign changes for gap order {}", c.count, m);
    }
}

#[test]
fn masked_roundtrip_seeds() {
    for seed in 0..100u64 {
        let gap = GapSpec::high_pass(1.5).unwrap();
        let p = random_highpass(&GapSpec::high_pass(0.25).unwrap(), 1..=12, 2.0 * PI, seed).unwrap();
        let g = Grid::periodic(0.0, 2.0 * PI * 4.0, 1024).unwrap();
        let s = synth_trig(&p, g).unwrap();
        let masked = apply_gap_mask(&spectrum_of(&s), &gap).synthesize().unwrap();
        let kept = p
            .coeffs()
            .filter(|&(n, _)| n >= 2)
            .fold(TrigPoly::new(2.0 * PI).unwrap(), |acc, (n, c)| {
                acc.add(&TrigPoly::from_coeffs([(n as i64, c)], 2.0 * PI).unwrap())
                    .unwrap()
            });
        let want = synth_trig(&kept, g).unwrap();
        let err = masked
            .values
            .iter()
            .zip(&want.values)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err < 1e-12, "seed {seed}: {err:e}");
    }
}
