use dmaj::dissipation::{b0_from_rates, flow, thermal_rates, zero_temperature_generator};
use dmaj::linalg::dist1;
use dmaj::majorize::{d_majorizes, d_stochastic_transfer, thermo_curve, Method, WeightVector};
use dmaj::polytope::{b_vector, contains, max_corner, vertices, vertices_with};
use dmaj::reach::{final_state, simulate, synthesize, Schedule};
use dmaj::{sample, Exec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

#[test]
fn certificate_reproduces_every_vertex() {
    let d = WeightVector::new(vec![4.0, 2.0, 1.0]).unwrap();
    let y = [4.0, -2.0, 2.0];
    for v in vertices(&y, &d).unwrap().points {
        assert!(d_majorizes(&v, &y, &d, Method::Curve).unwrap());
        let a = d_stochastic_transfer(&v, &y, &d).unwrap();
        assert!(a.is_valid());
        assert!(dist1(&a.matrix.mul_vec(&y), &v) <= 1e-8);
    }
}

#[test]
fn schedule_json_round_trip() {
    let g = zero_temperature_generator(3);
    let x0 = [0.2, 0.3, 0.5];
    let x = [0.1, 0.6, 0.3];
    let s = synthesize(&g, &x0, &x, 1e-7).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    assert!(text.starts_with("{\"segments\":[{\"perm\":["));
    let back: Schedule = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    assert!(dist1(&final_state(&g, &x0, &back).unwrap(), &x) <= 1e-7);
    let tr = simulate(&g, &x0, &back, 0.05).unwrap();
    assert!(dist1(tr.final_state(), &final_state(&g, &x0, &s).unwrap()) <= 1e-12);
}

#[test]
fn thermal_flow_stays_d_majorized_by_its_start() {
    let mut rng = SplitMix64::seed_from_u64(3);
    for n in 2..6 {
        let d = sample::weights(&mut rng, n);
        let g = b0_from_rates(&thermal_rates(&d));
        let x0 = sample::simplex_point(&mut rng, n);
        let mut prev = x0.clone();
        for t in [0.05, 0.3, 1.0, 4.0] {
            let x = flow(&g, &x0, t).unwrap();
            assert!(contains(&x, &b_vector(&prev, &d).unwrap()).unwrap());
            prev = x;
        }
    }
}

#[test]
fn sequential_fallback_matches() {
    let mut rng = SplitMix64::seed_from_u64(4);
    let d = sample::weights(&mut rng, 5);
    let y = sample::simplex_point(&mut rng, 5);
    assert_eq!(vertices_with(&y, &d, Exec::Sequential).unwrap(), vertices_with(&y, &d, Exec::Parallel).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_corner_curve_lies_below_curve_of_y(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let d = sample::weights(&mut rng, n);
        let y = sample::simplex_point(&mut rng, n);
        let z = max_corner(&y, &d).unwrap();
        let (cy, cz) = (thermo_curve(&y, &d).unwrap(), thermo_curve(&z, &d).unwrap());
        for k in 0..=20 {
            let c = d.total() * k as f64 / 20.0;
            prop_assert!(cz.eval(c) <= cy.eval(c) + 1e-9);
        }
    }
}
