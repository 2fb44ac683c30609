use coopcast::broadcast::{run_broadcast, run_broadcast_oracle};
use coopcast::network::sample;
use coopcast::propagation::received_power;
use coopcast::{Dimension, ModelParams, Point, Realization, Window};
use proptest::prelude::*;

fn dim_strategy() -> impl Strategy<Value = Dimension> {
    prop_oneof![Just(Dimension::One), Just(Dimension::Two)]
}

fn realization(dim: Dimension, coords: &[(f64, f64)]) -> Realization {
    let pts = coords
        .iter()
        .map(|&(x, y)| match dim {
            Dimension::One => Point::on_line(x),
            Dimension::Two => Point::new(x, y),
        })
        .chain([Point::origin()])
        .collect();
    Realization::from_points(dim, pts).unwrap()
}

fn coords(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-8.0..8.0f64, -8.0..8.0f64), 0..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn incremental_engine_matches_oracle(
        dim in dim_strategy(),
        pts in coords(50),
        alpha in prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(3.0)],
        tau in 0.05..1.5f64,
    ) {
        let r = realization(dim, &pts);
        let params = ModelParams::new(alpha, 1.0, 1.0, tau).unwrap();
        let fast = run_broadcast(&r, &params).unwrap();
        let slow = run_broadcast_oracle(&r, &params).unwrap();
        prop_assert_eq!(fast.decode_round, slow.decode_round);
        prop_assert_eq!(fast.rounds, slow.rounds);
    }

    #[test]
    fn outcome_is_a_least_fixed_point(
        dim in dim_strategy(),
        pts in coords(40),
        alpha in 0.3..4.0f64,
        tau in 0.05..2.0f64,
    ) {
        let r = realization(dim, &pts);
        let params = ModelParams::new(alpha, 1.0, 1.0, tau).unwrap();
        let out = run_broadcast(&r, &params).unwrap();
        let nodes = r.points();
        let decoded_before = |t: u32| -> Vec<Point> {
            nodes.iter().zip(&out.decode_round).filter(|(_, d)| matches!(d, Some(s) if *s < t)).map(|(p, _)| *p).collect()
        };
        for (i, d) in out.decode_round.iter().enumerate() {
            match *d {
                Some(0) => prop_assert_eq!(i, r.source_index()),
                Some(t) => {
                    // reached by the set decoded before round t, not before t - 1
                    prop_assert!(received_power(&decoded_before(t), nodes[i], &params).meets(tau));
                    prop_assert!(!received_power(&decoded_before(t - 1), nodes[i], &params).meets(tau));
                }
                None => {
                    let all: Vec<Point> = decoded_before(u32::MAX);
                    prop_assert!(!received_power(&all, nodes[i], &params).meets(tau));
                }
            }
        }
    }

    #[test]
    fn adding_a_node_never_shrinks_the_decoded_set(
        dim in dim_strategy(),
        pts in coords(30),
        extra in (-8.0..8.0f64, -8.0..8.0f64),
        alpha in 0.5..3.5f64,
    ) {
        let r = realization(dim, &pts);
        let params = ModelParams::normalized(alpha, 1.0).unwrap();
        let before = run_broadcast(&r, &params).unwrap();
        let p = match dim {
            Dimension::One => Point::on_line(extra.0),
            Dimension::Two => Point::new(extra.0, extra.1),
        };
        let bigger = r.with_point(p).unwrap();
        let after = run_broadcast(&bigger, &params).unwrap();
        for (i, q) in r.points().iter().enumerate() {
            if before.is_decoded(i) {
                let j = bigger.points().iter().position(|b| b == q).unwrap();
                prop_assert!(after.is_decoded(j));
                prop_assert!(after.decode_round[j] <= before.decode_round[i]);
            }
        }
    }

    #[test]
    fn scaling_space_and_power_together_changes_nothing(
        dim in dim_strategy(),
        pts in coords(40),
        alpha in prop_oneof![Just(1.0), Just(2.0), Just(3.0)],
        s in prop_oneof![Just(0.5), Just(2.0), Just(4.0)],
    ) {
        let r = realization(dim, &pts);
        let params = ModelParams::new(alpha, 1.0, 1.0, 0.7).unwrap();
        let scaled_params = ModelParams::new(alpha, 1.0, f64::powf(s, alpha), 0.7).unwrap();
        let a = run_broadcast(&r, &params).unwrap();
        let b = run_broadcast(&r.scaled(s), &scaled_params).unwrap();
        prop_assert_eq!(a.decode_round, b.decode_round);
    }

    #[test]
    fn reflection_is_a_symmetry(pts in coords(40), alpha in 0.5..3.0f64) {
        let r = realization(Dimension::Two, &pts);
        let params = ModelParams::normalized(alpha, 1.0).unwrap();
        let a = run_broadcast(&r, &params).unwrap();
        let m = r.reflected();
        let b = run_broadcast(&m, &params).unwrap();
        prop_assert_eq!(a.reached_count, b.reached_count);
        prop_assert_eq!(a.rounds, b.rounds);
    }
}

#[test]
fn sampled_networks_agree_with_oracle() {
    for seed in 0..60u64 {
        for (dim, extent) in [(Dimension::One, 15.0), (Dimension::Two, 3.0)] {
            let alpha = [0.5, 1.0, 2.0, 3.0][(seed % 4) as usize];
            let params = ModelParams::normalized(alpha, 1.5).unwrap();
            let r = sample(&params, &Window::new(dim, extent).unwrap(), seed).unwrap();
            let fast = run_broadcast(&r, &params).unwrap();
            let slow = run_broadcast_oracle(&r, &params).unwrap();
            assert_eq!(fast, slow, "seed {seed} dim {dim}");
        }
    }
}

#[test]
fn replay_through_text_format() {
    let params = ModelParams::normalized(2.0, 2.0).unwrap();
    let r = sample(&params, &Window::square(4.0).unwrap(), 11).unwrap();
    let back = Realization::from_text(&r.to_text()).unwrap();
    assert_eq!(back.points(), r.points());
    assert_eq!(run_broadcast(&back, &params).unwrap(), run_broadcast(&r, &params).unwrap());
}
