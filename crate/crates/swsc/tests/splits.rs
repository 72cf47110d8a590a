//! Layer splits: pushforward, branch selection and serialization.

use proptest::prelude::*;
use swsc::channels::Pmf;
use swsc::splits::{compose_three_layer, erasure_split, mac3_split, unit_grid, Branch, LayerSplit, SenderSplit};

fn pmf(v: &[f64]) -> Pmf {
    let s: f64 = v.iter().sum();
    Pmf::new(v.iter().map(|x| x / s).collect()).unwrap()
}

#[test]
fn erasure_split_layout() {
    let p = pmf(&[0.2, 0.3, 0.5]);
    let s = erasure_split(&p, 0.25).unwrap();
    assert_eq!(s.layer_sizes(), vec![4, 3]);
    // P(X1 = e) = alpha, P(X1 = x) = (1 - alpha) p(x).
    let x1 = s.layers()[0].probs();
    assert!((x1[3] - 0.25).abs() < 1e-15);
    assert!((x1[2] - 0.75 * 0.5).abs() < 1e-15);
    // The symbol follows X1 unless it is erased.
    assert_eq!(s.map(&[1, 2]), 1);
    assert_eq!(s.map(&[3, 2]), 2);
    assert!(erasure_split(&p, 1.5).is_err());
}

#[test]
fn three_layer_branches() {
    let p = pmf(&[1.0, 1.0]);
    let a = compose_three_layer(&p, 0.7, 0.2).unwrap();
    assert_eq!(a.branch, Branch::PrimeCoarse);
    assert_eq!((a.coarse, a.fine), (0.7, 0.2));
    let b = compose_three_layer(&p, 0.2, 0.7).unwrap();
    assert_eq!(b.branch, Branch::DoublePrimeCoarse);
    assert_eq!((b.coarse, b.fine), (0.7, 0.2));
    // Ties go to the second branch.
    assert_eq!(compose_three_layer(&p, 0.4, 0.4).unwrap().branch, Branch::DoublePrimeCoarse);
}

#[test]
fn mac3_split_shapes() {
    let p = pmf(&[1.0, 2.0]);
    let s = mac3_split(&p, &p, &p, 0.3, 0.6).unwrap();
    assert_eq!(s.num_inputs(), 3);
    assert_eq!(s.input(0).num_layers(), 2);
    assert_eq!(s.input(2).num_layers(), 1);
}

#[test]
fn grid_endpoints() {
    assert_eq!(unit_grid(5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(unit_grid(41).len(), 41);
}

#[test]
fn trivial_split_is_identity() {
    let p = pmf(&[3.0, 1.0]);
    let s = SenderSplit::trivial(p.clone());
    assert_eq!(s.num_layers(), 1);
    assert_eq!(s.pushforward(), p.probs().to_vec());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn splits_reproduce_the_input_law(
        w in prop::collection::vec(0.01..1.0f64, 2..6),
        a in 0.0..=1.0f64,
        b in 0.0..=1.0f64,
    ) {
        let p = pmf(&w);
        prop_assert!(erasure_split(&p, a).unwrap().pushforward_deviation() < 1e-12);
        let three = compose_three_layer(&p, a, b).unwrap();
        prop_assert!(three.split.pushforward_deviation() < 1e-12);
        prop_assert!(three.coarse >= three.fine);
    }

    #[test]
    fn split_json_roundtrip(w in prop::collection::vec(0.01..1.0f64, 2..5), a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let p = pmf(&w);
        let split = LayerSplit::new(vec![compose_three_layer(&p, a, b).unwrap().split, SenderSplit::trivial(p.clone())]);
        let back = LayerSplit::from_json(&split.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.num_inputs(), split.num_inputs());
        for (x, y) in back.inputs().iter().zip(split.inputs()) {
            prop_assert_eq!(x.table(), y.table());
            for (lx, ly) in x.layers().iter().zip(y.layers()) {
                for (u, v) in lx.probs().iter().zip(ly.probs()) {
                    prop_assert!((u - v).abs() < 1e-15);
                }
            }
        }
    }
}
