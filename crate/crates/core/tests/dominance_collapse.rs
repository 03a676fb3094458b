//! Dominance certification and collapse correctness on seeded synthetic
//! networks: whenever every first-layer neuron has zero bias and keeps a
//! nonzero weight outside the chosen clique, the negative assignment must
//! fix every activation with the predicted sign, and collapsing the
//! restricted network must preserve the function on the whole free box,
//! checked by the exact equality decision procedure.
//!
//! Zero first-layer biases match the setting the pipeline certifies
//! (homogenized networks); a large enough bias could outweigh the assigned
//! terms otherwise, so the guarantee only covers the bias-free case.

use rand::Rng;
use relumax_core::constructions::RationalGrid;
use relumax_core::rational::{rat, rint, Rational};
use relumax_core::sampling::rng_from_seed;
use relumax_core::transforms::{
    collapse_first_layer, fixed_activation_analysis, negative_assignment, restrict_inputs,
};
use relumax_core::verify::{equals_network_on_box, Verdict};
use relumax_core::{AffineMap, BoxDomain, ReluNetwork};

/// Random network of the given shape whose first layer has zero biases and
/// whose first-layer neurons all have a nonzero weight outside `1..=r`.
fn synthetic_net(
    rng: &mut impl Rng,
    d: usize,
    r: usize,
    widths: &[usize],
    grid: RationalGrid,
) -> ReluNetwork {
    fn nonzero(rng: &mut impl Rng, grid: &RationalGrid) -> Rational {
        loop {
            let v = grid.sample(rng);
            if v != rint(0) {
                return v;
            }
        }
    }
    let mut prev = d;
    let mut hidden = Vec::new();
    for (t, &w) in widths.iter().enumerate() {
        let rows: Vec<Vec<Rational>> = (0..w)
            .map(|_| {
                let mut row: Vec<Rational> = (0..prev).map(|_| grid.sample(rng)).collect();
                if t == 0 {
                    let outside = rng.gen_range(r..d);
                    row[outside] = nonzero(rng, &grid);
                }
                row
            })
            .collect();
        let biases: Vec<Rational> = if t == 0 {
            vec![rint(0); w]
        } else {
            (0..w).map(|_| grid.sample(rng)).collect()
        };
        hidden.push(AffineMap::new(rows, biases, prev).unwrap());
        prev = w;
    }
    let out_row: Vec<Rational> = (0..prev).map(|_| grid.sample(rng)).collect();
    let output = AffineMap::new(vec![out_row], vec![grid.sample(rng)], prev).unwrap();
    ReluNetwork::new(d, hidden, output).unwrap()
}

#[test]
fn dominance_certifies_and_collapse_preserves_the_function() {
    let mut rng = rng_from_seed(2024);
    let grid = RationalGrid::new(-8, 8, 4).unwrap();
    for case in 0..40 {
        let d = rng.gen_range(3..=6usize);
        let r = rng.gen_range(2..d);
        let depth_hidden = rng.gen_range(2..=3usize);
        let widths: Vec<usize> = (0..depth_hidden)
            .map(|_| rng.gen_range(2..=4usize))
            .collect();
        let net = synthetic_net(&mut rng, d, r, &widths, grid);
        let clique: Vec<usize> = (1..=r).collect();

        let plan = negative_assignment(&net, &clique)
            .unwrap_or_else(|e| panic!("case {case}: assignment failed: {e}"));
        let cert = fixed_activation_analysis(&net, &plan).unwrap();
        assert!(
            cert.all_fixed(),
            "case {case}: some neuron is not fixed despite the dominance chain"
        );
        for (i, neuron) in cert.neurons.iter().enumerate() {
            assert_eq!(
                neuron.matches_dominance,
                Some(true),
                "case {case}, neuron {i}: certified sign disagrees with the dominant weight"
            );
        }

        let restricted = restrict_inputs(&net, &plan).unwrap();
        let collapsed = collapse_first_layer(&restricted, &cert).unwrap();
        assert_eq!(collapsed.depth() + 1, restricted.depth());
        let verdict = equals_network_on_box(
            &restricted,
            &collapsed,
            &BoxDomain::unit(r),
            1_000_000,
        )
        .unwrap();
        assert_eq!(verdict, Verdict::Equal, "case {case}");
    }
}

#[test]
fn certificates_match_exhaustive_vertex_signs() {
    // on every vertex of [0,1]^r the observed pre-activation sign must be
    // consistent with the certificate
    let mut rng = rng_from_seed(555);
    let grid = RationalGrid::new(-8, 8, 4).unwrap();
    for case in 0..25 {
        let d = rng.gen_range(3..=6usize);
        let r = rng.gen_range(2..d);
        let net = synthetic_net(&mut rng, d, r, &[3, 2], grid);
        let plan = negative_assignment(&net, &(1..=r).collect::<Vec<_>>()).unwrap();
        let cert = fixed_activation_analysis(&net, &plan).unwrap();

        let first = &net.hidden()[0];
        for corner in 0..(1u32 << r) {
            // assemble the full input at this vertex
            let mut x = vec![rint(0); d];
            for (pos, &coord) in plan.clique.iter().enumerate() {
                x[coord - 1] = rint(((corner >> pos) & 1) as i64);
            }
            for (coord, value) in &plan.assigned {
                x[coord - 1] = value.clone();
            }
            let pre = first.apply(&x);
            for (i, value) in pre.iter().enumerate() {
                match &cert.neurons[i].status {
                    relumax_core::transforms::SignStatus::AlwaysPositive => {
                        assert!(
                            !num_traits::Signed::is_negative(value),
                            "case {case}: neuron {i} negative at vertex {corner:b}"
                        );
                    }
                    relumax_core::transforms::SignStatus::AlwaysNegative => {
                        assert!(
                            !num_traits::Signed::is_positive(value),
                            "case {case}: neuron {i} positive at vertex {corner:b}"
                        );
                    }
                    relumax_core::transforms::SignStatus::NotFixed { .. } => {}
                }
                assert!(value >= &cert.neurons[i].pre_min && value <= &cert.neurons[i].pre_max);
            }
        }
    }
}

#[test]
fn dominance_holds_even_with_extreme_weight_ratios() {
    // large ratio W makes the assigned values grow fast; the dominance
    // chain must still certify every neuron
    let rows = vec![
        vec![rint(1), rint(100), rint(-1), rint(0)],
        vec![rint(-100), rint(1), rint(0), rat(1, 100)],
        vec![rint(3), rint(-3), rat(1, 7), rint(50)],
    ];
    let hidden1 = AffineMap::new(rows, vec![rint(0); 3], 4).unwrap();
    let hidden2 = AffineMap::new(
        vec![vec![rint(1), rint(1), rint(1)], vec![rint(1), rint(-1), rint(2)]],
        vec![rint(0), rint(5)],
        3,
    )
    .unwrap();
    let output = AffineMap::new(vec![vec![rint(2), rint(-3)]], vec![rint(1)], 2).unwrap();
    let net = ReluNetwork::new(4, vec![hidden1, hidden2], output).unwrap();

    let plan = negative_assignment(&net, &[1, 2]).unwrap();
    assert_eq!(plan.ratio, rint(10000)); // 100 / (1/100)
    let cert = fixed_activation_analysis(&net, &plan).unwrap();
    assert!(cert.all_fixed());
    for neuron in &cert.neurons {
        assert_eq!(neuron.matches_dominance, Some(true));
    }
    let restricted = restrict_inputs(&net, &plan).unwrap();
    let collapsed = collapse_first_layer(&restricted, &cert).unwrap();
    let verdict =
        equals_network_on_box(&restricted, &collapsed, &BoxDomain::unit(2), 100_000).unwrap();
    assert_eq!(verdict, Verdict::Equal);
}
