//! Property tests for the interchange format and scalar parsing.

use proptest::prelude::*;
use relumax_core::io::{network_from_json, network_to_json};
use relumax_core::rational::{format_rational, parse_rational, Rational};
use relumax_core::{AffineMap, ReluNetwork};

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-999i64..=999, 1i64..=60).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn network_strategy() -> impl Strategy<Value = ReluNetwork> {
    (1usize..=3, proptest::collection::vec(1usize..=3, 0..=2)).prop_flat_map(
        |(input_dim, widths)| {
            let mut dims = vec![input_dim];
            dims.extend(&widths);
            let total_weights: usize = dims.windows(2).map(|w| w[0] * w[1]).sum::<usize>()
                + dims.last().unwrap();
            let total_biases: usize = widths.iter().sum::<usize>() + 1;
            (
                Just((input_dim, widths)),
                proptest::collection::vec(rational_strategy(), total_weights),
                proptest::collection::vec(rational_strategy(), total_biases),
            )
                .prop_map(|((input_dim, widths), mut weights, mut biases)| {
                    let mut hidden = Vec::new();
                    let mut prev = input_dim;
                    for &w in &widths {
                        let rows: Vec<Vec<Rational>> = (0..w)
                            .map(|_| weights.drain(..prev).collect())
                            .collect();
                        let bs: Vec<Rational> = biases.drain(..w).collect();
                        hidden.push(AffineMap::new(rows, bs, prev).unwrap());
                        prev = w;
                    }
                    let out_row: Vec<Rational> = weights.drain(..prev).collect();
                    let output =
                        AffineMap::new(vec![out_row], vec![biases.pop().unwrap()], prev).unwrap();
                    ReluNetwork::new(input_dim, hidden, output).unwrap()
                })
        },
    )
}

proptest! {
    #[test]
    fn json_round_trip_is_identity(net in network_strategy()) {
        let json = network_to_json(&net);
        let back = network_from_json(&json).unwrap();
        prop_assert_eq!(&net, &back);
        // serialization is canonical: a second trip is byte-identical
        prop_assert_eq!(json, network_to_json(&back));
    }

    #[test]
    fn rational_text_round_trip(q in rational_strategy()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn decimal_literals_parse_exactly(n in -9999i64..=9999, scale in 0u32..=4) {
        let denom = 10i64.pow(scale);
        let text = if scale == 0 {
            format!("{n}")
        } else {
            let sign = if n < 0 { "-" } else { "" };
            let mag = n.unsigned_abs();
            format!("{sign}{}.{:0width$}", mag / denom.unsigned_abs(), mag % denom.unsigned_abs(), width = scale as usize)
        };
        let parsed = parse_rational(&text).unwrap();
        prop_assert_eq!(parsed, Rational::new(n.into(), denom.into()));
    }

    #[test]
    fn eval_is_deterministic(net in network_strategy(), seed in 0u64..1000) {
        use relumax_core::sampling::{rng_from_seed, sample_point};
        use relumax_core::BoxDomain;
        let mut rng = rng_from_seed(seed);
        let domain = BoxDomain::unit(net.input_dim());
        let x = sample_point(&mut rng, &domain, 16);
        prop_assert_eq!(net.eval(&x).unwrap(), net.eval(&x).unwrap());
    }
}

#[test]
fn zero_rows_survive_round_trips() {
    use relumax_core::rational::rint;
    let hidden = AffineMap::new(
        vec![vec![rint(0), rint(0)], vec![rint(1), rint(-1)]],
        vec![rint(0), rint(3)],
        2,
    )
    .unwrap();
    let output = AffineMap::new(vec![vec![rint(0), rint(0)]], vec![rint(0)], 2).unwrap();
    let net = ReluNetwork::new(2, vec![hidden], output).unwrap();
    let back = network_from_json(&network_to_json(&net)).unwrap();
    assert_eq!(net, back);
}
