//! Explicit networks computing the coordinate maximum, plus seeded random
//! fixtures.
//!
//! The two-input maximum is `max(x1, x2) = relu(x1) - relu(-x1) + relu(x2 - x1)`,
//! three neurons in one hidden layer. Larger maxima are computed by a
//! tournament: each hidden layer takes pairwise maxima of the values of the
//! previous round, so `d` inputs need `ceil(log2 d)` rounds and depth
//! `ceil(log2 d) + 1`. A leftover value in an odd round is carried forward
//! through the identity pair `relu(x) - relu(-x)`, which keeps the network
//! exactly equal to the maximum on all of `R^d`, not just on nonnegative
//! inputs.

use num_traits::Zero;
use rand::Rng;

use crate::affine::AffineMap;
use crate::network::ReluNetwork;
use crate::rational::{rint, Rational};
use crate::sampling::rng_from_seed;
use crate::{Error, Result};

/// The three-neuron, depth-2 network computing `max(x1, x2)` on all of `R^2`.
///
/// Hidden rows are `(1,0)`, `(-1,0)`, `(-1,1)` with zero biases; the output
/// combines them with weights `(1, -1, 1)` and zero bias.
pub fn max2_gadget() -> ReluNetwork {
    let hidden = AffineMap::from_rows(
        vec![
            vec![rint(1), rint(0)],
            vec![rint(-1), rint(0)],
            vec![rint(-1), rint(1)],
        ],
        vec![rint(0); 3],
    )
    .expect("static shape");
    let output = AffineMap::from_rows(vec![vec![rint(1), rint(-1), rint(1)]], vec![rint(0)])
        .expect("static shape");
    ReluNetwork::new(2, vec![hidden], output).expect("static shape")
}

/// Sparse linear combination of the previous layer's neurons.
type Combo = Vec<(usize, Rational)>;

fn combo_row(width: usize, combo: &Combo, scale: i64) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); width];
    for (idx, coeff) in combo {
        row[*idx] += coeff * rint(scale);
    }
    row
}

/// Tournament network computing the maximum of `d` inputs on all of `R^d`,
/// with depth `ceil(log2 d) + 1`. For `d = 1` the result is the depth-1
/// affine identity.
pub fn tournament_max(d: usize) -> Result<ReluNetwork> {
    if d == 0 {
        return Err(Error::InvalidInput(
            "tournament requires at least one input".into(),
        ));
    }
    if d == 1 {
        let output = AffineMap::from_rows(vec![vec![rint(1)]], vec![rint(0)])?;
        return ReluNetwork::new(1, vec![], output);
    }

    // Each surviving value is a linear combination of the current top
    // layer's neurons (of the inputs, before the first round).
    let mut values: Vec<Combo> = (0..d).map(|i| vec![(i, rint(1))]).collect();
    let mut prev_width = d;
    let mut hidden: Vec<AffineMap> = Vec::new();

    while values.len() > 1 {
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        let mut next_values: Vec<Combo> = Vec::new();
        let mut chunks = values.chunks_exact(2);
        for pair in chunks.by_ref() {
            let (a, b) = (&pair[0], &pair[1]);
            let base = rows.len();
            rows.push(combo_row(prev_width, a, 1));
            rows.push(combo_row(prev_width, a, -1));
            let mut diff = combo_row(prev_width, b, 1);
            for (i, v) in combo_row(prev_width, a, -1).into_iter().enumerate() {
                diff[i] += v;
            }
            rows.push(diff);
            // max(a, b) = relu(a) - relu(-a) + relu(b - a)
            next_values.push(vec![(base, rint(1)), (base + 1, rint(-1)), (base + 2, rint(1))]);
        }
        if let [leftover] = chunks.remainder() {
            let base = rows.len();
            rows.push(combo_row(prev_width, leftover, 1));
            rows.push(combo_row(prev_width, leftover, -1));
            // carry = relu(x) - relu(-x)
            next_values.push(vec![(base, rint(1)), (base + 1, rint(-1))]);
        }
        let width = rows.len();
        let biases = vec![Rational::zero(); width];
        hidden.push(AffineMap::new(rows, biases, prev_width)?);
        prev_width = width;
        values = next_values;
    }

    let output_row = combo_row(prev_width, &values[0], 1);
    let output = AffineMap::new(vec![output_row], vec![Rational::zero()], prev_width)?;
    ReluNetwork::new(d, hidden, output)
}

/// Grid of rationals `{k/denom : min_num <= k <= max_num}` used for random
/// fixtures; never a continuous distribution, so runs reproduce exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalGrid {
    pub min_num: i64,
    pub max_num: i64,
    pub denom: u64,
}

impl RationalGrid {
    pub fn new(min_num: i64, max_num: i64, denom: u64) -> Result<Self> {
        if min_num > max_num || denom == 0 {
            return Err(Error::InvalidInput(format!(
                "bad rational grid {min_num}..{max_num}/{denom}"
            )));
        }
        Ok(RationalGrid {
            min_num,
            max_num,
            denom,
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Rational {
        let k = rng.gen_range(self.min_num..=self.max_num);
        Rational::new(k.into(), self.denom.into())
    }
}

/// Deterministic random network with weights and biases drawn uniformly
/// from `grid`. Layer widths are the hidden widths; the output map is 1-row.
pub fn random_network(
    input_dim: usize,
    layer_widths: &[usize],
    grid: RationalGrid,
    seed: u64,
) -> Result<ReluNetwork> {
    if input_dim == 0 {
        return Err(Error::InvalidInput("input dimension must be positive".into()));
    }
    if layer_widths.is_empty() {
        return Err(Error::InvalidInput("layer width list must be nonempty".into()));
    }
    if layer_widths.contains(&0) {
        return Err(Error::InvalidInput("layer widths must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut prev = input_dim;
    let mut hidden = Vec::with_capacity(layer_widths.len());
    for &w in layer_widths {
        let rows: Vec<Vec<Rational>> = (0..w)
            .map(|_| (0..prev).map(|_| grid.sample(&mut rng)).collect())
            .collect();
        let biases: Vec<Rational> = (0..w).map(|_| grid.sample(&mut rng)).collect();
        hidden.push(AffineMap::new(rows, biases, prev)?);
        prev = w;
    }
    let out_row: Vec<Rational> = (0..prev).map(|_| grid.sample(&mut rng)).collect();
    let out_bias = grid.sample(&mut rng);
    let output = AffineMap::new(vec![out_row], vec![out_bias], prev)?;
    ReluNetwork::new(input_dim, hidden, output)
}

/// Independent oracle: the plain coordinate maximum.
pub fn max_oracle(x: &[Rational]) -> Rational {
    x.iter().max().expect("nonempty input").clone()
}
