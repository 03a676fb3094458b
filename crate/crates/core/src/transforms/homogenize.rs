//! Bias shifting and homogenization.
//!
//! Shifting recenters a network that computes some target on `[0,1]^d` so
//! that it computes the recentered target on `[-c, 1-c]^d`: every first-map
//! bias gains `c` times its row sum and the output bias drops by `c`.
//!
//! Homogenization then pushes biases forward layer by layer. A negative
//! bias means the neuron is inactive near the origin, so it is dropped
//! together with its outgoing weights. A positive bias `b` on a neuron with
//! weights `w` is simulated near the origin by the unbiased pair `(w, -w)`:
//! a successor with incoming weight `v` reads the pair with weights
//! `(v, -v)` and gains `v b` on its own bias, since
//! `v relu(w.x) - v relu(-w.x) + v b = v (w.x + b)`. Each neuron becomes at
//! most two, so the width at most doubles and the depth is unchanged. The
//! residual output bias is dropped at the end and recorded in diagnostics.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::network::ReluNetwork;
use crate::rational::{rat, Rational};
use crate::{Error, Result};

/// Recenters a `[0,1]^d` computation to `[-c, 1-c]^d`.
///
/// Architecture is unchanged; only the first affine map's biases and the
/// output bias move. `c = 0` is the identity transformation.
pub fn shift_to_centered(net: &ReluNetwork, c: &Rational) -> Result<ReluNetwork> {
    if c.is_negative() || c >= &Rational::from_integer(1.into()) {
        return Err(Error::InvalidInput(format!(
            "shift constant must lie in [0, 1), got {c}"
        )));
    }
    let mut hidden: Vec<AffineMap> = net.hidden().to_vec();
    let mut output = net.output().clone();
    {
        let first = hidden.first().unwrap_or(&output).clone();
        let shifted = add_row_sums(&first, c)?;
        if hidden.is_empty() {
            output = shifted;
        } else {
            hidden[0] = shifted;
        }
    }
    let out_bias = output.bias(0) - c;
    let output = AffineMap::new(output.rows().to_vec(), vec![out_bias], output.in_dim())?;
    ReluNetwork::new(net.input_dim(), hidden, output)
}

fn add_row_sums(map: &AffineMap, c: &Rational) -> Result<AffineMap> {
    let biases = map
        .rows()
        .iter()
        .zip(map.biases())
        .map(|(row, b)| {
            let mut sum = Rational::zero();
            for w in row {
                if !w.is_zero() {
                    sum += w;
                }
            }
            b + c * sum
        })
        .collect();
    AffineMap::new(map.rows().to_vec(), biases, map.in_dim())
}

/// Per-run record of a homogenization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogenizeDiagnostics {
    /// Chosen shift constant.
    #[serde(with = "crate::rational::serde_string")]
    pub shift_constant: Rational,
    /// Nonzero weight count per first-layer neuron of the result.
    pub first_layer_nonzero_counts: Vec<usize>,
    /// First-layer neurons of the result with fewer than two nonzero
    /// weights; checked, never assumed absent.
    pub single_nonzero_neurons: Vec<usize>,
    /// Output bias accumulated by the forward pushes and dropped at the end.
    #[serde(with = "crate::rational::serde_string")]
    pub dropped_output_bias: Rational,
    pub removed_neurons: usize,
    pub split_neurons: usize,
}

/// Shifts by `c` and removes every bias, producing a positively homogeneous
/// network of the same depth and at most twice the width.
///
/// `c` must lie in `[2/5, 3/5]`. For a network equal to the coordinate
/// maximum on the unit box, the result equals the maximum near the origin
/// and hence, by homogeneity, on all of `R^d`.
pub fn homogenize(net: &ReluNetwork, c: &Rational) -> Result<(ReluNetwork, HomogenizeDiagnostics)> {
    if c < &rat(2, 5) || c > &rat(3, 5) {
        return Err(Error::InvalidInput(format!(
            "homogenization constant must lie in [2/5, 3/5], got {c}"
        )));
    }
    let shifted = shift_to_centered(net, c)?;
    let mut hidden: Vec<AffineMap> = shifted.hidden().to_vec();
    let mut output = shifted.output().clone();
    let mut removed_neurons = 0;
    let mut split_neurons = 0;

    for t in 0..hidden.len() {
        let layer = hidden[t].clone();
        let successor = if t + 1 < hidden.len() {
            hidden[t + 1].clone()
        } else {
            output.clone()
        };
        let (new_layer, new_successor, removed, split) = push_biases(&layer, &successor)?;
        removed_neurons += removed;
        split_neurons += split;
        hidden[t] = new_layer;
        if t + 1 < hidden.len() {
            hidden[t + 1] = new_successor;
        } else {
            output = new_successor;
        }
    }

    let dropped_output_bias = output.bias(0).clone();
    let output = AffineMap::new(
        output.rows().to_vec(),
        vec![Rational::zero()],
        output.in_dim(),
    )?;
    let result = ReluNetwork::new(net.input_dim(), hidden, output)?;

    let first_layer_nonzero_counts: Vec<usize> = match result.hidden().first() {
        Some(first) => (0..first.out_dim()).map(|i| first.row_nonzeros(i)).collect(),
        None => Vec::new(),
    };
    let single_nonzero_neurons = first_layer_nonzero_counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n < 2)
        .map(|(i, _)| i)
        .collect();
    let diagnostics = HomogenizeDiagnostics {
        shift_constant: c.clone(),
        first_layer_nonzero_counts,
        single_nonzero_neurons,
        dropped_output_bias,
        removed_neurons,
        split_neurons,
    };
    Ok((result, diagnostics))
}

/// Rewrites one hidden layer to zero biases, adjusting its successor.
/// Returns the new layer, the new successor, and the removed/split counts.
fn push_biases(
    layer: &AffineMap,
    successor: &AffineMap,
) -> Result<(AffineMap, AffineMap, usize, usize)> {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut removed = 0;
    let mut split = 0;
    // successor column indices for each new neuron, with sign and the bias
    // contribution of split neurons
    enum Source {
        Keep(usize),
        SplitPos(usize),
        SplitNeg(usize),
    }
    let mut sources: Vec<Source> = Vec::new();
    let mut bias_push: Vec<(usize, Rational)> = Vec::new();

    for i in 0..layer.out_dim() {
        let b = layer.bias(i);
        if b.is_negative() {
            removed += 1;
        } else if b.is_zero() {
            rows.push(layer.row(i).to_vec());
            sources.push(Source::Keep(i));
        } else {
            rows.push(layer.row(i).to_vec());
            sources.push(Source::SplitPos(i));
            rows.push(layer.row(i).iter().map(|w| -w.clone()).collect());
            sources.push(Source::SplitNeg(i));
            bias_push.push((i, b.clone()));
            split += 1;
        }
    }

    let new_width = rows.len();
    let new_layer = AffineMap::new(rows, vec![Rational::zero(); new_width], layer.in_dim())?;

    let succ_rows: Vec<Vec<Rational>> = (0..successor.out_dim())
        .map(|s| {
            sources
                .iter()
                .map(|src| match src {
                    Source::Keep(i) | Source::SplitPos(i) => successor.row(s)[*i].clone(),
                    Source::SplitNeg(i) => -successor.row(s)[*i].clone(),
                })
                .collect()
        })
        .collect();
    let succ_biases: Vec<Rational> = (0..successor.out_dim())
        .map(|s| {
            let mut b = successor.bias(s).clone();
            for (i, push) in &bias_push {
                let v = &successor.row(s)[*i];
                if !v.is_zero() {
                    b += v * push;
                }
            }
            b
        })
        .collect();
    let new_successor = AffineMap::new(succ_rows, succ_biases, new_width)?;
    Ok((new_layer, new_successor, removed, split))
}
