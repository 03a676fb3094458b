//! Canonicalization of depth-2 networks and their non-differentiability
//! hyperplanes.
//!
//! For a depth-2 network `sum_j v_j relu(w_j . x + b_j) + b_0` the set of
//! non-differentiable points is a union of at most width-many hyperplanes,
//! but not simply the union of all neuron hyperplanes: neurons with zero
//! output weight or zero weight vector contribute none, parallel neurons on
//! the same hyperplane merge, and an antiparallel pair whose slope change
//! cancels (`v_j = alpha v_k` for `w_k = alpha w_j`, `alpha < 0`) leaves a
//! differentiable hyperplane. Simplification is function-preserving: zero
//! weight vectors fold `v relu(b)` into the output bias, zero output
//! weights are dropped, same-side duplicates merge into one neuron with
//! output weight `v_j + alpha v_k`, and smoothed pairs are kept but
//! reported.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::network::ReluNetwork;
use crate::rational::{relu, Rational};
use crate::{Error, Result};

/// A hyperplane `{x : normal . x + offset = 0}` in canonical scaling: the
/// first nonzero entry of `normal` is 1, so equal sets compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hyperplane {
    #[serde(with = "crate::rational::serde_string_vec")]
    pub normal: Vec<Rational>,
    #[serde(with = "crate::rational::serde_string")]
    pub offset: Rational,
}

impl Hyperplane {
    /// Canonicalizes `normal . x + offset = 0`; the normal must be nonzero.
    pub fn canonical(normal: &[Rational], offset: &Rational) -> Result<Self> {
        let lead = normal
            .iter()
            .find(|w| !w.is_zero())
            .ok_or_else(|| Error::InvalidInput("hyperplane normal must be nonzero".into()))?
            .clone();
        Ok(Hyperplane {
            normal: normal.iter().map(|w| w / &lead).collect(),
            offset: offset / &lead,
        })
    }
}

/// An antiparallel neuron pair on one hyperplane whose slope change
/// cancels; indices refer to the simplified network's hidden layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothedPair {
    pub neuron_a: usize,
    pub neuron_b: usize,
    pub hyperplane: Hyperplane,
}

struct Neuron {
    index: usize,
    weights: Vec<Rational>,
    bias: Rational,
    out_weight: Rational,
    // leading coefficient relative to the canonical hyperplane normal
    scale: Rational,
}

/// Function-preserving canonicalization of a depth-2 network.
///
/// Returns the simplified network together with the surviving antiparallel
/// pairs whose shared hyperplane is differentiable.
pub fn depth2_simplify(net: &ReluNetwork) -> Result<(ReluNetwork, Vec<SmoothedPair>)> {
    if net.depth() != 2 {
        return Err(Error::InvalidInput(format!(
            "simplification requires a depth-2 network, got depth {}",
            net.depth()
        )));
    }
    let layer = &net.hidden()[0];
    let mut out_bias = net.output().bias(0).clone();

    // fold zero-weight-vector neurons into the output bias, drop neurons
    // the output ignores
    let mut groups: BTreeMap<Hyperplane, Vec<Neuron>> = BTreeMap::new();
    for i in 0..layer.out_dim() {
        let v = net.output().row(0)[i].clone();
        let w = layer.row(i);
        let b = layer.bias(i).clone();
        if w.iter().all(Rational::is_zero) {
            out_bias += &v * relu(&b);
            continue;
        }
        if v.is_zero() {
            continue;
        }
        // the canonical key separates parallel-but-distinct hyperplanes,
        // since the offset is scaled by the same leading coefficient
        let plane = Hyperplane::canonical(w, &b)?;
        let scale = w
            .iter()
            .find(|x| !x.is_zero())
            .expect("nonzero weight vector")
            .clone();
        groups.entry(plane).or_default().push(Neuron {
            index: i,
            weights: w.to_vec(),
            bias: b,
            out_weight: v,
            scale,
        });
    }

    // merge each side of each hyperplane onto its first neuron
    let mut kept: Vec<Neuron> = Vec::new();
    let mut pair_candidates: Vec<(usize, usize, Hyperplane)> = Vec::new();
    for (plane, members) in groups {
        let merge_side = |side: Vec<&Neuron>| -> Option<Neuron> {
            let rep = side.first()?;
            let mut out_weight = Rational::zero();
            for n in &side {
                // n.weights = (n.scale / rep.scale) * rep.weights
                out_weight += &n.out_weight * &n.scale / &rep.scale;
            }
            Some(Neuron {
                index: rep.index,
                weights: rep.weights.clone(),
                bias: rep.bias.clone(),
                out_weight,
                scale: rep.scale.clone(),
            })
        };
        let positive = merge_side(
            members
                .iter()
                .filter(|n| n.scale > Rational::zero())
                .collect(),
        );
        let negative = merge_side(
            members
                .iter()
                .filter(|n| n.scale < Rational::zero())
                .collect(),
        );
        let survivors: Vec<Neuron> = [positive, negative]
            .into_iter()
            .flatten()
            .filter(|n| !n.out_weight.is_zero())
            .collect();
        if let [a, b] = survivors.as_slice() {
            // w_b = alpha w_a with alpha < 0; the pair is smooth iff
            // v_a = alpha v_b
            let alpha = &b.scale / &a.scale;
            if a.out_weight == &alpha * &b.out_weight {
                pair_candidates.push((a.index, b.index, plane.clone()));
            }
        }
        kept.extend(survivors);
    }
    kept.sort_by_key(|n| n.index);

    let position: BTreeMap<usize, usize> = kept
        .iter()
        .enumerate()
        .map(|(pos, n)| (n.index, pos))
        .collect();
    let smoothed = pair_candidates
        .into_iter()
        .map(|(a, b, hyperplane)| {
            let (mut a, mut b) = (position[&a], position[&b]);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            SmoothedPair {
                neuron_a: a,
                neuron_b: b,
                hyperplane,
            }
        })
        .collect();

    let simplified = if kept.is_empty() {
        // all neurons folded away: constant network, keep depth 2 with a
        // single dead neuron so the depth contract is preserved
        let zero_row = vec![Rational::zero(); net.input_dim()];
        let hidden = AffineMap::new(vec![zero_row], vec![Rational::zero()], net.input_dim())?;
        let output = AffineMap::new(vec![vec![Rational::zero()]], vec![out_bias], 1)?;
        ReluNetwork::new(net.input_dim(), vec![hidden], output)?
    } else {
        let rows: Vec<Vec<Rational>> = kept.iter().map(|n| n.weights.clone()).collect();
        let biases: Vec<Rational> = kept.iter().map(|n| n.bias.clone()).collect();
        let out_row: Vec<Rational> = kept.iter().map(|n| n.out_weight.clone()).collect();
        let hidden = AffineMap::new(rows, biases, net.input_dim())?;
        let output = AffineMap::new(vec![out_row], vec![out_bias], kept.len())?;
        ReluNetwork::new(net.input_dim(), vec![hidden], output)?
    };
    Ok((simplified, smoothed))
}

/// The canonical hyperplanes on which a depth-2 network is
/// non-differentiable: the hyperplanes surviving simplification, minus the
/// smoothed pairs. Never more than the original width.
pub fn nondiff_hyperplanes(net: &ReluNetwork) -> Result<BTreeSet<Hyperplane>> {
    let (simplified, smoothed) = depth2_simplify(net)?;
    let layer = &simplified.hidden()[0];
    let mut planes = BTreeSet::new();
    for i in 0..layer.out_dim() {
        if layer.row(i).iter().all(Rational::is_zero) {
            continue; // the dead neuron of a constant network
        }
        if simplified.output().row(0)[i].is_zero() {
            continue;
        }
        planes.insert(Hyperplane::canonical(layer.row(i), layer.bias(i))?);
    }
    for pair in &smoothed {
        planes.remove(&pair.hyperplane);
    }
    Ok(planes)
}
