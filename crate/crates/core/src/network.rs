//! The ReLU network data model: ordered hidden affine layers with an
//! elementwise rectifier after each, followed by a single affine output.
//!
//! Networks are immutable values; every transformation in this crate builds
//! a new network, so intermediate artifacts of a pipeline stay available.

use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::rational::{relu, Rational};
use crate::{Error, Result};

/// A fully connected feed-forward ReLU network computing a function
/// `R^d -> R`.
///
/// Depth is the number of hidden layers plus one, width the largest hidden
/// layer, size the total neuron count including the output neuron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReluNetwork {
    input_dim: usize,
    hidden: Vec<AffineMap>,
    output: AffineMap,
}

/// Structural metrics and dimension-chain diagnosis for a network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub depth: usize,
    pub width: usize,
    pub size: usize,
    pub dimension_chain_ok: bool,
    pub issues: Vec<String>,
}

/// Checks the dimension chain of raw parts and reports the structural
/// metrics. Failures are carried in the report rather than thrown.
pub fn validate_parts(input_dim: usize, hidden: &[AffineMap], output: &AffineMap) -> NetworkReport {
    let mut issues = Vec::new();
    if input_dim == 0 {
        issues.push("input dimension must be positive".to_string());
    }
    let mut expected = input_dim;
    for (i, layer) in hidden.iter().enumerate() {
        if layer.in_dim() != expected {
            issues.push(format!(
                "hidden layer {i} expects input width {expected} but has {}",
                layer.in_dim()
            ));
        }
        expected = layer.out_dim();
    }
    if output.in_dim() != expected {
        issues.push(format!(
            "output map expects input width {expected} but has {}",
            output.in_dim()
        ));
    }
    if output.out_dim() != 1 {
        issues.push(format!(
            "output map must have exactly one output, found {}",
            output.out_dim()
        ));
    }
    NetworkReport {
        depth: hidden.len() + 1,
        width: hidden.iter().map(AffineMap::out_dim).max().unwrap_or(0),
        size: hidden.iter().map(AffineMap::out_dim).sum::<usize>() + 1,
        dimension_chain_ok: issues.is_empty(),
        issues,
    }
}

impl ReluNetwork {
    /// Builds a network, rejecting broken dimension chains.
    pub fn new(input_dim: usize, hidden: Vec<AffineMap>, output: AffineMap) -> Result<Self> {
        let report = validate_parts(input_dim, &hidden, &output);
        if !report.dimension_chain_ok {
            return Err(Error::DimensionMismatch(report.issues.join("; ")));
        }
        Ok(ReluNetwork {
            input_dim,
            hidden,
            output,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> &[AffineMap] {
        &self.hidden
    }

    pub fn output(&self) -> &AffineMap {
        &self.output
    }

    /// Number of hidden layers plus one.
    pub fn depth(&self) -> usize {
        self.hidden.len() + 1
    }

    /// Neuron count of the largest hidden layer (0 for depth-1 networks).
    pub fn width(&self) -> usize {
        self.hidden.iter().map(AffineMap::out_dim).max().unwrap_or(0)
    }

    /// Total neuron count across hidden layers plus the output neuron.
    pub fn size(&self) -> usize {
        self.hidden.iter().map(AffineMap::out_dim).sum::<usize>() + 1
    }

    pub fn report(&self) -> NetworkReport {
        validate_parts(self.input_dim, &self.hidden, &self.output)
    }

    /// Exact forward pass: rectifier after every hidden map, affine output.
    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "input has {} coordinates, network expects {}",
                x.len(),
                self.input_dim
            )));
        }
        let mut state: Vec<Rational> = x.to_vec();
        for layer in &self.hidden {
            state = layer.apply(&state).iter().map(relu).collect();
        }
        let out = self.output.apply(&state);
        Ok(out.into_iter().next().expect("output map has one row"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::max2_gadget;
    use crate::rational::{rat, rint};

    #[test]
    fn eval_max2_gadget_interior_point() {
        // relu(1/3) - relu(-1/3) + relu(2/3 - 1/3) = 1/3 + 1/3
        let net = max2_gadget();
        let y = net.eval(&[rat(1, 3), rat(2, 3)]).unwrap();
        assert_eq!(y, rat(2, 3));
    }

    #[test]
    fn eval_zero_biases_at_zero_is_output_bias() {
        let net = max2_gadget();
        assert_eq!(net.eval(&[rint(0), rint(0)]).unwrap(), rint(0));
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let net = max2_gadget();
        assert!(matches!(
            net.eval(&[rint(1)]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn metrics_of_max2_gadget() {
        let net = max2_gadget();
        let report = net.report();
        assert_eq!(report.depth, 2);
        assert_eq!(report.width, 3);
        assert_eq!(report.size, 4);
        assert!(report.dimension_chain_ok);
    }

    #[test]
    fn validate_flags_broken_chain() {
        let hidden = vec![AffineMap::from_rows(
            vec![vec![rint(1), rint(0)]],
            vec![rint(0)],
        )
        .unwrap()];
        // Output expects width 2 but the hidden layer produces width 1.
        let output =
            AffineMap::from_rows(vec![vec![rint(1), rint(1)]], vec![rint(0)]).unwrap();
        let report = validate_parts(2, &hidden, &output);
        assert!(!report.dimension_chain_ok);
        assert!(ReluNetwork::new(2, hidden, output).is_err());
    }
}
