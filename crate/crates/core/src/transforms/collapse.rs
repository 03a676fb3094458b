//! Collapse of a first hidden layer whose activations never change.
//!
//! With every first-layer neuron certified always-on or always-off on the
//! box, the layer is affine there: always-off neurons contribute zero (so
//! their outgoing weights vanish) and always-on neurons pass their
//! pre-activation through. Composing that affine map into the second layer
//! removes one hidden layer; depth drops by exactly one and the width does
//! not grow.

use crate::network::ReluNetwork;
use crate::transforms::SignCertificate;
use crate::{Error, Result};

/// Composes the first hidden layer into the second under a certificate
/// fixing every first-layer activation. The result agrees with the input
/// network on the certificate's box.
pub fn collapse_first_layer(net: &ReluNetwork, cert: &SignCertificate) -> Result<ReluNetwork> {
    if net.depth() < 3 {
        return Err(Error::InvalidInput(format!(
            "collapse requires depth >= 3, got {}",
            net.depth()
        )));
    }
    if cert.free_dim != net.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "certificate covers a {}-dimensional box, network takes {} inputs",
            cert.free_dim,
            net.input_dim()
        )));
    }
    let first = &net.hidden()[0];
    let second = &net.hidden()[1];
    if cert.neurons.len() != first.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "certificate covers {} neurons, first layer has {}",
            cert.neurons.len(),
            first.out_dim()
        )));
    }
    let mask = cert.activation_mask()?;
    // relu(first) == masked(first) on the certified box
    let composed = second.compose(&first.masked(&mask));
    let mut hidden = vec![composed];
    hidden.extend_from_slice(&net.hidden()[2..]);
    ReluNetwork::new(net.input_dim(), hidden, net.output().clone())
}
