//! The full depth-reduction pipeline: homogenize, build the weight graph,
//! find a clique, assign negative values outside it, certify fixed
//! activations, restrict, and collapse the first hidden layer.
//!
//! Every failure mode is a report outcome, not an error; the report embeds
//! all intermediate artifacts so it can be re-checked independently.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{depth_hypothesis_holds, guaranteed_clique_size};
use crate::domain::BoxDomain;
use crate::graph::{find_clique, first_layer_graph, max_clique, WeightGraph};
use crate::network::ReluNetwork;
use crate::rational::{rat, Rational};
use crate::sampling::rng_from_seed;
use crate::transforms::{
    fixed_activation_analysis, homogenize, negative_assignment, restrict_inputs,
    collapse_first_layer, AssignmentPlan, HomogenizeDiagnostics, SignCertificate,
};

const SHIFT_GRID_STEPS: i64 = 200;
const SHIFT_RETRIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionOutcome {
    /// The first hidden layer was collapsed; the collapsed network should
    /// compute the clique-sized maximum on the unit box whenever the input
    /// network computed the full maximum there.
    Collapsed,
    /// No clique of the required size exists in the weight graph.
    NoClique,
    /// Some first-layer neuron changes activation on the free box.
    ActivationNotFixed,
    /// A precondition failed (depth, domain, or assignment support).
    PreconditionFailed,
}

/// All artifacts of one pipeline run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub input_net: ReluNetwork,
    #[serde(with = "crate::rational::serde_string_opt")]
    pub shift_constant: Option<Rational>,
    pub homogenized: Option<ReluNetwork>,
    pub homogenize_diagnostics: Option<HomogenizeDiagnostics>,
    pub weight_graph: Option<WeightGraph>,
    pub clique: Option<Vec<usize>>,
    pub assignment: Option<AssignmentPlan>,
    pub sign_certificate: Option<SignCertificate>,
    pub restricted: Option<ReluNetwork>,
    pub collapsed: Option<ReluNetwork>,
    pub outcome: ReductionOutcome,
    pub notes: Vec<String>,
}

impl ReductionReport {
    fn starting_from(net: &ReluNetwork) -> Self {
        ReductionReport {
            input_net: net.clone(),
            shift_constant: None,
            homogenized: None,
            homogenize_diagnostics: None,
            weight_graph: None,
            clique: None,
            assignment: None,
            sign_certificate: None,
            restricted: None,
            collapsed: None,
            outcome: ReductionOutcome::PreconditionFailed,
            notes: Vec::new(),
        }
    }

    fn fail(mut self, note: String) -> Self {
        self.outcome = ReductionOutcome::PreconditionFailed;
        self.notes.push(note);
        self
    }
}

/// Whether the homogenized width `w` satisfies `w <= (1/5) d^(1 + alpha_k)`,
/// decided exactly as `(5w)^q <= d^p`.
fn width_premise_holds(d: u64, k: u32, width: usize) -> bool {
    if !(3..=6).contains(&k) {
        return false;
    }
    let p = 1u32 << (k - 2);
    let q = p - 1;
    let lhs = BigUint::from(5 * width as u64).pow(q);
    let rhs = BigUint::from(d).pow(p);
    lhs <= rhs
}

/// Runs the reduction pipeline with a seeded shift constant.
///
/// `assume_max_on` is the box on which the input network is assumed to
/// compute the coordinate maximum; the recentering arithmetic is specific
/// to the unit box, so any other box fails the precondition.
pub fn reduce_pipeline(
    net: &ReluNetwork,
    assume_max_on: &BoxDomain,
    seed: u64,
) -> ReductionReport {
    let mut report = ReductionReport::starting_from(net);
    if net.depth() < 3 {
        return report.fail(format!(
            "pipeline requires depth >= 3, input has depth {}",
            net.depth()
        ));
    }
    let unit = BoxDomain::unit(net.input_dim());
    if assume_max_on != &unit {
        return report.fail("the pipeline recentering supports only the unit box".into());
    }

    // Seeded choice of the shift constant from the grid 2/5 + i/1000,
    // retried while the homogenized first layer has single-nonzero neurons.
    let mut rng = rng_from_seed(seed);
    let mut attempt = 0;
    let (constant, homogenized, diagnostics) = loop {
        let i = rng.gen_range(0..=SHIFT_GRID_STEPS);
        let c = rat(2, 5) + Rational::new(i.into(), 1000.into());
        match homogenize(net, &c) {
            Ok((h, diag)) => {
                attempt += 1;
                if diag.single_nonzero_neurons.is_empty() || attempt > SHIFT_RETRIES {
                    if !diag.single_nonzero_neurons.is_empty() {
                        report.notes.push(format!(
                            "first-layer neurons {:?} still have fewer than two nonzero \
                             weights after {attempt} shift attempts",
                            diag.single_nonzero_neurons
                        ));
                    }
                    break (c, h, diag);
                }
                report
                    .notes
                    .push(format!("shift constant {c} left single-nonzero neurons, resampling"));
            }
            Err(e) => return report.fail(format!("homogenization failed: {e}")),
        }
    };
    report.shift_constant = Some(constant);
    report.homogenized = Some(homogenized.clone());
    report.homogenize_diagnostics = Some(diagnostics);

    let graph = first_layer_graph(&homogenized);
    report.weight_graph = Some(graph.clone());

    let d = net.input_dim() as u64;
    let k = net.depth() as u32;
    let premise =
        depth_hypothesis_holds(d, k) && width_premise_holds(d, k, homogenized.width());
    let clique = if premise {
        let r = match guaranteed_clique_size(d, k) {
            Ok(r) => r as usize,
            Err(e) => return report.fail(format!("clique size computation failed: {e}")),
        };
        report
            .notes
            .push(format!("width premise holds; searching for a clique of size {r}"));
        find_clique(&graph, r)
    } else {
        report
            .notes
            .push("width premise does not hold; using the largest clique found".into());
        match max_clique(&graph) {
            Ok(c) if c.len() >= 2 => Some(c),
            _ => None,
        }
    };
    let clique = match clique {
        Some(c) => c,
        None => {
            report.outcome = ReductionOutcome::NoClique;
            report
                .notes
                .push("no usable clique (size >= 2) in the weight graph".into());
            return report;
        }
    };
    report.clique = Some(clique.clone());

    let plan = match negative_assignment(&homogenized, &clique) {
        Ok(p) => p,
        Err(e) => return report.fail(format!("negative assignment failed: {e}")),
    };
    report.assignment = Some(plan.clone());

    let cert = match fixed_activation_analysis(&homogenized, &plan) {
        Ok(c) => c,
        Err(e) => return report.fail(format!("sign analysis failed: {e}")),
    };
    let all_fixed = cert.all_fixed();
    report.sign_certificate = Some(cert.clone());
    if !all_fixed {
        report.outcome = ReductionOutcome::ActivationNotFixed;
        if let Some(i) = cert.first_not_fixed() {
            report
                .notes
                .push(format!("first-layer neuron {i} changes activation on the box"));
        }
        return report;
    }

    let restricted = match restrict_inputs(&homogenized, &plan) {
        Ok(r) => r,
        Err(e) => return report.fail(format!("input restriction failed: {e}")),
    };
    report.restricted = Some(restricted.clone());

    match collapse_first_layer(&restricted, &cert) {
        Ok(collapsed) => {
            report.collapsed = Some(collapsed);
            report.outcome = ReductionOutcome::Collapsed;
            report.notes.push(format!(
                "collapsed to depth {} over {} inputs",
                net.depth() - 1,
                plan.clique_size()
            ));
        }
        Err(e) => {
            report = report.fail(format!("collapse failed: {e}"));
        }
    }
    report
}

/// Internal consistency of a report: artifacts present match the outcome.
pub fn report_is_consistent(report: &ReductionReport) -> bool {
    let stage_chain = [
        report.shift_constant.is_some(),
        report.homogenized.is_some(),
        report.weight_graph.is_some(),
        report.clique.is_some(),
        report.assignment.is_some(),
        report.sign_certificate.is_some(),
        report.restricted.is_some(),
        report.collapsed.is_some(),
    ];
    // artifacts fill a prefix of the pipeline
    let mut seen_missing = false;
    for present in stage_chain {
        if seen_missing && present {
            return false;
        }
        if !present {
            seen_missing = true;
        }
    }
    match report.outcome {
        ReductionOutcome::Collapsed => {
            report.collapsed.is_some()
                && report
                    .collapsed
                    .as_ref()
                    .zip(report.restricted.as_ref())
                    .map(|(c, r)| c.depth() + 1 == r.depth())
                    .unwrap_or(false)
        }
        ReductionOutcome::NoClique => report.clique.is_none(),
        ReductionOutcome::ActivationNotFixed => {
            report.sign_certificate.is_some() && report.collapsed.is_none()
        }
        ReductionOutcome::PreconditionFailed => {
            report.collapsed.is_none() && !report.notes.is_empty()
        }
    }
}
