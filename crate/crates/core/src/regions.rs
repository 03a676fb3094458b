//! Enumeration of the full-dimensional activation regions of a network
//! over a box.
//!
//! The walk is a depth-first search over neurons in layer order, branching
//! active first. Every branch is pruned by an exact feasibility check of the
//! accumulated strict inequalities, so exactly the activation patterns whose
//! region has nonempty interior inside the box are produced, in a canonical
//! deterministic order. A neuron whose pre-activation is the identically
//! zero form gets no constraint and is recorded inactive.

use num_traits::Zero;

use crate::affine::AffineMap;
use crate::domain::BoxDomain;
use crate::lp::{feasible, Inequality, LinearSystem};
use crate::network::ReluNetwork;
use crate::rational::Rational;
use crate::Result;

/// One full-dimensional linear region of a network on a box.
///
/// `system` holds the strict pre-activation inequalities carving the region
/// (box bounds are kept separately); `affine_coeffs`/`affine_constant` is
/// the restriction of the network to the region; `witness` is an interior
/// point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRegion {
    pub pattern: Vec<Vec<bool>>,
    pub system: LinearSystem,
    pub affine_coeffs: Vec<Rational>,
    pub affine_constant: Rational,
    pub witness: Vec<Rational>,
}

impl LinearRegion {
    /// Whether `point` lies in the closure of the region.
    pub fn closure_contains(&self, point: &[Rational]) -> bool {
        self.system.closed().holds_at(point)
    }
}

/// Result of a bounded enumeration. `complete == false` means the region
/// budget was exhausted and `regions` is a prefix of the full list.
#[derive(Debug, Clone)]
pub struct RegionEnumeration {
    pub regions: Vec<LinearRegion>,
    pub complete: bool,
}

/// Enumerates all full-dimensional activation regions, stopping with an
/// explicit incompleteness flag once `budget` regions have been produced.
pub fn enumerate_regions(
    net: &ReluNetwork,
    domain: &BoxDomain,
    budget: u64,
) -> Result<RegionEnumeration> {
    let mut regions = Vec::new();
    let mut counter = 0u64;
    let walk = walk_regions(net, domain, &[], budget, &mut counter, &mut |region| {
        regions.push(region.clone());
        None::<()>
    })?;
    Ok(RegionEnumeration {
        regions,
        complete: matches!(walk, Walk::Done),
    })
}

/// Outcome of a short-circuiting region walk.
pub(crate) enum Walk<T> {
    /// All regions visited.
    Done,
    /// The visitor returned a value.
    Found(T),
    /// The budget was reached before the walk finished.
    Budget { regions: u64 },
}

/// Depth-first walk over the full-dimensional regions of `net` restricted to
/// the points of `domain` satisfying `base`. The shared `counter` is
/// incremented per region and checked against `budget`, which lets nested
/// walks share one budget.
pub(crate) fn walk_regions<T>(
    net: &ReluNetwork,
    domain: &BoxDomain,
    base: &[Inequality],
    budget: u64,
    counter: &mut u64,
    visit: &mut dyn FnMut(&LinearRegion) -> Option<T>,
) -> Result<Walk<T>> {
    let dim = net.input_dim();
    let base_system = LinearSystem::new(dim, base.to_vec())?;
    let start_witness = match feasible(&base_system, domain)? {
        Some(w) => w,
        None => return Ok(Walk::Done),
    };
    let mut walker = Walker {
        net,
        domain,
        budget,
        counter,
        visit,
        constraints: base.to_vec(),
        pattern: Vec::new(),
        witness: start_witness,
    };
    let identity = AffineMap::identity(dim);
    walker.layer(0, &identity)
}

struct Walker<'a, T> {
    net: &'a ReluNetwork,
    domain: &'a BoxDomain,
    budget: u64,
    counter: &'a mut u64,
    visit: &'a mut dyn FnMut(&LinearRegion) -> Option<T>,
    constraints: Vec<Inequality>,
    pattern: Vec<Vec<bool>>,
    witness: Vec<Rational>,
}

impl<'a, T> Walker<'a, T> {
    fn layer(&mut self, t: usize, post_prev: &AffineMap) -> Result<Walk<T>> {
        if t == self.net.hidden().len() {
            return self.leaf(post_prev);
        }
        let pre = self.net.hidden()[t].compose(post_prev);
        let mut acts = Vec::with_capacity(pre.out_dim());
        self.neuron(t, &pre, &mut acts)
    }

    fn neuron(&mut self, t: usize, pre: &AffineMap, acts: &mut Vec<bool>) -> Result<Walk<T>> {
        let i = acts.len();
        if i == pre.out_dim() {
            let post = pre.masked(acts);
            self.pattern.push(acts.clone());
            let result = self.layer(t + 1, &post);
            self.pattern.pop();
            return result;
        }
        let coeffs = pre.row(i).to_vec();
        let offset = pre.bias(i).clone();
        if coeffs.iter().all(Rational::is_zero) && offset.is_zero() {
            // Identically zero pre-activation: the rectifier output is zero
            // either way; record inactive without carving a constraint.
            acts.push(false);
            let result = self.neuron(t, pre, acts);
            acts.pop();
            return result;
        }
        for active in [true, false] {
            let ineq = if active {
                Inequality::gt(coeffs.clone(), offset.clone())
            } else {
                Inequality::gt(
                    coeffs.iter().map(|c| -c.clone()).collect(),
                    -offset.clone(),
                )
            };
            self.constraints.push(ineq);
            let system = LinearSystem::new(self.net.input_dim(), self.constraints.clone())?;
            if let Some(w) = feasible(&system, self.domain)? {
                let saved = std::mem::replace(&mut self.witness, w);
                acts.push(active);
                let result = self.neuron(t, pre, acts)?;
                acts.pop();
                self.witness = saved;
                self.constraints.pop();
                match result {
                    Walk::Done => {}
                    other => return Ok(other),
                }
            } else {
                self.constraints.pop();
            }
        }
        Ok(Walk::Done)
    }

    fn leaf(&mut self, post_last: &AffineMap) -> Result<Walk<T>> {
        if *self.counter >= self.budget {
            return Ok(Walk::Budget {
                regions: *self.counter,
            });
        }
        *self.counter += 1;
        let final_map = self.net.output().compose(post_last);
        let region = LinearRegion {
            pattern: self.pattern.clone(),
            system: LinearSystem::new(self.net.input_dim(), self.constraints.clone())?,
            affine_coeffs: final_map.row(0).to_vec(),
            affine_constant: final_map.bias(0).clone(),
            witness: self.witness.clone(),
        };
        match (self.visit)(&region) {
            Some(t) => Ok(Walk::Found(t)),
            None => Ok(Walk::Done),
        }
    }
}
