//! Axis-aligned boxes with rational endpoints, the domains on which
//! networks are compared and certified.

use crate::rational::{rint, Rational};
use crate::{Error, Result};

/// A nonempty product of closed intervals `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxDomain {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl BoxDomain {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(format!(
                "box has {} lower and {} upper endpoints",
                lo.len(),
                hi.len()
            )));
        }
        if lo.is_empty() {
            return Err(Error::InvalidInput("box must have positive dimension".into()));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if l > h {
                return Err(Error::InvalidInput(format!(
                    "box interval {i} is empty: [{l}, {h}]"
                )));
            }
        }
        Ok(BoxDomain { lo, hi })
    }

    /// The unit hypercube `[0,1]^dim`.
    pub fn unit(dim: usize) -> Self {
        BoxDomain {
            lo: vec![rint(0); dim],
            hi: vec![rint(1); dim],
        }
    }

    /// `[-radius, radius]^dim`.
    pub fn symmetric(dim: usize, radius: Rational) -> Self {
        BoxDomain {
            lo: vec![-radius.clone(); dim],
            hi: vec![radius; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| l <= x && x <= h)
    }
}
