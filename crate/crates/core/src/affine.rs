//! Exact affine maps `x -> Wx + b`.

use num_traits::Zero;

use crate::rational::Rational;
use crate::{Error, Result};

/// A dense affine map with rational weights and biases.
///
/// `weights` has one row per output; `in_dim` is stored explicitly so that
/// maps with zero outputs still know their input dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    weights: Vec<Vec<Rational>>,
    biases: Vec<Rational>,
    in_dim: usize,
}

impl AffineMap {
    /// Builds a map, checking that every row has `in_dim` entries and that
    /// the bias vector matches the row count.
    pub fn new(weights: Vec<Vec<Rational>>, biases: Vec<Rational>, in_dim: usize) -> Result<Self> {
        if weights.len() != biases.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weight rows but {} biases",
                weights.len(),
                biases.len()
            )));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != in_dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {in_dim}",
                    row.len()
                )));
            }
        }
        Ok(AffineMap {
            weights,
            biases,
            in_dim,
        })
    }

    /// Builds a map from nonempty rows, inferring the input dimension.
    pub fn from_rows(weights: Vec<Vec<Rational>>, biases: Vec<Rational>) -> Result<Self> {
        let in_dim = weights
            .first()
            .map(|r| r.len())
            .ok_or_else(|| Error::InvalidInput("cannot infer input dimension of an empty map".into()))?;
        Self::new(weights, biases, in_dim)
    }

    /// The identity map on `dim` coordinates.
    pub fn identity(dim: usize) -> Self {
        let weights = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            Rational::from_integer(1.into())
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        AffineMap {
            weights,
            biases: vec![Rational::zero(); dim],
            in_dim: dim,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.weights[i]
    }

    pub fn biases(&self) -> &[Rational] {
        &self.biases
    }

    pub fn bias(&self, i: usize) -> &Rational {
        &self.biases[i]
    }

    /// `Wx + b`. Zero weights are skipped, which matters for the sparse
    /// tournament networks.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        debug_assert_eq!(x.len(), self.in_dim);
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(row, b)| {
                let mut acc = b.clone();
                for (w, xi) in row.iter().zip(x) {
                    if !w.is_zero() {
                        acc += w * xi;
                    }
                }
                acc
            })
            .collect()
    }

    /// The composition `self ∘ inner`, i.e. `x -> W_self (W_inner x + b_inner) + b_self`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        debug_assert_eq!(self.in_dim, inner.out_dim());
        let weights: Vec<Vec<Rational>> = self
            .weights
            .iter()
            .map(|row| {
                (0..inner.in_dim)
                    .map(|j| {
                        let mut acc = Rational::zero();
                        for (w, inner_row) in row.iter().zip(&inner.weights) {
                            if !w.is_zero() && !inner_row[j].is_zero() {
                                acc += w * &inner_row[j];
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let biases: Vec<Rational> = self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(row, b)| {
                let mut acc = b.clone();
                for (w, ib) in row.iter().zip(&inner.biases) {
                    if !w.is_zero() && !ib.is_zero() {
                        acc += w * ib;
                    }
                }
                acc
            })
            .collect();
        AffineMap {
            weights,
            biases,
            in_dim: inner.in_dim,
        }
    }

    /// Copy with the rows of inactive outputs (and their biases) set to zero.
    pub fn masked(&self, active: &[bool]) -> AffineMap {
        debug_assert_eq!(active.len(), self.out_dim());
        let weights = self
            .weights
            .iter()
            .zip(active)
            .map(|(row, &keep)| {
                if keep {
                    row.clone()
                } else {
                    vec![Rational::zero(); self.in_dim]
                }
            })
            .collect();
        let biases = self
            .biases
            .iter()
            .zip(active)
            .map(|(b, &keep)| if keep { b.clone() } else { Rational::zero() })
            .collect();
        AffineMap {
            weights,
            biases,
            in_dim: self.in_dim,
        }
    }

    /// Number of nonzero entries in row `i`.
    pub fn row_nonzeros(&self, i: usize) -> usize {
        self.weights[i].iter().filter(|w| !w.is_zero()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    #[test]
    fn apply_and_compose_agree() {
        let inner = AffineMap::from_rows(
            vec![vec![rint(1), rint(2)], vec![rint(0), rint(-1)]],
            vec![rat(1, 2), rint(0)],
        )
        .unwrap();
        let outer = AffineMap::from_rows(vec![vec![rint(3), rint(1)]], vec![rint(-1)]).unwrap();
        let x = vec![rat(1, 3), rat(2, 3)];
        let direct = outer.apply(&inner.apply(&x));
        let composed = outer.compose(&inner).apply(&x);
        assert_eq!(direct, composed);
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = AffineMap::new(
            vec![vec![rint(1), rint(2)], vec![rint(3)]],
            vec![rint(0), rint(0)],
            2,
        );
        assert!(err.is_err());
    }

    #[test]
    fn masked_zeroes_rows_and_biases() {
        let map = AffineMap::from_rows(
            vec![vec![rint(1)], vec![rint(2)]],
            vec![rint(5), rint(7)],
        )
        .unwrap();
        let masked = map.masked(&[false, true]);
        assert_eq!(masked.row(0), &[rint(0)]);
        assert_eq!(masked.bias(0), &rint(0));
        assert_eq!(masked.row(1), &[rint(2)]);
        assert_eq!(masked.bias(1), &rint(7));
    }
}
