//! Real-valued functions on a finite set, with the sup norm and the
//! pointwise partial order.

use std::ops::Index;

use crate::dist::Dist;
use crate::error::{Error, Result};

/// A finite-valued function `{0, .., n-1} -> R`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFn(Vec<f64>);

impl ValueFn {
    /// Rejects empty input and non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "ValueFn needs at least one entry");
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn from_fn<F: FnMut(usize) -> f64>(n: usize, f: F) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    /// Skips validation; callers guarantee finiteness and `n >= 1`.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false for a constructed value; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `max_s |f(s)|`.
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup_norm(self - other)`.
    pub fn dist(&self, other: &ValueFn) -> Result<f64> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Exact pointwise order: `self(s) <= other(s)` everywhere.
    pub fn le(&self, other: &ValueFn) -> Result<bool> {
        self.le_within(other, 0.0)
    }

    /// Relaxed order: `self(s) <= other(s) + eps` everywhere.
    pub fn le_within(&self, other: &ValueFn, eps: f64) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| *a <= b + eps))
    }

    /// `alpha * f + g`.
    pub fn axpy(alpha: f64, f: &ValueFn, g: &ValueFn) -> Result<ValueFn> {
        f.check_len(g)?;
        Self::new(f.0.iter().zip(&g.0).map(|(x, y)| alpha * x + y).collect())
    }

    pub fn add(&self, other: &ValueFn) -> Result<ValueFn> {
        Self::axpy(1.0, self, other)
    }

    pub fn sub(&self, other: &ValueFn) -> Result<ValueFn> {
        Self::axpy(-1.0, other, self)
    }

    pub fn scale(&self, alpha: f64) -> Result<ValueFn> {
        Self::new(self.0.iter().map(|x| alpha * x).collect())
    }

    /// Adds `c` to every entry.
    pub fn shift(&self, c: f64) -> Result<ValueFn> {
        Self::new(self.0.iter().map(|x| x + c).collect())
    }

    /// The pairing `<p | self> = E_p[self]`.
    pub fn pair(&self, p: &Dist) -> Result<f64> {
        if p.n() != self.len() {
            return Err(Error::CardinalityMismatch {
                expected: self.len(),
                found: p.n(),
            });
        }
        Ok(p.expectation(|s| self.0[s]))
    }

    fn check_len(&self, other: &ValueFn) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for ValueFn {
    type Output = f64;

    fn index(&self, s: usize) -> &f64 {
        &self.0[s]
    }
}

impl TryFrom<Vec<f64>> for ValueFn {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}
