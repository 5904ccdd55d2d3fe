use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Shared, thread-safe objective evaluation map.
pub type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An objective `f: R^d -> R` together with whatever is known about its
/// global minimizer and its quadratic growth envelope
/// `f* + (l/2)|x - x*|^2 <= f(x) <= f* + (L/2)|x - x*|^2`.
#[derive(Clone)]
pub struct ObjectiveSpec {
    name: String,
    dim: usize,
    eval: EvalFn,
    known_minimizer: Option<Vec<f64>>,
    known_minimum: Option<f64>,
    growth_constants: Option<(f64, f64)>,
}

impl ObjectiveSpec {
    pub fn new<F>(name: impl Into<String>, dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::InvalidParameter("objective dimension must be positive".into()));
        }
        Ok(Self {
            name: name.into(),
            dim,
            eval: Arc::new(f),
            known_minimizer: None,
            known_minimum: None,
            growth_constants: None,
        })
    }

    /// Attaches the known global minimizer `x*` and minimum `f*`.
    pub fn with_minimizer(mut self, x_star: Vec<f64>, f_star: f64) -> Result<Self> {
        if x_star.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x_star.len() });
        }
        self.known_minimizer = Some(x_star);
        self.known_minimum = Some(f_star);
        Ok(self)
    }

    pub fn with_growth_constants(mut self, l: f64, big_l: f64) -> Result<Self> {
        if !(l > 0.0 && l <= big_l && big_l.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "growth constants need 0 < l <= L < inf, got l={l}, L={big_l}"
            )));
        }
        self.growth_constants = Some((l, big_l));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn known_minimizer(&self) -> Option<&[f64]> {
        self.known_minimizer.as_deref()
    }

    pub fn known_minimum(&self) -> Option<f64> {
        self.known_minimum
    }

    pub fn growth_constants(&self) -> Option<(f64, f64)> {
        self.growth_constants
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    /// `|x - x*|^2`, or `None` when the minimizer is unknown.
    pub fn sq_error(&self, x: &[f64]) -> Option<f64> {
        self.known_minimizer
            .as_ref()
            .map(|xs| xs.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum())
    }

    /// Returns a copy whose values are shifted by `c` (minimum shifted too).
    pub fn shifted(&self, c: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        let mut out = self.clone();
        out.eval = Arc::new(move |x| inner(x) + c);
        out.known_minimum = self.known_minimum.map(|f| f + c);
        out
    }
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("known_minimizer", &self.known_minimizer)
            .field("known_minimum", &self.known_minimum)
            .field("growth_constants", &self.growth_constants)
            .finish_non_exhaustive()
    }
}
