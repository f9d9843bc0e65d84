//! Power method for the dominant eigenvalue of a symmetric matrix stored as
//! one triangle in coordinate format.

use std::time::Instant;

use thiserror::Error;

use crate::dispatch::{Element, Kernel2};
use crate::mmio::{CooMatrix, CooView, MmioError};

#[derive(Debug, Error)]
pub enum EigError {
    #[error("iteration count must be at least 1")]
    NoIterations,
    #[error("iteration {iteration}: A*x vanished, cannot normalize")]
    Breakdown { iteration: u64 },
    #[error("iteration {iteration}: non-finite component in A*x")]
    NonFinite { iteration: u64 },
    #[error(transparent)]
    Matrix(#[from] MmioError),
}

/// Number of iterations; always at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowerMethodConfig {
    iterations: u64,
}

impl PowerMethodConfig {
    pub fn new(iterations: u64) -> Result<Self, EigError> {
        if iterations == 0 {
            return Err(EigError::NoIterations);
        }
        Ok(PowerMethodConfig { iterations })
    }

    pub fn iterations(self) -> u64 {
        self.iterations
    }
}

/// Instants observed by the kernel itself.
#[derive(Debug, Clone, Copy)]
pub struct KernelTiming {
    pub entered: Instant,
    pub finished: Instant,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerMethodResult {
    pub lambda: f64,
    pub timing: Option<KernelTiming>,
}

#[inline(always)]
fn at<I: Element>(i: I) -> usize {
    i.to_usize().unwrap_or(usize::MAX)
}

/// `y = A * x` with `A` the symmetric expansion of the stored triangle.
/// Accumulates in entry order at precision `F`.
pub fn spmv_sym_into<F: Element, I: Element>(m: &CooView<'_, F, I>, x: &[F], y: &mut [F]) {
    y.fill(F::zero());
    for ((&r, &c), &a) in m.rows.iter().zip(m.cols).zip(m.values) {
        let (r, c) = (at(r), at(c));
        y[r] = y[r] + a * x[c];
        if r != c {
            y[c] = y[c] + a * x[r];
        }
    }
}

pub fn spmv_sym<F: Element, I: Element>(m: &CooView<'_, F, I>, x: &[F]) -> Vec<F> {
    assert_eq!(x.len(), m.n, "vector length must equal the matrix order");
    let mut y = vec![F::zero(); m.n];
    spmv_sym_into(m, x, &mut y);
    y
}

/// Signed component of largest magnitude; the first one wins ties.
fn dominant<F: Element>(y: &[F]) -> F {
    let mut lambda = F::zero();
    for &v in y {
        if v.magnitude() > lambda.magnitude() {
            lambda = v;
        }
    }
    lambda
}

/// Runs exactly `config.iterations()` steps of `x <- A x / lambda` from
/// the all-ones vector and returns the last `lambda`, widened to `f64`.
pub fn power_method<F: Element, I: Element>(
    m: &CooView<'_, F, I>,
    config: PowerMethodConfig,
) -> Result<PowerMethodResult, EigError> {
    let mut x = vec![F::one(); m.n];
    let mut y = vec![F::zero(); m.n];
    let mut lambda = F::zero();
    for iteration in 1..=config.iterations {
        spmv_sym_into(m, &x, &mut y);
        if y.iter().any(|v| !v.is_finite_value()) {
            return Err(EigError::NonFinite { iteration });
        }
        lambda = dominant(&y);
        if lambda.is_zero() {
            return Err(EigError::Breakdown { iteration });
        }
        for v in y.iter_mut() {
            *v = *v / lambda;
        }
        std::mem::swap(&mut x, &mut y);
    }
    Ok(PowerMethodResult {
        lambda: lambda.to_f64().unwrap_or(f64::NAN),
        timing: None,
    })
}

/// Two-parameter kernel family (value type, index type) running the power
/// method on a matrix whose arrays have those types.
pub struct PowerMethod<'m> {
    matrix: &'m CooMatrix,
    config: PowerMethodConfig,
}

impl<'m> PowerMethod<'m> {
    pub fn new(matrix: &'m CooMatrix, config: PowerMethodConfig) -> Self {
        PowerMethod { matrix, config }
    }
}

impl Kernel2 for PowerMethod<'_> {
    type Output = Result<PowerMethodResult, EigError>;

    fn apply<F: Element, I: Element>(&mut self) -> Self::Output {
        let entered = Instant::now();
        let view = self.matrix.view::<F, I>()?;
        let lambda = power_method(&view, self.config)?.lambda;
        Ok(PowerMethodResult {
            lambda,
            timing: Some(KernelTiming {
                entered,
                finished: Instant::now(),
            }),
        })
    }
}
