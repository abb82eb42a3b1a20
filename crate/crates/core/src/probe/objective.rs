use super::TrainSet;
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Logistic function, evaluated on the branch that cannot overflow.
pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

// ln(1 + e^z) without overflow.
fn softplus<T: Scalar>(z: T) -> T {
    if z > T::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Objective value and its gradient at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub grad_weights: Vec<T>,
    pub grad_bias: T,
}

/// Mean cross-entropy plus `lambda / (2n) * |w|^2`. The bias is not penalized.
///
/// Per sample the loss is written as `softplus(z) - y z`, which equals the
/// negated log-likelihood and stays finite for any finite logit `z`.
pub fn objective_and_gradient<T: Scalar>(
    weights: &[T],
    bias: T,
    data: &TrainSet<T>,
    lambda: T,
) -> Result<Evaluation<T>> {
    let d = data.dim();
    if weights.len() != d {
        return Err(Error::dim(format!(
            "weights have length {}, features have width {d}",
            weights.len()
        )));
    }
    let n = data.len();
    if n == 0 {
        return Err(Error::dim("objective over an empty training set"));
    }
    let mut loss = T::zero();
    let mut grad_weights = vec![T::zero(); d];
    let mut grad_bias = T::zero();
    for (row, &label) in data.rows().zip(data.labels()) {
        let z = dot(weights, row) + bias;
        let y = if label == 1 { T::one() } else { T::zero() };
        loss += softplus(z) - y * z;
        let residual = sigmoid(z) - y;
        for (g, &x) in grad_weights.iter_mut().zip(row) {
            *g += residual * x;
        }
        grad_bias += residual;
    }
    let n_t = T::from_usize(n).unwrap();
    let inv_n = T::one() / n_t;
    let penalty = lambda * dot(weights, weights) / (T::lit(2.0) * n_t);
    for (g, &w) in grad_weights.iter_mut().zip(weights) {
        *g = *g * inv_n + lambda * w * inv_n;
    }
    Ok(Evaluation {
        value: loss * inv_n + penalty,
        grad_weights,
        grad_bias: grad_bias * inv_n,
    })
}
