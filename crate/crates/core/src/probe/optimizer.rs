//! Full-batch gradient descent with a backtracking (sufficient decrease)
//! line search. Trial steps are seeded with the Barzilai-Borwein length of
//! the previous move; every accepted step still satisfies the Armijo test.

use super::objective::{objective_and_gradient, Evaluation};
use super::{Probe, ProbeConfig, TrainSet};
use crate::error::Result;
use crate::scalar::{dot, norm_inf, Scalar};

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const MIN_STEP: f64 = 1e-12;
const MAX_STEP: f64 = 1e12;

struct Point<T> {
    weights: Vec<T>,
    bias: T,
    eval: Evaluation<T>,
}

fn gradient_norm<T: Scalar>(eval: &Evaluation<T>, fit_intercept: bool) -> T {
    let gw = norm_inf(&eval.grad_weights);
    if fit_intercept {
        gw.max(eval.grad_bias.abs())
    } else {
        gw
    }
}

pub(super) fn minimize<T: Scalar>(data: &TrainSet<T>, config: &ProbeConfig) -> Result<Probe<T>> {
    let lambda = T::lit(config.lambda);
    let tol = T::lit(config.convergence_tol);
    let fit_b = config.fit_intercept;
    let c = T::lit(ARMIJO_C);
    let half = T::lit(0.5);
    let slack_scale = T::epsilon() * T::lit(4.0);

    let evaluate = |w: &[T], b: T| -> Result<Evaluation<T>> {
        let mut e = objective_and_gradient(w, b, data, lambda)?;
        if !fit_b {
            e.grad_bias = T::zero();
        }
        Ok(e)
    };

    let d = data.dim();
    let zeros = vec![T::zero(); d];
    let mut x = Point {
        eval: evaluate(&zeros, T::zero())?,
        weights: zeros,
        bias: T::zero(),
    };
    let mut step = T::one();
    let mut last_move: Option<(Vec<T>, T, Vec<T>, T)> = None;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        let gnorm = gradient_norm(&x.eval, fit_b);
        if gnorm <= tol {
            converged = true;
            break;
        }
        if let Some((sw, sb, yw, yb)) = last_move.take() {
            let sy = dot(&sw, &yw) + sb * yb;
            let ss = dot(&sw, &sw) + sb * sb;
            step = if sy > T::zero() { ss / sy } else { step + step };
            step = step.max(T::lit(MIN_STEP)).min(T::lit(MAX_STEP));
        }

        let g2 =
            dot(&x.eval.grad_weights, &x.eval.grad_weights) + x.eval.grad_bias * x.eval.grad_bias;
        let slack = slack_scale * x.eval.value.abs();
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let w: Vec<T> = x
                .weights
                .iter()
                .zip(&x.eval.grad_weights)
                .map(|(&w, &g)| w - step * g)
                .collect();
            let b = x.bias - step * x.eval.grad_bias;
            let e = evaluate(&w, b)?;
            if e.value.is_finite() && e.value <= x.eval.value - c * step * g2 + slack {
                accepted = Some(Point {
                    weights: w,
                    bias: b,
                    eval: e,
                });
                break;
            }
            step *= half;
        }
        // No step length achieves sufficient decrease: precision floor reached.
        let Some(next) = accepted else { break };

        let sw: Vec<T> = next
            .weights
            .iter()
            .zip(&x.weights)
            .map(|(&a, &b)| a - b)
            .collect();
        let yw: Vec<T> = next
            .eval
            .grad_weights
            .iter()
            .zip(&x.eval.grad_weights)
            .map(|(&a, &b)| a - b)
            .collect();
        last_move = Some((
            sw,
            next.bias - x.bias,
            yw,
            next.eval.grad_bias - x.eval.grad_bias,
        ));
        x = next;
        iterations += 1;
    }

    let final_gradient_norm = gradient_norm(&x.eval, fit_b);
    if !converged && final_gradient_norm <= tol {
        converged = true;
    }
    Ok(Probe {
        weights: x.weights,
        bias: x.bias,
        converged,
        final_gradient_norm,
        iterations_used: iterations,
    })
}
