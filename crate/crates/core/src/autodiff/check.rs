use super::tape::{Tape, Var};
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Denominator floor for the per-coordinate relative error, so that
/// coordinates whose true gradient is zero are compared absolutely.
const RELATIVE_FLOOR: f64 = 1e-6;

fn evaluate<F>(f: &F, point: Tensor) -> Result<f64>
where
    F: Fn(&mut Tape, Var) -> Result<Var>,
{
    let mut tape = Tape::new();
    let x = tape.leaf(point);
    let out = f(&mut tape, x)?;
    let v = tape
        .scalar(out)
        .ok_or_else(|| Error::contract("checked function must return a scalar"))?;
    if !v.is_finite() {
        return Err(Error::Numeric("non-finite function value".into()));
    }
    Ok(v)
}

/// Reverse-mode gradient of a recorded scalar function at `point`.
pub fn gradient<F>(f: &F, point: &Tensor) -> Result<(f64, Tensor)>
where
    F: Fn(&mut Tape, Var) -> Result<Var>,
{
    let mut tape = Tape::new();
    let x = tape.leaf(point.clone());
    let out = f(&mut tape, x)?;
    let value = tape
        .scalar(out)
        .ok_or_else(|| Error::contract("checked function must return a scalar"))?;
    let grads = tape.backward(out)?;
    let g = grads.get(x).cloned().expect("leaf gradient present");
    Ok((value, g))
}

/// Central-difference gradient with step `step`.
pub fn numeric_gradient<F>(f: &F, point: &Tensor, step: f64) -> Result<Tensor>
where
    F: Fn(&mut Tape, Var) -> Result<Var>,
{
    if !(step > 0.0) {
        return Err(Error::contract("finite-difference step must be positive"));
    }
    let mut out = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let mut plus = point.clone();
        plus.data_mut()[i] += step;
        let mut minus = point.clone();
        minus.data_mut()[i] -= step;
        let fp = evaluate(f, plus)?;
        let fm = evaluate(f, minus)?;
        out.push((fp - fm) / (2.0 * step));
    }
    Ok(Tensor::from_parts(point.shape().to_vec(), out))
}

/// Maximum over coordinates of `|analytic - numeric| / max(|analytic|, |numeric|, 1e-6)`.
pub fn gradient_check<F>(f: F, point: &Tensor, step: f64) -> Result<f64>
where
    F: Fn(&mut Tape, Var) -> Result<Var>,
{
    let (_, analytic) = gradient(&f, point)?;
    let numeric = numeric_gradient(&f, point, step)?;
    Ok(analytic
        .data()
        .iter()
        .zip(numeric.data())
        .map(|(&a, &n)| (a - n).abs() / a.abs().max(n.abs()).max(RELATIVE_FLOOR))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_form_is_exact() {
        let a = Tensor::matrix(3, 3, vec![2.0, 0.5, -1.0, 0.5, 3.0, 0.2, -1.0, 0.2, 1.5]).unwrap();
        let f = move |t: &mut Tape, x: Var| {
            let am = t.constant(a.clone());
            let ax = t.matmul(am, x)?;
            t.inner(x, ax)
        };
        let p = Tensor::matrix(3, 1, vec![0.4, -1.2, 0.9]).unwrap();
        let err = gradient_check(f, &p, 1e-5).unwrap();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn rejects_non_positive_step() {
        let f = |t: &mut Tape, x: Var| t.sum(x);
        let p = Tensor::vector(vec![1.0]).unwrap();
        assert!(gradient_check(f, &p, 0.0).is_err());
    }

    #[test]
    fn non_finite_evaluation_errors() {
        let f = |t: &mut Tape, x: Var| {
            let p = t.powf(x, 0.5)?;
            t.sum(p)
        };
        // x - step < 0 makes the square root NaN.
        let p = Tensor::vector(vec![1e-7]).unwrap();
        assert!(gradient_check(f, &p, 1e-5).is_err());
    }
}
