//! One-dimensional optimal transport by sorting.

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};

pub(crate) fn check_order(k: f64) -> Result<()> {
    if k.is_finite() && k >= 1.0 {
        Ok(())
    } else {
        Err(Error::contract(format!("order k must be >= 1, got {k}")))
    }
}

/// Stable ascending argsort of one column of a row-major `rows x cols` buffer.
///
/// Values map to order-preserving integer keys with the row index in the low
/// bits, so an unstable sort of the keys yields the stable order.
fn argsort_column(data: &[f64], rows: usize, cols: usize, col: usize) -> Vec<usize> {
    let mut keys: Vec<u128> = (0..rows)
        .map(|r| {
            // `+ 0.0` folds -0.0 into 0.0 so equal values tie.
            let bits = (data[r * cols + col] + 0.0).to_bits();
            let ordered = if bits >> 63 == 1 { !bits } else { bits | (1 << 63) };
            (u128::from(ordered) << 64) | r as u128
        })
        .collect();
    keys.sort_unstable();
    keys.into_iter().map(|k| k as u64 as usize).collect()
}

/// Sorts every column of an `n x l` node independently; the permutation is
/// frozen at record time and gradients flow back through the gather.
pub fn sort_columns(tape: &mut Tape, p: Var) -> Result<Var> {
    let v = tape.value(p);
    if v.ndim() != 2 {
        return Err(Error::shape("sort_columns expects a matrix"));
    }
    let (n, l) = (v.rows(), v.cols());
    let mut perm = vec![0; n * l];
    for col in 0..l {
        for (rank, src) in argsort_column(v.data(), n, l, col).into_iter().enumerate() {
            perm[rank * l + col] = src * l + col;
        }
    }
    tape.gather(p, perm)
}

/// `((1/(N L)) sum_{n,l} |sort(px)[n,l] - sort(py)[n,l]|^k)^(1/k)` for two
/// `N x L` matrices of projected samples: the sliced distance given projections.
pub fn sliced_on_tape(tape: &mut Tape, px: Var, py: Var, k: f64) -> Result<Var> {
    check_order(k)?;
    let (sx, sy) = (tape.value(px).shape(), tape.value(py).shape());
    if sx != sy || sx.len() != 2 {
        return Err(Error::contract(format!("projected shapes {sx:?} and {sy:?} differ")));
    }
    let gx = sort_columns(tape, px)?;
    let gy = sort_columns(tape, py)?;
    let diff = tape.sub(gx, gy)?;
    let dist = tape.abs(diff)?;
    let powered = tape.powf(dist, k)?;
    let mean = tape.mean(powered)?;
    tape.powf(mean, 1.0 / k)
}

/// Empirical `W_k` between two equal-size sets of reals.
pub fn wasserstein_1d(u: &[f64], v: &[f64], k: f64) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::contract(format!(
            "1-D samples need equal counts, got {} and {}",
            u.len(),
            v.len()
        )));
    }
    if u.is_empty() {
        return Err(Error::contract("1-D samples are empty"));
    }
    let mut tape = Tape::new();
    let pu = tape.constant(Tensor::matrix(u.len(), 1, u.to_vec())?);
    let pv = tape.constant(Tensor::matrix(v.len(), 1, v.to_vec())?);
    let out = sliced_on_tape(&mut tape, pu, pv, k)?;
    Ok(tape.scalar(out).expect("scalar"))
}

/// Per-column `W_k` of two `N x L` projected matrices.
pub(crate) fn per_column_distances(px: &Tensor, py: &Tensor, k: f64) -> Vec<f64> {
    let (n, l) = (px.rows(), px.cols());
    (0..l)
        .map(|col| {
            let ix = argsort_column(px.data(), n, l, col);
            let iy = argsort_column(py.data(), n, l, col);
            let s = ix
                .iter()
                .zip(&iy)
                .map(|(&a, &b)| (px.get(a, col) - py.get(b, col)).abs().powf(k))
                .sum::<f64>();
            (s / n as f64).powf(1.0 / k)
        })
        .collect()
}
