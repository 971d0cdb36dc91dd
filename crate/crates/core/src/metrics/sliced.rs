use super::defining::DefiningFunction;
use super::one_dim::sliced_on_tape;
use super::projection::ProjectionSet;
use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::samples::{check_pair, SampleSet};

/// Records the generalized sliced distance between the sample nodes `x` and `y`.
pub fn gswd_on_tape(
    tape: &mut Tape,
    x: Var,
    y: Var,
    func: &DefiningFunction,
    proj: &ProjectionSet,
    k: f64,
) -> Result<Var> {
    let theta = tape.constant(proj.directions().clone());
    let px = func.project(tape, x, theta)?;
    let py = func.project(tape, y, theta)?;
    sliced_on_tape(tape, px, py, k)
}

/// Records the sliced distance with linear projections.
pub fn swd_on_tape(tape: &mut Tape, x: Var, y: Var, proj: &ProjectionSet, k: f64) -> Result<Var> {
    gswd_on_tape(tape, x, y, &DefiningFunction::Linear, proj, k)
}

/// Generalized sliced Wasserstein distance of order `k`.
pub fn gswd(
    x: &SampleSet,
    y: &SampleSet,
    func: &DefiningFunction,
    proj: &ProjectionSet,
    k: f64,
) -> Result<f64> {
    check_pair(x, y)?;
    let need = func.projection_dim(x.dim());
    if proj.dim() != need {
        return Err(Error::contract(format!(
            "projection dimension {} but the transform needs {need}",
            proj.dim()
        )));
    }
    let mut tape = Tape::new();
    let vx = tape.constant(x.points().clone());
    let vy = tape.constant(y.points().clone());
    let out = gswd_on_tape(&mut tape, vx, vy, func, proj, k)?;
    Ok(tape.scalar(out).expect("scalar"))
}

/// Sliced Wasserstein distance of order `k`.
pub fn swd(x: &SampleSet, y: &SampleSet, proj: &ProjectionSet, k: f64) -> Result<f64> {
    gswd(x, y, &DefiningFunction::Linear, proj, k)
}
