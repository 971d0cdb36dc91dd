//! Append-only computation record with reverse-mode differentiation.
//!
//! Every primitive evaluates eagerly, checks its operand shapes, rejects
//! non-finite results and appends one node. Nodes only reference earlier
//! nodes, so the record is always in topological order and the reverse pass
//! is a single backwards sweep.

use std::sync::Arc;

use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Handle to a node of a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op {
    Input { differentiable: bool },
    MatMul(Var, Var),
    Transpose(Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    AddRow(Var, Var),
    Scale(Var, f64),
    Relu(Var),
    Abs(Var),
    Powf(Var, f64),
    Concat(Var, Var),
    Inner(Var, Var),
    Sum(Var),
    Mean(Var),
    RowNorms(Var),
    Gather(Var, Arc<[usize]>),
    PairwiseDist(Var, Var),
    Monomials(Var, Arc<[Vec<u32>]>),
}

#[derive(Debug, Clone)]
struct Node {
    value: Tensor,
    op: Op,
}

/// Single-writer record of primitive evaluations.
#[derive(Debug, Default, Clone)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Leaf gradients produced by [`Tape::backward`].
#[derive(Debug, Clone)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// Gradient of the output with respect to a differentiable leaf.
    ///
    /// Leaves that the output does not depend on get a zero tensor; `None`
    /// means `var` is not a differentiable leaf of the record.
    pub fn get(&self, var: Var) -> Option<&Tensor> {
        self.grads.get(var.0).and_then(Option::as_ref)
    }
}

fn check_finite(value: &Tensor, primitive: &'static str) -> Result<()> {
    if value.all_finite() {
        Ok(())
    } else {
        Err(Error::NumericOverflow { primitive })
    }
}

fn matmul_raw(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * m];
    for i in 0..n {
        let arow = &a[i * k..(i + 1) * k];
        let orow = &mut out[i * m..(i + 1) * m];
        for (j, o) in orow.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (p, &av) in arow.iter().enumerate() {
                acc += av * b[p * m + j];
            }
            *o = acc;
        }
    }
    out
}

fn transpose_raw(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = a[i * cols + j];
        }
    }
    out
}

fn monomial(x: &[f64], alpha: &[u32]) -> f64 {
    alpha
        .iter()
        .zip(x)
        .fold(1.0, |acc, (&e, &v)| acc * v.powi(e as i32))
}

fn accumulate(slot: &mut Option<Tensor>, delta: Tensor) {
    match slot {
        Some(acc) => {
            for (a, d) in acc.data_mut().iter_mut().zip(delta.data()) {
                *a += d;
            }
        }
        None => *slot = Some(delta),
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, var: Var) -> &Tensor {
        &self.nodes[var.0].value
    }

    /// Scalar value of a node, if it is a scalar.
    pub fn scalar(&self, var: Var) -> Option<f64> {
        self.value(var).item()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    fn push_checked(&mut self, value: Tensor, op: Op, primitive: &'static str) -> Result<Var> {
        check_finite(&value, primitive)?;
        Ok(self.push(value, op))
    }

    /// Differentiable input.
    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Input { differentiable: true })
    }

    /// Non-differentiable input.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Input { differentiable: false })
    }

    pub fn is_leaf(&self, var: Var) -> bool {
        matches!(self.nodes[var.0].op, Op::Input { differentiable: true })
    }

    fn same_shape(&self, a: Var, b: Var, what: &str) -> Result<()> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa != sb {
            return Err(Error::shape(format!("{what}: {sa:?} vs {sb:?}")));
        }
        Ok(())
    }

    fn matrix_dims(&self, a: Var, what: &str) -> Result<(usize, usize)> {
        let s = self.value(a).shape();
        if s.len() != 2 {
            return Err(Error::shape(format!("{what}: expected a matrix, got {s:?}")));
        }
        Ok((s[0], s[1]))
    }

    fn zip_with(&self, a: Var, b: Var, f: impl Fn(f64, f64) -> f64) -> Tensor {
        let (va, vb) = (self.value(a), self.value(b));
        Tensor::from_parts(
            va.shape().to_vec(),
            va.data().iter().zip(vb.data()).map(|(&x, &y)| f(x, y)).collect(),
        )
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (n, k) = self.matrix_dims(a, "matmul lhs")?;
        let (k2, m) = self.matrix_dims(b, "matmul rhs")?;
        if k != k2 {
            return Err(Error::shape(format!("matmul: [{n}, {k}] x [{k2}, {m}]")));
        }
        let out = matmul_raw(self.value(a).data(), self.value(b).data(), n, k, m);
        self.push_checked(Tensor::from_parts(vec![n, m], out), Op::MatMul(a, b), "matmul")
    }

    pub fn transpose(&mut self, a: Var) -> Result<Var> {
        let (r, c) = self.matrix_dims(a, "transpose")?;
        let out = transpose_raw(self.value(a).data(), r, c);
        Ok(self.push(Tensor::from_parts(vec![c, r], out), Op::Transpose(a)))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape(a, b, "add")?;
        let v = self.zip_with(a, b, |x, y| x + y);
        self.push_checked(v, Op::Add(a, b), "add")
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape(a, b, "sub")?;
        let v = self.zip_with(a, b, |x, y| x - y);
        self.push_checked(v, Op::Sub(a, b), "sub")
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape(a, b, "mul")?;
        let v = self.zip_with(a, b, |x, y| x * y);
        self.push_checked(v, Op::Mul(a, b), "mul")
    }

    /// Adds a length-`d` vector to every row of an `n x d` matrix.
    pub fn add_row(&mut self, a: Var, bias: Var) -> Result<Var> {
        let (n, d) = self.matrix_dims(a, "add_row")?;
        if self.value(bias).shape() != [d] {
            return Err(Error::shape(format!(
                "add_row: bias {:?} for rows of width {d}",
                self.value(bias).shape()
            )));
        }
        let (va, vb) = (self.value(a).data(), self.value(bias).data());
        let out = (0..n * d).map(|i| va[i] + vb[i % d]).collect();
        self.push_checked(Tensor::from_parts(vec![n, d], out), Op::AddRow(a, bias), "add_row")
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        let v = self.value(a).map(|x| x * c);
        self.push_checked(v, Op::Scale(a, c), "scale")
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        let v = self.value(a).map(|x| if x > 0.0 { x } else { 0.0 });
        Ok(self.push(v, Op::Relu(a)))
    }

    pub fn abs(&mut self, a: Var) -> Result<Var> {
        let v = self.value(a).map(f64::abs);
        Ok(self.push(v, Op::Abs(a)))
    }

    /// Elementwise `a^p`.
    pub fn powf(&mut self, a: Var, p: f64) -> Result<Var> {
        let v = if p == 2.0 {
            self.value(a).map(|x| x * x)
        } else {
            self.value(a).map(|x| x.powf(p))
        };
        self.push_checked(v, Op::Powf(a, p), "powf")
    }

    /// Concatenation along the last axis (vectors, or matrices with equal row counts).
    pub fn concat(&mut self, a: Var, b: Var) -> Result<Var> {
        let (sa, sb) = (self.value(a).shape().to_vec(), self.value(b).shape().to_vec());
        let value = match (sa.as_slice(), sb.as_slice()) {
            ([n1], [n2]) => {
                let mut data = self.value(a).data().to_vec();
                data.extend_from_slice(self.value(b).data());
                Tensor::from_parts(vec![n1 + n2], data)
            }
            ([r1, c1], [r2, c2]) if r1 == r2 => {
                let (va, vb) = (self.value(a), self.value(b));
                let mut data = Vec::with_capacity(r1 * (c1 + c2));
                for i in 0..*r1 {
                    data.extend_from_slice(va.row(i));
                    data.extend_from_slice(vb.row(i));
                }
                Tensor::from_parts(vec![*r1, c1 + c2], data)
            }
            _ => return Err(Error::shape(format!("concat: {sa:?} with {sb:?}"))),
        };
        Ok(self.push(value, Op::Concat(a, b)))
    }

    /// Full inner product of two equally shaped tensors.
    pub fn inner(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape(a, b, "inner")?;
        let s = self
            .value(a)
            .data()
            .iter()
            .zip(self.value(b).data())
            .fold(0.0, |acc, (x, y)| acc + x * y);
        self.push_checked(Tensor::from_parts(vec![], vec![s]), Op::Inner(a, b), "inner")
    }

    pub fn sum(&mut self, a: Var) -> Result<Var> {
        let s = self.value(a).data().iter().fold(0.0, |acc, x| acc + x);
        self.push_checked(Tensor::from_parts(vec![], vec![s]), Op::Sum(a), "sum")
    }

    pub fn mean(&mut self, a: Var) -> Result<Var> {
        let v = self.value(a);
        if v.is_empty() {
            return Err(Error::shape("mean of empty tensor"));
        }
        let s = v.data().iter().fold(0.0, |acc, x| acc + x) / v.len() as f64;
        self.push_checked(Tensor::from_parts(vec![], vec![s]), Op::Mean(a), "mean")
    }

    /// L2 norm of every row of a matrix.
    pub fn row_norms(&mut self, a: Var) -> Result<Var> {
        let (n, _) = self.matrix_dims(a, "row_norms")?;
        let v = self.value(a);
        let out = (0..n)
            .map(|i| v.row(i).iter().fold(0.0, |acc, x| acc + x * x).sqrt())
            .collect();
        self.push_checked(Tensor::from_parts(vec![n], out), Op::RowNorms(a), "row_norms")
    }

    /// `out[i] = a[perm[i]]` over the flattened data; `perm` must be a permutation.
    pub fn gather(&mut self, a: Var, perm: Vec<usize>) -> Result<Var> {
        let len = self.value(a).len();
        if perm.len() != len {
            return Err(Error::shape(format!(
                "gather: {} indices for {len} entries",
                perm.len()
            )));
        }
        let mut seen = vec![false; len];
        for &p in &perm {
            if p >= len || std::mem::replace(&mut seen[p], true) {
                return Err(Error::contract("gather indices are not a permutation"));
            }
        }
        let src = self.value(a).data();
        let out = perm.iter().map(|&p| src[p]).collect();
        let shape = self.value(a).shape().to_vec();
        Ok(self.push(Tensor::from_parts(shape, out), Op::Gather(a, perm.into())))
    }

    /// Euclidean distances between every row of `a` (`n x d`) and every row of `c` (`m x d`).
    pub fn pairwise_dist(&mut self, a: Var, c: Var) -> Result<Var> {
        let (n, d) = self.matrix_dims(a, "pairwise_dist lhs")?;
        let (m, d2) = self.matrix_dims(c, "pairwise_dist rhs")?;
        if d != d2 {
            return Err(Error::shape(format!("pairwise_dist: widths {d} vs {d2}")));
        }
        let (va, vc) = (self.value(a), self.value(c));
        let mut out = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let s = va
                    .row(i)
                    .iter()
                    .zip(vc.row(j))
                    .fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y));
                out.push(s.sqrt());
            }
        }
        self.push_checked(Tensor::from_parts(vec![n, m], out), Op::PairwiseDist(a, c), "pairwise_dist")
    }

    /// Monomial features `x^alpha` for each exponent vector in `table`.
    pub fn monomials(&mut self, a: Var, table: Arc<[Vec<u32>]>) -> Result<Var> {
        let (n, d) = self.matrix_dims(a, "monomials")?;
        if let Some(bad) = table.iter().find(|alpha| alpha.len() != d) {
            return Err(Error::shape(format!(
                "monomials: exponent vector of length {} for inputs of width {d}",
                bad.len()
            )));
        }
        let v = self.value(a);
        let mut out = Vec::with_capacity(n * table.len());
        for i in 0..n {
            out.extend(table.iter().map(|alpha| monomial(v.row(i), alpha)));
        }
        let shape = vec![n, table.len()];
        self.push_checked(Tensor::from_parts(shape, out), Op::Monomials(a, table), "monomials")
    }

    /// Reverse pass from a scalar node.
    ///
    /// Intermediate adjoints are dropped as soon as they have been propagated;
    /// only gradients of differentiable leaves are returned.
    pub fn backward(&self, output: Var) -> Result<Gradients> {
        if output.0 >= self.nodes.len() {
            return Err(Error::contract("output is not a node of this record"));
        }
        if !self.value(output).is_scalar() {
            return Err(Error::contract(format!(
                "backward from non-scalar node of shape {:?}",
                self.value(output).shape()
            )));
        }
        let mut adj: Vec<Option<Tensor>> = vec![None; output.0 + 1];
        adj[output.0] = Some(Tensor::from_parts(self.value(output).shape().to_vec(), vec![1.0]));
        let mut grads: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if matches!(node.op, Op::Input { differentiable: true }) {
                grads[i] = Some(Tensor::zeros(node.value.shape()));
            }
        }

        for idx in (0..=output.0).rev() {
            let Some(g) = adj[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Input { differentiable } => {
                    if *differentiable {
                        grads[idx] = Some(g);
                    }
                }
                Op::MatMul(a, b) => {
                    let (va, vb) = (self.value(*a), self.value(*b));
                    let (n, k) = (va.shape()[0], va.shape()[1]);
                    let m = vb.shape()[1];
                    let bt = transpose_raw(vb.data(), k, m);
                    let da = matmul_raw(g.data(), &bt, n, m, k);
                    let at = transpose_raw(va.data(), n, k);
                    let db = matmul_raw(&at, g.data(), k, n, m);
                    accumulate(&mut adj[a.0], Tensor::from_parts(vec![n, k], da));
                    accumulate(&mut adj[b.0], Tensor::from_parts(vec![k, m], db));
                }
                Op::Transpose(a) => {
                    let (r, c) = (node.value.shape()[0], node.value.shape()[1]);
                    let da = transpose_raw(g.data(), r, c);
                    accumulate(&mut adj[a.0], Tensor::from_parts(vec![c, r], da));
                }
                Op::Add(a, b) => {
                    accumulate(&mut adj[a.0], g.clone());
                    accumulate(&mut adj[b.0], g);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut adj[a.0], g.clone());
                    accumulate(&mut adj[b.0], g.map(|x| -x));
                }
                Op::Mul(a, b) => {
                    let (va, vb) = (self.value(*a), self.value(*b));
                    let da = zip(&g, vb, |x, y| x * y);
                    let db = zip(&g, va, |x, y| x * y);
                    accumulate(&mut adj[a.0], da);
                    accumulate(&mut adj[b.0], db);
                }
                Op::AddRow(a, bias) => {
                    let d = self.value(*bias).len();
                    let mut db = vec![0.0; d];
                    for (i, x) in g.data().iter().enumerate() {
                        db[i % d] += x;
                    }
                    accumulate(&mut adj[bias.0], Tensor::from_parts(vec![d], db));
                    accumulate(&mut adj[a.0], g);
                }
                Op::Scale(a, c) => accumulate(&mut adj[a.0], g.map(|x| x * c)),
                Op::Relu(a) => {
                    let da = zip(&g, self.value(*a), |x, y| if y > 0.0 { x } else { 0.0 });
                    accumulate(&mut adj[a.0], da);
                }
                Op::Abs(a) => {
                    let da = zip(&g, self.value(*a), |x, y| {
                        if y > 0.0 {
                            x
                        } else if y < 0.0 {
                            -x
                        } else {
                            0.0
                        }
                    });
                    accumulate(&mut adj[a.0], da);
                }
                Op::Powf(a, p) => {
                    let p = *p;
                    let da = zip(&g, self.value(*a), |x, y| {
                        if y == 0.0 && p <= 1.0 {
                            if p == 1.0 {
                                x
                            } else {
                                0.0
                            }
                        } else if p == 2.0 {
                            x * 2.0 * y
                        } else {
                            x * p * y.powf(p - 1.0)
                        }
                    });
                    accumulate(&mut adj[a.0], da);
                }
                Op::Concat(a, b) => {
                    let (va, vb) = (self.value(*a), self.value(*b));
                    if va.ndim() == 1 {
                        let n1 = va.len();
                        let (ga, gb) = g.data().split_at(n1);
                        accumulate(&mut adj[a.0], Tensor::from_parts(vec![n1], ga.to_vec()));
                        accumulate(&mut adj[b.0], Tensor::from_parts(vec![gb.len()], gb.to_vec()));
                    } else {
                        let (r, c1, c2) = (va.rows(), va.cols(), vb.cols());
                        let mut ga = Vec::with_capacity(r * c1);
                        let mut gb = Vec::with_capacity(r * c2);
                        for i in 0..r {
                            let row = g.row(i);
                            ga.extend_from_slice(&row[..c1]);
                            gb.extend_from_slice(&row[c1..]);
                        }
                        accumulate(&mut adj[a.0], Tensor::from_parts(vec![r, c1], ga));
                        accumulate(&mut adj[b.0], Tensor::from_parts(vec![r, c2], gb));
                    }
                }
                Op::Inner(a, b) => {
                    let s = g.data()[0];
                    let da = self.value(*b).map(|y| s * y);
                    let db = self.value(*a).map(|y| s * y);
                    accumulate(&mut adj[a.0], da);
                    accumulate(&mut adj[b.0], db);
                }
                Op::Sum(a) => {
                    let s = g.data()[0];
                    accumulate(&mut adj[a.0], self.value(*a).map(|_| s));
                }
                Op::Mean(a) => {
                    let s = g.data()[0] / self.value(*a).len() as f64;
                    accumulate(&mut adj[a.0], self.value(*a).map(|_| s));
                }
                Op::RowNorms(a) => {
                    let va = self.value(*a);
                    let (n, d) = (va.rows(), va.cols());
                    let mut da = vec![0.0; n * d];
                    for i in 0..n {
                        let norm = node.value.data()[i];
                        if norm > 0.0 {
                            let s = g.data()[i] / norm;
                            for (o, x) in da[i * d..(i + 1) * d].iter_mut().zip(va.row(i)) {
                                *o = s * x;
                            }
                        }
                    }
                    accumulate(&mut adj[a.0], Tensor::from_parts(vec![n, d], da));
                }
                Op::Gather(a, perm) => {
                    let mut da = vec![0.0; perm.len()];
                    for (i, &p) in perm.iter().enumerate() {
                        da[p] += g.data()[i];
                    }
                    let shape = self.value(*a).shape().to_vec();
                    accumulate(&mut adj[a.0], Tensor::from_parts(shape, da));
                }
                Op::PairwiseDist(a, c) => {
                    let (va, vc) = (self.value(*a), self.value(*c));
                    let (n, d, m) = (va.rows(), va.cols(), vc.rows());
                    let mut da = vec![0.0; n * d];
                    let mut dc = vec![0.0; m * d];
                    for i in 0..n {
                        for j in 0..m {
                            let dist = node.value.data()[i * m + j];
                            if dist == 0.0 {
                                continue;
                            }
                            let s = g.data()[i * m + j] / dist;
                            for t in 0..d {
                                let diff = s * (va.get(i, t) - vc.get(j, t));
                                da[i * d + t] += diff;
                                dc[j * d + t] -= diff;
                            }
                        }
                    }
                    accumulate(&mut adj[a.0], Tensor::from_parts(vec![n, d], da));
                    accumulate(&mut adj[c.0], Tensor::from_parts(vec![m, d], dc));
                }
                Op::Monomials(a, table) => {
                    let va = self.value(*a);
                    let (n, d, t) = (va.rows(), va.cols(), table.len());
                    let mut da = vec![0.0; n * d];
                    for i in 0..n {
                        let x = va.row(i);
                        for (q, alpha) in table.iter().enumerate() {
                            let gq = g.data()[i * t + q];
                            if gq == 0.0 {
                                continue;
                            }
                            for j in 0..d {
                                if alpha[j] == 0 {
                                    continue;
                                }
                                let partial = alpha.iter().zip(x).enumerate().fold(
                                    1.0,
                                    |acc, (r, (&e, &v))| {
                                        if r == j {
                                            acc * e as f64 * v.powi(e as i32 - 1)
                                        } else {
                                            acc * v.powi(e as i32)
                                        }
                                    },
                                );
                                da[i * d + j] += gq * partial;
                            }
                        }
                    }
                    accumulate(&mut adj[a.0], Tensor::from_parts(vec![n, d], da));
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn zip(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    Tensor::from_parts(
        a.shape().to_vec(),
        a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_t(v: &[f64]) -> Tensor {
        Tensor::vector(v.to_vec()).unwrap()
    }

    #[test]
    fn relu_forward() {
        let mut t = Tape::new();
        let x = t.constant(vec_t(&[-1.0, 0.0, 2.0]));
        let r = t.relu(x).unwrap();
        assert_eq!(t.value(r).data(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn concat_vectors() {
        let mut t = Tape::new();
        let a = t.constant(vec_t(&[1.0, 2.0]));
        let b = t.constant(vec_t(&[3.0]));
        let c = t.concat(a, b).unwrap();
        assert_eq!(t.value(c).data(), &[1.0, 2.0, 3.0]);
        assert_eq!(t.value(c).shape(), &[3]);
    }

    #[test]
    fn inner_product() {
        let mut t = Tape::new();
        let a = t.constant(vec_t(&[1.0, 2.0]));
        let b = t.constant(vec_t(&[3.0, 4.0]));
        let c = t.inner(a, b).unwrap();
        assert_eq!(t.scalar(c), Some(11.0));
    }

    #[test]
    fn self_inner_gradient() {
        let mut t = Tape::new();
        let x = t.leaf(vec_t(&[1.0, -2.0]));
        let f = t.inner(x, x).unwrap();
        let g = t.backward(f).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[2.0, -4.0]);
    }

    #[test]
    fn relu_subgradient_at_zero() {
        let mut t = Tape::new();
        let x = t.leaf(vec_t(&[0.0]));
        let r = t.relu(x).unwrap();
        let s = t.sum(r).unwrap();
        let g = t.backward(s).unwrap();
        assert_eq!(g.get(x).unwrap().data(), &[0.0]);
    }

    #[test]
    fn backward_requires_scalar() {
        let mut t = Tape::new();
        let x = t.leaf(vec_t(&[1.0, 2.0]));
        let r = t.relu(x).unwrap();
        assert!(matches!(t.backward(r), Err(Error::Contract(_))));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mut t = Tape::new();
        let a = t.constant(Tensor::matrix(2, 3, vec![0.0; 6]).unwrap());
        let b = t.constant(Tensor::matrix(2, 3, vec![0.0; 6]).unwrap());
        assert!(matches!(t.matmul(a, b), Err(Error::Shape(_))));
        let v = t.constant(vec_t(&[1.0]));
        assert!(matches!(t.add(a, v), Err(Error::Shape(_))));
    }

    #[test]
    fn overflow_names_primitive() {
        let mut t = Tape::new();
        let a = t.constant(vec_t(&[1e200]));
        let err = t.powf(a, 2.0).unwrap_err();
        assert_eq!(err, Error::NumericOverflow { primitive: "powf" });
        let n = t.constant(vec_t(&[-1.0]));
        assert!(t.powf(n, 0.5).is_err());
    }

    #[test]
    fn gather_rejects_non_permutation() {
        let mut t = Tape::new();
        let a = t.constant(vec_t(&[1.0, 2.0, 3.0]));
        assert!(t.gather(a, vec![0, 0, 1]).is_err());
        assert!(t.gather(a, vec![0, 1]).is_err());
        assert!(t.gather(a, vec![0, 1, 3]).is_err());
        let g = t.gather(a, vec![2, 0, 1]).unwrap();
        assert_eq!(t.value(g).data(), &[3.0, 1.0, 2.0]);
    }

    #[test]
    fn unused_leaf_gets_zero_gradient() {
        let mut t = Tape::new();
        let x = t.leaf(vec_t(&[1.0, 2.0]));
        let y = t.leaf(vec_t(&[5.0]));
        let s = t.sum(x).unwrap();
        let g = t.backward(s).unwrap();
        assert_eq!(g.get(y).unwrap().data(), &[0.0]);
        let c = t.constant(vec_t(&[1.0]));
        assert!(g.get(c).is_none());
    }

    #[test]
    fn replay_is_bit_exact() {
        let build = || {
            let mut t = Tape::new();
            let x = t.leaf(Tensor::matrix(2, 2, vec![0.3, -1.7, 2.2, 0.9]).unwrap());
            let w = t.constant(Tensor::matrix(2, 2, vec![0.1, 0.2, -0.3, 0.4]).unwrap());
            let h = t.matmul(x, w).unwrap();
            let r = t.relu(h).unwrap();
            let n = t.row_norms(r).unwrap();
            let s = t.mean(n).unwrap();
            t.scalar(s).unwrap()
        };
        assert_eq!(build().to_bits(), build().to_bits());
    }
}
