//! Bounded arithmetic circuits over weighted addition and multiplication,
//! and their compilation to ReLU networks.
//!
//! A [`Circuit`] is a DAG of `input / const / add / mul` nodes with a single
//! output and a declared magnitude bound M; the bound is machine-checked by
//! interval arithmetic over `[0, 1]^d` inputs at construction time.
//!
//! Compilation walks the nodes in topological order, carrying all live
//! values on a bus of identity-propagated pairs. Every `add` becomes an
//! exact four-neuron adder, every `mul` a [`multiplier`] instance built to
//! the per-operation budget `delta = (3M)^(1-t) eps`, so errors compound to
//! at most `eps` against exact circuit semantics outside the multiplier bad
//! sets.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::constructors::{affine_adder, multiplier_capped, MultiplierParams, DEFAULT_BIT_CAP};
use crate::error::{Error, Result};
use crate::network::{parallel, Activation, Layer, Network};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitNode {
    /// Reads input coordinate i (inputs live in [0, 1]).
    Input(usize),
    Const(f64),
    /// `alpha * lhs + beta * rhs`.
    Add { alpha: f64, beta: f64, lhs: NodeId, rhs: NodeId },
    Mul { lhs: NodeId, rhs: NodeId },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    nodes: Vec<CircuitNode>,
    output: NodeId,
    bound: f64,
    input_dim: usize,
}

impl Circuit {
    /// Nodes must reference strictly earlier nodes (which makes the graph
    /// acyclic by construction); the declared bound is validated by interval
    /// propagation over `[0, 1]^d`.
    pub fn new(nodes: Vec<CircuitNode>, output: NodeId, bound: f64) -> Result<Circuit> {
        if nodes.is_empty() || output >= nodes.len() {
            return Err(Error::Validation("output must name an existing node".into()));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidParameter("magnitude bound must be positive".into()));
        }
        let mut input_dim = 0usize;
        for (id, node) in nodes.iter().enumerate() {
            match *node {
                CircuitNode::Input(i) => input_dim = input_dim.max(i + 1),
                CircuitNode::Const(c) => {
                    if !c.is_finite() {
                        return Err(Error::Validation(format!("constant n{id} is non-finite")));
                    }
                }
                CircuitNode::Add { lhs, rhs, alpha, beta } => {
                    if lhs >= id || rhs >= id {
                        return Err(Error::Validation(format!(
                            "node n{id} references a node not yet defined"
                        )));
                    }
                    if !(alpha.is_finite() && beta.is_finite()) {
                        return Err(Error::Validation(format!("weights of n{id} are non-finite")));
                    }
                }
                CircuitNode::Mul { lhs, rhs } => {
                    if lhs >= id || rhs >= id {
                        return Err(Error::Validation(format!(
                            "node n{id} references a node not yet defined"
                        )));
                    }
                }
            }
        }
        if input_dim == 0 {
            input_dim = 1; // constant-only circuits still map from some input space
        }
        let circuit = Circuit { nodes, output, bound, input_dim };
        let ranges = circuit.intervals();
        for (id, &(lo, hi)) in ranges.iter().enumerate() {
            if lo < -bound || hi > bound {
                return Err(Error::CircuitBound(format!(
                    "node n{id} ranges over [{lo}, {hi}], outside [-{bound}, {bound}]"
                )));
            }
        }
        Ok(circuit)
    }

    pub fn nodes(&self) -> &[CircuitNode] {
        &self.nodes
    }

    pub fn output(&self) -> NodeId {
        self.output
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Number of add/mul operations.
    pub fn op_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, CircuitNode::Add { .. } | CircuitNode::Mul { .. }))
            .count()
    }

    /// Per-node value ranges under `[0, 1]^d` inputs.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let r = match *node {
                CircuitNode::Input(_) => (0.0, 1.0),
                CircuitNode::Const(c) => (c, c),
                CircuitNode::Add { alpha, beta, lhs, rhs } => {
                    let a = scale_interval(alpha, out[lhs]);
                    let b = scale_interval(beta, out[rhs]);
                    (a.0 + b.0, a.1 + b.1)
                }
                CircuitNode::Mul { lhs, rhs } => {
                    let (a, b) = (out[lhs], out[rhs]);
                    let cands = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
                    (
                        cands.iter().cloned().fold(f64::INFINITY, f64::min),
                        cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    )
                }
            };
            out.push(r);
        }
        out
    }

    /// Exact value of every node at x (reference semantics).
    pub fn eval_all_exact(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch(format!(
                "input has {} coordinates, circuit expects {}",
                x.len(),
                self.input_dim
            )));
        }
        let mut vals = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                CircuitNode::Input(i) => x[i],
                CircuitNode::Const(c) => c,
                CircuitNode::Add { alpha, beta, lhs, rhs } => alpha * vals[lhs] + beta * vals[rhs],
                CircuitNode::Mul { lhs, rhs } => vals[lhs] * vals[rhs],
            };
            vals.push(v);
        }
        Ok(vals)
    }

    /// Exact output value at x.
    pub fn eval_exact(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval_all_exact(x)?[self.output])
    }

    /// Parse the circuit text format:
    ///
    /// ```text
    /// bound M=<v>
    /// n<id> = input <i> | const <c> | add <alpha> n<a> <beta> n<b> | mul n<a> n<b>
    /// output n<id>
    /// ```
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut bound = None;
        let mut ids: HashMap<String, NodeId> = HashMap::new();
        let mut nodes: Vec<CircuitNode> = Vec::new();
        let mut output: Option<NodeId> = None;
        for (lno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lno = lno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if output.is_some() {
                return Err(parse_err(lno, "content after the output line"));
            }
            let mut tok = line.split_whitespace();
            let head = tok.next().expect("nonempty line");
            if bound.is_none() {
                if head != "bound" {
                    return Err(parse_err(lno, "expected header `bound M=<v>`"));
                }
                let field = tok.next().ok_or_else(|| parse_err(lno, "missing M=<v>"))?;
                let v = field
                    .strip_prefix("M=")
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| parse_err(lno, "expected M=<v>"))?;
                bound = Some(v);
                continue;
            }
            if head == "output" {
                let name = tok.next().ok_or_else(|| parse_err(lno, "missing output node"))?;
                let id = *ids
                    .get(name)
                    .ok_or_else(|| parse_err(lno, format!("unknown node `{name}`")))?;
                output = Some(id);
                continue;
            }
            if !head.starts_with('n') {
                return Err(parse_err(lno, format!("expected node name, found `{head}`")));
            }
            if tok.next() != Some("=") {
                return Err(parse_err(lno, "expected `=` after node name"));
            }
            let kind = tok.next().ok_or_else(|| parse_err(lno, "missing node kind"))?;
            let operand = |tok: &mut dyn Iterator<Item = &str>| -> Result<NodeId> {
                let name = tok.next().ok_or_else(|| parse_err(lno, "missing operand"))?;
                ids.get(name)
                    .copied()
                    .ok_or_else(|| parse_err(lno, format!("unknown node `{name}`")))
            };
            let number = |tok: &mut dyn Iterator<Item = &str>| -> Result<f64> {
                let t = tok.next().ok_or_else(|| parse_err(lno, "missing number"))?;
                t.parse().map_err(|_| parse_err(lno, format!("bad number `{t}`")))
            };
            let node = match kind {
                "input" => CircuitNode::Input(number(&mut tok)? as usize),
                "const" => CircuitNode::Const(number(&mut tok)?),
                "add" => {
                    let alpha = number(&mut tok)?;
                    let lhs = operand(&mut tok)?;
                    let beta = number(&mut tok)?;
                    let rhs = operand(&mut tok)?;
                    CircuitNode::Add { alpha, beta, lhs, rhs }
                }
                "mul" => {
                    let lhs = operand(&mut tok)?;
                    let rhs = operand(&mut tok)?;
                    CircuitNode::Mul { lhs, rhs }
                }
                other => return Err(parse_err(lno, format!("unknown node kind `{other}`"))),
            };
            if tok.next().is_some() {
                return Err(parse_err(lno, "trailing tokens"));
            }
            if ids.insert(head.to_string(), nodes.len()).is_some() {
                return Err(parse_err(lno, format!("node `{head}` defined twice")));
            }
            nodes.push(node);
        }
        let bound = bound.ok_or_else(|| parse_err(1, "missing `bound M=<v>` header"))?;
        let output = output.ok_or_else(|| parse_err(0, "missing `output n<id>` line"))?;
        Circuit::new(nodes, output, bound)
    }

    /// Canonical text form (inverse of [`Circuit::parse`]).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "bound M={}", self.bound).expect("string write");
        for (id, node) in self.nodes.iter().enumerate() {
            match *node {
                CircuitNode::Input(i) => writeln!(out, "n{id} = input {i}"),
                CircuitNode::Const(c) => writeln!(out, "n{id} = const {c}"),
                CircuitNode::Add { alpha, beta, lhs, rhs } => {
                    writeln!(out, "n{id} = add {alpha} n{lhs} {beta} n{rhs}")
                }
                CircuitNode::Mul { lhs, rhs } => writeln!(out, "n{id} = mul n{lhs} n{rhs}"),
            }
            .expect("string write");
        }
        writeln!(out, "output n{}", self.output).expect("string write");
        out
    }
}

fn scale_interval(s: f64, (lo, hi): (f64, f64)) -> (f64, f64) {
    if s >= 0.0 {
        (s * lo, s * hi)
    } else {
        (s * hi, s * lo)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Error-budget accounting for a compiled circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileReport {
    pub op_count: usize,
    pub bound: f64,
    /// Per-operation budget `(3M)^(1-t) eps`.
    pub per_op_delta: f64,
    /// Per-operation error growth factor `3M`.
    pub growth_factor: f64,
    /// `(3M)^(t-1) delta`: the compounded bound against exact semantics.
    pub predicted_sup_error: f64,
    /// Sizing of the multiplier blocks (absent in multiplication-free circuits).
    pub multiplier: Option<MultiplierParams>,
}

/// Compile a circuit to a ReLU network with sup error at most `eps` against
/// exact circuit semantics on `[0, 1]^d`, multiplier bad sets excluded.
pub fn compile_circuit(circuit: &Circuit, eps: f64) -> Result<Network> {
    compile_circuit_with_report(circuit, eps).map(|(net, _)| net)
}

pub fn compile_circuit_with_report(
    circuit: &Circuit,
    eps: f64,
) -> Result<(Network, CompileReport)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("accuracy must be positive".into()));
    }
    let m = circuit.bound();
    let t = circuit.op_count();
    let growth = 3.0 * m;
    let delta = if t <= 1 { eps } else { eps * growth.powi(1 - t as i32) };
    if delta < 2f64.powi(-52) * m {
        return Err(Error::BudgetUnderflow(format!(
            "per-operation budget {delta} below 2^-52 * M"
        )));
    }
    let has_mul = circuit
        .nodes()
        .iter()
        .any(|n| matches!(n, CircuitNode::Mul { .. }));
    if has_mul && delta >= m {
        return Err(Error::InvalidParameter(format!(
            "per-operation budget {delta} must stay below the bound {m}"
        )));
    }
    let mul_params = if has_mul {
        Some(MultiplierParams::compute(m, delta, DEFAULT_BIT_CAP)?)
    } else {
        None
    };
    let report = CompileReport {
        op_count: t,
        bound: m,
        per_op_delta: delta,
        growth_factor: growth,
        predicted_sup_error: delta * growth.powi(t.saturating_sub(1) as i32),
        multiplier: mul_params,
    };

    let d = circuit.input_dim();
    // the bus network carries inputs and computed node values; constants are
    // folded into operand selectors as biases
    enum Slot {
        Bus(usize),
        Const(f64),
    }
    let mut slots: Vec<Slot> = Vec::with_capacity(circuit.nodes().len());
    let mut bus = Network::identity(d);
    let mut bus_width = d;

    let selector = |slot: &Slot, width: usize| -> (Vec<f64>, f64) {
        match *slot {
            Slot::Bus(i) => {
                let mut row = vec![0.0; width];
                row[i] = 1.0;
                (row, 0.0)
            }
            Slot::Const(c) => (vec![0.0; width], c),
        }
    };

    for node in circuit.nodes() {
        let (block, lhs, rhs) = match *node {
            CircuitNode::Input(i) => {
                slots.push(Slot::Bus(i));
                continue;
            }
            CircuitNode::Const(c) => {
                slots.push(Slot::Const(c));
                continue;
            }
            CircuitNode::Add { alpha, beta, lhs, rhs } => (affine_adder(alpha, beta)?, lhs, rhs),
            CircuitNode::Mul { lhs, rhs } => {
                (multiplier_capped(m, delta, DEFAULT_BIT_CAP)?, lhs, rhs)
            }
        };
        let (row_l, bias_l) = selector(&slots[lhs], bus_width);
        let (row_r, bias_r) = selector(&slots[rhs], bus_width);
        let block = block.affine_pre(&[row_l, row_r], &[bias_l, bias_r])?;
        let carry = Network::identity(bus_width);
        let all: Vec<usize> = (0..bus_width).collect();
        let step = parallel(&[(&carry, &all), (&block, &all)], bus_width)?;
        bus = bus.stack(&step)?;
        slots.push(Slot::Bus(bus_width));
        bus_width += 1;
    }

    let net = match slots[circuit.output()] {
        Slot::Bus(i) => {
            let mut row = vec![0.0; bus_width];
            row[i] = 1.0;
            bus.affine_post(&[row], &[0.0])?
        }
        Slot::Const(c) => constant_network(d, c)?,
    };
    Ok((net, report))
}

/// Network ignoring its input and emitting the constant c (via a bias-only
/// hidden neuron, keeping the readout bias-free).
fn constant_network(d: usize, c: f64) -> Result<Network> {
    let hidden = Layer::from_rows(vec![(vec![0.0; d], c.abs())], Activation::Relu)?;
    let readout = Layer::from_rows(vec![(vec![c.signum()], 0.0)], Activation::Identity)?;
    Network::new(d, vec![hidden, readout])
}
