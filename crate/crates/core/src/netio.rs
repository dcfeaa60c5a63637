//! Plain-text network serialization.
//!
//! Format:
//!
//! ```text
//! relunet v1 input=<d> layers=<l>
//! layer <i> out=<n> act=<relu|id>
//! <n rows of n_in+1 decimal numbers: weights then bias>
//! ...
//! ```
//!
//! Numbers are written with 17 significant digits, so a save/load round trip
//! reproduces every weight bit-exactly. The readout-layer bias must be zero.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{Activation, Layer, Network};

impl Network {
    /// Serialize to the `relunet v1` text format.
    pub fn to_text(&self) -> Result<String> {
        let readout = self.layers().last().expect("nonempty");
        if readout.bias().iter().any(|&b| b != 0.0) {
            return Err(Error::Validation(
                "readout layer carries a nonzero bias and cannot be serialized".into(),
            ));
        }
        let mut out = String::new();
        writeln!(
            out,
            "relunet v1 input={} layers={}",
            self.input_dim(),
            self.depth()
        )
        .expect("string write");
        for (i, layer) in self.layers().iter().enumerate() {
            let act = match layer.activation() {
                Activation::Relu => "relu",
                Activation::Identity => "id",
            };
            writeln!(out, "layer {} out={} act={}", i, layer.out_dim(), act).expect("string write");
            for r in 0..layer.out_dim() {
                let mut first = true;
                for w in layer.row(r).iter().chain(std::iter::once(&layer.bias()[r])) {
                    if !first {
                        out.push(' ');
                    }
                    write!(out, "{:.16e}", w).expect("string write");
                    first = false;
                }
                out.push('\n');
            }
        }
        Ok(out)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        fs::write(path, self.to_text()?)?;
        Ok(())
    }

    /// Parse the `relunet v1` text format; errors carry 1-based line numbers.
    pub fn from_text(text: &str) -> Result<Network> {
        let mut lines = text.lines().enumerate();
        let (lno, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty file"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("relunet") || fields.next() != Some("v1") {
            return Err(parse_err(lno + 1, "expected header `relunet v1 ...`"));
        }
        let input_dim: usize = key_value(fields.next(), "input", lno + 1)?;
        let layer_count: usize = key_value(fields.next(), "layers", lno + 1)?;
        if input_dim == 0 || layer_count == 0 {
            return Err(parse_err(lno + 1, "input and layers must be positive"));
        }

        let mut layers = Vec::with_capacity(layer_count);
        let mut prev = input_dim;
        for li in 0..layer_count {
            let (lno, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("file truncated before layer {li}")))?;
            let mut fields = line.split_whitespace();
            if fields.next() != Some("layer") {
                return Err(parse_err(lno + 1, format!("expected `layer {li} ...`")));
            }
            let idx: usize = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(lno + 1, "missing layer index"))?;
            if idx != li {
                return Err(parse_err(lno + 1, format!("expected layer {li}, found {idx}")));
            }
            let out_dim: usize = key_value(fields.next(), "out", lno + 1)?;
            let act = match fields.next() {
                Some("act=relu") => Activation::Relu,
                Some("act=id") => Activation::Identity,
                other => {
                    return Err(parse_err(
                        lno + 1,
                        format!("expected act=relu or act=id, found {:?}", other),
                    ))
                }
            };
            let mut weights = Vec::with_capacity(out_dim * prev);
            let mut bias = Vec::with_capacity(out_dim);
            for _ in 0..out_dim {
                let (lno, line) = lines
                    .next()
                    .ok_or_else(|| parse_err(0, format!("file truncated inside layer {li}")))?;
                let nums: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| parse_err(lno + 1, format!("bad number `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                if nums.len() != prev + 1 {
                    return Err(parse_err(
                        lno + 1,
                        format!("row has {} numbers, expected {}", nums.len(), prev + 1),
                    ));
                }
                weights.extend_from_slice(&nums[..prev]);
                bias.push(nums[prev]);
            }
            layers.push(Layer::new(prev, out_dim, weights, bias, act)?);
            prev = out_dim;
        }
        let net = Network::new(input_dim, layers)?;
        let readout = net.layers().last().expect("nonempty");
        if readout.bias().iter().any(|&b| b != 0.0) {
            return Err(Error::Validation("readout layer bias must be zero".into()));
        }
        Ok(net)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Network> {
        let text = fs::read_to_string(path)?;
        Network::from_text(&text)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn key_value(field: Option<&str>, key: &str, line: usize) -> Result<usize> {
    let field = field.ok_or_else(|| parse_err(line, format!("missing {key}=<n>")))?;
    let rest = field
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected {key}=<n>, found `{field}`")))?;
    rest.parse()
        .map_err(|_| parse_err(line, format!("bad value in `{field}`")))
}
