//! Text parameter files.
//!
//! ```text
//! cusp-checkpoint 1
//! scalar <name> <value>
//! net <name> <hidden-activation> <n-dims> <d0> <d1> ...
//! layer <i> weight <rows> <cols>
//! <row-major values>
//! layer <i> bias <len>
//! <values>
//! end
//! ```
//!
//! Values are written in Rust's shortest round-trip float syntax, so a
//! save/load cycle reproduces every parameter bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use super::mlp::{Activation, Mlp};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &str = "cusp-checkpoint";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Checkpoint {
    pub scalars: Vec<(String, f64)>,
    pub nets: Vec<(String, Mlp)>,
}

fn write_values(out: &mut String, values: &[f64]) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        write!(out, "{v:?}").unwrap();
    }
    out.push('\n');
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Checkpoint(format!("line {line}: {msg}"))
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(Error::Checkpoint(format!("invalid entry name {name:?}")));
    }
    Ok(())
}

impl Checkpoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_scalar(&mut self, name: &str, value: f64) {
        self.scalars.push((name.to_owned(), value));
    }

    pub fn push_net(&mut self, name: &str, net: &Mlp) {
        self.nets.push((name.to_owned(), net.clone()));
    }

    pub fn scalar(&self, name: &str) -> Result<f64> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Checkpoint(format!("missing scalar {name}")))
    }

    pub fn net(&self, name: &str) -> Result<&Mlp> {
        self.nets
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Checkpoint(format!("missing network {name}")))
    }

    pub fn to_text(&self) -> Result<String> {
        let mut out = format!("{MAGIC} {CHECKPOINT_VERSION}\n");
        for (name, v) in &self.scalars {
            check_name(name)?;
            writeln!(out, "scalar {name} {v:?}").unwrap();
        }
        for (name, net) in &self.nets {
            check_name(name)?;
            write!(
                out,
                "net {name} {} {}",
                net.hidden_activation(),
                net.dims().len()
            )
            .unwrap();
            for d in net.dims() {
                write!(out, " {d}").unwrap();
            }
            out.push('\n');
            for layer in 0..net.num_layers() {
                let (cols, rows) = (net.dims()[layer], net.dims()[layer + 1]);
                writeln!(out, "layer {layer} weight {rows} {cols}").unwrap();
                write_values(&mut out, net.weights(layer));
                writeln!(out, "layer {layer} bias {rows}").unwrap();
                write_values(&mut out, net.bias(layer));
            }
        }
        out.push_str("end\n");
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
        let mut head = header.split_whitespace();
        if head.next() != Some(MAGIC) {
            return Err(bad(1, "missing checkpoint header"));
        }
        let version: u32 = head
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(1, "missing version"))?;
        if version != CHECKPOINT_VERSION {
            return Err(bad(1, format!("unsupported version {version}")));
        }

        let mut ckpt = Checkpoint::new();
        let mut ended = false;
        while let Some((ln, line)) = lines.next() {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("scalar") => {
                    let name = parts.next().ok_or_else(|| bad(ln, "scalar without name"))?;
                    let value = parse_f64(ln, parts.next())?;
                    ckpt.scalars.push((name.to_owned(), value));
                }
                Some("net") => {
                    let name = parts.next().ok_or_else(|| bad(ln, "net without name"))?;
                    let act = parts
                        .next()
                        .and_then(Activation::parse)
                        .ok_or_else(|| bad(ln, "unknown activation"))?;
                    let n_dims = parse_usize(ln, parts.next())?;
                    let dims = (0..n_dims)
                        .map(|_| parse_usize(ln, parts.next()))
                        .collect::<Result<Vec<_>>>()?;
                    let mut params = Vec::new();
                    for layer in 0..dims.len().saturating_sub(1) {
                        for (kind, len) in [
                            ("weight", dims[layer] * dims[layer + 1]),
                            ("bias", dims[layer + 1]),
                        ] {
                            let (ln, tag) =
                                lines.next().ok_or_else(|| bad(ln, "truncated network"))?;
                            let mut tag = tag.split_whitespace();
                            if tag.next() != Some("layer")
                                || parse_usize(ln, tag.next())? != layer
                                || tag.next() != Some(kind)
                            {
                                return Err(bad(ln, format!("expected layer {layer} {kind}")));
                            }
                            let (ln, values) =
                                lines.next().ok_or_else(|| bad(ln, "truncated values"))?;
                            let before = params.len();
                            for v in values.split_whitespace() {
                                params.push(parse_f64(ln, Some(v))?);
                            }
                            if params.len() - before != len {
                                return Err(bad(
                                    ln,
                                    format!(
                                        "expected {len} values, found {}",
                                        params.len() - before
                                    ),
                                ));
                            }
                        }
                    }
                    let net = Mlp::from_parts(dims, act, params).map_err(|e| bad(ln, e))?;
                    ckpt.nets.push((name.to_owned(), net));
                }
                Some("end") => {
                    ended = true;
                    break;
                }
                None => continue,
                Some(other) => return Err(bad(ln, format!("unexpected record {other:?}"))),
            }
        }
        if !ended {
            return Err(Error::Checkpoint("missing end marker".into()));
        }
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

fn parse_f64(line: usize, tok: Option<&str>) -> Result<f64> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(line, format!("bad number {tok:?}")))
}

fn parse_usize(line: usize, tok: Option<&str>) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(line, format!("bad integer {tok:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(seed in any::<u64>(), hidden in 1usize..9, scale in -1e6f64..1e6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut net = Mlp::new(&[3, hidden, 2], &mut rng).unwrap();
            net.params_mut()[0] *= scale;
            let mut ckpt = Checkpoint::new();
            ckpt.push_scalar("log_alpha", scale * 1e-7);
            ckpt.push_net("actor", &net);
            let back = Checkpoint::from_text(&ckpt.to_text().unwrap()).unwrap();
            prop_assert_eq!(back.net("actor").unwrap().params().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            net.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(back, ckpt);
        }
    }

    #[test]
    fn corrupt_files_are_rejected() {
        assert!(Checkpoint::from_text("").is_err());
        assert!(Checkpoint::from_text("cusp-checkpoint 9\nend\n").is_err());
        assert!(Checkpoint::from_text(
            "cusp-checkpoint 1\nnet a relu 2 1 1\nlayer 0 weight 1 1\n0.5\n"
        )
        .is_err());
        assert!(Checkpoint::from_text("cusp-checkpoint 1\nscalar a 1.0\n").is_err());
    }
}
