//! `katokit compute`: one number from a stored field.

use std::path::Path;

use katokit::grid::{load_field, make_bump, BoxRegion};
use katokit::kato::{kato_norm, AmalgamNormSpec, Exponent};
use katokit::psido::{quantize, schatten_norm, sw_norm, Symbol, Tau};
use katokit::sobolev::h_norm;
use katokit::{Field, MultiOrder};
use serde::Serialize;

use crate::CliError;

pub const KINDS: [&str; 4] = ["h-norm", "kato-norm", "sw-norm", "schatten"];

#[derive(Debug, Clone, Default)]
pub struct ComputeArgs {
    pub order: Option<String>,
    pub p: Option<String>,
    pub tau: Option<f64>,
    /// Window support as fractions of the period, `lo,hi`.
    pub window: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Computed {
    pub kind: String,
    pub value: f64,
    pub samples: usize,
    pub dim: usize,
    pub period: f64,
}

pub fn parse_exponent(s: &str) -> Result<Exponent, CliError> {
    match s.trim() {
        "inf" | "infinity" => Ok(Exponent::Infinity),
        t => {
            let p: f64 = t.parse().map_err(|_| CliError::Usage(format!("bad exponent {s:?}")))?;
            Exponent::new(p).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

/// `1.5` for every block, or one comma-separated entry per block.
pub fn parse_order(s: Option<&str>, blocks: &[usize]) -> Result<MultiOrder, CliError> {
    let Some(s) = s else {
        return Ok(MultiOrder::zero(blocks));
    };
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad order {s:?}"))))
        .collect::<Result<_, _>>()?;
    let vals = if vals.len() == 1 { vec![vals[0]; blocks.len()] } else { vals };
    MultiOrder::new(vals, blocks.to_vec()).map_err(|e| CliError::Usage(e.to_string()))
}

fn window(u: &Field, spec: Option<&str>) -> Result<Field, CliError> {
    let (lo, hi) = match spec {
        None => (0.25, 0.75),
        Some(s) => {
            let v: Vec<f64> = s.split(',').filter_map(|t| t.trim().parse().ok()).collect();
            match v.as_slice() {
                [lo, hi] if 0.0 <= *lo && lo < hi && *hi <= 1.0 => (*lo, *hi),
                _ => return Err(CliError::Usage(format!("window must be lo,hi with 0 <= lo < hi <= 1, got {s:?}"))),
            }
        }
    };
    let g = u.spec();
    let l = g.period();
    Ok(make_bump(g, &BoxRegion::cube(g.dim(), lo * l, hi * l), None)?.field)
}

pub fn compute(kind: &str, path: &Path, args: &ComputeArgs) -> Result<Computed, CliError> {
    let u = load_field(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let g = u.spec().clone();
    let order = parse_order(args.order.as_deref(), g.blocks())?;
    let p = parse_exponent(args.p.as_deref().unwrap_or("2"))?;
    let value = match kind {
        "h-norm" => h_norm(&u, &order)?,
        "kato-norm" => {
            let chi = window(&u, args.window.as_deref())?;
            kato_norm(&u, &AmalgamNormSpec::continuous(order, p, chi)?)?
        }
        "sw-norm" => {
            let chi = window(&u, args.window.as_deref())?;
            sw_norm(&u, &chi, p, g.samples())?
        }
        "schatten" => {
            let a = Symbol::new(u, order)?;
            let tau = Tau::scalar(a.x_spec().dim(), args.tau.unwrap_or(0.0))?;
            schatten_norm(&quantize(&a, &tau)?, p)?
        }
        other => return Err(CliError::Usage(format!("unknown kind {other:?}; expected one of {}", KINDS.join(", ")))),
    };
    Ok(Computed { kind: kind.to_string(), value, samples: g.samples(), dim: g.dim(), period: g.period() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_exponents() {
        assert_eq!(parse_order(Some("1.5"), &[1, 1]).unwrap().s(), &[1.5, 1.5]);
        assert_eq!(parse_order(Some("1,2"), &[1, 1]).unwrap().s(), &[1.0, 2.0]);
        assert!(parse_order(Some("1,2,3"), &[1, 1]).is_err());
        assert_eq!(parse_order(None, &[2]).unwrap().s(), &[0.0]);
        assert_eq!(parse_exponent("inf").unwrap(), Exponent::Infinity);
        assert_eq!(parse_exponent("3").unwrap(), Exponent::Finite(3.0));
        assert!(parse_exponent("0.5").is_err());
        assert!(parse_exponent("x").is_err());
    }
}
