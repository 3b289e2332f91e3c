//! Declarative problem descriptions for the `solve` subcommand.
//!
//! Flat key-value text naming the space, an optional hard constraint, and a
//! numbered list of penalized constraints:
//!
//! ```text
//! # minimize: sum of penalties of d_{C_k}(L_k x), subject to the hard set
//! space = 2            # flat dimension, or h x w as "space = 8x8"
//! hard = box 0 255     # or "none"
//! set1 = box 0 1
//! op1 = id             # id | gradient
//! pen1 = square        # indicator | abs | square | huber R | vapnik E | log W
//! weight1 = 1.0
//! set2 = ball 1.5      # radius (centered at 0), or: ball 1.5 @ 0.5
//! pen2 = huber 0.25
//! ```
//!
//! Sets: `box LO HI`, `ball RADIUS [@ CENTER]` (constant center),
//! `hyperplane B` and `halfspace B` (normal vector of all ones), `point [C]`.

use crate::config::KeyValues;
use anyhow::{anyhow, bail, Context};
use proxsplit::hilbert::{Op, Shape, Vector};
use proxsplit::model::{FeasibilityRelaxation, Penalty, PenaltyTerm};
use proxsplit::sets::ConvexSet;

fn parse_shape(text: &str) -> anyhow::Result<Shape> {
    if let Some((h, w)) = text.split_once('x') {
        let h: usize = h.trim().parse().context("grid height")?;
        let w: usize = w.trim().parse().context("grid width")?;
        anyhow::ensure!(h > 0 && w > 0, "space dimensions must be positive");
        Ok(Shape::Grid(h, w))
    } else {
        let n: usize = text.trim().parse().context("space dimension")?;
        anyhow::ensure!(n > 0, "space dimension must be positive");
        Ok(Shape::Flat(n))
    }
}

fn parse_set(text: &str, shape: &Shape) -> anyhow::Result<ConvexSet> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let Some((&kind, args)) = parts.split_first() else {
        bail!("empty set description");
    };
    let num = |idx: usize, what: &str| -> anyhow::Result<f64> {
        args.get(idx)
            .ok_or_else(|| anyhow!("set '{kind}' is missing {what}"))?
            .parse::<f64>()
            .with_context(|| format!("parsing {what}"))
    };
    Ok(match kind {
        "box" => ConvexSet::box_set(shape.clone(), num(0, "lower bound")?, num(1, "upper bound")?)?,
        "ball" => {
            let radius = num(0, "radius")?;
            let center = match args.get(1) {
                Some(&"@") => Vector::constant(shape.clone(), num(2, "center value")?),
                Some(other) => bail!("unexpected token '{other}' in ball description"),
                None => Vector::zeros(shape.clone()),
            };
            ConvexSet::ball(center, radius)?
        }
        "hyperplane" => {
            ConvexSet::hyperplane(Vector::constant(shape.clone(), 1.0), num(0, "offset")?)?
        }
        "halfspace" => {
            ConvexSet::halfspace(Vector::constant(shape.clone(), 1.0), num(0, "offset")?)?
        }
        "point" => {
            let value = args.first().map(|v| v.parse::<f64>()).transpose()?.unwrap_or(0.0);
            ConvexSet::point(Vector::constant(shape.clone(), value))
        }
        other => bail!("unknown set kind '{other}'"),
    })
}

fn parse_penalty(text: &str) -> anyhow::Result<Penalty> {
    let mut parts = text.split_whitespace();
    let kind = parts
        .next()
        .ok_or_else(|| anyhow!("empty penalty description"))?;
    let mut num = |what: &str| -> anyhow::Result<f64> {
        parts
            .next()
            .ok_or_else(|| anyhow!("penalty '{kind}' is missing {what}"))?
            .parse::<f64>()
            .with_context(|| format!("parsing {what}"))
    };
    Ok(match kind {
        "indicator" => Penalty::Indicator,
        "abs" => Penalty::Abs,
        "square" => Penalty::Square,
        "huber" => Penalty::Huber(num("threshold")?),
        "vapnik" => Penalty::Vapnik {
            eps: num("insensitivity width")?,
            psi: None,
        },
        "log" => Penalty::Log(num("weight")?),
        other => bail!("unknown penalty '{other}'"),
    })
}

fn parse_op(text: &str, shape: &Shape) -> anyhow::Result<Op> {
    match text.trim() {
        "id" | "identity" => Ok(Op::identity(shape.clone())),
        "gradient" => {
            let (h, w) = shape
                .grid_dims()
                .ok_or_else(|| anyhow!("gradient operator needs a grid space"))?;
            Ok(Op::gradient(h, w))
        }
        other => bail!("unknown operator '{other}' (expected id|gradient)"),
    }
}

/// Parses the body of a problem-description file.
pub fn parse_problem(kv: &KeyValues) -> anyhow::Result<FeasibilityRelaxation> {
    let shape = parse_shape(
        kv.get("space")
            .ok_or_else(|| anyhow!("problem file is missing 'space'"))?,
    )?;
    let hard = match kv.get("hard") {
        None => None,
        Some(text) if text.trim() == "none" => None,
        Some(text) => Some(parse_set(text, &shape)?),
    };
    let mut terms = Vec::new();
    for k in 1.. {
        let Some(set_text) = kv.get(&format!("set{k}")) else {
            break;
        };
        let op = match kv.get(&format!("op{k}")) {
            Some(text) => parse_op(text, &shape)?,
            None => Op::identity(shape.clone()),
        };
        let set = parse_set(set_text, op.out_shape())?;
        let penalty = parse_penalty(
            kv.get(&format!("pen{k}"))
                .ok_or_else(|| anyhow!("constraint {k} is missing 'pen{k}'"))?,
        )?;
        let weight = match kv.get(&format!("weight{k}")) {
            Some(text) => text.trim().parse::<f64>().context("parsing weight")?,
            None => 1.0,
        };
        terms.push(PenaltyTerm {
            set,
            op,
            penalty,
            weight,
        });
    }
    anyhow::ensure!(!terms.is_empty(), "problem file declares no constraints (set1, ...)");
    Ok(FeasibilityRelaxation::new(shape, hard, terms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::KeyValues;

    #[test]
    fn parses_disjoint_intervals() {
        let text = "
            # two disjoint intervals with quadratic penalties
            space = 1
            hard = none
            set1 = box 0 1
            pen1 = square
            set2 = box 2 3
            pen2 = square
        ";
        let kv = KeyValues::parse(text).unwrap();
        let spec = parse_problem(&kv).unwrap();
        assert_eq!(spec.terms().len(), 2);
        assert!(spec.hard_set().is_none());
        let problem = spec.relax().unwrap();
        assert_eq!(problem.smooth().len(), 2);
    }

    #[test]
    fn parses_grid_space_with_gradient() {
        let text = "
            space = 4x4
            hard = box 0 255
            set1 = ball 3.0
            op1 = gradient
            pen1 = huber 0.5
            weight1 = 2.0
        ";
        let kv = KeyValues::parse(text).unwrap();
        let spec = parse_problem(&kv).unwrap();
        assert_eq!(spec.shape().len(), 16);
        assert!(spec.hard_set().is_some());
    }

    #[test]
    fn rejects_unknown_tokens() {
        for bad in [
            "space = 1\nset1 = cube 0 1\npen1 = square",
            "space = 1\nset1 = box 0 1\npen1 = cubic",
            "space = 1\nset1 = box 0 1\npen1 = square\nop1 = fft",
        ] {
            let kv = KeyValues::parse(bad).unwrap();
            assert!(parse_problem(&kv).is_err(), "should reject: {bad}");
        }
    }
}
