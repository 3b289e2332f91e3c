//! User-facing verification: named catalog entries against the brute-force
//! oracles.

use anyhow::{anyhow, bail};
use proxsplit::hilbert::{Shape, Vector};
use proxsplit::oracles::{prox_bruteforce_1d, prox_bruteforce_nd, prox_bruteforce_scalar, OracleReport};
use proxsplit::prox::ProxFun;
use proxsplit::scalar::ScalarFun;
use proxsplit::sets::ConvexSet;
use std::collections::BTreeMap;

const TOLERANCE: f64 = 1e-6;

struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    fn parse(tokens: &[&str]) -> anyhow::Result<Self> {
        let mut map = BTreeMap::new();
        for tok in tokens {
            let Some((k, v)) = tok.split_once('=') else {
                bail!("expected key=value, got '{tok}'");
            };
            let key = match k {
                "ω" => "omega",
                "γ" => "gamma",
                "ρ" => "rho",
                "ε" => "eps",
                other => other,
            };
            map.insert(key.to_string(), v.to_string());
        }
        Ok(Params { map })
    }

    fn f64(&self, key: &str, default: Option<f64>) -> anyhow::Result<f64> {
        match self.map.get(key) {
            Some(text) => text
                .parse::<f64>()
                .map_err(|e| anyhow!("parameter '{key}': {e}")),
            None => default.ok_or_else(|| anyhow!("missing parameter '{key}'")),
        }
    }

    fn point(&self) -> anyhow::Result<Vec<f64>> {
        let text = self
            .map
            .get("x")
            .ok_or_else(|| anyhow!("missing parameter 'x'"))?;
        text.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| anyhow!("point entry: {e}")))
            .collect()
    }

    fn check_set_is_point(&self) -> anyhow::Result<()> {
        if let Some(c) = self.map.get("C") {
            if c != "point" {
                bail!("only C=point is supported for scalar checks");
            }
        }
        Ok(())
    }
}

fn scalar_reports(
    name: &str,
    phi: &ScalarFun,
    gamma: f64,
    x: f64,
) -> Vec<OracleReport> {
    let mut reports = Vec::new();
    let candidate = phi.prox(gamma, x);
    let reference = prox_bruteforce_scalar(phi, gamma, x);
    reports.push(OracleReport::compare(
        format!("{name}: prox(gamma={gamma}, x={x})"),
        reference,
        candidate,
        TOLERANCE,
    ));
    if phi.lipschitz().is_some() {
        let h = 1e-6;
        let fd = (phi.value(x + h).unwrap() - phi.value(x - h).unwrap()) / (2.0 * h);
        reports.push(OracleReport::compare(
            format!("{name}: gradient(x={x})"),
            fd,
            phi.derivative(x).expect("smooth"),
            1e-5,
        ));
    }
    reports
}

/// Runs the named check and returns one report per compared quantity.
/// Unknown names or malformed parameters are validation errors.
pub fn prox_check(descriptor: &str) -> anyhow::Result<Vec<OracleReport>> {
    let tokens: Vec<&str> = descriptor.split_whitespace().collect();
    let Some((&name, rest)) = tokens.split_first() else {
        bail!("empty prox-check descriptor");
    };
    let params = Params::parse(rest)?;
    match name {
        "huber" => {
            params.check_set_is_point()?;
            let rho = params.f64("rho", None)?;
            let gamma = params.f64("gamma", Some(1.0))?;
            let x = params.f64("x", None)?;
            Ok(scalar_reports(name, &ScalarFun::huber(rho)?, gamma, x))
        }
        "log_dist" | "log" => {
            params.check_set_is_point()?;
            let omega = params.f64("omega", None)?;
            let gamma = params.f64("gamma", Some(1.0))?;
            let x = params.f64("x", None)?;
            Ok(scalar_reports(
                name,
                &ScalarFun::log_penalty(omega)?,
                gamma,
                x,
            ))
        }
        "vapnik" => {
            params.check_set_is_point()?;
            let eps = params.f64("eps", None)?;
            let gamma = params.f64("gamma", Some(1.0))?;
            let x = params.f64("x", None)?;
            Ok(scalar_reports(name, &ScalarFun::vapnik(eps)?, gamma, x))
        }
        "svapnik" => {
            params.check_set_is_point()?;
            let eps = params.f64("eps", None)?;
            let gamma = params.f64("gamma", Some(1.0))?;
            let x = params.f64("x", None)?;
            let phi = ScalarFun::smooth_vapnik(ScalarFun::square(), eps)?;
            Ok(scalar_reports(name, &phi, gamma, x))
        }
        "square" | "abs" => {
            params.check_set_is_point()?;
            let gamma = params.f64("gamma", Some(1.0))?;
            let x = params.f64("x", None)?;
            let phi = if name == "square" {
                ScalarFun::square()
            } else {
                ScalarFun::abs()
            };
            Ok(scalar_reports(name, &phi, gamma, x))
        }
        "hinge-sq" => {
            let gamma = params.f64("gamma", Some(1.0))?;
            let x = params.f64("x", None)?;
            let phi = ScalarFun::square_dist(1.0, f64::INFINITY)?;
            let candidate = phi.prox(gamma, x);
            let reference = prox_bruteforce_scalar(&phi, gamma, x);
            Ok(vec![OracleReport::compare(
                format!("hinge-sq: prox(gamma={gamma}, x={x})"),
                reference,
                candidate,
                TOLERANCE,
            )])
        }
        "box-proj" => {
            let lo = params.f64("lo", Some(0.0))?;
            let hi = params.f64("hi", Some(255.0))?;
            let x = params.f64("x", None)?;
            let set = ConvexSet::box_set(Shape::Flat(1), lo, hi)?;
            let candidate = set.project(&Vector::flat(&[x])).as_slice()[0];
            let value = move |p: f64| (lo..=hi).contains(&p).then_some(0.0);
            let reference = prox_bruteforce_1d(&value, 1.0, x);
            Ok(vec![OracleReport::compare(
                format!("box-proj[{lo},{hi}](x={x})"),
                reference,
                candidate,
                TOLERANCE,
            )])
        }
        "ball-proj" => {
            let radius = params.f64("radius", Some(1.0))?;
            let point = params.point()?;
            anyhow::ensure!(
                (1..=3).contains(&point.len()),
                "ball-proj supports 1 to 3 coordinates"
            );
            let shape = Shape::Flat(point.len());
            let x = Vector::new(point, shape.clone())
                .map_err(|e| anyhow!("invalid point: {e}"))?;
            let set = ConvexSet::ball(Vector::zeros(shape), radius)?;
            let ind = ProxFun::indicator(set.clone());
            let candidate = set.project(&x);
            let reference = prox_bruteforce_nd(&ind, 1.0, &x);
            Ok(candidate
                .as_slice()
                .iter()
                .zip(reference.as_slice())
                .enumerate()
                .map(|(k, (&c, &r))| {
                    OracleReport::compare(
                        format!("ball-proj[r={radius}] coordinate {k}"),
                        r,
                        c,
                        TOLERANCE,
                    )
                })
                .collect())
        }
        other => bail!(
            "unknown check '{other}' (expected huber|log_dist|vapnik|svapnik|square|abs|hinge-sq|box-proj|ball-proj)"
        ),
    }
}
