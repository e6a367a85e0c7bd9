//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON text; errors come back as `{"error": {...}}`.

use markov_surface::flows::{complex_from_json, orbit, Axis};
use markov_surface::markov::{enumerate_ordered, lagrange_value};
use markov_surface::singular::classify_surface;
use markov_surface::surface::Pt;
use markov_surface::{BigComplex, Error, ParamsSpec, SurfaceParams};
use num_bigint::BigInt;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const PREC: usize = 128;

fn error_json(e: &Error, input: &str) -> String {
    json!({"error": {"code": e.code(), "message": e.to_string(), "input": input}}).to_string()
}

fn parse(s: &str) -> Result<Value, Error> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

fn f64_pair(c: &BigComplex) -> Value {
    let (re, im) = c.to_f64_pair();
    json!([re, im])
}

/// Orbit of `(x, y, lift)` under `V^axis` sampled at `steps + 1` equally spaced times in `[0, t]`.
///
/// `x`, `y` are `[re, im]` or numbers; `branch` picks one of the two `z` over `(x, y)`.
pub fn orbit_json(x: &str, y: &str, branch: usize, axis: &str, t: f64, steps: usize) -> Result<String, Error> {
    let np = SurfaceParams::markov().to_numeric(PREC);
    let x = complex_from_json(&parse(x)?, PREC)?;
    let y = complex_from_json(&parse(y)?, PREC)?;
    let z = np.lift_z(&x, &y)[branch.min(1)].clone();
    let p: Pt = [x, y, z];
    let axis = Axis::parse(axis)?;
    let steps = steps.clamp(1, 2000);
    let dt = BigComplex::from_f64(t / steps as f64, PREC);
    let pts = orbit(&np, axis, &p, &dt, steps)?;
    let out: Vec<Value> = pts.iter().map(|q| Value::Array(q.iter().map(f64_pair).collect())).collect();
    Ok(json!({"axis": axis.name(), "points": out}).to_string())
}

/// Ordered Markov triples up to `bound` with their Lagrange values.
pub fn triples_json(bound: &str) -> Result<String, Error> {
    let b: BigInt = bound.trim().parse().map_err(|_| Error::Parse(format!("bad bound {bound:?}")))?;
    if b > BigInt::from(10u64).pow(15) {
        return Err(Error::InvalidParams("bound above 1e15 is too slow for the browser".into()));
    }
    let rows: Result<Vec<Value>, Error> = enumerate_ordered(&b)
        .iter()
        .map(|t| {
            let l = lagrange_value(&t.z, PREC)?;
            Ok(json!({"triple": t.to_json(), "lagrange": l.to_sci(18)}))
        })
        .collect();
    Ok(Value::Array(rows?).to_string())
}

/// Singular points and ADE types of the surface with rational parameters `{"A":…,"E":…}`.
pub fn classify_json(params: &str) -> Result<String, Error> {
    let sp = match ParamsSpec::from_json(&parse(params)?, PREC)? {
        ParamsSpec::Exact(sp) => sp,
        ParamsSpec::Numeric(_) => return Err(Error::InvalidParams("the demo takes rational parameters only".into())),
    };
    let (reports, degenerate) = classify_surface(&sp, 40.0, 256)?;
    Ok(json!({
        "params": sp.to_json(),
        "resultant_degenerate": degenerate,
        "singularities": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn flow_orbit(x: &str, y: &str, branch: usize, axis: &str, t: f64, steps: usize) -> String {
    orbit_json(x, y, branch, axis, t, steps).unwrap_or_else(|e| error_json(&e, axis))
}

#[wasm_bindgen]
pub fn markov_triples(bound: &str) -> String {
    triples_json(bound).unwrap_or_else(|e| error_json(&e, bound))
}

#[wasm_bindgen]
pub fn classify(params: &str) -> String {
    classify_json(params).unwrap_or_else(|e| error_json(&e, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_stays_on_surface() {
        let v: Value = serde_json::from_str(&orbit_json("[0.3, 0.1]", "0.5", 0, "z", 2.0, 20).unwrap()).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 21);
        for p in pts {
            let c: Vec<(f64, f64)> = (0..3).map(|k| (p[k][0].as_f64().unwrap(), p[k][1].as_f64().unwrap())).collect();
            let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
            let sq: (f64, f64) = c.iter().map(|&z| mul(z, z)).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            let xyz = mul(mul(c[0], c[1]), c[2]);
            assert!((sq.0 - 3.0 * xyz.0).abs() < 1e-9 && (sq.1 - 3.0 * xyz.1).abs() < 1e-9);
        }
    }

    #[test]
    fn triples_and_errors() {
        let v: Value = serde_json::from_str(&markov_triples("30")).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 5);
        let e: Value = serde_json::from_str(&markov_triples("abc")).unwrap();
        assert_eq!(e["error"]["code"], "Parse");
    }

    #[test]
    fn classify_d4() {
        let v: Value = serde_json::from_str(&classify(r#"{"A":"8","B":"8","C":"8","D":"-28","E":"1"}"#)).unwrap();
        assert_eq!(v["singularities"][0]["adeType"], "D4");
    }
}
