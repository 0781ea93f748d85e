//! Three operations for the static page in `www/`. Each takes plain strings
//! and returns a JSON string; errors come back as `{"error": ...}`.

use k3cone::lattice::catalog;
use k3cone::report::{parse_class, parse_gram_json};
use k3cone::rrk3::K3Context;
use k3cone::vinberg::{default_base, run_vinberg, validate_domain, DEFAULT_MAX_LEVEL};
use k3cone::{Error, NSLattice};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// A catalog name (`V1`…`V14`, or a block expression) or a Gram JSON object.
fn lattice(spec: &str) -> Result<NSLattice, Error> {
    let s = spec.trim();
    if s.starts_with('{') {
        parse_gram_json(s)
    } else {
        catalog(s)
    }
}

fn context(spec: &str) -> Result<K3Context, Error> {
    let lat = lattice(spec)?;
    K3Context::from_lattice(&lat, &default_base(&lat), DEFAULT_MAX_LEVEL)
}

fn wrap(r: Result<Value, Error>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

pub fn curves_json(spec: &str) -> String {
    wrap((|| {
        let lat = lattice(spec)?;
        let base = default_base(&lat);
        let cfg = run_vinberg(&lat, &base, DEFAULT_MAX_LEVEL)?;
        Ok(json!({
            "lattice": lat.label(),
            "base": base,
            "curves": cfg.curves,
            "intersections": cfg.intersections,
            "validated": validate_domain(&cfg),
        }))
    })())
}

pub fn cohomology_json(spec: &str, class: &str) -> String {
    wrap((|| {
        let ctx = context(spec)?;
        let d = parse_class(class)?;
        ctx.lattice.check_class(&d)?;
        Ok(json!({
            "class": d,
            "square": ctx.lattice.square(&d),
            "h0": ctx.h0(&d),
            "h1": ctx.h1(&d),
            "h2": ctx.h2(&d),
            "nef": ctx.is_nef(&d),
            "zariski": ctx.zariski_reduce(&d),
        }))
    })())
}

pub fn model_json(spec: &str, class: &str) -> String {
    wrap((|| {
        let ctx = context(spec)?;
        let d = parse_class(class)?;
        ctx.lattice.check_class(&d)?;
        if !ctx.is_nef(&d) {
            return Err(Error::Precondition("class is not nef".into()));
        }
        Ok(json!({ "class": d, "model": ctx.classify_model(&d)?, "bpf": ctx.is_bpf(&d)? }))
    })())
}

#[wasm_bindgen]
pub fn curves(spec: &str) -> String {
    curves_json(spec)
}

#[wasm_bindgen]
pub fn cohomology(spec: &str, class: &str) -> String {
    cohomology_json(spec, class)
}

#[wasm_bindgen]
pub fn model(spec: &str, class: &str) -> String {
    model_json(spec, class)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn v10_curves() {
        let v = parse(curves_json("V10"));
        assert_eq!(v["curves"].as_array().unwrap().len(), 4);
        assert_eq!(v["validated"], true);
    }

    #[test]
    fn cohomology_of_zero() {
        let v = parse(cohomology_json("V10", "0,0,0,0"));
        assert_eq!((v["h0"].as_i64(), v["h1"].as_i64(), v["h2"].as_i64()), (Some(1), Some(0), Some(1)));
    }

    #[test]
    fn errors_are_json() {
        assert!(parse(curves_json("V99"))["error"].is_string());
        assert!(parse(cohomology_json("V10", "1,2"))["error"].is_string());
        assert!(parse(curves_json(r#"{"gram": [[2,0],[0,2]]}"#))["error"].is_string());
    }

    #[test]
    fn gram_input() {
        let v = parse(curves_json(r#"{"name": "U+A1", "gram": [[0,1,0],[1,0,0],[0,0,-2]]}"#));
        assert!(v["curves"].is_array(), "{v}");
    }
}
