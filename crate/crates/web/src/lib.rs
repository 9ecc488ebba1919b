//! Browser bindings. Each exported function takes plain numbers or strings and
//! returns a JSON string; failures come back as `{"error": "..."}`.

use heegner_lab::bounds::{admissibility, irr_bound_certificate};
use heegner_lab::discriminant::DiscriminantGroup;
use heegner_lab::named::{build_named_lattice, LatticeParams};
use heegner_lab::report::{lattice_info, weil_check};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest discriminant group for which the page builds the Weil representation.
pub const WEIL_MAX_ORDER: u64 = 400;
/// Largest genus drawn on the admissibility map.
pub const MAP_MAX_GENUS: i64 = 5000;

fn to_string(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Lattice summary plus the `SL2(Z)` relation check when the group is small enough.
pub fn lattice_report(name: &str, n: Option<i64>, delta: Option<i64>, d: Option<i64>, tol: f64) -> Result<Value, String> {
    let l = build_named_lattice(name, LatticeParams { n, delta, d }).map_err(|e| e.to_string())?;
    let mut info = lattice_info(&l).map_err(|e| e.to_string())?;
    let order = DiscriminantGroup::new(&l).map_err(|e| e.to_string())?.order();
    info["weil"] = if order > WEIL_MAX_ORDER {
        json!({ "error": format!("|D| = {order} is above the demo limit of {WEIL_MAX_ORDER}") })
    } else {
        match weil_check(&l, tol) {
            Ok(w) => json!({ "pass": w.pass(), "check": w }),
            Err(e) => json!({ "error": e.to_string() }),
        }
    };
    Ok(info)
}

pub fn certificate_report(g: i64, n_max: Option<i64>) -> Result<Value, String> {
    let n_max = n_max.unwrap_or((2 * g - 2) / 2);
    let cert = irr_bound_certificate(g, n_max).map_err(|e| e.to_string())?;
    let best = cert.best_exponent();
    let mut v = serde_json::to_value(&cert).map_err(|e| e.to_string())?;
    v["best_exponent"] = json!(best);
    Ok(v)
}

/// One compact row per genus in `2..=g_max`: which of the routes A, B, C apply.
pub fn admissibility_map(g_max: i64, n_max: Option<i64>) -> Result<Value, String> {
    if !(2..=MAP_MAX_GENUS).contains(&g_max) {
        return Err(format!("g_max must lie in 2..={MAP_MAX_GENUS}, got {g_max}"));
    }
    let rows = (2..=g_max)
        .map(|g| {
            let d = 2 * g - 2;
            let rep = admissibility(d, n_max.unwrap_or(d / 2)).map_err(|e| e.to_string())?;
            Ok(json!({
                "g": g,
                "d": d,
                "a": rep.case_a.pass && rep.case_a.in_range,
                "b": rep.case_b.pass && rep.case_b.in_range,
                "c": if rep.case_a.in_range { rep.case_c_witnesses.len() } else { 0 },
            }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json!({ "g_max": g_max, "rows": rows }))
}

fn opt(x: i32) -> Option<i64> {
    (x > 0).then_some(x as i64)
}

/// Non-positive `n`, `delta` or `d` mean "not given".
#[wasm_bindgen]
pub fn lattice_json(name: &str, n: i32, delta: i32, d: i32, tol: f64) -> String {
    to_string(lattice_report(name, opt(n), opt(delta), opt(d), tol))
}

#[wasm_bindgen]
pub fn certificate_json(g: i32, n_max: i32) -> String {
    to_string(certificate_report(g as i64, opt(n_max)))
}

#[wasm_bindgen]
pub fn admissibility_map_json(g_max: i32, n_max: i32) -> String {
    to_string(admissibility_map(g_max as i64, opt(n_max)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_report_for_gm() {
        let v = lattice_report("Lambda_GM", None, None, None, 1e-9).unwrap();
        assert_eq!(v["level"], 4);
        assert_eq!(v["weil"]["pass"], true);
    }

    #[test]
    fn odd_lattice_reports_weil_error() {
        let v = lattice_report("A1", None, None, None, 1e-9).unwrap();
        assert!(v["weil"]["error"].is_string());
    }

    #[test]
    fn errors_become_json() {
        let s = lattice_json("Lambda_HK_prim", 2, 2, 0, 1e-9);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert!(v["error"].as_str().unwrap().contains("mod 4"));
        let v: Value = serde_json::from_str(&certificate_json(1, 0)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn certificate_genus_eight() {
        let v = certificate_report(8, Some(10)).unwrap();
        assert_eq!(v["routes"][0]["route"], "A");
        assert_eq!(v["best_exponent"], v["routes"][0]["exponent"]);
    }

    #[test]
    fn map_rows() {
        let v = admissibility_map(20, None).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 19);
        // g = 8: d = 14 satisfies case A
        assert_eq!(rows[6]["g"], 8);
        assert_eq!(rows[6]["a"], true);
        // g = 2, d = 2 is below the range of every route
        assert_eq!(rows[0]["c"], 0);
        assert!(admissibility_map(1, None).is_err());
    }
}
