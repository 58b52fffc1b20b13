//! Browser bindings. Each export takes plain strings and returns a JSON
//! string; the `*_json` functions hold the logic so they run natively too.

use plegma_core::famkit::FinSet;
use plegma_core::plegma::is_plegma;
use plegma_core::poset::{classify_pair, DominationParams, SMHandle};
use plegma_core::smodel::Grid;
use plegma_core::spaces::{NormOracle, Vector};
use plegma_core::Error;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps a comparison under a second in the browser.
const DEMO_N_MAX: u32 = 1024;

fn no_files(path: &str) -> plegma_core::Result<String> {
    Err(Error::Io(format!("`@{path}`: files are not available in the browser")))
}

fn message(e: Error) -> String {
    e.to_string()
}

/// `{"value", "exact"}` for `oracle` at a JSON vector such as `{"1":"1","4":"-1/2"}`.
pub fn norm_json(oracle: &str, vector: &str) -> Result<String, String> {
    let o: NormOracle = oracle.parse().map_err(message)?;
    let v: Vector = serde_json::from_str(vector).map_err(|e| format!("vector: {e}"))?;
    let value = o.norm(&v).map_err(message)?;
    Ok(json!({ "value": value, "exact": value.is_exact() }).to_string())
}

/// Sets separated by `;`, e.g. `1,4; 2,5`.
pub fn plegma_json(sets: &str) -> Result<String, String> {
    let parts: Vec<FinSet> =
        sets.split(';').filter(|s| !s.trim().is_empty()).map(FinSet::parse_list).collect::<Result<_, _>>().map_err(message)?;
    if parts.is_empty() {
        return Err("enter at least one set".into());
    }
    let plegma = is_plegma(&parts).map_err(message)?;
    Ok(json!({ "sets": parts, "plegma": plegma }).to_string())
}

/// Relation between two models given in oracle syntax.
pub fn compare_json(a: &str, b: &str) -> Result<String, String> {
    let (a, b) = (SMHandle::parse_with(a, &no_files).map_err(message)?, SMHandle::parse_with(b, &no_files).map_err(message)?);
    let mut params = DominationParams::new(Grid::standard(3, 0));
    params.n_max = DEMO_N_MAX;
    let c = classify_pair(&a, &b, &params).map_err(message)?;
    let mut out = serde_json::to_value(&c).map_err(|e| e.to_string())?;
    out["symbol"] = json!(c.relation.symbol());
    Ok(out.to_string())
}

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn norm(oracle: &str, vector: &str) -> Result<String, JsValue> {
    to_js(norm_json(oracle, vector))
}

#[wasm_bindgen]
pub fn plegma(sets: &str) -> Result<String, JsValue> {
    to_js(plegma_json(sets))
}

#[wasm_bindgen]
pub fn compare(a: &str, b: &str) -> Result<String, JsValue> {
    to_js(compare_json(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn norm_of_unit_vector() {
        let v = parse(norm_json("lp:1", r#"{"2":"1","5":"-1/2"}"#).unwrap());
        assert_eq!(v["value"], "3/2");
        assert!(norm_json("lp:", "{}").unwrap_err().contains("position"));
    }

    #[test]
    fn plegma_pair_and_non_pair() {
        assert_eq!(parse(plegma_json("1,3; 2,4").unwrap())["plegma"], true);
        assert_eq!(parse(plegma_json("1,2; 3,4").unwrap())["plegma"], false);
        assert!(plegma_json(" ; ").is_err());
    }

    #[test]
    fn l2_below_l1() {
        assert_eq!(parse(compare_json("lp:2", "lp:1").unwrap())["symbol"], "≺");
    }
}
