//! Browser bindings. Every export returns a JSON document; failures come back
//! as `{"error": "..."}` so the page never has to catch exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use schroeder::families::{self, formula_idempotents, schroeder_small, LayerStats};
use schroeder::pmap::PartialMap;
use schroeder::rank::{self, RankReport, RankStatus, Target};

const SUMMARY_MAX_N: usize = 10;
const RANK_MAX_N: usize = 6;

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn respond<T: Serialize>(result: Result<T, String>) -> String {
    let text = match result {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    };
    text.unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn check_n(n: usize, max: usize) -> Result<(), String> {
    if !(2..=max).contains(&n) {
        return Err(format!("n must lie in 2..={max}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    size: usize,
    schroeder_number: String,
    idempotents: usize,
    idempotent_formula: String,
    layers: Vec<LayerStats>,
}

/// Per-height counts of SS'_n next to their closed forms.
#[wasm_bindgen]
pub fn layer_summary(n: usize) -> String {
    respond((|| {
        check_n(n, SUMMARY_MAX_N)?;
        let layers = families::layer_stats(n).map_err(|e| e.to_string())?;
        Ok(Summary {
            n,
            size: layers.iter().map(|l| l.size).sum(),
            schroeder_number: schroeder_small(n).to_string(),
            idempotents: layers.iter().map(|l| l.idempotents).sum(),
            idempotent_formula: formula_idempotents(n).to_string(),
            layers,
        })
    })())
}

#[derive(Serialize)]
struct Arrow {
    from: usize,
    via: usize,
    to: Option<usize>,
}

#[derive(Serialize)]
struct Product {
    n: usize,
    a: String,
    b: String,
    product: String,
    height: usize,
    ss_prime: [bool; 3],
    idempotent: [bool; 3],
    arrows: Vec<Arrow>,
}

/// `ab` (apply `a` first), with the arrows of the two-step diagram.
#[wasm_bindgen]
pub fn compose(n: usize, a: &str, b: &str) -> String {
    respond((|| {
        check_n(n, schroeder::pmap::MAX_N)?;
        let a = PartialMap::parse(a.trim(), n).map_err(|e| format!("first map: {e}"))?;
        let b = PartialMap::parse(b.trim(), n).map_err(|e| format!("second map: {e}"))?;
        let ab = a.then(&b).map_err(|e| e.to_string())?;
        let arrows = a
            .pairs()
            .map(|(x, y)| Arrow {
                from: x,
                via: y,
                to: b.get(y),
            })
            .collect();
        Ok(Product {
            n,
            a: a.encode(),
            b: b.encode(),
            product: ab.encode(),
            height: ab.height(),
            ss_prime: [a.is_ss_prime(), b.is_ss_prime(), ab.is_ss_prime()],
            idempotent: [a.is_idempotent(), b.is_idempotent(), ab.is_idempotent()],
            arrows,
        })
    })())
}

#[derive(Serialize)]
struct RankOut {
    #[serde(flatten)]
    report: RankReport,
    status: RankStatus,
}

/// Rank of `ss-prime`, `ideal` or `quotient` with a minimum generating set.
#[wasm_bindgen]
pub fn rank(target: &str, n: usize, p: Option<usize>) -> String {
    respond((|| {
        check_n(n, RANK_MAX_N)?;
        let target = match target {
            "ss-prime" => Target::SsPrime,
            "ideal" => Target::Ideal,
            "quotient" => Target::Quotient,
            other => return Err(format!("unknown target '{other}'")),
        };
        let p = if target == Target::SsPrime { None } else { p };
        let report = rank::rank_report(target, n, p, rank::DEFAULT_SEARCH_BUDGET).map_err(|e| e.to_string())?;
        let status = report.status();
        Ok(RankOut { report, status })
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn summary() {
        let v = parse(&layer_summary(4));
        assert_eq!(v["size"], 45);
        assert_eq!(v["schroeder_number"], "45");
        assert_eq!(v["idempotents"], 14);
        assert_eq!(v["layers"].as_array().unwrap().len(), 4);
        assert!(parse(&layer_summary(1))["error"].is_string());
    }

    #[test]
    fn product_and_arrows() {
        let v = parse(&compose(4, "2:2,3:2,4:4", "2:1,4:4"));
        assert_eq!(v["product"], "2:1,3:1,4:4");
        assert_eq!(v["arrows"][1]["via"], 2);
        assert_eq!(v["arrows"][1]["to"], 1);
        let v = parse(&compose(3, "2:1", "2:1"));
        assert_eq!(v["product"], "-");
        assert!(v["arrows"][0]["to"].is_null());
        assert!(parse(&compose(3, "2:9", "-"))["error"].as_str().unwrap().starts_with("first map"));
    }

    #[test]
    fn ranks() {
        let v = parse(&rank("ss-prime", 4, None));
        assert_eq!((v["oracle_value"].as_u64(), v["status"].as_str()), (Some(8), Some("PASS")));
        let v = parse(&rank("ideal", 5, Some(2)));
        assert_eq!(v["formula_value"], 21);
        assert!(parse(&rank("ideal", 4, None))["error"].is_string());
        assert!(parse(&rank("ss-prime", 7, None))["error"].is_string());
    }
}
