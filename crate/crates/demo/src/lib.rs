//! Browser bindings: three operations that take text input and return JSON.

use cogrowth::coset::fold;
use cogrowth::essential::ConstructionState;
use cogrowth::intersection::{prop11_rows, shortest_loop, sufficient_nontrivial};
use cogrowth::{Alphabet, CgFunction, Family, Word};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Vertex budget for anything built in the page.
const MAX_VERTICES: usize = 200_000;
const MAX_DEPTH: usize = 40;

fn parse_generators(text: &str) -> Result<Vec<Word>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| Word::parse(t, Alphabet::default(), true).map_err(|e| e.to_string()))
        .collect()
}

fn check_depth(depth: usize) -> Result<(), String> {
    if depth > MAX_DEPTH {
        return Err(format!("depth is limited to {MAX_DEPTH} in the browser"));
    }
    Ok(())
}

/// Cogrowth table, minimal transversal and core graph of `⟨generators⟩`.
pub fn cogrowth_json(generators: &str, depth: usize) -> Result<String, String> {
    check_depth(depth)?;
    let gens = parse_generators(generators)?;
    let mut g = fold(&gens, Alphabet::default());
    g.set_max_vertices(MAX_VERTICES);
    let core: Vec<_> = g
        .defined_pairs()
        .filter(|(_, l, _)| l.is_positive())
        .map(|(v, l, u)| json!([v, l.to_string(), u]))
        .collect();
    let core_vertices = g.num_vertices();
    let table = g.cogrowth(depth).map_err(|e| e.to_string())?;
    let transversal = g.minimal_transversal(depth.min(4)).map_err(|e| e.to_string())?;
    let subgroup = g.subgroup_growth(depth).map_err(|e| e.to_string())?;
    Ok(json!({
        "generators": gens,
        "cogrowth": table.values(),
        "subgroup_growth": subgroup.values(),
        "transversal": transversal.words,
        "core": { "vertices": core_vertices, "edges": core },
    })
    .to_string())
}

/// Runs the essential-subgroup construction and reports `α`, `Γ_T`,
/// `Γ_{G/H}` and the certificates.
pub fn construct_json(alpha: &str, elements: usize, depth: usize) -> Result<String, String> {
    check_depth(depth)?;
    let family: Family = alpha.parse().map_err(|e: cogrowth::Error| e.to_string())?;
    let alpha = CgFunction::family(family).map_err(|e| e.to_string())?;
    let mut st = ConstructionState::new(alpha).map_err(|e| e.to_string())?;
    st.set_max_vertices(MAX_VERTICES);
    let report = st.run_until(elements.min(12), depth).map_err(|e| e.to_string())?;
    let n = st.interior_depth() / 2;
    let sandwich = st.sandwich_report(n, None).map_err(|e| e.to_string())?;
    Ok(json!({
        "report": report,
        "sandwich": sandwich,
        "tree": st.tree_table().values(),
        "certificates": st.certificates(),
    })
    .to_string())
}

/// Cogrowth bounds for an intersection, plus a nontriviality verdict.
pub fn intersect_json(first: &str, second: &str, depth: usize) -> Result<String, String> {
    check_depth(depth.saturating_mul(2))?;
    let mut g1 = fold(&parse_generators(first)?, Alphabet::default());
    let mut g2 = fold(&parse_generators(second)?, Alphabet::default());
    g1.set_max_vertices(MAX_VERTICES);
    g2.set_max_vertices(MAX_VERTICES);
    let rows = prop11_rows(&mut g1, &mut g2, depth).map_err(|e| e.to_string())?;
    let verdict = sufficient_nontrivial(&mut g1, &mut g2, depth).map_err(|e| e.to_string())?;
    let shortest = shortest_loop(&mut g1, &mut g2, depth).map_err(|e| e.to_string())?;
    Ok(json!({ "rows": rows, "verdict": verdict, "shortest_loop": shortest }).to_string())
}

#[wasm_bindgen]
pub fn cogrowth(generators: &str, depth: usize) -> Result<String, JsValue> {
    cogrowth_json(generators, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn construct(alpha: &str, elements: usize, depth: usize) -> Result<String, JsValue> {
    construct_json(alpha, elements, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn intersect(first: &str, second: &str, depth: usize) -> Result<String, JsValue> {
    intersect_json(first, second, depth).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn cogrowth_of_cyclic_subgroup() {
        let v = parse(&cogrowth_json("a", 4).unwrap());
        assert_eq!(v["cogrowth"], json!([1, 3, 9, 27, 81]));
        assert_eq!(v["core"]["vertices"], 1);
    }

    #[test]
    fn generators_accept_commas_and_reduce() {
        let v = parse(&cogrowth_json("aa, ab,\nbA, aAb", 3).unwrap());
        assert_eq!(v["generators"], json!(["aa", "ab", "bA", "b"]));
        assert!(cogrowth_json("a?", 3).is_err());
        assert!(cogrowth_json("a", 100).is_err());
    }

    #[test]
    fn construction_reports_certificates() {
        let v = parse(&construct_json("poly:1", 3, 12).unwrap());
        assert_eq!(v["certificates"].as_array().unwrap().len(), 3);
        assert_eq!(v["report"]["complete"], true);
        assert!(construct_json("finite:3", 3, 12).is_err());
        assert!(construct_json("nonsense", 3, 12).is_err());
    }

    #[test]
    fn intersection_rows() {
        let v = parse(&intersect_json("a", "b", 3).unwrap());
        assert_eq!(v["rows"].as_array().unwrap().len(), 4);
        assert_eq!(v["verdict"]["verdict"], "inconclusive");
        let v = parse(&intersect_json("a, b", "ab", 2).unwrap());
        assert_eq!(v["shortest_loop"], "ab");
    }
}
