//! Browser bindings for the cactus toolkit. Three entry points back the
//! static demo page in `www/`: counting sequences, uniform samples rendered
//! as SVG, and split-decomposition trees in DOT.
//!
//! Everything returns plain strings so the page needs no JS framework.

use cactus_core::grammar::{Mode, OmegaSpec};
use cactus_core::sampler::{structure_to_graph, PlaneRootedSampler, RandomSource};
use cactus_core::split_tree::{cactus_to_split_tree, glt_to_text, TreeForm};
use cactus_core::templates::{family_counts, Embedding, FamilySpec, Form, Rooting};
use cactus_core::{dot, svg};
use wasm_bindgen::prelude::*;

#[wasm_bindgen(start)]
pub fn start() {
    console_error_panic_hook::set_once();
}

fn parse_omega(text: &str) -> Result<OmegaSpec, JsValue> {
    OmegaSpec::parse(text).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Counting sequence of a built-in family as a JSON object with string
/// counts (they outgrow doubles quickly).
#[wasm_bindgen]
pub fn count_family(
    embedding: &str,
    rooted: bool,
    labeled: bool,
    omega: &str,
    terms: u32,
) -> Result<String, JsValue> {
    let spec = FamilySpec {
        embedding: match embedding {
            "plane" => Embedding::Plane,
            "free" => Embedding::Free,
            other => return Err(JsValue::from_str(&format!("unknown embedding {other}"))),
        },
        rooting: if rooted {
            Rooting::Rooted
        } else {
            Rooting::Unrooted
        },
        labeling: if labeled { Mode::Labeled } else { Mode::Unlabeled },
        omega: parse_omega(omega)?,
        form: Form::Template,
    };
    let terms = terms.min(300) as usize;
    let fc = family_counts(&spec, terms).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let counts: Vec<String> = fc.counts.iter().map(|c| c.to_string()).collect();
    let mut out = String::from("{\"family\":\"");
    out.push_str(&spec.to_string());
    out.push_str("\",\"min_size\":");
    match fc.min_size {
        Some(m) => out.push_str(&m.to_string()),
        None => out.push_str("null"),
    }
    out.push_str(",\"counts\":[");
    for (i, c) in counts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('"');
        out.push_str(c);
        out.push('"');
    }
    out.push_str("]}");
    Ok(out)
}

/// A uniform plane rooted cactus of exactly `size` vertices, as SVG.
#[wasm_bindgen]
pub fn sample_svg(omega: &str, size: u32, seed: u64) -> Result<String, JsValue> {
    let omega = parse_omega(omega)?;
    let size = size.min(2000) as usize;
    let sampler = PlaneRootedSampler::build(omega, size)
        .map_err(|e| JsValue::from_str(&e.to_string()))?;
    let structure = sampler
        .sample(size, &mut RandomSource::new(seed))
        .map_err(|e| JsValue::from_str(&e.to_string()))?;
    let graph = structure_to_graph(&structure).map_err(|e| JsValue::from_str(&e.to_string()))?;
    svg::cactus_to_svg(&graph, Some(1)).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Split-decomposition tree of a fresh sample, in the requested form,
/// as DOT ("dot") or the plain-text tree format ("glt").
#[wasm_bindgen]
pub fn sample_split_tree(
    omega: &str,
    size: u32,
    seed: u64,
    form: &str,
    format: &str,
) -> Result<String, JsValue> {
    let omega = parse_omega(omega)?;
    let size = size.min(500) as usize;
    let form = match form {
        "reduced" => TreeForm::Reduced,
        "simplified" => TreeForm::Simplified,
        other => return Err(JsValue::from_str(&format!("unknown form {other}"))),
    };
    let sampler = PlaneRootedSampler::build(omega, size)
        .map_err(|e| JsValue::from_str(&e.to_string()))?;
    let structure = sampler
        .sample(size, &mut RandomSource::new(seed))
        .map_err(|e| JsValue::from_str(&e.to_string()))?;
    let graph = structure_to_graph(&structure).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let tree = cactus_to_split_tree(&graph, form).map_err(|e| JsValue::from_str(&e.to_string()))?;
    match format {
        "dot" => Ok(dot::glt_to_dot(&tree)),
        "glt" => Ok(glt_to_text(&tree)),
        other => Err(JsValue::from_str(&format!("unknown format {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_family_emits_json() {
        let json = count_family("plane", false, false, "{5}", 13).unwrap();
        assert!(json.contains("\"min_size\":5"));
        assert!(json.contains("\"3\""));
    }

    #[test]
    fn sample_svg_draws() {
        let svg = sample_svg(">=4", 40, 7).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 40);
    }

    #[test]
    fn split_tree_output() {
        let glt = sample_split_tree("{3}", 9, 5, "simplified", "glt").unwrap();
        assert!(glt.starts_with("glt plane"));
        let dot = sample_split_tree("{3}", 9, 5, "reduced", "dot").unwrap();
        assert!(dot.contains("subgraph cluster"));
    }
}
