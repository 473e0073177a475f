//! Browser bindings: type-expression checking, the demo pipeline on the
//! bundled synthetic image, and the pipe description.
//!
//! The `*_impl` functions hold the logic and run natively in tests; the
//! exported wrappers only convert errors for JavaScript.

use infofn::demo::{experiment_pipe, processing_pipe, run_demo, DemoParams};
use infofn::imaging::{synthetic64, GrayImage};
use infofn::pipeline::describe;
use infofn::predicates::standard_registry;
use infofn::typeexpr::parse;
use infofn::{validate, Value};
use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::*;

/// JSON to a dynamic value. Integers stay integers; an object of the form
/// `{"$tuple": [...]}` becomes a tuple, any other object a map.
pub fn json_to_value(j: &Json) -> Value {
    match j {
        Json::Null => Value::None,
        Json::Bool(b) => Value::Bool(*b),
        Json::Number(n) => n
            .as_i64()
            .map_or_else(|| Value::Real(n.as_f64().unwrap_or(f64::NAN)), Value::Int),
        Json::String(s) => Value::from(s.as_str()),
        Json::Array(items) => Value::List(items.iter().map(json_to_value).collect()),
        Json::Object(m) => match (m.len(), m.get("$tuple")) {
            (1, Some(Json::Array(items))) => Value::Tuple(items.iter().map(json_to_value).collect()),
            _ => Value::map(m.iter().map(|(k, v)| (Value::from(k.as_str()), json_to_value(v)))),
        },
    }
}

/// Checks a JSON value against a type expression and reports the outcome as
/// JSON: `{"ok", "expr", "path", "expected", "actual", "message"}`.
pub fn check_impl(expr: &str, value_json: &str) -> Result<String, String> {
    let tp = parse(expr, &standard_registry()).map_err(|e| format!("type expression: {e}"))?;
    let j: Json = serde_json::from_str(value_json).map_err(|e| format!("value: {e}"))?;
    let v = json_to_value(&j);
    let r = validate(&v, &tp).map_err(|e| e.to_string())?;
    let out = json!({
        "ok": r.ok,
        "expr": tp.render(),
        "value": v.to_string(),
        "path": r.path_string(),
        "expected": r.expected,
        "actual": r.actual,
        "message": r.to_string(),
    });
    Ok(out.to_string())
}

/// Processed and edge images of one demo run.
#[wasm_bindgen]
pub struct Frames {
    processed: GrayImage,
    edges: GrayImage,
}

#[wasm_bindgen]
impl Frames {
    pub fn processed_width(&self) -> usize {
        self.processed.width()
    }

    pub fn processed_height(&self) -> usize {
        self.processed.height()
    }

    pub fn processed_pixels(&self) -> Vec<u8> {
        self.processed.pixels().to_vec()
    }

    pub fn edges_width(&self) -> usize {
        self.edges.width()
    }

    pub fn edges_height(&self) -> usize {
        self.edges.height()
    }

    pub fn edges_pixels(&self) -> Vec<u8> {
        self.edges.pixels().to_vec()
    }
}

pub fn run_impl(x0: i64, y0: i64, w: i64, h: i64, denoise: &str, scale: f64, edge: &str) -> Result<Frames, String> {
    let pipe = experiment_pipe(processing_pipe().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let params = DemoParams {
        crop_box: [x0, y0, w, h],
        denoise: denoise.to_owned(),
        scale,
        edge: edge.to_owned(),
    };
    let out = run_demo(&pipe, synthetic64(), &params).map_err(|e| e.to_string())?;
    Ok(Frames {
        processed: out.processed,
        edges: out.edges,
    })
}

pub fn describe_impl() -> Result<String, String> {
    let pipe = experiment_pipe(processing_pipe().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    Ok(describe(&pipe))
}

/// Validates `value_json` against the type expression `expr`.
#[wasm_bindgen]
pub fn check_value(expr: &str, value_json: &str) -> Result<String, JsError> {
    check_impl(expr, value_json).map_err(|e| JsError::new(&e))
}

/// Runs the experiment pipe on the bundled 64×64 image.
#[wasm_bindgen]
pub fn run_pipeline(
    x0: i32,
    y0: i32,
    w: i32,
    h: i32,
    denoise: &str,
    scale: f64,
    edge: &str,
) -> Result<Frames, JsError> {
    run_impl(x0.into(), y0.into(), w.into(), h.into(), denoise, scale, edge).map_err(|e| JsError::new(&e))
}

/// Tab-separated description of the experiment pipe.
#[wasm_bindgen]
pub fn describe_pipe() -> Result<String, JsError> {
    describe_impl().map_err(|e| JsError::new(&e))
}

/// Pixels of the bundled source image (64×64, row-major).
#[wasm_bindgen]
pub fn source_pixels() -> Vec<u8> {
    synthetic64().into_pixels()
}
