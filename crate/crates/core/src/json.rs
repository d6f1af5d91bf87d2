//! JSON interchange for instances, transformations and kernels.
//!
//! ```json
//! {"theory": "Graph",
//!  "sets": {"V": 3, "E": 3},
//!  "maps": {"src": [0,1,2], "tgt": [1,2,0]},
//!  "metrics": {"V": {"kind":"shortest_path"}, "E": {"kind":"discrete"}},
//!  "measures": {"V": {"kind":"counting"}, "E": {"kind":"counting"}},
//!  "fixed": []}
//! ```
//!
//! `theory` is a builtin theory name or theory source text. Metrics may also
//! be `{"kind":"explicit","matrix":[[...]]}` (with `"inf"` entries) or
//! `{"kind":"shortest_path","weights":[...]}`; measures may be
//! `{"kind":"uniform"}` or `{"kind":"explicit","weights":[...]}`.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::cset::{Instance, Transformation};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::markov::{FiniteKernel, JointMeasure, MarkovTransformation};
use crate::mm::{discrete_metric, shortest_path_metric, MeasureData, MetricData};
use crate::scalar::{Field, Real};
use crate::theory::{BuiltinTheory, ObId, Theory};

fn err(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(format!("{what} must be an object")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(format!("{what} must be an array")))
}

fn index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| err(format!("{what} must be a nonnegative integer")))
}

pub fn scalar_from_json<T: Real>(v: &Value, what: &str) -> Result<T> {
    v.as_f64().map(T::from_f64).ok_or_else(|| err(format!("{what} must be a number")))
}

pub fn scalar_to_json<T: Real>(v: T) -> Value {
    json!(Field::to_f64(&v))
}

/// A number or `"inf"`.
pub fn ext_from_json<T: Real>(v: &Value, what: &str) -> Result<ExtReal<T>> {
    match v {
        Value::String(s) if s == "inf" => Ok(ExtReal::Inf),
        Value::Number(_) => ExtReal::new(scalar_from_json(v, what)?).ok_or_else(|| err(format!("{what} must be nonnegative"))),
        _ => Err(err(format!("{what} must be a number or \"inf\""))),
    }
}

pub fn ext_to_json<T: Real>(v: ExtReal<T>) -> Value {
    match v {
        ExtReal::Inf => json!("inf"),
        ExtReal::Finite(x) => scalar_to_json(x),
    }
}

pub fn vector_from_json<T: Real>(v: &Value, what: &str) -> Result<Vec<T>> {
    array(v, what)?.iter().map(|x| scalar_from_json(x, what)).collect()
}

/// A square matrix of numbers and `"inf"`, validated as a Lawvere metric.
pub fn metric_from_json<T: Real>(v: &Value) -> Result<MetricData<T>> {
    let rows = array(v, "metric matrix")?
        .iter()
        .map(|r| array(r, "metric row")?.iter().map(|x| ext_from_json(x, "metric entry")).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    let d = MetricData::from_rows(rows)?;
    d.validate()?;
    Ok(d)
}

pub fn metric_to_json<T: Real>(d: &MetricData<T>) -> Value {
    Value::Array(d.rows().map(|r| Value::Array(r.iter().map(|x| ext_to_json(*x)).collect())).collect())
}

pub fn measure_from_json<T: Real>(v: &Value) -> Result<MeasureData<T>> {
    MeasureData::new(vector_from_json(v, "measure")?)
}

pub fn measure_to_json<T: Real>(mu: &MeasureData<T>) -> Value {
    Value::Array(mu.weights().iter().map(|w| scalar_to_json(*w)).collect())
}

fn theory_from_json(v: &Value) -> Result<Theory> {
    let s = v.as_str().ok_or_else(|| err("theory must be a string"))?;
    match s.parse::<BuiltinTheory>() {
        Ok(b) => Ok(Theory::builtin(b)),
        Err(_) if s.trim_start().starts_with("theory") => Ok(Theory::parse(s)?),
        Err(e) => Err(Error::Theory(e.into())),
    }
}

fn theory_to_json(th: &Theory) -> Value {
    let builtin = th.name().parse::<BuiltinTheory>().ok().filter(|b| Theory::builtin(*b) == *th);
    match builtin {
        Some(b) => json!(b.name()),
        None => json!(th.presentation().render()),
    }
}

fn object_id(th: &Theory, name: &str) -> Result<ObId> {
    th.object(name).ok_or_else(|| err(format!("unknown object `{name}` in theory {}", th.name())))
}

pub fn instance_from_json<T: Real>(v: &Value) -> Result<Instance<T>> {
    let top = object(v, "instance")?;
    for key in top.keys() {
        if !["theory", "sets", "maps", "metrics", "measures", "fixed"].contains(&key.as_str()) {
            return Err(err(format!("unknown instance field `{key}`")));
        }
    }
    let theory = Arc::new(theory_from_json(top.get("theory").ok_or_else(|| err("missing field `theory`"))?)?);
    let empty = Value::Object(Map::new());
    let sets = object(top.get("sets").unwrap_or(&empty), "sets")?
        .iter()
        .map(|(k, n)| Ok((k.as_str(), index(n, "set cardinality")?)))
        .collect::<Result<Vec<_>>>()?;
    let maps = object(top.get("maps").unwrap_or(&empty), "maps")?
        .iter()
        .map(|(k, f)| {
            let f = array(f, "map")?.iter().map(|i| index(i, "map value")).collect::<Result<Vec<_>>>()?;
            Ok((k.as_str(), f))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut x = Instance::from_named(theory.clone(), &sets, &maps)?;

    if let Some(ms) = top.get("metrics") {
        for (name, spec) in object(ms, "metrics")? {
            let ob = object_id(&theory, name)?;
            let spec = object(spec, "metric")?;
            let d = match spec.get("kind").and_then(Value::as_str) {
                Some("discrete") => discrete_metric(x.card(ob)),
                Some("shortest_path") => {
                    let w = spec.get("weights").map(|w| vector_from_json::<T>(w, "edge weights")).transpose()?;
                    if theory.generator("src").map(|g| theory.cod(g)) != Some(ob) {
                        return Err(err(format!("shortest_path metric does not live on object {name}")));
                    }
                    shortest_path_metric(&x, w.as_deref())?
                }
                Some("explicit") => metric_from_json(spec.get("matrix").ok_or_else(|| err("explicit metric needs `matrix`"))?)?,
                _ => return Err(err(format!("metric on {name} needs kind discrete, shortest_path or explicit"))),
            };
            x = x.with_metric(ob, d)?;
        }
    }
    if let Some(ms) = top.get("measures") {
        for (name, spec) in object(ms, "measures")? {
            let ob = object_id(&theory, name)?;
            let spec = object(spec, "measure")?;
            let n = x.card(ob);
            let mu = match spec.get("kind").and_then(Value::as_str) {
                Some("counting") => MeasureData::counting(n),
                Some("uniform") => MeasureData::uniform(n),
                Some("explicit") => measure_from_json(spec.get("weights").ok_or_else(|| err("explicit measure needs `weights`"))?)?,
                _ => return Err(err(format!("measure on {name} needs kind counting, uniform or explicit"))),
            };
            x = x.with_measure(ob, mu)?;
        }
    }
    if let Some(fs) = top.get("fixed") {
        for name in array(fs, "fixed")? {
            let name = name.as_str().ok_or_else(|| err("fixed entries must be object names"))?;
            x = x.with_fixed(object_id(&theory, name)?);
        }
    }
    Ok(x)
}

pub fn instance_from_str<T: Real>(text: &str) -> Result<Instance<T>> {
    let v: Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    instance_from_json(&v)
}

pub fn instance_to_json<T: Real>(x: &Instance<T>) -> Value {
    let th = x.theory();
    let sets: Map<String, Value> = th.objects().map(|c| (th.object_name(c).to_string(), json!(x.card(c)))).collect();
    let maps: Map<String, Value> = th.generators().map(|g| (th.generator_name(g).to_string(), json!(x.map(g)))).collect();
    let metrics: Map<String, Value> = th
        .objects()
        .filter_map(|c| {
            let d = x.metric(c)?;
            let spec = if d.is_discrete() {
                json!({"kind": "discrete"})
            } else {
                json!({"kind": "explicit", "matrix": metric_to_json(d)})
            };
            Some((th.object_name(c).to_string(), spec))
        })
        .collect();
    let measures: Map<String, Value> = th
        .objects()
        .filter_map(|c| {
            let mu = x.measure(c)?;
            let spec = if mu.weights().iter().all(|w| *w == T::one()) {
                json!({"kind": "counting"})
            } else {
                json!({"kind": "explicit", "weights": measure_to_json(mu)})
            };
            Some((th.object_name(c).to_string(), spec))
        })
        .collect();
    let fixed: Vec<&str> = th.objects().filter(|&c| x.is_fixed(c)).map(|c| th.object_name(c)).collect();
    json!({
        "theory": theory_to_json(th),
        "sets": sets,
        "maps": maps,
        "metrics": metrics,
        "measures": measures,
        "fixed": fixed,
    })
}

/// `{"rows": r, "cols": c, "p": [[...]]}`.
pub fn kernel_to_json<T: Real>(k: &FiniteKernel<T>) -> Value {
    let p: Vec<Value> = k.to_rows().into_iter().map(|r| Value::Array(r.into_iter().map(scalar_to_json).collect())).collect();
    json!({"rows": k.rows(), "cols": k.cols(), "p": p})
}

pub fn kernel_from_json<T: Real>(v: &Value) -> Result<FiniteKernel<T>> {
    let o = object(v, "kernel")?;
    let rows = index(o.get("rows").ok_or_else(|| err("kernel needs `rows`"))?, "rows")?;
    let cols = index(o.get("cols").ok_or_else(|| err("kernel needs `cols`"))?, "cols")?;
    let p = array(o.get("p").ok_or_else(|| err("kernel needs `p`"))?, "p")?
        .iter()
        .map(|r| vector_from_json(r, "kernel row"))
        .collect::<Result<Vec<Vec<T>>>>()?;
    if p.len() != rows {
        return Err(Error::Dimension { context: "kernel rows".into(), expected: rows, found: p.len() });
    }
    FiniteKernel::from_rows(cols, p)
}

pub fn joint_to_json<T: Real>(pi: &JointMeasure<T>) -> Value {
    Value::Array(pi.to_rows().into_iter().map(|r| Value::Array(r.into_iter().map(scalar_to_json).collect())).collect())
}

/// Per-object kernels keyed by object name.
pub fn markov_to_json<T: Real>(th: &Theory, phi: &MarkovTransformation<T>) -> Value {
    let m: Map<String, Value> =
        th.objects().map(|c| (th.object_name(c).to_string(), kernel_to_json(&phi.components[c.0]))).collect();
    Value::Object(m)
}

pub fn markov_from_json<T: Real>(th: &Theory, v: &Value) -> Result<MarkovTransformation<T>> {
    let o = object(v, "Markov transformation")?;
    let components = th
        .objects()
        .map(|c| {
            let k = o.get(th.object_name(c)).ok_or_else(|| err(format!("missing kernel for {}", th.object_name(c))))?;
            kernel_from_json(k)
        })
        .collect::<Result<_>>()?;
    Ok(MarkovTransformation { components })
}

/// Per-object functions keyed by object name.
pub fn transformation_to_json(th: &Theory, t: &Transformation) -> Value {
    let m: Map<String, Value> = th.objects().map(|c| (th.object_name(c).to_string(), json!(t.component(c)))).collect();
    Value::Object(m)
}

pub fn transformation_from_json(th: &Theory, v: &Value) -> Result<Transformation> {
    let o = object(v, "transformation")?;
    let components = th
        .objects()
        .map(|c| {
            let f = o.get(th.object_name(c)).ok_or_else(|| err(format!("missing component for {}", th.object_name(c))))?;
            array(f, "component")?.iter().map(|i| index(i, "component value")).collect()
        })
        .collect::<Result<_>>()?;
    Ok(Transformation { components })
}
