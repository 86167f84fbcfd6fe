use serde_json::{Map, Value};

/// Rounds to 12 significant digits so reports do not depend on the last few
/// bits of platform arithmetic.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// JSON number with 12 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(round12(x))
    } else {
        Value::Null
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Same rounding for CSV cells.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        let r = round12(x);
        if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    } else {
        "nan".to_string()
    }
}

pub struct Outcome {
    pub config: Map<String, Value>,
    /// `result` for single answers, `results` for collections.
    pub key: &'static str,
    pub payload: Value,
    pub csv: String,
    pub warnings: Vec<String>,
}

pub fn to_json(outcome: &Outcome, timing_ms: Option<f64>) -> String {
    let mut doc = Map::new();
    doc.insert("config".into(), Value::Object(outcome.config.clone()));
    doc.insert(outcome.key.into(), outcome.payload.clone());
    doc.insert("warnings".into(), Value::Array(outcome.warnings.iter().cloned().map(Value::String).collect()));
    doc.insert("timing_ms".into(), timing_ms.map(num).unwrap_or(Value::Null));
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable report");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(100.0 / 15.0), 6.66666666667);
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(cell(1.0), "1");
        assert_eq!(cell(2.23004720159e-14), "2.23004720159e-14");
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(serde_json::to_string(&num(0.1 + 0.2)).unwrap(), "0.3");
    }
}
