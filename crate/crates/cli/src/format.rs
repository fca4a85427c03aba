//! Human-facing number formatting and metric reports.

use serde_json::{Map, Value};

/// `%.6g`: six significant digits, trailing zeros trimmed.
pub fn g6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    // Rounding first fixes the exponent (9.999995 becomes 1.00000e1).
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

/// Ordered `(metric, value)` pairs printed as `metric: value` and optionally
/// written as a JSON object.
#[derive(Debug, Default)]
pub struct Report {
    rows: Vec<(String, Value)>,
}

impl Report {
    pub fn push(&mut self, name: &str, v: Value) {
        self.rows.push((name.to_string(), round_value(v)));
    }

    pub fn num(&mut self, name: &str, x: f64) {
        self.push(name, Value::from(x));
    }

    /// Flattens a serialized struct one level deep.
    pub fn extend_from(&mut self, v: Value) {
        if let Value::Object(map) = v {
            for (k, v) in map {
                self.push(&k, v);
            }
        }
    }

    pub fn render(&self) -> String {
        self.rows
            .iter()
            .map(|(k, v)| format!("{k}: {}\n", display(v)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self.rows.iter().cloned().collect();
        serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes") + "\n"
    }
}

fn display(v: &Value) -> String {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => g6(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            g6(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
        }
        other => other,
    }
}
