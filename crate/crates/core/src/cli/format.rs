//! Value formatting and table serialization.

use std::io::Write;

use serde_json::{json, Value};

use crate::numerics::{ExactRational, Scalar};
use crate::recurrences::ProbabilityTable;

/// Shortest decimal that round-trips, with `-0` printed as `0`.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

/// How a table value is printed.
pub(crate) trait CellValue {
    fn csv(&self) -> String;
    fn json(&self) -> Value;
}

impl CellValue for f64 {
    fn csv(&self) -> String {
        format_float(*self)
    }
    fn json(&self) -> Value {
        json!(if *self == 0.0 { 0.0 } else { *self })
    }
}

impl CellValue for ExactRational {
    fn csv(&self) -> String {
        self.to_string()
    }
    fn json(&self) -> Value {
        Value::String(self.to_string())
    }
}

pub(crate) fn write_csv<T: Scalar + CellValue>(t: &ProbabilityTable<T>, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "i,k,n,m,value")?;
    for e in t.entries() {
        writeln!(w, "{},{},{},{},{}", e.i, e.k, e.n, e.m, e.value.csv())?;
    }
    Ok(())
}

pub(crate) fn write_json<T: Scalar + CellValue>(t: &ProbabilityTable<T>, w: &mut dyn Write) -> std::io::Result<()> {
    let entries: Vec<Value> = t
        .entries()
        .map(|e| json!({ "i": e.i, "k": e.k, "n": e.n, "m": e.m, "value": e.value.json() }))
        .collect();
    let doc = json!({
        "device": t.device().label(),
        "param": t.param().to_string(),
        "method": t.method().label(),
        "entries": entries,
    });
    serde_json::to_writer(&mut *w, &doc)?;
    writeln!(w)
}
