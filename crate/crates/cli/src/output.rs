use serde::Serialize;

use crate::Failure;

/// 17 significant digits, '.' decimal separator, independent of locale.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::usage(format!("serialisation failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::usage(format!("csv output failed: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::usage(format!("csv output failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

pub fn rect_text(r: &[f64; 4]) -> String {
    format!("[{}, {}] x [{}, {}]", r[0], r[1], r[2], r[3])
}
