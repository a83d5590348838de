//! CSV and JSON rendering.
//!
//! CSV numbers use 17 significant digits; JSON numbers use the shortest
//! representation that parses back to the same double.

use num_complex::Complex64;
use serde_json::{json, Value};

/// 17 significant digits in scientific notation.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// A CSV table with a header row and RFC-4180 quoting.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

/// `{"results": [...]}`.
pub fn json_results(results: Vec<Value>) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "results": results })).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02e23, 0.64] {
            assert_eq!(number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(number(0.64), "6.4000000000000001e-1");
    }

    #[test]
    fn csv_quotes_fields() {
        let t = csv_table(&["a", "b"], &[vec!["x,y".into(), "1".into()]]);
        assert_eq!(t, "a,b\n\"x,y\",1\n");
    }
}
