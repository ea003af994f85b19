//! JSON values with every float written to 17 significant digits.

use degpv::Complex64;
use serde_json::{Map, Number, Value};

/// A float as a JSON number in `{:.16e}` form; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // drop the sign of zero
    let x = if x == 0.0 { 0.0 } else { x };
    let text = format!("{x:.16e}");
    // arbitrary_precision keeps the literal digits
    Value::Number(serde_json::from_str::<Number>(&text).expect("formatted float is valid JSON"))
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn object<I, K>(fields: I) -> Value
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    Value::Object(fields.into_iter().map(|(k, v)| (k.into(), v)).collect::<Map<_, _>>())
}

pub fn to_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values built here always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(to_string(&num(0.1)), "1.0000000000000001e-1");
        assert_eq!(to_string(&num(-2.0)), "-2.0000000000000000e+0");
        assert_eq!(num(f64::NAN), Value::Null);
        let back: f64 = to_string(&num(std::f64::consts::PI)).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }
}
