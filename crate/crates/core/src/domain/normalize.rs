use std::collections::BTreeMap;

use serde_json::Value;

use super::Args;

/// Comparison key of one argument value: strings are trimmed, anything else
/// is compared by its compact JSON text, so `1000` and `"1000"` agree.
pub fn normalize_value(value: &Value) -> String {
    match value {
        Value::String(s) => s.trim().to_string(),
        other => other.to_string(),
    }
}

/// Arguments keyed by trimmed, case-folded name.
pub fn normalize_args(args: &Args) -> BTreeMap<String, String> {
    args.iter()
        .map(|(k, v)| (k.trim().to_lowercase(), normalize_value(v)))
        .collect()
}

/// Whether two argument maps agree after normalization.
pub fn args_equivalent(a: &Args, b: &Args) -> bool {
    normalize_args(a) == normalize_args(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn args(v: Value) -> Args {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn normalization() {
        assert!(args_equivalent(
            &args(json!({"Bank": " Chase bank ", "amount": 1000})),
            &args(json!({"bank": "Chase bank", "amount": "1000"}))
        ));
        assert!(!args_equivalent(
            &args(json!({"bank": "Chase bank"})),
            &args(json!({"bank": "user's bank"}))
        ));
        assert!(!args_equivalent(&args(json!({"a": "x"})), &args(json!({"a": "x", "b": "y"}))));
        // values keep their case
        assert!(!args_equivalent(&args(json!({"a": "X"})), &args(json!({"a": "x"}))));
    }
}
