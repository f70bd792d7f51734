//! Deterministic text emission: C-style `%.17g` float formatting and small
//! hand-ordered JSON/CSV builders (field order is part of the output
//! contract, so no serializer with map-driven ordering is used).

/// Format like C's `printf("%.17g", x)`: 17 significant digits, trailing
/// zeros stripped, scientific notation outside the fixed-point range.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // 17 significant digits in scientific form, then re-dress per %g.
    let sci = format!("{:.16e}", x);
    let (mantissa, exp_str) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp_str.parse().expect("valid exponent");
    if exp < -4 || exp >= 17 {
        let m = strip_trailing(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        // fixed-point with 16 - exp fractional digits
        let frac = (16 - exp).max(0) as usize;
        strip_trailing(&format!("{:.*}", frac, x))
    }
}

fn strip_trailing(num: &str) -> String {
    if !num.contains('.') {
        return num.to_string();
    }
    let trimmed = num.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// JSON string escaping (ASCII control characters, quotes, backslash).
pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// JSON number token; infinities and NaN are not valid JSON, so they are
/// emitted as strings.
pub fn json_num(x: f64) -> String {
    if x.is_finite() {
        g17(x)
    } else {
        json_str(&g17(x))
    }
}

/// Ordered key-value JSON object builder.
pub struct JsonObject {
    parts: Vec<String>,
}

impl JsonObject {
    pub fn new() -> Self {
        JsonObject { parts: Vec::new() }
    }

    pub fn field_raw(mut self, key: &str, raw: &str) -> Self {
        self.parts.push(format!("{}:{}", json_str(key), raw));
        self
    }

    pub fn field_str(self, key: &str, value: &str) -> Self {
        let v = json_str(value);
        self.field_raw(key, &v)
    }

    pub fn field_num(self, key: &str, value: f64) -> Self {
        let v = json_num(value);
        self.field_raw(key, &v)
    }

    pub fn field_int(self, key: &str, value: i64) -> Self {
        self.field_raw(key, &value.to_string())
    }

    pub fn field_bool(self, key: &str, value: bool) -> Self {
        self.field_raw(key, if value { "true" } else { "false" })
    }

    pub fn build(self) -> String {
        format!("{{{}}}", self.parts.join(","))
    }
}

impl Default for JsonObject {
    fn default() -> Self {
        Self::new()
    }
}

pub fn json_array(items: &[String]) -> String {
    format!("[{}]", items.join(","))
}

/// CSV line from already-formatted cells (numeric payloads: no quoting).
pub fn csv_line(cells: &[String]) -> String {
    cells.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf_reference() {
        // reference strings from C printf("%.17g", ...)
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(1.5e17), "1.5e+17");
        assert_eq!(g17(123456.75), "123456.75");
        assert_eq!(g17(f64::INFINITY), "inf");
        assert_eq!(g17(std::f64::consts::PI), "3.1415926535897931");
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[
            1.0,
            -0.1,
            2.0 / 3.0,
            6.922024586816337,
            1e-300,
            1e300,
            5.0 / 6.0,
        ] {
            let back: f64 = g17(x).parse().unwrap();
            assert_eq!(back, x, "round trip failed for {x}");
        }
    }

    #[test]
    fn json_object_field_order_is_insertion_order() {
        let obj = JsonObject::new()
            .field_str("schema", "frachenon/1")
            .field_int("N", 3)
            .field_num("s", 0.5)
            .build();
        assert_eq!(obj, "{\"schema\":\"frachenon/1\",\"N\":3,\"s\":0.5}");
    }

    #[test]
    fn json_escapes_specials() {
        assert_eq!(json_str("a\"b\\c\n"), "\"a\\\"b\\\\c\\n\"");
        assert_eq!(json_num(f64::INFINITY), "\"inf\"");
    }
}
