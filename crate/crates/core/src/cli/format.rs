//! Locale-independent number formatting and CSV assembly.

/// Formats like C's `%.15g`: 15 significant digits, trailing zeros removed.
pub fn g15(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn opt_g15(x: Option<f64>) -> String {
    x.map(g15).unwrap_or_default()
}

/// CSV document: a `# rmom <config>` comment line, a header row, then rows.
pub struct Csv {
    out: String,
    width: usize,
}

impl Csv {
    pub fn new(config_json: &str, columns: &[&str]) -> Self {
        let mut out = String::new();
        out.push_str("# rmom ");
        out.push_str(config_json);
        out.push('\n');
        out.push_str(&columns.join(","));
        out.push('\n');
        Self {
            out,
            width: columns.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.width, "CSV row width mismatch");
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}
