//! Plain-text run reports: `[section]` headers followed by `key = value` lines.

use std::fmt::Write as _;

/// Formats a float the same way on every platform: 12 significant digits in
/// scientific notation, `undefined` for NaN and infinities.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "undefined".to_string();
    }
    // avoid printing -0
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

#[derive(Debug, Default, Clone)]
pub struct Report {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        self.sections.push((name.to_string(), Vec::new()));
        self
    }

    fn push(&mut self, key: &str, value: String) -> &mut Self {
        if self.sections.is_empty() {
            self.section("run");
        }
        self.sections.last_mut().expect("section exists").1.push((key.to_string(), value));
        self
    }

    pub fn text(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.push(key, value.to_string())
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, format_float(value))
    }

    pub fn floats(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let joined = values.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(", ");
        self.push(key, joined)
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.push(key, value.to_string())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .iter()
            .filter(|(name, _)| name == section)
            .flat_map(|(_, entries)| entries)
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (name, entries)) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{name}]");
            for (k, v) in entries {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }
}
