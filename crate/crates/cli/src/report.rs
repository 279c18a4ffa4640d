use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Ordered key/value output, printed as text lines or one JSON object,
/// always followed by a `RESULT` line.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, Value)>,
    /// Keys repeated on the summary line; all keys when empty.
    summary: Vec<String>,
    lines: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    /// Free text shown in text mode only, before the fields.
    pub fn line(&mut self, text: impl Into<String>) -> &mut Self {
        self.lines.push(text.into());
        self
    }

    pub fn summarize(&mut self, keys: &[&str]) -> &mut Self {
        self.summary = keys.iter().map(|k| k.to_string()).collect();
        self
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for l in &self.lines {
                    out.push_str(l);
                    out.push('\n');
                }
                for (k, v) in &self.fields {
                    out.push_str(&format!("{}: {}\n", k, plain(v)));
                }
            }
            Format::Json => {
                let obj: Map<String, Value> = self.fields.iter().cloned().collect();
                out.push_str(&Value::Object(obj).to_string());
                out.push('\n');
            }
        }
        out.push_str(&self.result_line());
        out.push('\n');
        out
    }

    pub fn result_line(&self) -> String {
        let mut parts = vec!["RESULT".to_string()];
        for (k, v) in &self.fields {
            if self.summary.is_empty() || self.summary.contains(k) {
                parts.push(format!("{}={}", k, token(v)));
            }
        }
        parts.join(" ")
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn token(v: &Value) -> String {
    match v {
        Value::String(s) if !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == '"') => s.clone(),
        Value::String(s) => Value::String(s.clone()).to_string(),
        other => other.to_string(),
    }
}
