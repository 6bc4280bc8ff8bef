use std::fmt::Write;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Kv,
}

/// Ordered key/value lines followed by optional tables.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, String)>,
    tables: Vec<Table>,
}

#[derive(Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                let w = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k:<w$}  {v}");
                }
                for t in &self.tables {
                    if !out.is_empty() {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "{}", t.header.join(" | "));
                    for r in &t.rows {
                        let _ = writeln!(out, "{}", r.join(" | "));
                    }
                }
            }
            Format::Kv => {
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}={v}");
                }
                for t in &self.tables {
                    for r in &t.rows {
                        for (h, c) in t.header.iter().zip(r).skip(1) {
                            let _ = writeln!(out, "{}.{}.{}={}", t.name, r[0], h, c);
                        }
                    }
                }
            }
        }
        out
    }
}
