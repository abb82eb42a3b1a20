use crate::error::{Error, Result};

/// A CSV table with a `language` column followed by named numeric columns
/// (layer indices or model names). Empty cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGrid {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl LabeledGrid {
    pub fn parse(text: &str) -> Result<Self> {
        let parse_err = |line: u64, message: String| Error::Parse {
            line: line as usize,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if header.get(0) != Some("language") {
            return Err(parse_err(1, "first column must be `language`".into()));
        }
        let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| parse_err(0, e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(str::is_empty) {
                continue;
            }
            let label = record.get(0).unwrap_or_default().to_string();
            let values = record
                .iter()
                .skip(1)
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>()
                            .map(Some)
                            .map_err(|e| parse_err(line, format!("{c:?}: {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != columns.len() {
                return Err(parse_err(
                    line,
                    format!("{} cells for {} columns", values.len(), columns.len()),
                ));
            }
            rows.push((label, values));
        }
        Ok(Self { columns, rows })
    }

    pub fn row(&self, label: &str) -> Option<&[Option<f64>]> {
        self.rows
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}
