//! CSV tables with `# key = value` metadata lines ahead of the header.

use crate::CliError;

/// A rectangular table of string cells plus metadata.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { meta: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Cell of `row` under `name`.
    pub fn get(&self, row: usize, name: &str) -> Option<&str> {
        let c = self.column(name)?;
        self.rows.get(row).map(|r| r[c].as_str())
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(bytes).expect("cells are UTF-8"));
        out
    }

    /// Reads back anything written by [`Table::to_csv`].
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut meta = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else { break };
            let rest = rest.trim_end_matches(['\n', '\r']);
            let (k, v) = rest
                .split_once(" = ")
                .ok_or_else(|| CliError::Input(format!("metadata line `#{rest}` lacks ` = `")))?;
            meta.push((k.trim_start().to_string(), v.to_string()));
            body_start += line.len();
        }
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(&text.as_bytes()[body_start..]);
        let header = r.headers().map_err(|e| CliError::Input(format!("csv header: {e}")))?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Input(format!("csv row: {e}")))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Self { meta, header, rows })
    }
}
