//! CSV tables with a leading `# schema:` line, verdict files and run.json.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fraclab_core::VerificationReport;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Shortest round-trip decimal form, so equal values print identically.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// A column name with its unit, e.g. `("x", "length")`.
pub type Column = (&'static str, &'static str);

pub struct Table {
    columns: Vec<Column>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[Column]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn schema(&self) -> String {
        let cols: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        format!("# schema: {}\n", cols.join(", "))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut buf = self.schema().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(self.columns.iter().map(|c| c.0))?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
        fs::write(path, buf).map_err(|e| CliError::io(path, e))
    }
}

/// The output directory with helpers for every artifact.
pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        let p = self.path(name);
        t.write(&p)?;
        self.written.push(p);
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name);
        let mut f = fs::File::create(&p).map_err(|e| CliError::io(&p, e))?;
        f.write_all(body.as_bytes()).map_err(|e| CliError::io(&p, e))?;
        self.written.push(p);
        Ok(())
    }

    pub fn run_json(&mut self, cfg: &RunConfig) -> Result<()> {
        let body = serde_json::to_string_pretty(cfg)?;
        self.text("run.json", &(body + "\n"))
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// Rows, fitted constants and the deciding metric of a report. The last
/// row carries the overall verdict, so `verdict.txt` follows from the CSV.
pub fn report_table(rep: &VerificationReport) -> Table {
    let mut t = Table::new(&[
        ("kind", "row|fit|verdict"),
        ("label", "-"),
        ("h", "sweep variable"),
        ("lhs", "-"),
        ("rhs", "-"),
        ("ratio", "-"),
        ("pass", "bool"),
    ]);
    for r in &rep.rows {
        t.row(vec![
            "row".into(),
            r.label.clone(),
            num(r.h),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            r.pass.to_string(),
        ]);
    }
    for (name, v) in &rep.fitted {
        t.row(vec!["fit".into(), name.clone(), String::new(), num(*v), String::new(), String::new(), String::new()]);
    }
    let label = if rep.worst_label.is_empty() { "worst".to_string() } else { rep.worst_label.clone() };
    t.row(vec![
        "verdict".into(),
        label,
        String::new(),
        num(rep.worst),
        String::new(),
        String::new(),
        rep.pass.to_string(),
    ]);
    t
}

/// Writes `<name>.csv`, optional notes and appends to `verdict.txt`.
pub fn emit_report(out: &mut OutDir, name: &str, rep: &VerificationReport) -> Result<()> {
    out.table(&format!("{name}.csv"), &report_table(rep))?;
    if !rep.notes.is_empty() {
        out.text(&format!("{name}_notes.txt"), &(rep.notes.join("\n") + "\n"))?;
    }
    Ok(())
}
