//! Output files with a provenance header.
//!
//! JSON outputs are an object `{version, argv, config, result}`. CSV outputs start
//! with `#` comment lines carrying the same information, followed by a header row.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Emitter {
    pub argv: Vec<String>,
    pub config: Value,
    pub path: Option<PathBuf>,
}

impl Emitter {
    pub fn new(argv: Vec<String>, config: Value, output: Option<&Path>, output_dir: Option<&Path>, stem: &str, ext: &str) -> Self {
        let path = output.map(Path::to_path_buf).or_else(|| output_dir.map(|dir| dir.join(format!("{stem}.{ext}"))));
        Emitter { argv, config, path }
    }

    fn writer(&self) -> io::Result<Box<dyn Write>> {
        match &self.path {
            Some(p) => {
                if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)?;
                }
                Ok(Box::new(BufWriter::new(File::create(p)?)))
            }
            None => Ok(Box::new(io::stdout().lock())),
        }
    }

    pub fn json<T: Serialize>(&self, result: &T) -> io::Result<()> {
        let doc = json!({
            "version": VERSION,
            "argv": self.argv,
            "config": self.config,
            "result": result,
        });
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()
    }

    pub fn csv<T: Serialize>(&self, rows: &[T]) -> io::Result<()> {
        let mut w = self.writer()?;
        writeln!(w, "# erwd {VERSION}")?;
        writeln!(w, "# argv: {}", serde_json::to_string(&self.argv)?)?;
        writeln!(w, "# config: {}", serde_json::to_string(&self.config)?)?;
        {
            let mut csv = csv::Writer::from_writer(&mut w);
            for row in rows {
                csv.serialize(row).map_err(io::Error::other)?;
            }
            csv.flush()?;
        }
        w.flush()
    }
}
