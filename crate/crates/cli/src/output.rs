use std::io::Write as _;
use std::path::Path;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV rows followed by `#` summary lines; numbers go through [`num`].
pub struct Csv {
    w: csv::Writer<Vec<u8>>,
    summary: Vec<String>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Csv {
            w,
            summary: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.w.write_record(fields).expect("in-memory write");
    }

    pub fn comment(&mut self, line: &str) {
        self.summary.push(format!("# {line}\n"));
    }

    pub fn finish(self) -> String {
        let bytes = self.w.into_inner().expect("in-memory write");
        let mut text = String::from_utf8(bytes).expect("fields are UTF-8");
        text.extend(self.summary);
        text
    }
}

/// Write `text` to `path` via a temporary file in the same directory, so
/// readers never see a partial file. `None` writes to stdout.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        return out.flush();
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
