//! Report lines, exit codes and file plumbing shared by the subcommands.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use liftkit::formula::{parse_dimacs, CnfFormula};

/// Version of every report schema.
pub const REPORT_VERSION: u32 = 1;

/// A usage or input-format error; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub type CmdResult = Result<Report, UsageError>;

/// `key=value` lines on standard output, headed by `report=<cmd> version=<v>`
/// and closed by `status=pass|fail`.
#[derive(Debug)]
pub struct Report {
    command: &'static str,
    lines: Vec<String>,
    pass: bool,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, lines: Vec::new(), pass: true }
    }

    pub fn kv(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    /// Adds preformatted lines, one per line of `text`.
    pub fn raw(&mut self, text: impl Display) -> &mut Self {
        self.lines.extend(text.to_string().lines().map(str::to_string));
        self
    }

    /// Records a verification failure with its reason.
    pub fn fail(&mut self, reason: impl Display) -> &mut Self {
        let one_line = reason.to_string().lines().collect::<Vec<_>>().join("; ");
        self.lines.push(format!("error={one_line}"));
        self.pass = false;
        self
    }

    pub fn require(&mut self, ok: bool) -> &mut Self {
        self.pass &= ok;
        self
    }

    pub fn passed(&self) -> bool {
        self.pass
    }

    pub fn render(&self) -> String {
        let mut out = format!("report={} version={REPORT_VERSION}\n", self.command);
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(if self.pass { "status=pass\n" } else { "status=fail\n" });
        out
    }
}

pub fn read_text(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

pub fn read_cnf(path: &Path) -> Result<CnfFormula, UsageError> {
    let bytes = fs::read(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_dimacs(&bytes).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// `<dir>/<stem of input><suffix>`; `dir` defaults to the input's directory.
pub fn artifact_path(out_dir: Option<&Path>, input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| match input.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    });
    dir.join(format!("{stem}{suffix}"))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), UsageError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    tmp.persist(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Maps `f` over `items` on up to `jobs` threads, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                results.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every item is processed")).collect()
}

pub fn bits_string(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "-".into();
    }
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn list<T: Display>(items: &[T]) -> String {
    let v: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", v.join(","))
}
