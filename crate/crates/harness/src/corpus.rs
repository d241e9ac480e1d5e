//! Loading `.ifc` files from the program corpus.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ifc_core::surface::{parse_source, SourceFile};

/// A parsed corpus file.
#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub path: PathBuf,
    pub text: String,
    pub source: SourceFile,
    /// The rule named by an `; expect: RULE` comment, if any.
    pub expect: Option<String>,
}

/// The rule an `; expect: RULE` header names.
pub fn expected_rule(text: &str) -> Option<String> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix(';'))
        .find_map(|l| l.trim().strip_prefix("expect:"))
        .map(|r| r.trim().to_string())
}

/// Every `.ifc` file under `dir`, recursively, sorted by path. Unparsable
/// files are an error.
pub fn load_dir(dir: &Path) -> io::Result<Vec<CorpusFile>> {
    let mut paths = Vec::new();
    collect(dir, &mut paths)?;
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path)?;
            let source = parse_source(&text)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            let expect = expected_rule(&text);
            Ok(CorpusFile { path, text, source, expect })
        })
        .collect()
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "ifc") {
            out.push(path);
        }
    }
    Ok(())
}
