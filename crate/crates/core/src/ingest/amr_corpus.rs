use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::amr::{parse_penman, AmrGraph};
use crate::error::{Error, Result};

/// One entry of an AMR corpus file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmrEntry {
    pub id: String,
    /// Text of the `# ::snt` comment, empty when absent.
    pub sentence: String,
    pub graph: AmrGraph,
}

/// Value of `key` in an AMR metadata comment such as
/// `# ::id s1 ::date 2020-01-01`.
fn metadata<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    let marker = format!("::{key}");
    let start = comment.find(&marker)? + marker.len();
    let rest = &comment[start..];
    if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
        return None;
    }
    let end = rest.find(" ::").unwrap_or(rest.len());
    Some(rest[..end].trim())
}

struct Pending {
    id: Option<String>,
    sentence: Option<String>,
    penman: String,
}

/// Reads a blank-line separated AMR corpus.
///
/// Entries without `# ::id` take their 1-based position as id.
pub fn read_amr_corpus<R: BufRead>(reader: R) -> Result<Vec<AmrEntry>> {
    let mut entries: Vec<AmrEntry> = Vec::new();
    let mut seen = HashSet::new();
    let mut pending = Pending {
        id: None,
        sentence: None,
        penman: String::new(),
    };

    let mut flush = |p: &mut Pending, entries: &mut Vec<AmrEntry>| -> Result<()> {
        let p = std::mem::replace(
            p,
            Pending {
                id: None,
                sentence: None,
                penman: String::new(),
            },
        );
        if p.penman.trim().is_empty() {
            return Ok(());
        }
        let entry = entries.len() + 1;
        let graph = parse_penman(&p.penman).map_err(|e| Error::AmrCorpus {
            entry,
            message: e.to_string(),
        })?;
        let id = p.id.unwrap_or_else(|| entry.to_string());
        if !seen.insert(id.clone()) {
            return Err(Error::AmrCorpus {
                entry,
                message: format!("duplicate id {id:?}"),
            });
        }
        entries.push(AmrEntry {
            id,
            sentence: p.sentence.unwrap_or_default(),
            graph,
        });
        Ok(())
    };

    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            flush(&mut pending, &mut entries)?;
        } else if trimmed.starts_with('#') {
            if let Some(id) = metadata(trimmed, "id") {
                pending.id = Some(id.to_owned());
            }
            if let Some(snt) = metadata(trimmed, "snt") {
                pending.sentence = Some(snt.to_owned());
            }
        } else {
            pending.penman.push_str(&line);
            pending.penman.push('\n');
        }
    }
    flush(&mut pending, &mut entries)?;
    Ok(entries)
}

/// Writes entries in corpus format, one single-line PENMAN block each.
pub fn write_amr_corpus(entries: &[AmrEntry]) -> String {
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "# ::id {}", e.id);
        let _ = writeln!(out, "# ::snt {}", e.sentence);
        let _ = writeln!(out, "{}", e.graph.to_penman());
    }
    out
}
