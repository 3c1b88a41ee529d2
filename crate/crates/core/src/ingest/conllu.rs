use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// One word of an annotated sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    /// 1-based position after punctuation removal.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// NER tag, `"O"` when the MISC column carries none.
    pub ner: String,
    /// Governor index, 0 for the syntactic root.
    pub head: usize,
    pub deprel: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub id: String,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl AnnotatedSentence {
    /// The token attached to the artificial root.
    pub fn root(&self) -> &Token {
        self.tokens
            .iter()
            .find(|t| t.head == 0)
            .expect("sentence without a root token")
    }

    /// Token with the given 1-based index.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

struct RawToken {
    form: String,
    lemma: String,
    upos: String,
    ner: String,
    head: usize,
    deprel: String,
}

fn conllu_err(line: usize, message: impl Into<String>) -> Error {
    Error::Conllu {
        line,
        message: message.into(),
    }
}

fn field(value: &str) -> Option<&str> {
    if value == "_" || value.is_empty() {
        None
    } else {
        Some(value)
    }
}

fn parse_token_line(line: &str, lineno: usize, expected: usize) -> Result<Option<RawToken>> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(conllu_err(
            lineno,
            format!("expected 10 tab-separated columns, found {}", cols.len()),
        ));
    }
    // Multiword ranges and empty nodes carry no tree information.
    if cols[0].contains('-') || cols[0].contains('.') {
        return Ok(None);
    }
    let id: usize = cols[0]
        .parse()
        .map_err(|_| conllu_err(lineno, format!("non-integer token id {:?}", cols[0])))?;
    if id != expected {
        return Err(conllu_err(lineno, format!("token id {id} out of sequence, expected {expected}")));
    }
    let head: usize = cols[6]
        .parse()
        .map_err(|_| conllu_err(lineno, format!("non-integer head {:?}", cols[6])))?;
    let lemma = field(cols[2]).ok_or_else(|| conllu_err(lineno, "missing lemma"))?;
    let upos = field(cols[3]).ok_or_else(|| conllu_err(lineno, "missing UPOS"))?;
    let ner = field(cols[9])
        .into_iter()
        .flat_map(|misc| misc.split('|'))
        .find_map(|kv| kv.strip_prefix("NER="))
        .filter(|t| !t.is_empty())
        .unwrap_or("O");
    Ok(Some(RawToken {
        form: cols[1].to_owned(),
        lemma: lemma.to_owned(),
        upos: upos.to_owned(),
        ner: ner.to_owned(),
        head,
        deprel: field(cols[7]).unwrap_or("dep").to_owned(),
    }))
}

/// Drops PUNCT tokens, re-attaches their dependents and renumbers the rest.
fn finish_block(
    raw: Vec<RawToken>,
    id: String,
    text: Option<String>,
    line: usize,
) -> Result<AnnotatedSentence> {
    let n = raw.len();
    for (i, t) in raw.iter().enumerate() {
        if t.head > n {
            return Err(conllu_err(line, format!("token {} has head {} beyond sentence length {n}", i + 1, t.head)));
        }
        if t.head == i + 1 {
            return Err(conllu_err(line, format!("token {} is its own head", i + 1)));
        }
    }
    let mut keep: Vec<bool> = raw.iter().map(|t| t.upos != "PUNCT").collect();
    if !keep.contains(&true) {
        // Nothing but punctuation: keep it rather than lose the sentence.
        keep.fill(true);
    }
    let punct_root = raw.iter().position(|t| t.head == 0).is_some_and(|r| !keep[r]);
    let mut new_index = vec![0usize; n + 1];
    let mut next = 0;
    for i in 0..n {
        if keep[i] {
            next += 1;
            new_index[i + 1] = next;
        }
    }

    let mut tokens = Vec::with_capacity(next);
    for (i, t) in raw.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        let mut head = t.head;
        let mut steps = 0;
        while head != 0 && !keep[head - 1] {
            head = raw[head - 1].head;
            steps += 1;
            if steps > n {
                return Err(conllu_err(line, "head cycle through punctuation"));
            }
        }
        tokens.push(Token {
            index: new_index[i + 1],
            form: t.form.clone(),
            lemma: t.lemma.clone(),
            upos: t.upos.clone(),
            ner: t.ner.clone(),
            head: new_index[head],
            deprel: t.deprel.clone(),
        });
    }

    if punct_root {
        // The first orphan of a dropped punctuation root takes its place.
        let mut orphans = tokens.iter_mut().filter(|t| t.head == 0);
        if let Some(first) = orphans.next() {
            let promoted = first.index;
            for t in orphans {
                t.head = promoted;
            }
        }
    }
    let roots = tokens.iter().filter(|t| t.head == 0).count();
    if roots != 1 {
        return Err(conllu_err(
            line,
            format!("sentence {id} has {roots} root tokens after punctuation removal, expected 1"),
        ));
    }
    // With exactly one root, every token reaches it iff the head relation is acyclic.
    for t in &tokens {
        let mut h = t.head;
        let mut steps = 0;
        while h != 0 {
            h = tokens[h - 1].head;
            steps += 1;
            if steps > tokens.len() {
                return Err(conllu_err(line, format!("head cycle in sentence {id}")));
            }
        }
    }

    let text = text.unwrap_or_else(|| {
        raw.iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    });
    Ok(AnnotatedSentence { id, text, tokens })
}

/// Reads every sentence block of an extended CoNLL-U stream.
///
/// Punctuation (UPOS `PUNCT`) is removed here: dependents of a dropped token
/// are re-attached to its head, and remaining tokens are renumbered from 1.
/// When the root itself is punctuation, the first token left without a head
/// becomes the root and the other orphans attach to it.
/// Blocks without an `# sent_id` comment get their 1-based position as id.
pub fn read_conllu<R: BufRead>(reader: R) -> Result<Vec<AnnotatedSentence>> {
    let mut sentences = Vec::new();
    let mut raw = Vec::new();
    let mut id = None;
    let mut text = None;
    let mut block_line = 0;
    let mut expected = 1;

    let flush = |raw: &mut Vec<RawToken>,
                     id: &mut Option<String>,
                     text: &mut Option<String>,
                     expected: &mut usize,
                     block_line: usize,
                     sentences: &mut Vec<AnnotatedSentence>|
     -> Result<()> {
        if !raw.is_empty() {
            let sid = id.take().unwrap_or_else(|| (sentences.len() + 1).to_string());
            let s = finish_block(std::mem::take(raw), sid, text.take(), block_line)?;
            sentences.push(s);
        }
        *id = None;
        *text = None;
        *expected = 1;
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            flush(&mut raw, &mut id, &mut text, &mut expected, block_line, &mut sentences)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("sent_id") {
                if let Some(v) = v.trim_start().strip_prefix('=') {
                    id = Some(v.trim().to_owned());
                }
            } else if let Some(v) = comment.strip_prefix("text") {
                if let Some(v) = v.trim_start().strip_prefix('=') {
                    text = Some(v.trim().to_owned());
                }
            }
            continue;
        }
        if raw.is_empty() {
            block_line = lineno;
        }
        if let Some(tok) = parse_token_line(line, lineno, expected)? {
            raw.push(tok);
            expected += 1;
        }
    }
    flush(&mut raw, &mut id, &mut text, &mut expected, block_line, &mut sentences)?;
    Ok(sentences)
}

/// Writes sentences back out as extended CoNLL-U.
///
/// XPOS, FEATS and DEPS are written as `_`; NER rides in MISC unless it is `O`.
pub fn write_conllu(sentences: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        let _ = writeln!(out, "# sent_id = {}", s.id);
        let _ = writeln!(out, "# text = {}", s.text);
        for t in &s.tokens {
            let misc = if t.ner == "O" {
                "_".to_owned()
            } else {
                format!("NER={}", t.ner)
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t{}",
                t.index, t.form, t.lemma, t.upos, t.head, t.deprel, misc
            );
        }
        out.push('\n');
    }
    out
}
