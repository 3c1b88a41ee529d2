use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Word vectors of a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
    zero: Vec<f64>,
}

impl EmbeddingTable {
    /// Builds a table from `(token, vector)` pairs; later duplicates win.
    pub fn from_entries<I>(dimension: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        if dimension == 0 {
            return Err(Error::Data("embedding dimension must be positive".into()));
        }
        let mut map = HashMap::new();
        for (token, v) in entries {
            if v.len() != dimension {
                return Err(Error::Data(format!(
                    "vector for {token:?} has length {}, expected {dimension}",
                    v.len()
                )));
            }
            map.insert(token, v);
        }
        Ok(EmbeddingTable {
            dimension,
            entries: map,
            zero: vec![0.0; dimension],
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    /// Vector for `token`: exact match, then lowercase, then all zeros.
    pub fn embed(&self, token: &str) -> &[f64] {
        if let Some(v) = self.entries.get(token) {
            return v;
        }
        let lower = token.to_lowercase();
        if lower != token {
            if let Some(v) = self.entries.get(&lower) {
                return v;
            }
        }
        &self.zero
    }
}

pub fn embed<'a>(table: &'a EmbeddingTable, token: &str) -> &'a [f64] {
    table.embed(token)
}

/// Reads the word2vec text format.
///
/// An optional first line `<count> <dim>` is accepted; the dimension is taken
/// from the first vector row and every later row must match it.
pub fn load_embeddings<R: BufRead>(reader: R) -> Result<EmbeddingTable> {
    let mut dimension: Option<usize> = None;
    let mut header_dim: Option<usize> = None;
    let mut entries = HashMap::new();
    let mut first = true;

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else {
            continue;
        };
        let rest: Vec<&str> = fields.collect();
        if first {
            first = false;
            if rest.len() == 1 {
                if let (Ok(_), Ok(d)) = (token.parse::<usize>(), rest[0].parse::<usize>()) {
                    header_dim = Some(d);
                    continue;
                }
            }
        }
        let vector = rest
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| Error::Embedding {
                    line: lineno,
                    message: format!("non-numeric component {s:?} for token {token:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        match dimension {
            None => {
                if vector.is_empty() {
                    return Err(Error::Embedding {
                        line: lineno,
                        message: format!("token {token:?} has an empty vector"),
                    });
                }
                if let Some(h) = header_dim {
                    if h != vector.len() {
                        return Err(Error::Embedding {
                            line: lineno,
                            message: format!(
                                "header declares dimension {h} but token {token:?} has {} components",
                                vector.len()
                            ),
                        });
                    }
                }
                dimension = Some(vector.len());
            }
            Some(d) if d != vector.len() => {
                return Err(Error::Embedding {
                    line: lineno,
                    message: format!(
                        "token {token:?} has {} components, expected {d}",
                        vector.len()
                    ),
                });
            }
            Some(_) => {}
        }
        entries.insert(token.to_owned(), vector);
    }

    let dimension = dimension.ok_or_else(|| Error::Embedding {
        line: 0,
        message: "no vectors found".into(),
    })?;
    Ok(EmbeddingTable {
        dimension,
        entries,
        zero: vec![0.0; dimension],
    })
}
