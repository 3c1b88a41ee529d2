//! Assembles a rooted AMR tree from labeled dependency pairs.

use std::collections::{BTreeMap, HashSet};

use crate::amr::{AmrEdge, AmrGraph, AmrNode, EdgeLabel};
use crate::error::{Error, Result};
use crate::ingest::{AnnotatedSentence, Token};
use crate::pairgen::DepPair;

/// A surviving pair with its predicted label.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPair {
    pub pair: DepPair,
    pub label: EdgeLabel,
    /// Probability of the predicted label.
    pub confidence: f64,
}

/// Makes a lemma usable as a PENMAN concept.
pub fn concept_for(lemma: &str) -> String {
    let mut out = String::with_capacity(lemma.len());
    for ch in lemma.chars() {
        match ch {
            '(' => out.push_str("-LRB-"),
            ')' => out.push_str("-RRB-"),
            '"' => {}
            c if c.is_whitespace() => out.push('_'),
            c => out.push(c),
        }
    }
    if out.is_empty() {
        out.push_str("UNK");
    }
    out
}

/// The dependency root when it takes part in a pair (or there are no pairs);
/// otherwise the token heading the most pairs, lowest index first.
pub fn select_root<'a>(pairs: &[LabeledPair], s: &'a AnnotatedSentence) -> Result<&'a Token> {
    if s.tokens.is_empty() {
        return Err(Error::Data(format!("sentence {} has no tokens", s.id)));
    }
    let root = s.root();
    let involved = |i: usize| pairs.iter().any(|p| p.pair.parent.index == i || p.pair.child.index == i);
    if pairs.is_empty() || involved(root.index) {
        return Ok(root);
    }
    let mut out_degree: BTreeMap<usize, usize> = BTreeMap::new();
    for p in pairs {
        *out_degree.entry(p.pair.parent.index).or_default() += 1;
    }
    let mut best = (0, 0);
    for (&i, &n) in &out_degree {
        if n > best.1 {
            best = (i, n);
        }
    }
    s.token(best.0)
        .ok_or_else(|| Error::Data(format!("pair refers to token {} outside sentence {}", best.0, s.id)))
}

/// Depth-first from the selected root, children in token order. Variables are
/// `vv1..vvN` in visit order and concepts come from lemmas. Tokens not
/// reachable from the root are left out.
pub fn build_graph(pairs: &[LabeledPair], s: &AnnotatedSentence) -> Result<AmrGraph> {
    let root = select_root(pairs, s)?;
    let mut children: BTreeMap<usize, Vec<&LabeledPair>> = BTreeMap::new();
    for p in pairs {
        children.entry(p.pair.parent.index).or_default().push(p);
    }
    for list in children.values_mut() {
        list.sort_by_key(|p| p.pair.child.index);
    }

    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut stack: Vec<(&Token, Option<(String, EdgeLabel)>)> = vec![(root, None)];
    while let Some((tok, parent)) = stack.pop() {
        if !seen.insert(tok.index) {
            continue;
        }
        let var = format!("vv{}", nodes.len() + 1);
        nodes.push(AmrNode::new(var.clone(), concept_for(&tok.lemma)));
        if let Some((pv, label)) = parent {
            edges.push(AmrEdge::new(pv, label, var.clone()));
        }
        if let Some(list) = children.get(&tok.index) {
            for p in list.iter().rev() {
                if !seen.contains(&p.pair.child.index) {
                    stack.push((&p.pair.child, Some((var.clone(), p.label.clone()))));
                }
            }
        }
    }
    Ok(AmrGraph::new("vv1", nodes, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairgen::extract_pairs;

    fn tok(index: usize, lemma: &str, upos: &str, head: usize) -> Token {
        Token {
            index,
            form: lemma.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            ner: "O".into(),
            head,
            deprel: if head == 0 { "root".into() } else { "dep".into() },
        }
    }

    fn sentence(tokens: Vec<Token>) -> AnnotatedSentence {
        AnnotatedSentence {
            id: "s".into(),
            text: String::new(),
            tokens,
        }
    }

    fn label_all(s: &AnnotatedSentence, labels: &[EdgeLabel]) -> Vec<LabeledPair> {
        extract_pairs(s)
            .into_iter()
            .zip(labels)
            .map(|(pair, label)| LabeledPair {
                pair,
                label: label.clone(),
                confidence: 1.0,
            })
            .collect()
    }

    fn jahit() -> AnnotatedSentence {
        sentence(vec![
            tok(1, "ibu", "NOUN", 0),
            tok(2, "jahit", "VERB", 1),
            tok(3, "baju", "NOUN", 2),
            tok(4, "dengan", "ADP", 5),
            tok(5, "rapi", "ADJ", 2),
        ])
    }

    #[test]
    fn dependency_root_system_output() {
        let s = jahit();
        // Child order: jahit, baju, dengan, rapi.
        let pairs = label_all(&s, &[EdgeLabel::Mod, EdgeLabel::Arg1, EdgeLabel::Mod, EdgeLabel::Mod]);
        let g = build_graph(&pairs, &s).unwrap();
        assert_eq!(
            g.to_penman(),
            "(vv1 / ibu :mod (vv2 / jahit :ARG1 (vv3 / baju) :mod (vv4 / rapi :mod (vv5 / dengan))))"
        );
    }

    #[test]
    fn single_token() {
        let s = sentence(vec![tok(1, "tidur", "VERB", 0)]);
        assert_eq!(build_graph(&[], &s).unwrap().to_penman(), "(vv1 / tidur)");
        assert!(select_root(&[], &sentence(vec![])).is_err());
    }

    #[test]
    fn fallback_root_when_dependency_root_is_cut_off() {
        // 1 <- root; 2 heads 3 and 4; 5 heads 6. Pair (1,2) was filtered.
        let s = sentence(vec![
            tok(1, "a", "VERB", 0),
            tok(2, "b", "NOUN", 1),
            tok(3, "c", "NOUN", 2),
            tok(4, "d", "NOUN", 2),
            tok(5, "e", "NOUN", 1),
            tok(6, "f", "NOUN", 5),
        ]);
        let pairs: Vec<LabeledPair> = label_all(&s, &vec![EdgeLabel::Mod; 5])
            .into_iter()
            .filter(|p| p.pair.parent.index != 1)
            .collect();
        assert_eq!(select_root(&pairs, &s).unwrap().lemma, "b");
        let g = build_graph(&pairs, &s).unwrap();
        // The (e, f) component is unreachable and dropped.
        assert_eq!(g.to_penman(), "(vv1 / b :mod (vv2 / c) :mod (vv3 / d))");
        assert_eq!(g.edges().len(), g.nodes().len() - 1);
    }

    #[test]
    fn concepts_are_sanitised() {
        assert_eq!(concept_for("new york"), "new_york");
        assert_eq!(concept_for("(x)"), "-LRB-x-RRB-");
        assert_eq!(concept_for("\"\""), "UNK");
    }
}
