#![allow(dead_code)]

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::Arc;

use indoamr::amr::{AmrEdge, AmrGraph, AmrNode, EdgeLabel};
use indoamr::ingest::{load_embeddings, read_amr_corpus, read_conllu, AmrEntry, AnnotatedSentence, EmbeddingTable};
use indoamr::pipeline::{align_by_id, AlignedSentence};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn open(rel: &str) -> BufReader<File> {
    BufReader::new(File::open(path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}")))
}

pub fn conllu(rel: &str) -> Vec<AnnotatedSentence> {
    read_conllu(open(rel)).unwrap()
}

pub fn amr(rel: &str) -> Vec<AmrEntry> {
    read_amr_corpus(open(rel)).unwrap()
}

pub fn mini_corpus() -> Vec<AlignedSentence> {
    align_by_id(conllu("data/mini.conllu"), amr("data/mini.amr")).unwrap()
}

pub fn mini_embeddings() -> Arc<EmbeddingTable> {
    Arc::new(load_embeddings(open("data/mini.vec")).unwrap())
}

const CONCEPTS: [&str; 5] = ["makan", "ibu", "kue", "rumah", "besar"];

/// A connected acyclic graph with `1..=max_vars` nodes drawn from a small
/// concept pool, so that equal concepts and competing alignments are common.
pub fn random_graph<R: Rng>(rng: &mut R, max_vars: usize) -> AmrGraph {
    let n = rng.gen_range(1..=max_vars);
    let var = |i: usize| format!("v{i}");
    let nodes: Vec<AmrNode> = (0..n)
        .map(|i| AmrNode::new(var(i), *CONCEPTS.choose(rng).unwrap()))
        .collect();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for i in 1..n {
        let p = rng.gen_range(0..i);
        let label = EdgeLabel::CLOSED.choose(rng).unwrap().clone();
        seen.insert((p, i, label.clone()));
        edges.push(AmrEdge::new(var(p), label, var(i)));
    }
    // Occasional re-entrancy, always pointing forward to stay acyclic.
    for _ in 0..rng.gen_range(0..=n / 2) {
        if n < 3 {
            break;
        }
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 1..n);
        let label = EdgeLabel::CLOSED.choose(rng).unwrap().clone();
        if seen.insert((a, b, label.clone())) {
            edges.push(AmrEdge::new(var(a), label, var(b)));
        }
    }
    AmrGraph::new(var(0), nodes, edges).unwrap()
}

/// Same graph with every variable renamed.
pub fn renamed(g: &AmrGraph) -> AmrGraph {
    let r = |v: &str| format!("z{v}");
    let nodes = g.nodes().iter().map(|n| AmrNode::new(r(&n.variable), n.concept.clone())).collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| AmrEdge::new(r(&e.source), e.label.clone(), r(&e.target)))
        .collect();
    AmrGraph::new(r(g.root()), nodes, edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
