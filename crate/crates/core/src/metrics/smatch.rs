//! SMATCH: the best triple-match F1 over injective variable alignments.
//!
//! Alignment is searched by hill climbing from several starts. The first
//! start pairs equal concepts greedily; later starts are random. A
//! branch-and-bound oracle gives the exact optimum for small graphs.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::scores::Prf;
use crate::amr::AmrGraph;
use crate::error::{Error, Result};
use crate::ingest::AmrEntry;

pub const DEFAULT_RESTARTS: usize = 4;
/// The oracle refuses pairs where both graphs have more variables than this.
pub const ORACLE_MAX_VARIABLES: usize = 8;

pub type SmatchScore = Prf;

/// Partial injective map from predicted variables to gold variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VariableMapping(pub BTreeMap<String, String>);

impl VariableMapping {
    pub fn get(&self, pred_var: &str) -> Option<&str> {
        self.0.get(pred_var).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Both graphs with variables, concepts and labels interned to indices.
struct Problem {
    n_gold: usize,
    pred_concepts: Vec<usize>,
    gold_concepts: Vec<usize>,
    /// `(label, source, target)` over predicted variable indices.
    pred_relations: Vec<(usize, usize, usize)>,
    gold_relations: HashSet<(usize, usize, usize)>,
    pred_top: usize,
    gold_top: usize,
    pred_total: usize,
    gold_total: usize,
}

type Mapping = Vec<Option<usize>>;

impl Problem {
    fn new(pred: &AmrGraph, gold: &AmrGraph) -> Self {
        let mut symbols: HashMap<String, usize> = HashMap::new();
        let mut intern = |s: &str| {
            let next = symbols.len();
            *symbols.entry(s.to_string()).or_insert(next)
        };
        let pt = pred.triples();
        let gt = gold.triples();
        let pred_concepts: Vec<usize> = pt.instances.iter().map(|t| intern(&t.concept)).collect();
        let gold_concepts: Vec<usize> = gt.instances.iter().map(|t| intern(&t.concept)).collect();
        let pred_index: HashMap<&str, usize> =
            pt.instances.iter().enumerate().map(|(i, t)| (t.variable.as_str(), i)).collect();
        let gold_index: HashMap<&str, usize> =
            gt.instances.iter().enumerate().map(|(i, t)| (t.variable.as_str(), i)).collect();
        let pred_relations = pt
            .relations
            .iter()
            .map(|r| (intern(r.label.as_str()), pred_index[r.source.as_str()], pred_index[r.target.as_str()]))
            .collect();
        let gold_relations = gt
            .relations
            .iter()
            .map(|r| (intern(r.label.as_str()), gold_index[r.source.as_str()], gold_index[r.target.as_str()]))
            .collect();
        Problem {
            n_gold: gold_concepts.len(),
            pred_top: pred_index[pt.top.as_str()],
            gold_top: gold_index[gt.top.as_str()],
            pred_concepts,
            gold_concepts,
            pred_relations,
            gold_relations,
            pred_total: pt.len(),
            gold_total: gt.len(),
        }
    }

    fn n_pred(&self) -> usize {
        self.pred_concepts.len()
    }

    fn score(&self, m: &Mapping) -> usize {
        let instances = m
            .iter()
            .enumerate()
            .filter(|(i, g)| g.is_some_and(|g| self.pred_concepts[*i] == self.gold_concepts[g]))
            .count();
        let relations = self
            .pred_relations
            .iter()
            .filter(|&&(l, s, t)| match (m[s], m[t]) {
                (Some(a), Some(b)) => self.gold_relations.contains(&(l, a, b)),
                _ => false,
            })
            .count();
        let top = usize::from(m[self.pred_top] == Some(self.gold_top));
        instances + relations + top
    }

    fn greedy_start(&self, rng: &mut ChaCha8Rng) -> Mapping {
        let mut m = vec![None; self.n_pred()];
        let mut used = vec![false; self.n_gold];
        for (i, &c) in self.pred_concepts.iter().enumerate() {
            if let Some(j) = (0..self.n_gold).find(|&j| !used[j] && self.gold_concepts[j] == c) {
                m[i] = Some(j);
                used[j] = true;
            }
        }
        let mut free: Vec<usize> = (0..self.n_gold).filter(|&j| !used[j]).collect();
        free.shuffle(rng);
        for slot in m.iter_mut().filter(|s| s.is_none()) {
            *slot = free.pop();
        }
        m
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Mapping {
        let mut preds: Vec<usize> = (0..self.n_pred()).collect();
        let mut golds: Vec<usize> = (0..self.n_gold).collect();
        preds.shuffle(rng);
        golds.shuffle(rng);
        let mut m = vec![None; self.n_pred()];
        for (&p, &g) in preds.iter().zip(&golds) {
            m[p] = Some(g);
        }
        m
    }

    /// Steepest ascent over reassignments and swaps until no move improves.
    fn climb(&self, mut m: Mapping) -> (usize, Mapping) {
        let mut best = self.score(&m);
        loop {
            let mut used = vec![false; self.n_gold];
            for g in m.iter().flatten() {
                used[*g] = true;
            }
            let mut best_move: Option<(usize, Mapping)> = None;
            let consider = |candidate: Mapping, best_move: &mut Option<(usize, Mapping)>| {
                let s = self.score(&candidate);
                if s > best_move.as_ref().map_or(best, |b| b.0) {
                    *best_move = Some((s, candidate));
                }
            };
            for i in 0..m.len() {
                let targets = std::iter::once(None).chain((0..self.n_gold).filter(|&j| !used[j]).map(Some));
                for t in targets {
                    if t == m[i] {
                        continue;
                    }
                    let mut c = m.clone();
                    c[i] = t;
                    consider(c, &mut best_move);
                }
            }
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    if m[i] == m[j] {
                        continue;
                    }
                    let mut c = m.clone();
                    c.swap(i, j);
                    consider(c, &mut best_move);
                }
            }
            match best_move {
                Some((s, c)) => {
                    best = s;
                    m = c;
                }
                None => return (best, m),
            }
        }
    }

    fn climb_restarts(&self, restarts: usize, seed: u64) -> (usize, Mapping) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut winner: Option<(usize, Mapping)> = None;
        for r in 0..restarts.max(1) {
            let start = if r == 0 {
                self.greedy_start(&mut rng)
            } else {
                self.random_start(&mut rng)
            };
            let (s, m) = self.climb(start);
            if winner.as_ref().is_none_or(|w| s > w.0) {
                winner = Some((s, m));
            }
        }
        winner.expect("at least one restart")
    }

    /// Exhaustive search with a simple optimistic bound. Predicted variables
    /// are decided in index order; a relation is scored once both of its
    /// endpoints are decided.
    fn exact(&self) -> usize {
        let n = self.n_pred();
        let mut closing: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
        for &(l, s, t) in &self.pred_relations {
            closing[s.max(t)].push((l, s, t));
        }
        let mut remaining = vec![0; n + 1];
        for i in (0..n).rev() {
            remaining[i] = remaining[i + 1] + 1 + closing[i].len() + usize::from(i == self.pred_top);
        }
        let mut search = Exact {
            p: self,
            closing,
            remaining,
            mapping: vec![None; n],
            used: vec![false; self.n_gold],
            free: self.n_gold,
            best: 0,
        };
        search.visit(0, 0);
        search.best
    }
}

struct Exact<'a> {
    p: &'a Problem,
    closing: Vec<Vec<(usize, usize, usize)>>,
    remaining: Vec<usize>,
    mapping: Mapping,
    used: Vec<bool>,
    free: usize,
    best: usize,
}

impl Exact<'_> {
    fn gain(&self, i: usize) -> usize {
        let Some(g) = self.mapping[i] else {
            return 0;
        };
        let mut gain = usize::from(self.p.pred_concepts[i] == self.p.gold_concepts[g]);
        gain += usize::from(i == self.p.pred_top && g == self.p.gold_top);
        gain += self.closing[i]
            .iter()
            .filter(|&&(l, s, t)| match (self.mapping[s], self.mapping[t]) {
                (Some(a), Some(b)) => self.p.gold_relations.contains(&(l, a, b)),
                _ => false,
            })
            .count();
        gain
    }

    fn visit(&mut self, i: usize, current: usize) {
        let n = self.mapping.len();
        if current + self.remaining[i] <= self.best && i > 0 {
            return;
        }
        if i == n {
            self.best = self.best.max(current);
            return;
        }
        for g in 0..self.p.n_gold {
            if self.used[g] {
                continue;
            }
            self.mapping[i] = Some(g);
            self.used[g] = true;
            self.free -= 1;
            let gain = self.gain(i);
            self.visit(i + 1, current + gain);
            self.free += 1;
            self.used[g] = false;
        }
        // Leaving a variable unmapped only helps when the remaining gold
        // variables cannot absorb every remaining predicted variable.
        if n - i > self.free {
            self.mapping[i] = None;
            self.visit(i + 1, current);
        }
        self.mapping[i] = None;
    }
}

fn named_mapping(pred: &AmrGraph, gold: &AmrGraph, m: &Mapping) -> VariableMapping {
    VariableMapping(
        m.iter()
            .enumerate()
            .filter_map(|(i, g)| {
                g.map(|g| {
                    (
                        pred.nodes()[i].variable.clone(),
                        gold.nodes()[g].variable.clone(),
                    )
                })
            })
            .collect(),
    )
}

/// SMATCH by hill climbing with `restarts` starts, deterministic in `seed`.
pub fn smatch(pred: &AmrGraph, gold: &AmrGraph, restarts: usize, seed: u64) -> SmatchScore {
    smatch_alignment(pred, gold, restarts, seed).0
}

/// Like [`smatch`], also returning the winning alignment.
pub fn smatch_alignment(
    pred: &AmrGraph,
    gold: &AmrGraph,
    restarts: usize,
    seed: u64,
) -> (SmatchScore, VariableMapping) {
    let p = Problem::new(pred, gold);
    let (matched, m) = p.climb_restarts(restarts, seed);
    (
        Prf::from_counts(matched, p.pred_total, p.gold_total),
        named_mapping(pred, gold, &m),
    )
}

/// Exact SMATCH. Matching is symmetric, so the search runs from the smaller
/// graph.
pub fn smatch_oracle(pred: &AmrGraph, gold: &AmrGraph) -> Result<SmatchScore> {
    let (np, ng) = (pred.nodes().len(), gold.nodes().len());
    if np.min(ng) > ORACLE_MAX_VARIABLES {
        return Err(Error::SizeGuard(format!(
            "exact SMATCH needs one graph with at most {ORACLE_MAX_VARIABLES} variables, got {np} and {ng}"
        )));
    }
    let matched = if np <= ng {
        Problem::new(pred, gold).exact()
    } else {
        Problem::new(gold, pred).exact()
    };
    let p = Problem::new(pred, gold);
    Ok(Prf::from_counts(matched, p.pred_total, p.gold_total))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentenceSmatch {
    pub id: String,
    #[serde(flatten)]
    pub score: SmatchScore,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusSmatch {
    pub restarts: usize,
    pub seed: u64,
    pub sentences: Vec<SentenceSmatch>,
    /// Micro-aggregated over all triples.
    pub total: SmatchScore,
}

fn sentence_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Scores aligned corpora. Sentences are scored in parallel, each with its
/// own seed derived from `seed` and its position.
pub fn corpus_smatch(
    preds: &[AmrEntry],
    golds: &[AmrEntry],
    restarts: usize,
    seed: u64,
) -> Result<CorpusSmatch> {
    if preds.len() != golds.len() {
        return Err(Error::Data(format!(
            "{} predicted graphs but {} gold graphs",
            preds.len(),
            golds.len()
        )));
    }
    if let Some((p, g)) = preds.iter().zip(golds).find(|(p, g)| p.id != g.id) {
        return Err(Error::Data(format!(
            "sentence id mismatch: predicted {:?}, gold {:?}",
            p.id, g.id
        )));
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).max(1);
    let chunk = preds.len().div_ceil(workers).max(1);
    let indices: Vec<usize> = (0..preds.len()).collect();
    let scores: Vec<SmatchScore> = std::thread::scope(|scope| {
        let handles: Vec<_> = indices
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&i| smatch(&preds[i].graph, &golds[i].graph, restarts, sentence_seed(seed, i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("smatch worker panicked"))
            .collect()
    });
    let sum = |f: fn(&SmatchScore) -> usize| scores.iter().map(f).sum::<usize>();
    let total = Prf::from_counts(
        sum(|s| s.matched),
        sum(|s| s.predicted_total),
        sum(|s| s.gold_total),
    );
    Ok(CorpusSmatch {
        restarts,
        seed,
        sentences: preds
            .iter()
            .zip(scores)
            .map(|(e, score)| SentenceSmatch {
                id: e.id.clone(),
                score,
            })
            .collect(),
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> AmrGraph {
        s.parse().unwrap()
    }

    fn entry(id: &str, s: &str) -> AmrEntry {
        AmrEntry {
            id: id.into(),
            sentence: String::new(),
            graph: g(s),
        }
    }

    #[test]
    fn identical_graph_scores_one() {
        let a = g("(m / makan :ARG0 (a / aku) :ARG1 (k / kue) :location (t / teras))");
        let s = smatch(&a, &a, 1, 0);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        assert_eq!(s.matched, 8);
        assert_eq!(smatch_oracle(&a, &a).unwrap().f1, 1.0);
    }

    #[test]
    fn only_top_matches() {
        let s = smatch(&g("(a / x)"), &g("(b / y)"), 4, 42);
        assert_eq!(s.matched, 1);
        assert!((s.f1 - 0.5).abs() < 1e-12);
        assert_eq!(smatch_oracle(&g("(a / x)"), &g("(b / y)")).unwrap().matched, 1);
    }

    #[test]
    fn renamed_variables_match_fully() {
        let a = g("(a / x :mod (b / y))");
        let b = g("(c / x :mod (d / y))");
        assert_eq!(smatch_oracle(&a, &b).unwrap().f1, 1.0);
        let (s, m) = smatch_alignment(&a, &b, 2, 0);
        assert_eq!(s.f1, 1.0);
        assert_eq!(m.get("a"), Some("c"));
        assert_eq!(m.get("b"), Some("d"));
    }

    #[test]
    fn jahit_pair_by_oracle() {
        let gold = g("(j / jahit :ARG0 (i / ibu) :ARG1 (b / baju) :mod (r / rapi))");
        let pred = g("(vv1 / ibu :mod (vv2 / jahit :ARG1 (vv3 / baju) :mod (vv4 / rapi :mod (vv5 / dengan))))");
        let exact = smatch_oracle(&pred, &gold).unwrap();
        let hill = smatch(&pred, &gold, 4, 42);
        assert_eq!(hill, exact);
        assert_eq!((exact.predicted_total, exact.gold_total), (10, 8));
    }

    #[test]
    fn oracle_is_symmetric() {
        let a = g("(p / pergi :ARG0 (d / dia) :time (k / kemarin))");
        let b = g("(q / pergi :ARG0 (e / dia) :location (s / sekolah) :mod (k / kemarin))");
        let ab = smatch_oracle(&a, &b).unwrap();
        let ba = smatch_oracle(&b, &a).unwrap();
        assert_eq!(ab.matched, ba.matched);
        assert_eq!(ab.precision, ba.recall);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = g("(a / x :mod (b / x) :ARG0 (c / x))");
        let b = g("(d / x :ARG0 (e / x :mod (f / x)))");
        assert_eq!(smatch_alignment(&a, &b, 8, 5), smatch_alignment(&a, &b, 8, 5));
    }

    #[test]
    fn oracle_guard() {
        let big = |prefix: &str| {
            let kids: String = (1..10).map(|i| format!(" :mod ({prefix}{i} / k{i})")).collect();
            g(&format!("({prefix}0 / r{kids})"))
        };
        let e = smatch_oracle(&big("a"), &big("b")).unwrap_err();
        assert!(matches!(e, Error::SizeGuard(_)));
        assert!(smatch_oracle(&big("a"), &g("(z / r)")).is_ok());
    }

    #[test]
    fn micro_aggregation() {
        // (1,2,2): top only. (3,4,4): one concept differs.
        let preds = vec![entry("1", "(a / x)"), entry("2", "(a / p :mod (b / q))")];
        let golds = vec![entry("1", "(b / y)"), entry("2", "(c / p :mod (d / z))")];
        let c = corpus_smatch(&preds, &golds, 4, 42).unwrap();
        assert_eq!(c.sentences[0].score.matched, 1);
        assert_eq!(c.sentences[1].score.matched, 3);
        assert_eq!((c.total.matched, c.total.predicted_total, c.total.gold_total), (4, 6, 6));
        assert!((c.total.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn corpus_errors() {
        let a = vec![entry("1", "(a / x)")];
        let b = vec![entry("2", "(a / x)")];
        assert!(corpus_smatch(&a, &b, 1, 0).is_err());
        assert!(corpus_smatch(&a, &[], 1, 0).is_err());
    }
}
