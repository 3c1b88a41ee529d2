//! Candidate dependency pairs and the rule-based pair filter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AnnotatedSentence, Token};

/// A (governor, dependent) edge of the dependency tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepPair {
    pub parent: Token,
    pub child: Token,
    /// Dependency role of the child.
    pub deprel: String,
    /// Whether the parent is the sentence's root token.
    pub is_root_pair: bool,
}

/// One pair per non-root token, in child order.
pub fn extract_pairs(s: &AnnotatedSentence) -> Vec<DepPair> {
    s.tokens
        .iter()
        .filter(|t| t.head != 0)
        .map(|child| {
            let parent = s
                .token(child.head)
                .expect("head index validated at ingest")
                .clone();
            DepPair {
                is_root_pair: parent.head == 0,
                deprel: child.deprel.clone(),
                child: child.clone(),
                parent,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterRule {
    Determiner,
    Preposition,
    SubordinateConjunction,
}

impl FilterRule {
    pub const ALL: [FilterRule; 3] = [
        FilterRule::Determiner,
        FilterRule::Preposition,
        FilterRule::SubordinateConjunction,
    ];

    /// Short name used on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            FilterRule::Determiner => "det",
            FilterRule::Preposition => "prep",
            FilterRule::SubordinateConjunction => "sconj",
        }
    }

    /// Key used in rule configuration files.
    pub fn config_key(self) -> &'static str {
        match self {
            FilterRule::Determiner => "determiner",
            FilterRule::Preposition => "preposition",
            FilterRule::SubordinateConjunction => "subordinate_conjunction",
        }
    }

    fn default_spec(self) -> RuleSpec {
        let (upos, words): (&[&str], &[&str]) = match self {
            FilterRule::Determiner => (&["DET"], &["yang"]),
            FilterRule::Preposition => (&["ADP"], &["di", "ke", "dari"]),
            FilterRule::SubordinateConjunction => (&["SCONJ"], &["dengan"]),
        };
        RuleSpec {
            enabled: false,
            upos: upos.iter().map(|s| s.to_string()).collect(),
            words: words.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for FilterRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for FilterRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "det" | "determiner" => Ok(FilterRule::Determiner),
            "prep" | "preposition" => Ok(FilterRule::Preposition),
            "sconj" | "sc" | "subordinate_conjunction" => Ok(FilterRule::SubordinateConjunction),
            other => Err(Error::Config(format!("unknown filter rule {other:?}"))),
        }
    }
}

/// Matching criteria for one rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub enabled: bool,
    pub upos: BTreeSet<String>,
    /// Lowercase word forms.
    pub words: BTreeSet<String>,
}

impl RuleSpec {
    /// A token matches on its UPOS tag or its lowercased surface form.
    pub fn matches(&self, token: &Token) -> bool {
        self.upos.contains(&token.upos) || self.words.contains(&token.form.to_lowercase())
    }
}

/// The three filter rules with their word lists and tag sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRuleSet {
    pub determiner: RuleSpec,
    pub preposition: RuleSpec,
    pub subordinate_conjunction: RuleSpec,
}

impl Default for FilterRuleSet {
    /// Default word lists and tag sets with every rule disabled.
    fn default() -> Self {
        FilterRuleSet {
            determiner: FilterRule::Determiner.default_spec(),
            preposition: FilterRule::Preposition.default_spec(),
            subordinate_conjunction: FilterRule::SubordinateConjunction.default_spec(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialSpec {
    enabled: Option<bool>,
    upos: Option<BTreeSet<String>>,
    words: Option<BTreeSet<String>>,
}

impl FilterRuleSet {
    /// Default lists with exactly the given rules enabled.
    pub fn with_rules(rules: &[FilterRule]) -> Self {
        let mut set = FilterRuleSet::default();
        set.select(rules);
        set
    }

    /// Every rule enabled.
    pub fn all() -> Self {
        FilterRuleSet::with_rules(&FilterRule::ALL)
    }

    pub fn spec(&self, rule: FilterRule) -> &RuleSpec {
        match rule {
            FilterRule::Determiner => &self.determiner,
            FilterRule::Preposition => &self.preposition,
            FilterRule::SubordinateConjunction => &self.subordinate_conjunction,
        }
    }

    pub fn spec_mut(&mut self, rule: FilterRule) -> &mut RuleSpec {
        match rule {
            FilterRule::Determiner => &mut self.determiner,
            FilterRule::Preposition => &mut self.preposition,
            FilterRule::SubordinateConjunction => &mut self.subordinate_conjunction,
        }
    }

    /// Enables exactly `rules`, keeping word lists and tag sets.
    pub fn select(&mut self, rules: &[FilterRule]) {
        for rule in FilterRule::ALL {
            self.spec_mut(rule).enabled = rules.contains(&rule);
        }
    }

    pub fn enabled(&self) -> Vec<FilterRule> {
        FilterRule::ALL
            .into_iter()
            .filter(|r| self.spec(*r).enabled)
            .collect()
    }

    /// Comma-separated short names of the enabled rules, `"none"` if empty.
    pub fn name(&self) -> String {
        let enabled = self.enabled();
        if enabled.is_empty() {
            "none".into()
        } else {
            enabled
                .iter()
                .map(|r| r.short_name())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    pub fn matches(&self, token: &Token) -> bool {
        FilterRule::ALL.into_iter().any(|r| {
            let spec = self.spec(r);
            spec.enabled && spec.matches(token)
        })
    }

    /// Reads a JSON rule configuration. Rules or fields left out keep their
    /// defaults; rules left out are disabled.
    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        let doc: BTreeMap<String, PartialSpec> = serde_json::from_reader(reader)
            .map_err(|e| Error::Config(format!("rule configuration: {e}")))?;
        let mut set = FilterRuleSet::default();
        for (key, partial) in doc {
            let rule = FilterRule::ALL
                .into_iter()
                .find(|r| r.config_key() == key)
                .ok_or_else(|| Error::Config(format!("unknown rule {key:?} in rule configuration")))?;
            let spec = set.spec_mut(rule);
            if let Some(e) = partial.enabled {
                spec.enabled = e;
            }
            if let Some(u) = partial.upos {
                spec.upos = u;
            }
            if let Some(w) = partial.words {
                spec.words = w.into_iter().map(|w| w.to_lowercase()).collect();
            }
        }
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rule set serializes")
    }

    /// The eight on/off combinations of the three rules, in the order
    /// none, det, prep, sconj, det+prep, det+sconj, prep+sconj, all.
    pub fn combinations(&self) -> Vec<FilterRuleSet> {
        use FilterRule::*;
        let combos: [&[FilterRule]; 8] = [
            &[],
            &[Determiner],
            &[Preposition],
            &[SubordinateConjunction],
            &[Determiner, Preposition],
            &[Determiner, SubordinateConjunction],
            &[Preposition, SubordinateConjunction],
            &[Determiner, Preposition, SubordinateConjunction],
        ];
        combos
            .iter()
            .map(|rules| {
                let mut set = self.clone();
                set.select(rules);
                set
            })
            .collect()
    }
}

/// Parses a rule selection such as `"det,prep,sconj"`, `"all"` or `"none"`.
pub fn parse_rule_selection(s: &str) -> Result<Vec<FilterRule>> {
    let s = s.trim();
    match s.to_lowercase().as_str() {
        "" | "none" => return Ok(Vec::new()),
        "all" => return Ok(FilterRule::ALL.to_vec()),
        _ => {}
    }
    let mut rules: Vec<FilterRule> = s
        .split(',')
        .map(str::parse)
        .collect::<Result<_>>()?;
    rules.sort();
    rules.dedup();
    Ok(rules)
}

/// Drops every pair whose parent or child matches an enabled rule.
pub fn apply_filter(pairs: &[DepPair], rules: &FilterRuleSet) -> Vec<DepPair> {
    pairs
        .iter()
        .filter(|p| !rules.matches(&p.parent) && !rules.matches(&p.child))
        .cloned()
        .collect()
}
