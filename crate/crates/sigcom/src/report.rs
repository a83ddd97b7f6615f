//! Shared report types for the four detection methods: dendrogram levels,
//! chosen-level selection, and the JSON serialization.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Clustering;

/// Community-detection method identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    /// Recursive Fiedler bisection with min-ᾱ postponing.
    A,
    /// Spectral coordinates of the signed adjacency + k-means.
    B,
    /// Iterative highest-betweenness edge removal.
    C,
    /// Hierarchical simulated-annealing bisection.
    D,
}

impl MethodId {
    pub const ALL: [MethodId; 4] = [MethodId::A, MethodId::B, MethodId::C, MethodId::D];

    pub fn letter(&self) -> &'static str {
        match self {
            MethodId::A => "A",
            MethodId::B => "B",
            MethodId::C => "C",
            MethodId::D => "D",
        }
    }

    /// Stable id mixed into per-window derived seeds.
    pub fn seed_id(&self) -> u64 {
        match self {
            MethodId::A => 1,
            MethodId::B => 2,
            MethodId::C => 3,
            MethodId::D => 4,
        }
    }
}

impl std::fmt::Display for MethodId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.letter())
    }
}

impl std::str::FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(MethodId::A),
            "B" | "b" => Ok(MethodId::B),
            "C" | "c" => Ok(MethodId::C),
            "D" | "d" => Ok(MethodId::D),
            other => Err(Error::Config(format!("unknown method {other:?} (expected A, B, C, or D)"))),
        }
    }
}

/// Which cluster a level split, and into which two new clusters. All ids are
/// 0-based cluster ids; `parent` refers to the previous level's labeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitInfo {
    pub parent: usize,
    pub child_a: usize,
    pub child_b: usize,
}

/// One dendrogram level: a clustering, how it was reached, and its score
/// against the original signed graph.
#[derive(Clone, Debug)]
pub struct Level {
    pub k: usize,
    pub clustering: Clustering,
    /// None for a root level and for methods whose levels are independent.
    pub split: Option<SplitInfo>,
    pub q_s: f64,
}

/// A method's full output: every level it scored, which one it chose
/// (maximum q_s; ties go to the earliest level, i.e. fewest clusters),
/// and any notes about degeneracies encountered along the way.
#[derive(Clone, Debug)]
pub struct MethodReport {
    method: MethodId,
    levels: Vec<Level>,
    chosen: usize,
    notes: Vec<String>,
}

impl MethodReport {
    pub fn new(method: MethodId, levels: Vec<Level>, notes: Vec<String>) -> Self {
        assert!(!levels.is_empty(), "a method report needs at least one level");
        let mut chosen = 0;
        for (i, level) in levels.iter().enumerate() {
            if level.q_s > levels[chosen].q_s {
                chosen = i;
            }
        }
        MethodReport { method, levels, chosen, notes }
    }

    pub fn method(&self) -> MethodId {
        self.method
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn chosen_index(&self) -> usize {
        self.chosen
    }

    pub fn chosen(&self) -> &Level {
        &self.levels[self.chosen]
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// Dendrogram JSON. Cluster ids in `assignment` and `split` are emitted
    /// 1-based to match the cluster-map CSVs.
    pub fn to_json(&self) -> Value {
        let levels: Vec<Value> = self
            .levels
            .iter()
            .map(|level| {
                let assignment: Vec<usize> =
                    level.clustering.assignment().iter().map(|c| c + 1).collect();
                let split = match &level.split {
                    Some(s) => json!([s.parent + 1, s.child_a + 1, s.child_b + 1]),
                    None => Value::Null,
                };
                json!({
                    "k": level.k,
                    "assignment": assignment,
                    "split": split,
                    "q_s": level.q_s,
                })
            })
            .collect();
        json!({
            "method": self.method.letter(),
            "n": self.levels[0].clustering.n(),
            "chosen_level": self.chosen,
            "chosen_k": self.chosen().k,
            "chosen_q_s": self.chosen().q_s,
            "notes": self.notes,
            "levels": levels,
        })
    }
}
