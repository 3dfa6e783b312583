//! Stability of graphs: the brute-force order test, closed-form
//! classifiers for grids and small-valency abelian Cayley graphs, and
//! explicit instability witnesses.

mod classify;
mod witness;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianGroup, GroupElement, GroupError};
use crate::aut::{automorphism_group_with, AutError, EngineConfig};
use crate::cayley::{CayleyError, GridParams};
use crate::graph::{Graph, GraphError};

pub use classify::{classify_grid, classify_qd, classify_tr, classify_val4, classify_val6};
pub use witness::{
    iso_shift_witness, iso_shift_witness_with, triangles_criterion, val4_witness, InstabilityWitness,
    Val4Clause,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error(transparent)]
    Engine(#[from] AutError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("the given elements do not generate the group")]
    NotGenerating,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("clause not satisfied: {0}")]
    ClauseNotSatisfied(String),
    #[error("witness verification failed: {0}")]
    VerificationFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    TriviallyUnstable,
    NontriviallyUnstable,
}

impl Verdict {
    pub fn is_stable(self) -> bool {
        self == Verdict::Stable
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrivialReason {
    Disconnected,
    Bipartite,
    TwinVertices,
}

impl fmt::Display for TrivialReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of comparing `|Aut BX|` with `2·|Aut X|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub trivial_reason: Option<TrivialReason>,
    /// Absent only for disconnected graphs whose cover exceeds the engine
    /// limit.
    pub aut_order: Option<BigUint>,
    pub baut_order: Option<BigUint>,
}

/// Prediction of a closed-form classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub predicted: Verdict,
    pub trivial_reason: Option<TrivialReason>,
    pub matched_clause: Option<String>,
    pub clause_params: Option<BTreeMap<String, i64>>,
}

impl ClassificationVerdict {
    pub(crate) fn stable() -> Self {
        ClassificationVerdict {
            predicted: Verdict::Stable,
            trivial_reason: None,
            matched_clause: None,
            clause_params: None,
        }
    }

    pub(crate) fn trivial(reason: TrivialReason, clause: &str) -> Self {
        ClassificationVerdict {
            predicted: Verdict::TriviallyUnstable,
            trivial_reason: Some(reason),
            matched_clause: Some(clause.to_string()),
            clause_params: None,
        }
    }

    pub(crate) fn nontrivial(clause: &str, params: &[(&str, i64)]) -> Self {
        ClassificationVerdict {
            predicted: Verdict::NontriviallyUnstable,
            trivial_reason: None,
            matched_clause: Some(clause.to_string()),
            clause_params: if params.is_empty() {
                None
            } else {
                Some(params.iter().map(|(k, v)| (k.to_string(), *v)).collect())
            },
        }
    }
}

/// Brute-force stability: computes `Aut X` and `Aut BX` and compares
/// orders. Trivial reasons are tested in the order disconnected,
/// bipartite with a nontrivial automorphism, twin vertices.
pub fn stability_verdict(x: &Graph, cfg: &EngineConfig) -> Result<StabilityVerdict, StabilityError> {
    let flags = x.structural_flags();
    if !flags.connected && 2 * x.vertex_count() > cfg.max_vertices {
        return Ok(StabilityVerdict {
            verdict: Verdict::TriviallyUnstable,
            trivial_reason: Some(TrivialReason::Disconnected),
            aut_order: None,
            baut_order: None,
        });
    }
    let aut = automorphism_group_with(x, cfg)?.order().clone();
    let baut = automorphism_group_with(&x.double_cover(), cfg)?.order().clone();
    let doubled = &aut * 2u32;
    assert!(
        (&baut % &doubled) == BigUint::from(0u32),
        "|Aut BX| = {baut} is not a multiple of 2|Aut X| = {doubled}"
    );
    let (verdict, trivial_reason) = if baut == doubled {
        (Verdict::Stable, None)
    } else if !flags.connected {
        (Verdict::TriviallyUnstable, Some(TrivialReason::Disconnected))
    } else if flags.bipartite && aut > BigUint::one() {
        (Verdict::TriviallyUnstable, Some(TrivialReason::Bipartite))
    } else if x.twin_pair().is_some() {
        (Verdict::TriviallyUnstable, Some(TrivialReason::TwinVertices))
    } else {
        (Verdict::NontriviallyUnstable, None)
    };
    Ok(StabilityVerdict {
        verdict,
        trivial_reason,
        aut_order: Some(aut),
        baut_order: Some(baut),
    })
}

/// What a verdict is about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Subject {
    Grid {
        kind: crate::cayley::GridKind,
        m: usize,
        n: usize,
        r: usize,
    },
    Group {
        group: String,
        generators: Vec<String>,
    },
    Graph {
        vertices: usize,
        graph6: String,
    },
}

impl Subject {
    pub fn grid(p: &GridParams) -> Self {
        Subject::Grid {
            kind: p.kind,
            m: p.m,
            n: p.n,
            r: p.r,
        }
    }

    pub fn group(g: &AbelianGroup, gens: &[GroupElement]) -> Self {
        Subject::Group {
            group: group_name(g),
            generators: gens.iter().map(|x| x.to_string()).collect(),
        }
    }

    pub fn graph(x: &Graph) -> Self {
        Subject::Graph {
            vertices: x.vertex_count(),
            graph6: String::from_utf8(crate::graph6::encode(x)).expect("graph6 is ASCII"),
        }
    }
}

/// `Z_3 x Z_6`, or `Z_1` for the trivial group.
pub fn group_name(g: &AbelianGroup) -> String {
    if g.invariant_factors().is_empty() {
        return "Z_1".into();
    }
    g.invariant_factors()
        .iter()
        .map(|d| format!("Z_{d}"))
        .collect::<Vec<_>>()
        .join(" x ")
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&x.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| s.parse::<BigUint>().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// The JSON shape shared by classifier and brute-force output. Big
/// integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    #[serde(flatten)]
    pub subject: Subject,
    pub verdict: Verdict,
    pub trivial_reason: Option<TrivialReason>,
    pub clause: Option<String>,
    pub clause_params: Option<BTreeMap<String, i64>>,
    #[serde(with = "decimal")]
    pub aut_order: Option<BigUint>,
    #[serde(with = "decimal")]
    pub baut_order: Option<BigUint>,
}

impl VerdictRecord {
    pub fn from_classification(subject: Subject, c: &ClassificationVerdict) -> Self {
        VerdictRecord {
            subject,
            verdict: c.predicted,
            trivial_reason: c.trivial_reason,
            clause: c.matched_clause.clone(),
            clause_params: c.clause_params.clone(),
            aut_order: None,
            baut_order: None,
        }
    }

    pub fn from_stability(subject: Subject, s: &StabilityVerdict) -> Self {
        VerdictRecord {
            subject,
            verdict: s.verdict,
            trivial_reason: s.trivial_reason,
            clause: None,
            clause_params: None,
            aut_order: s.aut_order.clone(),
            baut_order: s.baut_order.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }
}

/// Whether `Cay(G; S)` is bipartite: some character `G → Z_2` is 1 on
/// every element of `S`.
pub(crate) fn cayley_is_bipartite(group: &AbelianGroup, s: &[GroupElement]) -> bool {
    let even: Vec<usize> = group
        .invariant_factors()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d % 2 == 0)
        .map(|(i, _)| i)
        .collect();
    (1u64..(1 << even.len())).any(|mask| {
        s.iter().all(|x| {
            let parity: u64 = even
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &i)| x.coords()[i])
                .sum();
            parity % 2 == 1
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{cayley_graph, ConnectionSet};

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn complete_graphs() {
        let v = stability_verdict(&Graph::complete(4).unwrap(), &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::Stable);
        assert_eq!(v.aut_order, Some(BigUint::from(24u32)));
        assert_eq!(v.baut_order, Some(BigUint::from(48u32)));
        let k2 = stability_verdict(&Graph::complete(2).unwrap(), &cfg()).unwrap();
        assert_eq!(k2.trivial_reason, Some(TrivialReason::Bipartite));
    }

    #[test]
    fn cartesian_c3_c6() {
        let x = GridParams::qd(6, 3, 0).unwrap().graph();
        let v = stability_verdict(&x, &cfg()).unwrap();
        assert_eq!(v.verdict, Verdict::NontriviallyUnstable);
    }

    #[test]
    fn circulant_z8() {
        let g = AbelianGroup::cyclic(8).unwrap();
        let s = ConnectionSet::new(
            g.clone(),
            [1, 7, 3, 5, 4].iter().map(|&x| g.element(&[x]).unwrap()).collect(),
        )
        .unwrap();
        let v = stability_verdict(&cayley_graph(&s), &cfg()).unwrap();
        assert!(!v.verdict.is_stable());
    }

    #[test]
    fn disconnected_and_twins() {
        let two_triangles = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let v = stability_verdict(&two_triangles, &cfg()).unwrap();
        assert_eq!(v.trivial_reason, Some(TrivialReason::Disconnected));
        let k23 = Graph::complete_bipartite(2, 3);
        assert_eq!(
            stability_verdict(&k23, &cfg()).unwrap().trivial_reason,
            Some(TrivialReason::Bipartite)
        );
        // C_5 with one vertex doubled: twins, not bipartite
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 1), (5, 4)]).unwrap();
        assert_eq!(
            stability_verdict(&g, &cfg()).unwrap().trivial_reason,
            Some(TrivialReason::TwinVertices)
        );
    }

    #[test]
    fn bipartite_character_test() {
        let g = AbelianGroup::direct_product(&[2, 4]).unwrap();
        let el = |c: [i64; 2]| g.element(&c).unwrap();
        assert!(cayley_is_bipartite(&g, &[el([1, 0]), el([0, 1]), el([0, 3])]));
        assert!(!cayley_is_bipartite(&g, &[el([1, 0]), el([0, 1]), el([0, 3]), el([1, 1]), el([1, 3])]));
        let z9 = AbelianGroup::cyclic(9).unwrap();
        assert!(!cayley_is_bipartite(&z9, &[z9.element(&[1]).unwrap(), z9.element(&[8]).unwrap()]));
    }

    #[test]
    fn record_json_shape() {
        let p = GridParams::qd(2, 8, 2).unwrap();
        let rec = VerdictRecord::from_stability(
            Subject::grid(&p),
            &stability_verdict(&p.graph(), &cfg()).unwrap(),
        );
        let v: serde_json::Value = serde_json::from_str(&rec.to_json()).unwrap();
        assert_eq!(v["kind"], "qd");
        assert_eq!(v["verdict"], "TriviallyUnstable");
        assert_eq!(v["trivial_reason"], "Bipartite");
        assert!(v["aut_order"].is_string());
        for key in ["clause", "clause_params", "m", "n", "r", "baut_order"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: VerdictRecord = serde_json::from_value(v).unwrap();
        assert_eq!(back, rec);
    }
}
