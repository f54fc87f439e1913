//! Damped interest propagation over the follow graph.
//!
//! Each synchronous round sets
//! `v_i <- normalize((1 - α) v_i⁰ + α · mean_{j ∈ followees(i)} v_j)`,
//! reading only the previous round's vectors. Nodes without followees keep
//! their seed vector. The seed term pulls every node back toward its own
//! interests, so iterates settle instead of washing out.

use serde::{Deserialize, Serialize};

use crate::domain::SocialGraph;
use crate::error::{Error, Result};
use crate::vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationConfig {
    /// Weight on the followee mean, in `[0, 1)`.
    pub damping: f64,
    pub iterations: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            damping: 0.3,
            iterations: 3,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::config("propagation.damping", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationRun {
    /// Final vectors in graph node order.
    pub vectors: Vec<Vec<f64>>,
    /// Per round, the largest L2 change of any single node.
    pub deltas: Vec<f64>,
}

/// Propagated interest vectors in graph node order.
pub fn propagate(graph: &SocialGraph, cfg: &PropagationConfig) -> Result<Vec<Vec<f64>>> {
    Ok(propagate_traced(graph, cfg)?.vectors)
}

pub fn propagate_traced(graph: &SocialGraph, cfg: &PropagationConfig) -> Result<PropagationRun> {
    cfg.validate()?;
    let seeds: Vec<&[f64]> = graph
        .accounts()
        .iter()
        .map(|a| a.interest_vector.as_slice())
        .collect();
    if let Some(dim) = seeds.first().map(|s| s.len()) {
        if let Some(bad) = seeds.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
    }
    let mut current: Vec<Vec<f64>> = seeds.iter().map(|s| s.to_vec()).collect();
    let mut deltas = Vec::with_capacity(cfg.iterations);
    if cfg.damping == 0.0 {
        deltas.resize(cfg.iterations, 0.0);
        return Ok(PropagationRun {
            vectors: current,
            deltas,
        });
    }

    let alpha = cfg.damping;
    for _ in 0..cfg.iterations {
        let next: Vec<Vec<f64>> = (0..graph.len())
            .map(|i| {
                let followees = graph.followee_indices(i);
                if followees.is_empty() {
                    return seeds[i].to_vec();
                }
                let dim = seeds[i].len();
                let mean = vector::mean(dim, followees.iter().map(|&j| current[j].as_slice()));
                vector::normalize(&vector::weighted_sum(
                    dim,
                    [(1.0 - alpha, seeds[i]), (alpha, mean.as_slice())],
                ))
            })
            .collect();
        let delta = next
            .iter()
            .zip(&current)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        deltas.push(delta);
        current = next;
    }
    Ok(PropagationRun {
        vectors: current,
        deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Account, AccountId, AccountKind};

    fn graph(vectors: &[Vec<f64>], edges: &[(u32, u32)]) -> SocialGraph {
        let accounts = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| Account {
                account_id: AccountId(i as u32),
                kind: AccountKind::Individual,
                interest_vector: v.clone(),
            })
            .collect();
        let edges: Vec<_> = edges
            .iter()
            .map(|(a, b)| (AccountId(*a), AccountId(*b)))
            .collect();
        SocialGraph::new(accounts, &edges).unwrap()
    }

    #[test]
    fn isolated_node_is_unchanged() {
        let g = graph(&[vec![0.3, 0.4]], &[]);
        for t in [0, 1, 5] {
            let cfg = PropagationConfig {
                damping: 0.5,
                iterations: t,
            };
            assert_eq!(propagate(&g, &cfg).unwrap(), vec![vec![0.3, 0.4]]);
        }
    }

    #[test]
    fn zero_damping_is_identity() {
        let g = graph(&[vec![0.3, 0.4], vec![2.0, 0.0]], &[(0, 1), (1, 0)]);
        let cfg = PropagationConfig {
            damping: 0.0,
            iterations: 4,
        };
        assert_eq!(
            propagate(&g, &cfg).unwrap(),
            vec![vec![0.3, 0.4], vec![2.0, 0.0]]
        );
    }

    #[test]
    fn two_node_cycle_matches_closed_form() {
        let g = graph(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[(0, 1), (1, 0)]);
        let cfg = PropagationConfig {
            damping: 0.5,
            iterations: 1,
        };
        let out = propagate(&g, &cfg).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for v in &out {
            assert!(
                (v[0] - h).abs() < 1e-12 && (v[1] - h).abs() < 1e-12,
                "{v:?}"
            );
        }
    }

    #[test]
    fn damping_of_one_is_rejected() {
        let g = graph(&[vec![1.0]], &[]);
        let cfg = PropagationConfig {
            damping: 1.0,
            iterations: 1,
        };
        assert!(propagate(&g, &cfg).is_err());
    }
}
