//! Object importance prediction: biased random walks over the scene graph,
//! skip-gram embeddings with negative sampling, and cosine-similarity
//! scoring against the target object.

use crate::geom::dist_xy;
use crate::scene::Scene;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use thiserror::Error;

/// Clamp for horizontal distances between stacked objects.
pub const DIST_CLAMP: f64 = 0.01;
/// Floor of the importance score codomain.
pub const SCORE_FLOOR: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ImportanceError {
    #[error("scene has no objects")]
    EmptyScene,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("walk corpus has no training pairs")]
    DegenerateCorpus,
}

#[derive(Debug, Clone)]
pub struct GraphNode {
    pub id: String,
    /// Bbox volume normalized by the scene maximum.
    pub size: f64,
    pub position: [f64; 3],
}

/// Graph over scene objects: one node per object, one directed edge per
/// spatial relation, weighted by inverse horizontal distance.
#[derive(Debug, Clone)]
pub struct SceneGraph {
    pub nodes: Vec<GraphNode>,
    /// (from, to, 1/dist_xy) mirroring the scene relations.
    pub edges: Vec<(usize, usize, f64)>,
    /// Undirected adjacency used by the walks.
    adjacency: Vec<Vec<usize>>,
}

impl SceneGraph {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }
}

pub fn build_scene_graph(scene: &Scene) -> Result<SceneGraph, ImportanceError> {
    if scene.objects.is_empty() {
        return Err(ImportanceError::EmptyScene);
    }
    let max_vol = scene
        .objects
        .iter()
        .map(|o| o.bbox.volume())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let nodes: Vec<GraphNode> = scene
        .objects
        .iter()
        .map(|o| GraphNode {
            id: o.id.clone(),
            size: o.bbox.volume() / max_vol,
            position: o.position,
        })
        .collect();
    let index = |id: &str| nodes.iter().position(|n| n.id == id).expect("validated id");
    let mut edges = Vec::with_capacity(scene.relations.len());
    let mut adjacency = vec![BTreeSet::new(); nodes.len()];
    for r in &scene.relations {
        let from = index(&r.parent);
        let to = index(&r.child);
        let d = dist_xy(nodes[from].position, nodes[to].position).max(DIST_CLAMP);
        edges.push((from, to, 1.0 / d));
        adjacency[from].insert(to);
        adjacency[to].insert(from);
    }
    Ok(SceneGraph {
        nodes,
        edges,
        adjacency: adjacency
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
    })
}

/// Transition distribution from a node: w = k0/dist + (1-k0)*size(neighbor),
/// normalized over the (undirected) neighborhood. Isolated nodes get an
/// empty distribution.
pub fn transition_probs(
    graph: &SceneGraph,
    node: usize,
    k0: f64,
) -> Result<Vec<(usize, f64)>, ImportanceError> {
    let here = graph
        .nodes
        .get(node)
        .ok_or_else(|| ImportanceError::UnknownNode(node.to_string()))?;
    let mut out: Vec<(usize, f64)> = graph.adjacency[node]
        .iter()
        .map(|&j| {
            let d = dist_xy(here.position, graph.nodes[j].position).max(DIST_CLAMP);
            (j, k0 / d + (1.0 - k0) * graph.nodes[j].size)
        })
        .collect();
    let total: f64 = out.iter().map(|&(_, w)| w).sum();
    if total > 0.0 {
        for (_, w) in &mut out {
            *w /= total;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub k0: f64,
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub seed: u64,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            k0: 0.7,
            walks_per_node: 10,
            walk_length: 8,
            seed: 0,
        }
    }
}

/// Biased random walks from every node. Each walk draws from its own
/// (seed, walk index) stream, so the corpus is independent of scheduling.
pub fn random_walks(graph: &SceneGraph, params: &WalkParams) -> Vec<Vec<usize>> {
    assert!(params.walks_per_node >= 1 && params.walk_length >= 2);
    // transitions depend only on the node, so compute each row once
    let all_probs: Vec<Vec<(usize, f64)>> = (0..graph.nodes.len())
        .map(|i| transition_probs(graph, i, params.k0).expect("valid node"))
        .collect();
    let mut walks = Vec::with_capacity(graph.nodes.len() * params.walks_per_node);
    for start in 0..graph.nodes.len() {
        for w in 0..params.walks_per_node {
            let stream = (start * params.walks_per_node + w) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(stream);
            let mut walk = vec![start];
            let mut here = start;
            while walk.len() < params.walk_length {
                let probs = &all_probs[here];
                if probs.is_empty() {
                    break; // isolated node truncates the walk
                }
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut next = probs[probs.len() - 1].0;
                for &(j, p) in probs {
                    acc += p;
                    if u < acc {
                        next = j;
                        break;
                    }
                }
                walk.push(next);
                here = next;
            }
            walks.push(walk);
        }
    }
    walks
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            dim: 32,
            window: 3,
            negatives: 5,
            epochs: 50,
            learning_rate: 0.025,
            seed: 0,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Negative-sampling loss for a single (center, context, negatives) triple,
/// together with its analytic gradients. `v` is the center (input) vector,
/// `u` the context (output) vector.
pub fn sgns_loss(v: &[f64], u: &[f64], negatives: &[Vec<f64>]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut loss = -sigmoid(dot(v, u)).max(1e-300).ln();
    for un in negatives {
        loss -= sigmoid(-dot(v, un)).max(1e-300).ln();
    }
    loss
}

#[allow(clippy::type_complexity)]
pub fn sgns_gradients(
    v: &[f64],
    u: &[f64],
    negatives: &[Vec<f64>],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let g_pos = sigmoid(dot(v, u)) - 1.0;
    let mut grad_v: Vec<f64> = u.iter().map(|&ui| g_pos * ui).collect();
    let grad_u: Vec<f64> = v.iter().map(|&vi| g_pos * vi).collect();
    let mut grad_negs = Vec::with_capacity(negatives.len());
    for un in negatives {
        let g_neg = sigmoid(dot(v, un));
        for (gv, &uni) in grad_v.iter_mut().zip(un) {
            *gv += g_neg * uni;
        }
        grad_negs.push(v.iter().map(|&vi| g_neg * vi).collect());
    }
    (grad_v, grad_u, grad_negs)
}

/// Skip-gram with negative sampling over the walk corpus. Node indices map
/// directly to embedding rows; training is single-threaded and fully
/// deterministic under the seed.
pub fn train_embeddings(
    walks: &[Vec<usize>],
    node_count: usize,
    params: &EmbedParams,
) -> Result<Vec<Vec<f64>>, ImportanceError> {
    assert!(params.dim >= 2 && params.window >= 1 && params.negatives >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let span = 1.0 / params.dim as f64;
    let mut input: Vec<Vec<f64>> = (0..node_count)
        .map(|_| (0..params.dim).map(|_| rng.random_range(-span..span)).collect())
        .collect();
    let mut output: Vec<Vec<f64>> = (0..node_count)
        .map(|_| (0..params.dim).map(|_| rng.random_range(-span..span)).collect())
        .collect();

    // unigram^0.75 table for negative sampling
    let mut counts = vec![0.0_f64; node_count];
    let mut pair_count = 0usize;
    for walk in walks {
        for &n in walk {
            counts[n] += 1.0;
        }
        if walk.len() >= 2 {
            pair_count += 1;
        }
    }
    if pair_count == 0 {
        return Err(ImportanceError::DegenerateCorpus);
    }
    let weights: Vec<f64> = counts.iter().map(|c| c.powf(0.75)).collect();
    let total_weight: f64 = weights.iter().sum();
    let sample_negative = |rng: &mut ChaCha8Rng| -> usize {
        let mut u = rng.random::<f64>() * total_weight;
        for (i, &w) in weights.iter().enumerate() {
            if u < w {
                return i;
            }
            u -= w;
        }
        node_count - 1
    };

    // scratch for the accumulated center gradient; reused across pairs
    let mut grad_v = vec![0.0; params.dim];
    for epoch in 0..params.epochs {
        let lr = params.learning_rate * (1.0 - epoch as f64 / params.epochs as f64).max(1e-3);
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(params.window);
                let hi = (i + params.window).min(walk.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    // same math as sgns_gradients, applied in place: the
                    // output rows update against the pre-step center vector,
                    // the center vector last against the accumulated sum
                    grad_v.fill(0.0);
                    for s in 0..=params.negatives {
                        let (row_ix, label) = if s == 0 {
                            (walk[j], 1.0)
                        } else {
                            (sample_negative(&mut rng), 0.0)
                        };
                        let v = &input[center];
                        let row = &mut output[row_ix];
                        let dot: f64 = v.iter().zip(row.iter()).map(|(x, y)| x * y).sum();
                        let g = sigmoid(dot) - label;
                        for k in 0..params.dim {
                            grad_v[k] += g * row[k];
                            row[k] -= lr * g * v[k];
                        }
                    }
                    for (x, g) in input[center].iter_mut().zip(&grad_v) {
                        *x -= lr * g;
                    }
                }
            }
        }
    }
    debug_assert!(input.iter().flatten().all(|x| x.is_finite()));
    Ok(input)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Maps cosine similarity into the (0, 1] score codomain; the target scores
/// exactly 1.
pub fn importance_scores(
    graph: &SceneGraph,
    embeddings: &[Vec<f64>],
    target: &str,
) -> Result<BTreeMap<String, f64>, ImportanceError> {
    let t = graph
        .node_index(target)
        .ok_or_else(|| ImportanceError::UnknownTarget(target.to_string()))?;
    let mut scores = BTreeMap::new();
    for (i, node) in graph.nodes.iter().enumerate() {
        let f = if i == t {
            1.0
        } else {
            let c = cosine(&embeddings[i], &embeddings[t]);
            ((c + 1.0) / 2.0).clamp(SCORE_FLOOR, 1.0)
        };
        scores.insert(node.id.clone(), f);
    }
    Ok(scores)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceResult {
    pub scores: BTreeMap<String, f64>,
    pub threshold_used: f64,
    pub target: String,
    pub selected: BTreeSet<String>,
}

impl ImportanceResult {
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "id,score,selected")?;
        for (id, score) in &self.scores {
            writeln!(w, "{},{},{}", id, score, u8::from(self.selected.contains(id)))?;
        }
        Ok(())
    }
}

pub fn select_objects(
    scores: &BTreeMap<String, f64>,
    target: &str,
    alpha: f64,
) -> ImportanceResult {
    let mut selected: BTreeSet<String> = scores
        .iter()
        .filter(|&(_, &f)| f >= alpha)
        .map(|(id, _)| id.clone())
        .collect();
    selected.insert(target.to_string());
    ImportanceResult {
        scores: scores.clone(),
        threshold_used: alpha,
        target: target.to_string(),
        selected,
    }
}

/// End-to-end scoring: graph, walks, embeddings, cosine scores.
pub fn score_scene(
    scene: &Scene,
    target: &str,
    walk: &WalkParams,
    embed: &EmbedParams,
) -> Result<BTreeMap<String, f64>, ImportanceError> {
    let graph = build_scene_graph(scene)?;
    let walks = random_walks(&graph, walk);
    let embeddings = train_embeddings(&walks, graph.nodes.len(), embed)?;
    importance_scores(&graph, &embeddings, target)
}
