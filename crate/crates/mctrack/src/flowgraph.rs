//! Global min-cost-flow association graph.
//!
//! Every tracklet contributes an enter/exit node pair joined by an observation
//! arc whose cost is the negative log-odds of the tracklet confidence; rule-
//! passing tracklet pairs contribute transition arcs costed from appearance
//! and motion probabilities. Each unit of source-to-sink flow decodes into one
//! trajectory, and the minimum-cost flow (over a free flow amount) is the MAP
//! association. A brute-force enumerator over small instances serves as the
//! optimality oracle.

use crate::model::{CameraTopology, Tracklet, TrajectorySet};
use std::cmp::Ordering;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("transition probability {0} outside (0, 1]; clamp inputs into [p_min, 1]")]
    InvalidProbability(f64),
    #[error("brute force oracle refuses instances with more than {max} tracklets (got {got})")]
    TooLarge { max: usize, got: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct GraphParams {
    /// Waiting-time threshold in frames; pairs separated longer are not linked.
    pub eta: i64,
    /// Appearance feature weight.
    pub k1: f64,
    /// Motion feature weight.
    pub k2: f64,
    /// Probability floor for transition features.
    pub p_min: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            eta: 1500,
            k1: 1.0,
            k2: 1.0,
            p_min: 1e-6,
        }
    }
}

/// Candidate pairs `(i, j)` of tracklet indices satisfying the three edge
/// selection rules: strictly positive frame gap, topologically connected
/// cameras, gap under the waiting threshold. Ordered by `(i, j)`.
pub fn select_edges(
    tracklets: &[Tracklet],
    topology: &CameraTopology,
    params: &GraphParams,
) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, li) in tracklets.iter().enumerate() {
        for (j, lj) in tracklets.iter().enumerate() {
            if i == j {
                continue;
            }
            let gap = lj.start_frame - li.end_frame;
            if gap > 0 && gap < params.eta && topology.adjacent(li.camera, lj.camera) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Appearance and motion probabilities for one selected edge, already
/// equalized and clamped.
#[derive(Debug, Clone, Copy)]
pub struct EdgeSimilarity {
    pub appearance: f64,
    pub motion: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TransitionArc {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
}

/// The assembled min-cost-flow instance: `2M + 2` nodes, unit capacities
/// everywhere, zero-cost source/sink arcs.
#[derive(Debug, Clone)]
pub struct FlowGraph {
    pub tracklet_ids: Vec<u64>,
    pub start_frames: Vec<i64>,
    pub end_frames: Vec<i64>,
    pub observation_costs: Vec<f64>,
    pub transitions: Vec<TransitionArc>,
}

impl FlowGraph {
    pub fn tracklet_count(&self) -> usize {
        self.tracklet_ids.len()
    }

    pub fn node_count(&self) -> usize {
        2 * self.tracklet_count() + 2
    }

    /// Text edge list (node ids, costs, capacities) for external cross-checks.
    pub fn dump_edges(&self) -> String {
        let mut out = String::new();
        let m = self.tracklet_count();
        out.push_str(&format!("# nodes {} source 0 sink 1\n", self.node_count()));
        for i in 0..m {
            out.push_str(&format!("0 {} 0 1\n", 2 + 2 * i));
            out.push_str(&format!(
                "{} {} {} 1\n",
                2 + 2 * i,
                3 + 2 * i,
                self.observation_costs[i]
            ));
            out.push_str(&format!("{} 1 0 1\n", 3 + 2 * i));
        }
        for t in &self.transitions {
            out.push_str(&format!(
                "{} {} {} 1\n",
                3 + 2 * t.from,
                2 + 2 * t.to,
                t.cost
            ));
        }
        out
    }
}

/// Observation cost: negative log-odds of the clamped confidence.
pub fn observation_cost(confidence: f64) -> f64 {
    -(confidence / (1.0 - confidence)).ln()
}

/// Transition cost from the two feature probabilities.
pub fn transition_cost(sim: &EdgeSimilarity, params: &GraphParams) -> Result<f64, FlowError> {
    for &p in &[sim.appearance, sim.motion] {
        if !(p > 0.0 && p <= 1.0) {
            return Err(FlowError::InvalidProbability(p));
        }
    }
    Ok(-params.k1 * sim.appearance.ln() - params.k2 * sim.motion.ln())
}

/// Assemble the graph from validated tracklets, the selected pairs and their
/// similarities (one per pair, same order).
pub fn build_graph(
    tracklets: &[Tracklet],
    pairs: &[(usize, usize)],
    similarities: &[EdgeSimilarity],
    params: &GraphParams,
) -> Result<FlowGraph, FlowError> {
    assert_eq!(pairs.len(), similarities.len());
    let mut transitions = Vec::with_capacity(pairs.len());
    for (&(i, j), sim) in pairs.iter().zip(similarities) {
        transitions.push(TransitionArc {
            from: i,
            to: j,
            cost: transition_cost(sim, params)?,
        });
    }
    transitions.sort_by_key(|t| (t.from, t.to));
    Ok(FlowGraph {
        tracklet_ids: tracklets.iter().map(|t| t.id).collect(),
        start_frames: tracklets.iter().map(|t| t.start_frame).collect(),
        end_frames: tracklets.iter().map(|t| t.end_frame).collect(),
        observation_costs: tracklets
            .iter()
            .map(|t| observation_cost(t.confidence))
            .collect(),
        transitions,
    })
}

/// Total cost of a configuration (trajectories as tracklet index lists),
/// summed in canonical order. Both the solver and the oracle report their
/// objective through this function so equal configurations cost bit-equal.
fn configuration_cost(trajectories: &[Vec<usize>], graph: &FlowGraph) -> f64 {
    let trans: HashMap<(usize, usize), f64> = graph
        .transitions
        .iter()
        .map(|t| ((t.from, t.to), t.cost))
        .collect();
    let mut total = 0.0;
    for traj in trajectories {
        for &i in traj {
            total += graph.observation_costs[i];
        }
        for w in traj.windows(2) {
            total += trans[&(w[0], w[1])];
        }
    }
    total
}

fn canonicalize(mut trajectories: Vec<Vec<usize>>, graph: &FlowGraph) -> TrajectorySet {
    trajectories.sort_by_key(|t| graph.tracklet_ids[t[0]]);
    let objective_cost = configuration_cost(&trajectories, graph);
    TrajectorySet {
        trajectories: trajectories
            .iter()
            .map(|t| t.iter().map(|&i| graph.tracklet_ids[i]).collect())
            .collect(),
        objective_cost,
    }
}

#[derive(Clone, Copy)]
struct Arc {
    to: usize,
    rev: usize,
    cap: i32,
    cost: f64,
}

struct Network {
    adj: Vec<Vec<Arc>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cost: f64) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Arc {
            to,
            rev: rev_from,
            cap: 1,
            cost,
        });
        self.adj[to].push(Arc {
            to: from,
            rev: rev_to,
            cap: 0,
            cost: -cost,
        });
    }
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, node index as a deterministic tie-break
        other
            .0
            .partial_cmp(&self.0)
            .unwrap()
            .then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const SOURCE: usize = 0;
const SINK: usize = 1;

fn enter_node(i: usize) -> usize {
    2 + 2 * i
}

fn exit_node(i: usize) -> usize {
    3 + 2 * i
}

/// Initial node potentials: exact shortest distances from the source over the
/// arc set, computed in one pass over a topological order. The original graph
/// is a DAG because transition arcs move strictly forward in time.
fn initial_potentials(graph: &FlowGraph, net: &Network) -> Vec<f64> {
    let m = graph.tracklet_count();
    let mut order = Vec::with_capacity(net.adj.len());
    order.push(SOURCE);
    let mut events: Vec<(i64, u8, usize)> = Vec::with_capacity(2 * m);
    for i in 0..m {
        events.push((graph.start_frames[i], 0, enter_node(i)));
        events.push((graph.end_frames[i], 1, exit_node(i)));
    }
    events.sort();
    order.extend(events.into_iter().map(|(_, _, n)| n));
    order.push(SINK);

    let mut dist = vec![f64::INFINITY; net.adj.len()];
    dist[SOURCE] = 0.0;
    for &u in &order {
        if dist[u].is_finite() {
            for arc in &net.adj[u] {
                if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] {
                    dist[arc.to] = dist[u] + arc.cost;
                }
            }
        }
    }
    dist.into_iter()
        .map(|d| if d.is_finite() { d } else { 0.0 })
        .collect()
}

/// Solve the MAP association: successive shortest augmenting paths with node
/// potentials, pushing one unit at a time while the shortest source-to-sink
/// path has negative total cost. The flow amount is discovered, not fixed.
pub fn solve(graph: &FlowGraph) -> TrajectorySet {
    let m = graph.tracklet_count();
    if m == 0 {
        return TrajectorySet::default();
    }
    let nodes = graph.node_count();
    let mut net = Network::new(nodes);
    for i in 0..m {
        net.add_arc(SOURCE, enter_node(i), 0.0);
        net.add_arc(enter_node(i), exit_node(i), graph.observation_costs[i]);
        net.add_arc(exit_node(i), SINK, 0.0);
    }
    for t in &graph.transitions {
        net.add_arc(exit_node(t.from), enter_node(t.to), t.cost);
    }

    let mut potential = initial_potentials(graph, &net);
    loop {
        // Dijkstra on reduced costs.
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes];
        let mut done = vec![false; nodes];
        let mut heap = std::collections::BinaryHeap::new();
        dist[SOURCE] = 0.0;
        heap.push(HeapEntry(0.0, SOURCE));
        while let Some(HeapEntry(d, u)) = heap.pop() {
            if done[u] || d > dist[u] {
                continue;
            }
            done[u] = true;
            for (k, arc) in net.adj[u].iter().enumerate() {
                if arc.cap <= 0 {
                    continue;
                }
                let nd = dist[u] + arc.cost + potential[u] - potential[arc.to];
                if nd < dist[arc.to] - 1e-15 {
                    dist[arc.to] = nd;
                    prev[arc.to] = Some((u, k));
                    heap.push(HeapEntry(nd, arc.to));
                }
            }
        }
        if !dist[SINK].is_finite() {
            break;
        }
        // True cost of the found path, summed along the arcs.
        let mut path = Vec::new();
        let mut v = SINK;
        while v != SOURCE {
            let (u, k) = prev[v].expect("path back to source");
            path.push((u, k));
            v = u;
        }
        let path_cost: f64 = path.iter().map(|&(u, k)| net.adj[u][k].cost).sum();
        if path_cost >= 0.0 {
            break;
        }
        for &(u, k) in &path {
            let rev = net.adj[u][k].rev;
            let to = net.adj[u][k].to;
            net.adj[u][k].cap -= 1;
            net.adj[to][rev].cap += 1;
        }
        let sink_dist = dist[SINK];
        for v in 0..nodes {
            potential[v] += if dist[v].is_finite() { dist[v] } else { sink_dist };
        }
    }

    // Decode: observation arcs with spent capacity carry one unit of flow.
    let mut next: Vec<Option<usize>> = vec![None; m];
    let mut is_target = vec![false; m];
    let mut used = vec![false; m];
    for i in 0..m {
        for arc in &net.adj[exit_node(i)] {
            if arc.cap == 0 && arc.to != SINK && arc.to != enter_node(i) && arc.to % 2 == 0 {
                let j = (arc.to - 2) / 2;
                next[i] = Some(j);
                is_target[j] = true;
            }
        }
        // the observation arc enter_i -> exit_i, saturated means used
        for arc in &net.adj[enter_node(i)] {
            if arc.to == exit_node(i) && arc.cap == 0 {
                used[i] = true;
            }
        }
    }
    let mut trajectories = Vec::new();
    for i in 0..m {
        if used[i] && !is_target[i] {
            let mut traj = vec![i];
            let mut cur = i;
            while let Some(j) = next[cur] {
                traj.push(j);
                cur = j;
            }
            trajectories.push(traj);
        }
    }
    canonicalize(trajectories, graph)
}

const BRUTE_FORCE_MAX: usize = 10;

/// Exhaustive MAP oracle: enumerates every partition of a tracklet subset
/// into vertex-disjoint rule-respecting ordered paths and returns the
/// cheapest. Ties go to fewer trajectories, then lexicographic id order.
pub fn brute_force_map(graph: &FlowGraph) -> Result<TrajectorySet, FlowError> {
    let m = graph.tracklet_count();
    if m > BRUTE_FORCE_MAX {
        return Err(FlowError::TooLarge {
            max: BRUTE_FORCE_MAX,
            got: m,
        });
    }
    let edge_set: std::collections::HashSet<(usize, usize)> = graph
        .transitions
        .iter()
        .map(|t| (t.from, t.to))
        .collect();
    // Any rule-respecting path visits tracklets in increasing start order.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (graph.start_frames[i], graph.tracklet_ids[i]));

    struct Best {
        cost: f64,
        key: (usize, Vec<Vec<u64>>),
        trajectories: Vec<Vec<usize>>,
    }
    let mut best = Best {
        cost: 0.0,
        key: (0, Vec::new()),
        trajectories: Vec::new(),
    };

    fn consider(paths: &[Vec<usize>], graph: &FlowGraph, best: &mut Best) {
        let cost = configuration_cost(paths, graph);
        let mut sorted: Vec<Vec<u64>> = paths
            .iter()
            .map(|p| p.iter().map(|&i| graph.tracklet_ids[i]).collect())
            .collect();
        sorted.sort();
        let key = (paths.len(), sorted);
        let better = match cost.partial_cmp(&best.cost).unwrap() {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => key < best.key,
        };
        if better {
            best.cost = cost;
            best.key = key;
            best.trajectories = paths.to_vec();
        }
    }

    fn recurse(
        pos: usize,
        order: &[usize],
        paths: &mut Vec<Vec<usize>>,
        graph: &FlowGraph,
        edges: &std::collections::HashSet<(usize, usize)>,
        best: &mut Best,
    ) {
        if pos == order.len() {
            consider(paths, graph, best);
            return;
        }
        let v = order[pos];
        // skip v
        recurse(pos + 1, order, paths, graph, edges, best);
        // start a new path at v
        paths.push(vec![v]);
        recurse(pos + 1, order, paths, graph, edges, best);
        paths.pop();
        // append v to any open path whose tail links to it
        for k in 0..paths.len() {
            let tail = *paths[k].last().unwrap();
            if edges.contains(&(tail, v)) {
                paths[k].push(v);
                recurse(pos + 1, order, paths, graph, edges, best);
                paths[k].pop();
            }
        }
    }

    // seed with the empty configuration (cost 0, the do-nothing baseline)
    let mut paths = Vec::new();
    recurse(0, &order, &mut paths, graph, &edge_set, &mut best);
    Ok(canonicalize(best.trajectories, graph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        BoundingBox, CameraTopology, MajorColorDescriptor, TrackState, Tracklet,
    };
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn tracklet(id: u64, camera: u32, start: i64, len: i64, conf: f64) -> Tracklet {
        let states = (0..len)
            .map(|k| TrackState {
                position: [k as f64, 0.0],
                velocity: [1.0, 0.0],
                bbox: BoundingBox::new(0.0, 0.0, 10.0, 10.0),
            })
            .collect();
        Tracklet {
            id,
            camera,
            start_frame: start,
            end_frame: start + len - 1,
            states,
            confidence: conf,
            frames_appearance: vec![MajorColorDescriptor::default(); len as usize],
        }
    }

    fn unit_sim() -> EdgeSimilarity {
        EdgeSimilarity {
            appearance: 1.0,
            motion: 1.0,
        }
    }

    #[test]
    fn edge_selection_rules() {
        let params = GraphParams::default();
        let topo = CameraTopology::single(0);
        let a = tracklet(1, 0, 0, 10, 0.8);
        let b = tracklet(2, 0, 40, 10, 0.8); // gap 31
        let c = tracklet(3, 0, 9, 10, 0.8); // overlaps a
        let d = tracklet(4, 0, 2000, 10, 0.8); // gap beyond eta from a
        let tracklets = [a, b, c, d];
        let pairs = select_edges(&tracklets, &topo, &params);
        assert!(pairs.contains(&(0, 1)));
        assert!(!pairs.contains(&(0, 2))); // gap 0
        assert!(!pairs.contains(&(0, 3))); // gap 1991 > eta
        assert!(pairs.contains(&(2, 1)));
    }

    #[test]
    fn graph_shape_m6() {
        let params = GraphParams::default();
        let tracklets: Vec<Tracklet> =
            (0..6).map(|i| tracklet(i, 0, 50 * i as i64, 10, 0.8)).collect();
        let graph = build_graph(&tracklets, &[], &[], &params).unwrap();
        assert_eq!(graph.node_count(), 14);
    }

    #[test]
    fn cost_formulas() {
        assert_abs_diff_eq!(observation_cost(0.5), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(observation_cost(0.9), -(9.0f64).ln(), epsilon = 1e-12);
        let params = GraphParams::default();
        assert_eq!(transition_cost(&unit_sim(), &params).unwrap(), 0.0);
        assert!(transition_cost(
            &EdgeSimilarity {
                appearance: 0.0,
                motion: 1.0
            },
            &params
        )
        .is_err());
    }

    #[test]
    fn single_confident_tracklet_kept() {
        let params = GraphParams::default();
        let tracklets = [tracklet(1, 0, 0, 10, 0.9)];
        let graph = build_graph(&tracklets, &[], &[], &params).unwrap();
        let result = solve(&graph);
        assert_eq!(result.trajectories, vec![vec![1]]);
        assert_abs_diff_eq!(result.objective_cost, -(9.0f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn single_weak_tracklet_dropped() {
        let params = GraphParams::default();
        let tracklets = [tracklet(1, 0, 0, 10, 0.1)];
        let graph = build_graph(&tracklets, &[], &[], &params).unwrap();
        let result = solve(&graph);
        assert!(result.trajectories.is_empty());
        assert_eq!(result.objective_cost, 0.0);
    }

    #[test]
    fn strong_pair_links_at_zero_cost() {
        let params = GraphParams::default();
        let topo = CameraTopology::single(0);
        let tracklets = [tracklet(1, 0, 0, 10, 0.9), tracklet(2, 0, 20, 10, 0.9)];
        let pairs = select_edges(&tracklets, &topo, &params);
        assert_eq!(pairs, vec![(0, 1)]);
        let graph = build_graph(&tracklets, &pairs, &[unit_sim()], &params).unwrap();
        let result = solve(&graph);
        assert_eq!(result.trajectories, vec![vec![1, 2]]);
        assert_abs_diff_eq!(
            result.objective_cost,
            -2.0 * (9.0f64).ln(),
            epsilon = 1e-12
        );
        let oracle = brute_force_map(&graph).unwrap();
        assert_eq!(oracle.trajectories, result.trajectories);
    }

    #[test]
    fn positive_cost_links_are_undone() {
        // A chain is picked up by the first augmentation but the optimum is
        // two singletons when the transition carries any positive cost.
        let params = GraphParams::default();
        let topo = CameraTopology::single(0);
        let tracklets = [tracklet(1, 0, 0, 10, 0.9), tracklet(2, 0, 20, 10, 0.9)];
        let pairs = select_edges(&tracklets, &topo, &params);
        let sims = [EdgeSimilarity {
            appearance: 0.9,
            motion: 1.0,
        }];
        let graph = build_graph(&tracklets, &pairs, &sims, &params).unwrap();
        let result = solve(&graph);
        assert_eq!(result.trajectories, vec![vec![1], vec![2]]);
        let oracle = brute_force_map(&graph).unwrap();
        assert_eq!(result.objective_cost, oracle.objective_cost);
    }

    #[test]
    fn empty_graph() {
        let params = GraphParams::default();
        let graph = build_graph(&[], &[], &[], &params).unwrap();
        assert_eq!(solve(&graph), TrajectorySet::default());
        assert_eq!(brute_force_map(&graph).unwrap(), TrajectorySet::default());
    }

    #[test]
    fn oracle_tie_breaks_to_empty() {
        let params = GraphParams::default();
        let tracklets = [tracklet(1, 0, 0, 10, 0.5)];
        let graph = build_graph(&tracklets, &[], &[], &params).unwrap();
        let oracle = brute_force_map(&graph).unwrap();
        assert!(oracle.trajectories.is_empty());
        let solved = solve(&graph);
        assert!(solved.trajectories.is_empty());
    }

    type Instance = (Vec<Tracklet>, CameraTopology, Vec<(usize, usize)>, Vec<EdgeSimilarity>);

    pub(crate) fn random_instance(rng: &mut ChaCha8Rng, m: usize) -> Instance {
        let n_cams = rng.gen_range(2..=3u32);
        let cameras: Vec<u32> = (0..n_cams).collect();
        let adjacency = vec![vec![true; n_cams as usize]; n_cams as usize];
        // portals are irrelevant here: similarities are injected directly
        let topo = CameraTopology {
            cameras,
            adjacency,
            portals: Vec::new(),
        };
        let tracklets: Vec<Tracklet> = (0..m)
            .map(|i| {
                let start = rng.gen_range(0..400i64);
                let len = rng.gen_range(5..60i64);
                let conf = rng.gen_range(0.05..0.95);
                tracklet(i as u64 + 1, rng.gen_range(0..n_cams), start, len, conf)
            })
            .collect();
        let params = GraphParams::default();
        let pairs = select_edges(&tracklets, &topo, &params);
        let sims: Vec<EdgeSimilarity> = pairs
            .iter()
            .map(|_| EdgeSimilarity {
                appearance: rng.gen_range(0.05..1.0),
                motion: rng.gen_range(0.05..1.0),
            })
            .collect();
        (tracklets, topo, pairs, sims)
    }

    #[test]
    fn solver_matches_oracle_on_random_instances() {
        let params = GraphParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let m = rng.gen_range(0..=8);
            let (tracklets, _topo, pairs, sims) = random_instance(&mut rng, m);
            let graph = build_graph(&tracklets, &pairs, &sims, &params).unwrap();
            let solved = solve(&graph);
            let oracle = brute_force_map(&graph).unwrap();
            assert_eq!(
                solved.objective_cost, oracle.objective_cost,
                "instance with M={m}"
            );
        }
    }

    #[test]
    fn disjoint_and_temporally_valid() {
        let params = GraphParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (tracklets, topo, pairs, sims) = random_instance(&mut rng, 8);
            let graph = build_graph(&tracklets, &pairs, &sims, &params).unwrap();
            let result = solve(&graph);
            let mut seen = std::collections::HashSet::new();
            let selected = select_edges(&tracklets, &topo, &params);
            let by_id: HashMap<u64, usize> = tracklets
                .iter()
                .enumerate()
                .map(|(i, t)| (t.id, i))
                .collect();
            for traj in &result.trajectories {
                for id in traj {
                    assert!(seen.insert(*id), "tracklet {id} in two trajectories");
                }
                for w in traj.windows(2) {
                    let pair = (by_id[&w[0]], by_id[&w[1]]);
                    assert!(selected.contains(&pair));
                }
            }
        }
    }

    #[test]
    fn adding_an_arc_never_hurts() {
        let params = GraphParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let (tracklets, _topo, pairs, sims) = random_instance(&mut rng, 7);
            if pairs.is_empty() {
                continue;
            }
            let drop = rng.gen_range(0..pairs.len());
            let mut fewer_pairs = pairs.clone();
            let mut fewer_sims = sims.clone();
            fewer_pairs.remove(drop);
            fewer_sims.remove(drop);
            let full = solve(&build_graph(&tracklets, &pairs, &sims, &params).unwrap());
            let reduced =
                solve(&build_graph(&tracklets, &fewer_pairs, &fewer_sims, &params).unwrap());
            assert!(full.objective_cost <= reduced.objective_cost + 1e-9);
        }
    }

    #[test]
    fn decoded_flow_reencodes_to_same_cost() {
        let params = GraphParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (tracklets, _topo, pairs, sims) = random_instance(&mut rng, 8);
        let graph = build_graph(&tracklets, &pairs, &sims, &params).unwrap();
        let result = solve(&graph);
        // Re-encode by hand: sum observation and transition costs of the
        // decoded trajectories.
        let by_id: HashMap<u64, usize> = graph
            .tracklet_ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        let trans: HashMap<(usize, usize), f64> = graph
            .transitions
            .iter()
            .map(|t| ((t.from, t.to), t.cost))
            .collect();
        let mut total = 0.0;
        for traj in &result.trajectories {
            for id in traj {
                total += graph.observation_costs[by_id[id]];
            }
            for w in traj.windows(2) {
                total += trans[&(by_id[&w[0]], by_id[&w[1]])];
            }
        }
        assert_abs_diff_eq!(total, result.objective_cost, epsilon = 1e-9);
    }

    #[test]
    fn dump_edges_has_all_arcs() {
        let params = GraphParams::default();
        let topo = CameraTopology::single(0);
        let tracklets = [tracklet(1, 0, 0, 10, 0.9), tracklet(2, 0, 20, 10, 0.9)];
        let pairs = select_edges(&tracklets, &topo, &params);
        let graph = build_graph(&tracklets, &pairs, &[unit_sim()], &params).unwrap();
        let dump = graph.dump_edges();
        // 3 arcs per tracklet + 1 transition
        assert_eq!(dump.lines().count() - 1, 7);
    }
}
