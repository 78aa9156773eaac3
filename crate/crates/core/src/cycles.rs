//! Transition cycles on the reduced level diagram.
//!
//! Under the crossing condition the degenerate levels `{|2>,|5>}` and
//! `{|4>,|7>}` collapse to single nodes; the twelve transitions then form a
//! small graph whose directed cycles are the elementary heat-transport
//! loops between the two reservoirs.

use crate::error::Error;
use crate::model::{eigenvalues, Transition};
use crate::params::{Qubit, SystemParams};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reservoir {
    Left,
    Right,
}

impl Qubit {
    pub fn reservoir(self) -> Reservoir {
        match self {
            Qubit::A | Qubit::C => Reservoir::Left,
            Qubit::B => Reservoir::Right,
        }
    }
}

/// A degeneracy class of levels, one node of the reduced diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelClass {
    /// 1-based level indices sharing this energy.
    pub levels: Vec<usize>,
    pub energy: f64,
}

/// A traversed edge of a cycle. `energy` is the amount released into the
/// driving reservoir (`E_from - E_to`; negative means absorption).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEdge {
    pub from: usize,
    pub to: usize,
    pub reservoir: Reservoir,
    pub energy: f64,
}

/// A simple directed cycle over the reduced level diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCycle {
    /// Node indices into the class list, in traversal order.
    pub nodes: Vec<usize>,
    pub edges: Vec<CycleEdge>,
}

impl TransitionCycle {
    /// Net energy deposited into one reservoir over a full traversal.
    pub fn net_energy(&self, res: Reservoir) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.reservoir == res)
            .map(|e| e.energy)
            .sum()
    }

    /// Sum of signed edge energies; zero for any closed loop.
    pub fn total_energy(&self) -> f64 {
        self.edges.iter().map(|e| e.energy).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True if the cycle visits exactly these level classes in order (up to
    /// rotation), matching by the smallest level of each class.
    pub fn matches_levels(&self, classes: &[LevelClass], loop_levels: &[usize]) -> bool {
        if self.nodes.len() != loop_levels.len() {
            return false;
        }
        let reps: Vec<usize> = self
            .nodes
            .iter()
            .map(|&n| *classes[n].levels.iter().min().unwrap())
            .collect();
        let n = reps.len();
        (0..n).any(|shift| (0..n).all(|k| reps[(k + shift) % n] == loop_levels[k]))
    }
}

/// All cycles plus the node classes they index into.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSet {
    pub classes: Vec<LevelClass>,
    pub cycles: Vec<TransitionCycle>,
}

/// Enumerates the simple directed cycles (length >= 3 nodes) of the reduced
/// level diagram spanned by `transitions`. Requires the crossing condition,
/// since the quoted cycle structure lives on the degenerate diagram.
pub fn enumerate_cycles(params: &SystemParams, transitions: &[Transition]) -> Result<CycleSet> {
    if !params.crossing_condition() {
        return Err(Error::CrossingConditionNotMet);
    }
    let eig = eigenvalues(params);

    // Group levels into degeneracy classes by energy.
    let scale = eig
        .lambdas
        .iter()
        .fold(0.0_f64, |m, &l| m.max(l.abs()))
        .max(1.0);
    let mut classes: Vec<LevelClass> = Vec::new();
    for level in 1..=8 {
        let e = eig.lambda(level);
        match classes
            .iter_mut()
            .find(|c| (c.energy - e).abs() <= 1e-12 * scale)
        {
            Some(c) => c.levels.push(level),
            None => classes.push(LevelClass {
                levels: vec![level],
                energy: e,
            }),
        }
    }
    let class_of = |level: usize| {
        classes
            .iter()
            .position(|c| c.levels.contains(&level))
            .unwrap()
    };

    // Undirected adjacency with reservoir tags, deduplicated (A and C drive
    // the same class pairs under the crossing condition).
    let n = classes.len();
    let mut adj: Vec<Vec<(usize, Reservoir)>> = vec![Vec::new(); n];
    let mut seen: Vec<(usize, usize, Reservoir)> = Vec::new();
    for t in transitions {
        let (u, v) = (class_of(t.source), class_of(t.target));
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v), t.qubit.reservoir());
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        adj[u].push((v, key.2));
        adj[v].push((u, key.2));
    }

    // Simple-cycle enumeration: each cycle is reported once per
    // orientation, anchored at its smallest node index.
    let mut cycles = Vec::new();
    let mut path = Vec::new();
    for start in 0..n {
        path.clear();
        path.push(start);
        dfs(start, start, &adj, &mut path, &mut cycles);
    }

    let cycles = cycles
        .into_iter()
        .map(|nodes| materialize(nodes, &classes, &adj))
        .collect();
    Ok(CycleSet { classes, cycles })
}

fn dfs(
    start: usize,
    current: usize,
    adj: &[Vec<(usize, Reservoir)>],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for &(next, _) in &adj[current] {
        if next == start && path.len() >= 3 {
            out.push(path.clone());
        } else if next > start && !path.contains(&next) {
            path.push(next);
            dfs(start, next, adj, path, out);
            path.pop();
        }
    }
}

fn materialize(
    nodes: Vec<usize>,
    classes: &[LevelClass],
    adj: &[Vec<(usize, Reservoir)>],
) -> TransitionCycle {
    let mut edges = Vec::with_capacity(nodes.len());
    for k in 0..nodes.len() {
        let from = nodes[k];
        let to = nodes[(k + 1) % nodes.len()];
        let &(_, reservoir) = adj[from]
            .iter()
            .find(|&&(v, _)| v == to)
            .expect("cycle edge must exist in adjacency");
        edges.push(CycleEdge {
            from,
            to,
            reservoir,
            energy: classes[from].energy - classes[to].energy,
        });
    }
    TransitionCycle { nodes, edges }
}
