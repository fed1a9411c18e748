//! Dinic's algorithm on exact integer capacities.
//!
//! Capacities are stored as `BigInt`; the solve runs on `i64` when the total
//! capacity fits and falls back to `BigInt` otherwise.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: BigInt,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= nodes || sink >= nodes {
            return Err(Error::MalformedNetwork(format!(
                "terminal out of range for {nodes} nodes"
            )));
        }
        if source == sink {
            return Err(Error::MalformedNetwork("source equals sink".into()));
        }
        Ok(FlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        })
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: BigInt) -> Result<usize> {
        if from >= self.nodes || to >= self.nodes {
            return Err(Error::MalformedNetwork(format!("arc {from}->{to} out of range")));
        }
        if from == to {
            return Err(Error::MalformedNetwork(format!("self-loop at {from}")));
        }
        if capacity.is_negative() {
            return Err(Error::MalformedNetwork(format!(
                "negative capacity on {from}->{to}"
            )));
        }
        self.arcs.push(Arc { from, to, capacity });
        Ok(self.arcs.len() - 1)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn total_capacity(&self) -> BigInt {
        self.arcs.iter().map(|a| &a.capacity).sum()
    }

    /// Capacity that no finite cut can reach: one more than the sum of all capacities.
    pub fn hard_capacity(&self) -> BigInt {
        self.total_capacity() + 1
    }
}

#[derive(Clone, Debug)]
pub struct CutResult {
    pub value: BigInt,
    /// Nodes reachable from the source in the final residual graph: the
    /// inclusion-minimal source side of a minimum cut.
    pub source_side: Vec<bool>,
    /// Nodes that cannot reach the sink in the residual graph: the
    /// inclusion-maximal source side.
    pub maximal_source_side: Vec<bool>,
    /// Flow on each arc, in insertion order.
    pub flows: Vec<BigInt>,
}

impl CutResult {
    /// Capacity of the cut defined by `side`.
    pub fn cut_capacity(net: &FlowNetwork, side: &[bool]) -> BigInt {
        net.arcs
            .iter()
            .filter(|a| side[a.from] && !side[a.to])
            .map(|a| &a.capacity)
            .sum()
    }
}

trait Capacity: Clone + Ord + Zero + Debug + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}

impl<T> Capacity for T where
    T: Clone + Ord + Zero + Debug + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>
{
}

struct Residual<T> {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<T>,
}

impl<T: Capacity> Residual<T> {
    fn build(net: &FlowNetwork, convert: impl Fn(&BigInt) -> T) -> Self {
        let mut head = vec![Vec::new(); net.nodes];
        let mut to = Vec::with_capacity(2 * net.arcs.len());
        let mut cap = Vec::with_capacity(2 * net.arcs.len());
        for a in &net.arcs {
            head[a.from].push(to.len());
            to.push(a.to);
            cap.push(convert(&a.capacity));
            head[a.to].push(to.len());
            to.push(a.from);
            cap.push(T::zero());
        }
        Residual { head, to, cap }
    }

    fn levels(&self, s: usize) -> Vec<i64> {
        let mut level = vec![-1; self.head.len()];
        let mut queue = VecDeque::new();
        level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &e in &self.head[v] {
                let u = self.to[e];
                if level[u] < 0 && !self.cap[e].is_zero() {
                    level[u] = level[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        level
    }

    fn run(&mut self, s: usize, t: usize) -> T {
        let mut total = T::zero();
        loop {
            let mut level = self.levels(s);
            if level[t] < 0 {
                return total;
            }
            let mut it = vec![0usize; self.head.len()];
            let mut path: Vec<usize> = Vec::new();
            let mut v = s;
            loop {
                if v == t {
                    let mut f = self.cap[path[0]].clone();
                    for &e in &path[1..] {
                        if self.cap[e] < f {
                            f = self.cap[e].clone();
                        }
                    }
                    for &e in &path {
                        self.cap[e] -= &f;
                        self.cap[e ^ 1] += &f;
                    }
                    total += &f;
                    let k = path
                        .iter()
                        .position(|&e| self.cap[e].is_zero())
                        .expect("bottleneck arc saturates");
                    path.truncate(k);
                    v = path.last().map_or(s, |&e| self.to[e]);
                    continue;
                }
                let mut advanced = false;
                while it[v] < self.head[v].len() {
                    let e = self.head[v][it[v]];
                    let u = self.to[e];
                    if !self.cap[e].is_zero() && level[u] == level[v] + 1 {
                        path.push(e);
                        v = u;
                        advanced = true;
                        break;
                    }
                    it[v] += 1;
                }
                if !advanced {
                    if v == s {
                        break;
                    }
                    level[v] = -1;
                    let e = path.pop().expect("non-source node has an entering arc");
                    v = self.to[e ^ 1];
                    it[v] += 1;
                }
            }
        }
    }

    fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.head[v] {
                let u = self.to[e];
                if !seen[u] && !self.cap[e].is_zero() {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }

    fn reaching(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![t];
        seen[t] = true;
        while let Some(w) = stack.pop() {
            for &e in &self.head[w] {
                let u = self.to[e];
                // residual arc u -> w is the partner of e
                if !seen[u] && !self.cap[e ^ 1].is_zero() {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

fn solve<T: Capacity>(
    net: &FlowNetwork,
    convert: impl Fn(&BigInt) -> T,
    back: impl Fn(&T) -> BigInt,
) -> CutResult {
    let mut r = Residual::build(net, convert);
    let value = back(&r.run(net.source, net.sink));
    let source_side = r.reachable_from(net.source);
    let maximal_source_side = r.reaching(net.sink).into_iter().map(|b| !b).collect();
    let flows = net
        .arcs
        .iter()
        .enumerate()
        .map(|(k, a)| &a.capacity - back(&r.cap[2 * k]))
        .collect();
    CutResult {
        value,
        source_side,
        maximal_source_side,
        flows,
    }
}

/// Maximum flow and the canonical minimum cut.
///
/// Strong duality, conservation and capacity constraints are checked before returning.
pub fn max_flow(net: &FlowNetwork) -> Result<CutResult> {
    let total = net.total_capacity();
    let result = if total.to_i64().is_some() {
        solve(net, |c| c.to_i64().expect("fits"), |&c| BigInt::from(c))
    } else {
        solve(net, |c| c.clone(), |c| c.clone())
    };
    verify(net, &result);
    Ok(result)
}

fn verify(net: &FlowNetwork, r: &CutResult) {
    let mut excess = vec![BigInt::zero(); net.nodes];
    for (a, f) in net.arcs.iter().zip(&r.flows) {
        assert!(!f.is_negative() && *f <= a.capacity, "capacity constraint violated");
        excess[a.to] += f;
        excess[a.from] -= f;
    }
    for (v, e) in excess.iter().enumerate() {
        if v != net.source && v != net.sink {
            assert!(e.is_zero(), "conservation violated at node {v}");
        }
    }
    assert_eq!(excess[net.sink], r.value, "flow value mismatch");
    assert_eq!(CutResult::cut_capacity(net, &r.source_side), r.value, "duality gap");
    assert_eq!(
        CutResult::cut_capacity(net, &r.maximal_source_side),
        r.value,
        "duality gap on maximal cut"
    );
    assert!(r.source_side[net.source] && !r.source_side[net.sink]);
}
