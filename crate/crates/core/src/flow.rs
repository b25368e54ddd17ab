//! Exact maximal flow and minimal cut between two vertex sets of a capacitated
//! lattice.
//!
//! The lattice is closed off by an auxiliary source joined to every vertex of
//! `F1` and an auxiliary sink joined from every vertex of `F2`; both auxiliary
//! arc families carry `1 + Σ t(e)`, which no minimal cut can afford. Each
//! undirected edge becomes a pair of mutually reverse arcs of capacity `t(e)`.
//! Streams and cuts are reported on lattice edges only.

use std::collections::VecDeque;

use serde::Serialize;

use crate::capacity::{CapacityAssignment, Fixed};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Which exact algorithm computes the flow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Solver {
    /// Highest-label push-relabel with gap relabeling and periodic global
    /// relabeling.
    #[default]
    PushRelabel,
    /// Shortest augmenting paths found by breadth-first search.
    Augmenting,
}

/// Direction of the fluid on an edge `⟨u, v⟩` with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// `u → v`
    Forward,
    /// `v → u`
    Backward,
}

/// Amount `g(e) ≥ 0` and orientation `o(e)` per lattice edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stream {
    pub amount: Vec<Fixed>,
    pub orientation: Vec<Orientation>,
}

impl Stream {
    pub fn zero(num_edges: usize) -> Self {
        Self {
            amount: vec![0; num_edges],
            orientation: vec![Orientation::Forward; num_edges],
        }
    }

    /// Signed flow along the canonical direction of edge `e`.
    pub fn signed(&self, e: usize) -> Fixed {
        match self.orientation[e] {
            Orientation::Forward => self.amount[e],
            Orientation::Backward => -self.amount[e],
        }
    }
}

/// An edge set separating `F1` from `F2`, with the side it was read from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cut {
    /// Edge indices, increasing.
    pub edges: Vec<usize>,
    /// Lattice vertices on the source side, increasing.
    pub source_side: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowResult {
    pub value: Fixed,
    pub stream: Stream,
    pub cut: Cut,
    pub cut_capacity: Fixed,
}

/// Residual network in compressed adjacency form.
struct Network {
    first: Vec<usize>,
    head: Vec<usize>,
    rev: Vec<usize>,
    cap: Vec<Fixed>,
}

impl Network {
    /// `arcs` holds `(tail, head, cap, reverse cap)`; returns the network and
    /// the position of each forward arc.
    fn build(nodes: usize, arcs: &[(usize, usize, Fixed, Fixed)]) -> (Self, Vec<usize>) {
        let mut degree = vec![0usize; nodes + 1];
        for &(a, b, _, _) in arcs {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut first = vec![0usize; nodes + 1];
        for v in 0..nodes {
            first[v + 1] = first[v] + degree[v];
        }
        let m = first[nodes];
        let mut fill = first.clone();
        let mut head = vec![0usize; m];
        let mut rev = vec![0usize; m];
        let mut cap = vec![0 as Fixed; m];
        let mut forward = Vec::with_capacity(arcs.len());
        for &(a, b, c, rc) in arcs {
            let i = fill[a];
            fill[a] += 1;
            let j = fill[b];
            fill[b] += 1;
            head[i] = b;
            rev[i] = j;
            cap[i] = c;
            head[j] = a;
            rev[j] = i;
            cap[j] = rc;
            forward.push(i);
        }
        (Self { first, head, rev, cap }, forward)
    }

    fn nodes(&self) -> usize {
        self.first.len() - 1
    }

    fn arcs(&self, v: usize) -> std::ops::Range<usize> {
        self.first[v]..self.first[v + 1]
    }

    fn push(&mut self, a: usize, delta: Fixed) {
        self.cap[a] -= delta;
        let r = self.rev[a];
        self.cap[r] += delta;
    }

    /// Nodes reachable from `src` through arcs of positive residual capacity.
    fn reachable_from(&self, src: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for a in self.arcs(u) {
                let w = self.head[a];
                if self.cap[a] > 0 && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Breadth-first distance to `target` along residual arcs; `unreached`
    /// for nodes that cannot reach it.
    fn distances_to(&self, target: usize, unreached: usize) -> Vec<usize> {
        let mut dist = vec![unreached; self.nodes()];
        dist[target] = 0;
        let mut queue = VecDeque::from([target]);
        while let Some(u) = queue.pop_front() {
            for a in self.arcs(u) {
                let w = self.head[a];
                // arc w → u is the reverse of a
                if dist[w] == unreached && self.cap[self.rev[a]] > 0 {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Highest-label push-relabel state.
struct PushRelabel<'a> {
    net: &'a mut Network,
    source: usize,
    sink: usize,
    height: Vec<usize>,
    excess: Vec<Fixed>,
    current: Vec<usize>,
    count: Vec<usize>,
    buckets: Vec<Vec<usize>>,
    highest: usize,
    relabels_since_global: usize,
}

impl<'a> PushRelabel<'a> {
    fn new(net: &'a mut Network, source: usize, sink: usize) -> Self {
        let nn = net.nodes();
        let current = net.first[..nn].to_vec();
        Self {
            net,
            source,
            sink,
            height: vec![0; nn],
            excess: vec![0; nn],
            current,
            count: vec![0; nn + 1],
            buckets: vec![Vec::new(); nn + 1],
            highest: 0,
            relabels_since_global: 0,
        }
    }

    fn is_active(&self, v: usize) -> bool {
        v != self.source && v != self.sink && self.excess[v] > 0 && self.height[v] < self.net.nodes()
    }

    fn global_relabel(&mut self) {
        let nn = self.net.nodes();
        self.height = self.net.distances_to(self.sink, nn);
        self.height[self.source] = nn;
        self.count.iter_mut().for_each(|c| *c = 0);
        self.buckets.iter_mut().for_each(Vec::clear);
        self.highest = 0;
        for v in 0..nn {
            self.current[v] = self.net.first[v];
            let h = self.height[v];
            if h < nn {
                self.count[h] += 1;
            }
            if self.is_active(v) {
                self.buckets[h].push(v);
                self.highest = self.highest.max(h);
            }
        }
        self.relabels_since_global = 0;
    }

    fn activate(&mut self, w: usize) {
        let h = self.height[w];
        self.buckets[h].push(w);
        self.highest = self.highest.max(h);
    }

    /// All nodes strictly above an emptied level can no longer reach the sink.
    fn gap(&mut self, level: usize) {
        let nn = self.net.nodes();
        for u in 0..nn {
            let h = self.height[u];
            if h > level && h < nn {
                self.count[h] -= 1;
                self.height[u] = nn;
            }
        }
    }

    fn relabel(&mut self, v: usize) {
        let nn = self.net.nodes();
        let old = self.height[v];
        self.count[old] -= 1;
        if self.count[old] == 0 {
            self.gap(old);
            self.height[v] = nn;
            return;
        }
        let mut best = nn;
        for a in self.net.arcs(v) {
            if self.net.cap[a] > 0 {
                best = best.min(self.height[self.net.head[a]] + 1);
            }
        }
        self.height[v] = best.min(nn);
        self.current[v] = self.net.first[v];
        if self.height[v] < nn {
            self.count[self.height[v]] += 1;
        }
        self.relabels_since_global += 1;
    }

    fn discharge(&mut self, v: usize) {
        let nn = self.net.nodes();
        while self.excess[v] > 0 {
            if self.current[v] == self.net.first[v + 1] {
                self.relabel(v);
                if self.height[v] >= nn {
                    return;
                }
                continue;
            }
            let a = self.current[v];
            let w = self.net.head[a];
            if self.net.cap[a] > 0 && self.height[v] == self.height[w] + 1 {
                let delta = self.excess[v].min(self.net.cap[a]);
                let was_idle = self.excess[w] == 0;
                self.net.push(a, delta);
                self.excess[v] -= delta;
                self.excess[w] += delta;
                if was_idle && w != self.sink && w != self.source {
                    self.activate(w);
                }
                if self.net.cap[a] == 0 {
                    self.current[v] += 1;
                }
            } else {
                self.current[v] += 1;
            }
        }
    }

    /// First phase: a maximum preflow. Returns the flow value into the sink.
    fn run(&mut self) -> Fixed {
        let nn = self.net.nodes();
        for a in self.net.arcs(self.source) {
            let c = self.net.cap[a];
            if c > 0 {
                let w = self.net.head[a];
                self.net.push(a, c);
                self.excess[w] += c;
                self.excess[self.source] -= c;
            }
        }
        self.global_relabel();
        loop {
            while self.highest > 0 && self.buckets[self.highest].is_empty() {
                self.highest -= 1;
            }
            let Some(v) = self.buckets[self.highest].pop() else {
                break;
            };
            // stale entries: relabeled, lifted by a gap, or already drained
            if self.height[v] != self.highest || !self.is_active(v) {
                continue;
            }
            self.discharge(v);
            if self.relabels_since_global > nn {
                self.global_relabel();
            }
        }
        self.excess[self.sink]
    }

    /// Second phase: returns the excess stranded behind the cut to the source,
    /// turning the preflow into a flow.
    fn return_excess(&mut self) {
        let nn = self.net.nodes();
        let limit = 2 * nn + 2;
        let mut label = self.net.distances_to(self.source, limit);
        let mut queue: VecDeque<usize> = (0..nn)
            .filter(|&v| v != self.source && v != self.sink && self.excess[v] > 0)
            .collect();
        let mut current = self.net.first[..nn].to_vec();
        while let Some(v) = queue.pop_front() {
            while self.excess[v] > 0 {
                if current[v] == self.net.first[v + 1] {
                    let mut best = limit;
                    for a in self.net.arcs(v) {
                        if self.net.cap[a] > 0 {
                            best = best.min(label[self.net.head[a]] + 1);
                        }
                    }
                    assert!(best < limit, "stranded excess cannot reach the source");
                    label[v] = best;
                    current[v] = self.net.first[v];
                    continue;
                }
                let a = current[v];
                let w = self.net.head[a];
                if self.net.cap[a] > 0 && label[v] == label[w] + 1 {
                    let delta = self.excess[v].min(self.net.cap[a]);
                    let was_idle = self.excess[w] == 0;
                    self.net.push(a, delta);
                    self.excess[v] -= delta;
                    self.excess[w] += delta;
                    if was_idle && w != self.source && w != self.sink {
                        queue.push_back(w);
                    }
                } else {
                    current[v] += 1;
                }
            }
        }
    }
}

fn augmenting_paths(net: &mut Network, source: usize, sink: usize) -> Fixed {
    let nn = net.nodes();
    let mut total = 0;
    let mut parent_arc = vec![usize::MAX; nn];
    loop {
        parent_arc.iter_mut().for_each(|p| *p = usize::MAX);
        let mut queue = VecDeque::from([source]);
        let mut found = false;
        'bfs: while let Some(u) = queue.pop_front() {
            for a in net.arcs(u) {
                let w = net.head[a];
                if net.cap[a] > 0 && w != source && parent_arc[w] == usize::MAX {
                    parent_arc[w] = a;
                    if w == sink {
                        found = true;
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return total;
        }
        let mut bottleneck = Fixed::MAX;
        let mut w = sink;
        while w != source {
            let a = parent_arc[w];
            bottleneck = bottleneck.min(net.cap[a]);
            w = net.head[net.rev[a]];
        }
        let mut w = sink;
        while w != source {
            let a = parent_arc[w];
            net.push(a, bottleneck);
            w = net.head[net.rev[a]];
        }
        total += bottleneck;
    }
}

fn check_terminals(lat: &Lattice, f1: &[usize], f2: &[usize]) -> Result<()> {
    if f1.is_empty() || f2.is_empty() {
        return Err(Error::Flow("both terminal sets must be nonempty".into()));
    }
    let nv = lat.num_vertices();
    let mut mark = vec![0u8; nv];
    for &v in f1 {
        if v >= nv {
            return Err(Error::Flow(format!("terminal vertex {v} out of range")));
        }
        mark[v] = 1;
    }
    for &v in f2 {
        if v >= nv {
            return Err(Error::Flow(format!("terminal vertex {v} out of range")));
        }
        if mark[v] == 1 {
            return Err(Error::Flow("terminal sets intersect".into()));
        }
    }
    Ok(())
}

/// Maximal flow `φ(F1 → F2)` with the default solver.
pub fn max_flow(
    lat: &Lattice,
    caps: &CapacityAssignment,
    f1: &[usize],
    f2: &[usize],
) -> Result<FlowResult> {
    max_flow_with(lat, caps, f1, f2, Solver::default())
}

/// Maximal flow, a certifying stream and the minimal cut closest to `F1`.
pub fn max_flow_with(
    lat: &Lattice,
    caps: &CapacityAssignment,
    f1: &[usize],
    f2: &[usize],
    solver: Solver,
) -> Result<FlowResult> {
    check_terminals(lat, f1, f2)?;
    if caps.len() != lat.num_edges() {
        return Err(Error::Flow(format!(
            "{} capacities for {} edges",
            caps.len(),
            lat.num_edges()
        )));
    }
    if caps.values.iter().any(|&c| c < 0) {
        return Err(Error::Flow("negative capacity".into()));
    }
    let overflow = || Error::Flow("capacity total overflows the fixed-point range".into());
    let big = caps.total().and_then(|t| t.checked_add(1)).ok_or_else(overflow)?;
    (big)
        .checked_mul(f1.len().max(f2.len()) as Fixed)
        .ok_or_else(overflow)?;

    let nv = lat.num_vertices();
    let (source, sink) = (nv, nv + 1);
    let mut arcs: Vec<(usize, usize, Fixed, Fixed)> =
        Vec::with_capacity(lat.num_edges() + f1.len() + f2.len());
    for (e, &t) in lat.edges().iter().zip(&caps.values) {
        arcs.push((e.u, e.v, t, t));
    }
    for &v in f1 {
        arcs.push((source, v, big, 0));
    }
    for &v in f2 {
        arcs.push((v, sink, big, 0));
    }
    let (mut net, forward) = Network::build(nv + 2, &arcs);

    let value = match solver {
        Solver::PushRelabel => {
            let mut pr = PushRelabel::new(&mut net, source, sink);
            let v = pr.run();
            pr.return_excess();
            v
        }
        Solver::Augmenting => augmenting_paths(&mut net, source, sink),
    };

    let m = lat.num_edges();
    let mut stream = Stream::zero(m);
    for (e, &t) in caps.values.iter().enumerate() {
        let f = t - net.cap[forward[e]];
        stream.amount[e] = f.abs();
        if f < 0 {
            stream.orientation[e] = Orientation::Backward;
        }
    }

    let reach = net.reachable_from(source);
    let source_side: Vec<usize> = (0..nv).filter(|&v| reach[v]).collect();
    let edges: Vec<usize> = lat
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| reach[e.u] != reach[e.v])
        .map(|(i, _)| i)
        .collect();
    let cut_cap = cut_capacity(&edges, caps)?;
    if cut_cap != value {
        return Err(Error::Flow(format!(
            "internal: flow {value} differs from cut capacity {cut_cap}"
        )));
    }
    Ok(FlowResult {
        value,
        stream,
        cut: Cut {
            edges,
            source_side,
        },
        cut_capacity: cut_cap,
    })
}

/// `V(E) = Σ_{e ∈ E} t(e)`; repeated indices count once.
pub fn cut_capacity(edges: &[usize], caps: &CapacityAssignment) -> Result<Fixed> {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.iter().try_fold(0 as Fixed, |acc, &e| {
        let t = caps
            .get(e)
            .ok_or_else(|| Error::Flow(format!("unknown edge {e}")))?;
        acc.checked_add(t)
            .ok_or_else(|| Error::Flow("cut capacity overflows".into()))
    })
}

/// A failed stream constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Stream and lattice disagree on the number of edges.
    EdgeCount { stream: usize, lattice: usize },
    NegativeAmount { edge: usize, amount: Fixed },
    OverCapacity { edge: usize, amount: Fixed, capacity: Fixed },
    /// Inflow differs from outflow at a vertex outside `F1 ∪ F2`.
    Imbalance { vertex: usize, net_inflow: Fixed },
    /// Net export of `F1` differs from net import of `F2`.
    TerminalMismatch { out_of_source: Fixed, into_sink: Fixed },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StreamCheck {
    pub valid: bool,
    /// Net amount of fluid entering `F2` through lattice edges.
    pub flow: Fixed,
    pub violations: Vec<Violation>,
}

/// Verifies `0 ≤ g ≤ t` on every edge and conservation off `F1 ∪ F2`, and
/// measures the flow delivered to `F2`.
pub fn check_stream(
    lat: &Lattice,
    caps: &CapacityAssignment,
    f1: &[usize],
    f2: &[usize],
    stream: &Stream,
) -> StreamCheck {
    let m = lat.num_edges();
    let mut violations = Vec::new();
    if stream.amount.len() != m || stream.orientation.len() != m || caps.len() != m {
        violations.push(Violation::EdgeCount {
            stream: stream.amount.len(),
            lattice: m,
        });
        return StreamCheck {
            valid: false,
            flow: 0,
            violations,
        };
    }
    let nv = lat.num_vertices();
    let mut net_in = vec![0 as Fixed; nv];
    for (i, e) in lat.edges().iter().enumerate() {
        let g = stream.amount[i];
        let t = caps.values[i];
        if g < 0 {
            violations.push(Violation::NegativeAmount { edge: i, amount: g });
        } else if g > t {
            violations.push(Violation::OverCapacity {
                edge: i,
                amount: g,
                capacity: t,
            });
        }
        let f = stream.signed(i);
        net_in[e.v] += f;
        net_in[e.u] -= f;
    }
    let mut terminal = vec![false; nv];
    for &v in f1.iter().chain(f2) {
        terminal[v] = true;
    }
    for (v, &net) in net_in.iter().enumerate() {
        if !terminal[v] && net != 0 {
            violations.push(Violation::Imbalance {
                vertex: v,
                net_inflow: net,
            });
        }
    }
    let into_sink: Fixed = f2.iter().map(|&v| net_in[v]).sum();
    let out_of_source: Fixed = -f1.iter().map(|&v| net_in[v]).sum::<Fixed>();
    if into_sink != out_of_source {
        violations.push(Violation::TerminalMismatch {
            out_of_source,
            into_sink,
        });
    }
    StreamCheck {
        valid: violations.is_empty(),
        flow: into_sink,
        violations,
    }
}

/// Whether removing `cut_edges` leaves no path from `F1` to `F2`.
pub fn min_cut_is_cutset(lat: &Lattice, cut_edges: &[usize], f1: &[usize], f2: &[usize]) -> bool {
    let nv = lat.num_vertices();
    let mut removed = vec![false; lat.num_edges()];
    for &e in cut_edges {
        if let Some(r) = removed.get_mut(e) {
            *r = true;
        }
    }
    let mut target = vec![false; nv];
    for &v in f2 {
        target[v] = true;
    }
    let adj = lat.adjacency();
    let mut seen = vec![false; nv];
    let mut queue = VecDeque::new();
    for &v in f1 {
        if target[v] {
            return false;
        }
        if !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &(w, e) in &adj[u] {
            if removed[e] || seen[w] {
                continue;
            }
            if target[w] {
                return false;
            }
            seen[w] = true;
            queue.push_back(w);
        }
    }
    true
}
