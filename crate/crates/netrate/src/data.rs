//! Networks, cascades and cascade sets, plus their text file formats.
//!
//! A [`Network`] is a directed graph whose edge weights are transmission
//! rates; a rate of zero means no edge, so only strictly positive rates
//! are stored. A [`Cascade`] records one diffusion episode as per-node
//! infection times inside an observation window `[0, T]`, with
//! `f64::INFINITY` marking nodes not infected before the horizon. A
//! [`CascadeSet`] bundles cascades over a shared node universe and keeps
//! the precedence index: the ordered pairs `(j, i)` witnessed by some
//! cascade with `t_j < t_i <= T`. Only those pairs can carry nonzero
//! inferred rates.
//!
//! # File formats
//!
//! Cascade file (UTF-8 text):
//!
//! ```text
//! #nodes 3
//! #horizon 10
//! 0:0,1:0.72
//! ```
//!
//! one cascade per line as comma-separated `node:time` pairs in
//! nondecreasing time order, uninfected nodes omitted (an explicit
//! `node:-` is accepted on input and means uninfected). Network file:
//!
//! ```text
//! #nodes 128
//! 0 5 0.25
//! ```
//!
//! one `src dst rate` row per edge. Both formats are versionless; lines
//! starting with `# ` (hash and space) are comments. All numbers use `.`
//! as the decimal point regardless of locale.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("self-loop on node {node}: transmission rates are defined for ordered pairs of distinct nodes")]
    SelfLoop { node: usize },
    #[error("edge {src} -> {dst} has rate {rate}; stored rates must be positive and finite")]
    NonPositiveRate { src: usize, dst: usize, rate: f64 },
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: usize, dst: usize },
    #[error("node {node} out of range for a universe of {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("cascade has no infected node")]
    EmptyCascade,
    #[error("node {node} infected at {time}, outside the window [0, {horizon}]")]
    TimeOutOfWindow {
        node: usize,
        time: f64,
        horizon: f64,
    },
    #[error("node {node} appears more than once in a cascade")]
    DuplicateNode { node: usize },
    #[error("cascade spans {got} nodes but the set spans {expected}")]
    NodeCountMismatch { expected: usize, got: usize },
    #[error("cascade horizon {got} differs from the shared horizon {expected}")]
    HorizonMismatch { expected: f64, got: f64 },
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// Directed network with strictly positive transmission rates on its edges.
/// Immutable after construction; adjacency is kept sorted by node id in
/// both directions so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    out: Vec<Vec<(usize, f64)>>,
    inc: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
}

impl Network {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            out: vec![Vec::new(); n],
            inc: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, DataError> {
        let mut net = Self::new(n);
        for (src, dst, rate) in edges {
            net.add_edge(src, dst, rate)?;
        }
        Ok(net)
    }

    pub fn add_edge(&mut self, src: usize, dst: usize, rate: f64) -> Result<(), DataError> {
        if src >= self.n {
            return Err(DataError::NodeOutOfRange {
                node: src,
                n: self.n,
            });
        }
        if dst >= self.n {
            return Err(DataError::NodeOutOfRange {
                node: dst,
                n: self.n,
            });
        }
        if src == dst {
            return Err(DataError::SelfLoop { node: src });
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(DataError::NonPositiveRate { src, dst, rate });
        }
        match self.out[src].binary_search_by_key(&dst, |&(v, _)| v) {
            Ok(_) => return Err(DataError::DuplicateEdge { src, dst }),
            Err(pos) => self.out[src].insert(pos, (dst, rate)),
        }
        match self.inc[dst].binary_search_by_key(&src, |&(u, _)| u) {
            Ok(_) => unreachable!("incoming list out of sync with outgoing"),
            Err(pos) => self.inc[dst].insert(pos, (src, rate)),
        }
        self.edge_count += 1;
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Transmission rate of `src -> dst`; 0 when the edge is absent.
    pub fn rate(&self, src: usize, dst: usize) -> f64 {
        self.out
            .get(src)
            .and_then(|adj| {
                adj.binary_search_by_key(&dst, |&(v, _)| v)
                    .ok()
                    .map(|i| adj[i].1)
            })
            .unwrap_or(0.0)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.rate(src, dst) > 0.0
    }

    /// Out-neighbors of `src` as `(dst, rate)`, sorted by `dst`.
    pub fn outgoing(&self, src: usize) -> &[(usize, f64)] {
        &self.out[src]
    }

    /// In-neighbors of `dst` as `(src, rate)`, sorted by `src`.
    pub fn incoming(&self, dst: usize) -> &[(usize, f64)] {
        &self.inc[dst]
    }

    /// All edges as `(src, dst, rate)` in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(src, adj)| adj.iter().map(move |&(dst, rate)| (src, dst, rate)))
    }

    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges().map(|(s, d, _)| (s, d)).collect()
    }
}

// ---------------------------------------------------------------------------
// Cascade
// ---------------------------------------------------------------------------

/// One diffusion episode: per-node infection times in `[0, T]`, with
/// `f64::INFINITY` for nodes not infected inside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    times: Vec<f64>,
    horizon: f64,
}

impl Cascade {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self, DataError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(DataError::InvalidHorizon(horizon));
        }
        let mut any_finite = false;
        for (node, &t) in times.iter().enumerate() {
            if t.is_finite() {
                if !(0.0..=horizon).contains(&t) {
                    return Err(DataError::TimeOutOfWindow {
                        node,
                        time: t,
                        horizon,
                    });
                }
                any_finite = true;
            } else if t != f64::INFINITY {
                return Err(DataError::TimeOutOfWindow {
                    node,
                    time: t,
                    horizon,
                });
            }
        }
        if !any_finite {
            return Err(DataError::EmptyCascade);
        }
        Ok(Self { times, horizon })
    }

    /// Build from `(node, time)` events over `n` nodes; unlisted nodes are
    /// uninfected. Listing the same node twice is an error (only first
    /// infections are recorded).
    pub fn from_events(n: usize, horizon: f64, events: &[(usize, f64)]) -> Result<Self, DataError> {
        let mut times = vec![f64::INFINITY; n];
        for &(node, t) in events {
            if node >= n {
                return Err(DataError::NodeOutOfRange { node, n });
            }
            if times[node].is_finite() {
                return Err(DataError::DuplicateNode { node });
            }
            times[node] = t;
        }
        Self::new(times, horizon)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn node_count(&self) -> usize {
        self.times.len()
    }

    pub fn time(&self, node: usize) -> f64 {
        self.times[node]
    }

    pub fn is_infected(&self, node: usize) -> bool {
        self.times[node].is_finite()
    }

    /// Infected nodes as `(node, time)` in ascending node order.
    pub fn infected(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.times
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_finite())
            .map(|(i, &t)| (i, t))
    }

    pub fn infected_count(&self) -> usize {
        self.times.iter().filter(|t| t.is_finite()).count()
    }

    /// Earliest infection time in the cascade.
    pub fn root_time(&self) -> f64 {
        self.times.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Nodes whose infection strictly precedes `t_node`, as `(node, time)`
    /// sorted by node id. For an uninfected target this is every infected
    /// node, since any finite time precedes infinity.
    pub fn parents(&self, node: usize) -> Result<Vec<(usize, f64)>, DataError> {
        if node >= self.times.len() {
            return Err(DataError::NodeOutOfRange {
                node,
                n: self.times.len(),
            });
        }
        let t_node = self.times[node];
        Ok(self
            .times
            .iter()
            .enumerate()
            .filter(|&(j, &t_j)| j != node && t_j < t_node)
            .map(|(j, &t_j)| (j, t_j))
            .collect())
    }
}

// ---------------------------------------------------------------------------
// CascadeSet
// ---------------------------------------------------------------------------

/// Cascades over a shared node universe and horizon, plus the precedence
/// index. Immutable contents may be shared freely across workers.
#[derive(Debug, Clone)]
pub struct CascadeSet {
    n: usize,
    horizon: f64,
    cascades: Vec<Cascade>,
    precedence: BTreeSet<(usize, usize)>,
}

impl CascadeSet {
    pub fn new(n: usize, horizon: f64, cascades: Vec<Cascade>) -> Result<Self, DataError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(DataError::InvalidHorizon(horizon));
        }
        let mut set = Self {
            n,
            horizon,
            cascades: Vec::new(),
            precedence: BTreeSet::new(),
        };
        for c in cascades {
            set.push(c)?;
        }
        Ok(set)
    }

    /// Append a cascade, updating the precedence index incrementally.
    pub fn push(&mut self, cascade: Cascade) -> Result<(), DataError> {
        if cascade.node_count() != self.n {
            return Err(DataError::NodeCountMismatch {
                expected: self.n,
                got: cascade.node_count(),
            });
        }
        if cascade.horizon() != self.horizon {
            return Err(DataError::HorizonMismatch {
                expected: self.horizon,
                got: cascade.horizon(),
            });
        }
        index_cascade(&cascade, &mut self.precedence);
        self.cascades.push(cascade);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cascades(&self) -> &[Cascade] {
        &self.cascades
    }

    pub fn cascade_count(&self) -> usize {
        self.cascades.len()
    }

    /// Ordered pairs `(j, i)` with `t_j < t_i <= T` in some cascade.
    pub fn precedence_index(&self) -> &BTreeSet<(usize, usize)> {
        &self.precedence
    }

    pub fn precedes(&self, j: usize, i: usize) -> bool {
        self.precedence.contains(&(j, i))
    }

    /// Candidate parents of `target`: nodes `j` with `(j, target)` in the
    /// precedence index, ascending.
    pub fn candidate_parents(&self, target: usize) -> Vec<usize> {
        self.precedence
            .iter()
            .filter(|&&(_, i)| i == target)
            .map(|&(j, _)| j)
            .collect()
    }
}

fn index_cascade(cascade: &Cascade, index: &mut BTreeSet<(usize, usize)>) {
    let infected: Vec<(usize, f64)> = cascade.infected().collect();
    for &(j, t_j) in &infected {
        for &(i, t_i) in &infected {
            if t_j < t_i {
                index.insert((j, i));
            }
        }
    }
}

/// Precedence index of a slice of cascades: `(j, i)` is present iff some
/// cascade witnesses `t_j < t_i <= T`. Pairs absent from the index have a
/// provably optimal rate of zero.
pub fn build_precedence_index(cascades: &[Cascade]) -> BTreeSet<(usize, usize)> {
    let mut index = BTreeSet::new();
    for c in cascades {
        index_cascade(c, &mut index);
    }
    index
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

fn is_comment(line: &str) -> bool {
    line.starts_with("# ")
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> DataError {
    DataError::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

struct HeaderScanner<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    path: &'a str,
}

impl<'a> HeaderScanner<'a> {
    fn new(text: &'a str, path: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            path,
        }
    }

    /// Next non-comment, non-blank line as (1-based line number, content).
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, line) in self.lines.by_ref() {
            let trimmed = line.trim_end();
            if trimmed.is_empty() || is_comment(trimmed) {
                continue;
            }
            return Some((idx + 1, trimmed));
        }
        None
    }

    fn expect_header(&mut self, key: &str) -> Result<(usize, &'a str), DataError> {
        let (line_no, line) = self
            .next_content()
            .ok_or_else(|| parse_err(self.path, 0, format!("missing `{key}` header")))?;
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| parse_err(self.path, line_no, format!("expected `{key} <value>`")))?;
        Ok((line_no, value.trim()))
    }
}

/// Serialize a cascade set in the cascade file format. Events are written
/// in nondecreasing time order, ties broken by node id.
pub fn cascades_to_string(cs: &CascadeSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "#nodes {}", cs.node_count());
    let _ = writeln!(s, "#horizon {}", cs.horizon());
    for c in cs.cascades() {
        let mut events: Vec<(usize, f64)> = c.infected().collect();
        events.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let line = events
            .iter()
            .map(|(node, t)| format!("{node}:{t}"))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(s, "{line}");
    }
    s
}

pub fn write_cascades(cs: &CascadeSet, path: impl AsRef<Path>) -> Result<(), DataError> {
    fs::write(path, cascades_to_string(cs))?;
    Ok(())
}

pub fn parse_cascades(text: &str, source: &str) -> Result<CascadeSet, DataError> {
    let mut scanner = HeaderScanner::new(text, source);
    let (line_no, nodes) = scanner.expect_header("#nodes")?;
    let n: usize = nodes
        .parse()
        .map_err(|_| parse_err(source, line_no, format!("invalid node count `{nodes}`")))?;
    let (line_no, horizon) = scanner.expect_header("#horizon")?;
    let horizon: f64 = horizon
        .parse()
        .map_err(|_| parse_err(source, line_no, format!("invalid horizon `{horizon}`")))?;

    let mut cascades = Vec::new();
    while let Some((line_no, line)) = scanner.next_content() {
        let mut events = Vec::new();
        let mut seen = BTreeSet::new();
        for field in line.split(',') {
            let (node, time) = field.split_once(':').ok_or_else(|| {
                parse_err(
                    source,
                    line_no,
                    format!("expected `node:time`, got `{field}`"),
                )
            })?;
            let node: usize = node
                .trim()
                .parse()
                .map_err(|_| parse_err(source, line_no, format!("invalid node id `{node}`")))?;
            if !seen.insert(node) {
                return Err(parse_err(
                    source,
                    line_no,
                    format!("node {node} appears more than once"),
                ));
            }
            let time = time.trim();
            if time == "-" {
                continue; // explicit uninfected sentinel
            }
            let time: f64 = time
                .parse()
                .map_err(|_| parse_err(source, line_no, format!("invalid time `{time}`")))?;
            events.push((node, time));
        }
        let cascade = Cascade::from_events(n, horizon, &events)
            .map_err(|e| parse_err(source, line_no, e.to_string()))?;
        cascades.push(cascade);
    }
    CascadeSet::new(n, horizon, cascades)
}

pub fn read_cascades(path: impl AsRef<Path>) -> Result<CascadeSet, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_cascades(&text, &path.display().to_string())
}

/// Serialize a network in the edge-list format, ascending `(src, dst)`.
pub fn network_to_string(net: &Network) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "#nodes {}", net.node_count());
    for (src, dst, rate) in net.edges() {
        let _ = writeln!(s, "{src} {dst} {rate}");
    }
    s
}

pub fn write_network(net: &Network, path: impl AsRef<Path>) -> Result<(), DataError> {
    fs::write(path, network_to_string(net))?;
    Ok(())
}

pub fn parse_network(text: &str, source: &str) -> Result<Network, DataError> {
    let mut scanner = HeaderScanner::new(text, source);
    let (line_no, nodes) = scanner.expect_header("#nodes")?;
    let n: usize = nodes
        .parse()
        .map_err(|_| parse_err(source, line_no, format!("invalid node count `{nodes}`")))?;

    let mut net = Network::new(n);
    while let Some((line_no, line)) = scanner.next_content() {
        let mut fields = line.split_whitespace();
        let (src, dst, rate) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(d), Some(r), None) => (s, d, r),
            _ => {
                return Err(parse_err(
                    source,
                    line_no,
                    format!("expected `src dst rate`, got `{line}`"),
                ))
            }
        };
        let src: usize = src
            .parse()
            .map_err(|_| parse_err(source, line_no, format!("invalid node id `{src}`")))?;
        let dst: usize = dst
            .parse()
            .map_err(|_| parse_err(source, line_no, format!("invalid node id `{dst}`")))?;
        let rate: f64 = rate
            .parse()
            .map_err(|_| parse_err(source, line_no, format!("invalid rate `{rate}`")))?;
        net.add_edge(src, dst, rate)
            .map_err(|e| parse_err(source, line_no, e.to_string()))?;
    }
    Ok(net)
}

pub fn read_network(path: impl AsRef<Path>) -> Result<Network, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_network(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    fn cascade(times: &[f64], horizon: f64) -> Cascade {
        Cascade::new(times.to_vec(), horizon).unwrap()
    }

    #[test]
    fn parents_of_infected_and_root() {
        let c = cascade(&[0.0, 1.0, INF], 10.0);
        assert_eq!(c.parents(1).unwrap(), vec![(0, 0.0)]);
        assert_eq!(c.parents(0).unwrap(), vec![]);
    }

    #[test]
    fn parents_excludes_ties() {
        let c = cascade(&[0.0, 2.0, 2.0], 10.0);
        assert_eq!(c.parents(2).unwrap(), vec![(0, 0.0)]);
    }

    #[test]
    fn parents_of_uninfected_node_is_every_infected_node() {
        let c = cascade(&[0.0, 1.0, INF], 10.0);
        assert_eq!(c.parents(2).unwrap(), vec![(0, 0.0), (1, 1.0)]);
        assert!(c.parents(3).is_err());
    }

    #[test]
    fn precedence_index_single_cascade() {
        let index = build_precedence_index(&[cascade(&[0.0, 1.0, INF], 10.0)]);
        assert_eq!(index.into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn precedence_index_ignores_uninfected_targets() {
        let index = build_precedence_index(&[cascade(&[0.0, INF, INF], 10.0)]);
        assert!(index.is_empty());
    }

    #[test]
    fn precedence_index_unions_over_cascades() {
        let index = build_precedence_index(&[
            cascade(&[0.0, 1.0, INF], 10.0),
            cascade(&[INF, 0.0, 1.0], 10.0),
        ]);
        assert_eq!(index.into_iter().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn candidate_parents_come_from_the_index() {
        let cs = CascadeSet::new(
            3,
            10.0,
            vec![
                cascade(&[0.0, 1.0, INF], 10.0),
                cascade(&[INF, 0.0, 1.0], 10.0),
            ],
        )
        .unwrap();
        assert_eq!(cs.candidate_parents(1), vec![0]);
        assert_eq!(cs.candidate_parents(2), vec![1]);
        assert_eq!(cs.candidate_parents(0), Vec::<usize>::new());
    }

    #[test]
    fn cascade_validation() {
        assert!(matches!(
            Cascade::new(vec![INF, INF], 10.0),
            Err(DataError::EmptyCascade)
        ));
        assert!(matches!(
            Cascade::new(vec![0.0, 12.0], 10.0),
            Err(DataError::TimeOutOfWindow { node: 1, .. })
        ));
        assert!(matches!(
            Cascade::new(vec![0.0, -0.5], 10.0),
            Err(DataError::TimeOutOfWindow { .. })
        ));
        assert!(matches!(
            Cascade::new(vec![0.0], 0.0),
            Err(DataError::InvalidHorizon(_))
        ));
    }

    #[test]
    fn cascade_set_rejects_mismatched_members() {
        let mut cs = CascadeSet::new(3, 10.0, vec![]).unwrap();
        assert!(matches!(
            cs.push(cascade(&[0.0, 1.0], 10.0)),
            Err(DataError::NodeCountMismatch { .. })
        ));
        assert!(matches!(
            cs.push(cascade(&[0.0, 1.0, INF], 5.0)),
            Err(DataError::HorizonMismatch { .. })
        ));
    }

    #[test]
    fn network_validation() {
        let mut net = Network::new(4);
        net.add_edge(3, 1, 0.25).unwrap();
        assert!(matches!(
            net.add_edge(3, 3, 0.5),
            Err(DataError::SelfLoop { node: 3 })
        ));
        assert!(matches!(
            net.add_edge(0, 1, 0.0),
            Err(DataError::NonPositiveRate { .. })
        ));
        assert!(matches!(
            net.add_edge(3, 1, 0.1),
            Err(DataError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            net.add_edge(4, 1, 0.1),
            Err(DataError::NodeOutOfRange { .. })
        ));
        assert_eq!(net.rate(3, 1), 0.25);
        assert_eq!(net.rate(1, 3), 0.0);
        assert_eq!(net.edge_count(), 1);
    }

    #[test]
    fn cascade_file_round_trip() {
        let cs = CascadeSet::new(
            4,
            10.0,
            vec![
                cascade(&[0.0, 0.72, INF, INF], 10.0),
                cascade(&[INF, 0.0, 3.5, 9.999999999], 10.0),
                cascade(&[2.0, INF, 0.0, INF], 10.0),
            ],
        )
        .unwrap();
        let text = cascades_to_string(&cs);
        let back = parse_cascades(&text, "mem").unwrap();
        assert_eq!(back.node_count(), cs.node_count());
        assert_eq!(back.horizon(), cs.horizon());
        assert_eq!(back.cascades(), cs.cascades());
        assert_eq!(back.precedence_index(), cs.precedence_index());
        // serialization is canonical, so a second trip is byte-identical
        assert_eq!(cascades_to_string(&back), text);
    }

    #[test]
    fn cascade_parse_basics() {
        let text = "#nodes 3\n#horizon 10\n0:0,1:0.72\n";
        let cs = parse_cascades(text, "mem").unwrap();
        assert_eq!(cs.cascades()[0].times(), &[0.0, 0.72, INF]);

        let dup = "#nodes 3\n#horizon 10\n1:0.5,1:0.9\n";
        let err = parse_cascades(dup, "mem").unwrap_err();
        assert!(err.to_string().contains("mem:3"), "{err}");
        assert!(err.to_string().contains("more than once"), "{err}");

        let explicit_inf = "#nodes 3\n#horizon 10\n0:0,1:0.5,2:-\n";
        let cs = parse_cascades(explicit_inf, "mem").unwrap();
        assert_eq!(cs.cascades()[0].times(), &[0.0, 0.5, INF]);
    }

    #[test]
    fn cascade_parse_rejects_bad_input() {
        for (text, needle) in [
            ("#horizon 10\n0:0\n", "#nodes"),
            ("#nodes 3\n0:0\n", "#horizon"),
            ("#nodes 3\n#horizon 10\n0=0\n", "node:time"),
            ("#nodes 3\n#horizon 10\n0:0,1:11\n", "outside the window"),
            ("#nodes 3\n#horizon 10\n0:0,7:1\n", "out of range"),
            ("#nodes 3\n#horizon 10\n0:zero\n", "invalid time"),
        ] {
            let err = parse_cascades(text, "mem").unwrap_err();
            assert!(
                err.to_string().contains(needle),
                "`{err}` missing `{needle}`"
            );
        }
    }

    #[test]
    fn network_file_round_trip() {
        let net = Network::from_edges(8, [(3, 7, 0.25), (0, 1, 1.0), (7, 3, 0.013)]).unwrap();
        let text = network_to_string(&net);
        let back = parse_network(&text, "mem").unwrap();
        assert_eq!(back, net);
        assert_eq!(network_to_string(&back), text);
    }

    #[test]
    fn network_parse_rejects_bad_rows() {
        for (text, needle) in [
            ("#nodes 8\n3 3 0.5\n", "self-loop"),
            ("#nodes 8\n3 7 0\n", "positive and finite"),
            ("#nodes 8\n3 7 -0.2\n", "positive and finite"),
            ("#nodes 8\n3 7\n", "src dst rate"),
            ("#nodes 8\n9 7 0.5\n", "out of range"),
        ] {
            let err = parse_network(text, "mem").unwrap_err();
            assert!(
                err.to_string().contains(needle),
                "`{err}` missing `{needle}`"
            );
        }
    }

    #[test]
    fn comment_lines_are_skipped() {
        let text = "# generated-at 1700000000\n#nodes 2\n#horizon 10\n0:0,1:1\n";
        assert!(parse_cascades(text, "mem").is_ok());
        let text = "# generated-at 1700000000\n#nodes 2\n0 1 0.5\n";
        assert!(parse_network(text, "mem").is_ok());
    }

    proptest! {
        /// Incremental indexing matches a full rebuild regardless of order.
        #[test]
        fn incremental_index_is_order_independent(
            raw in proptest::collection::vec(
                proptest::collection::vec(proptest::option::weighted(0.6, 0.0f64..10.0), 5),
                0..6,
            )
        ) {
            let cascades: Vec<Cascade> = raw
                .into_iter()
                .filter_map(|opt_times| {
                    let times: Vec<f64> =
                        opt_times.into_iter().map(|t| t.unwrap_or(INF)).collect();
                    Cascade::new(times, 10.0).ok()
                })
                .collect();
            let full = build_precedence_index(&cascades);
            let mut incremental = CascadeSet::new(5, 10.0, vec![]).unwrap();
            for c in &cascades {
                incremental.push(c.clone()).unwrap();
            }
            prop_assert_eq!(incremental.precedence_index(), &full);

            let mut reversed = CascadeSet::new(5, 10.0, vec![]).unwrap();
            for c in cascades.iter().rev() {
                reversed.push(c.clone()).unwrap();
            }
            prop_assert_eq!(reversed.precedence_index(), &full);
        }

        /// Writing and re-reading a cascade set is the identity.
        #[test]
        fn cascade_round_trip_is_identity(
            raw in proptest::collection::vec(
                proptest::collection::vec(proptest::option::weighted(0.5, 0.0f64..10.0), 4),
                1..5,
            )
        ) {
            let cascades: Vec<Cascade> = raw
                .into_iter()
                .filter_map(|opt_times| {
                    let times: Vec<f64> =
                        opt_times.into_iter().map(|t| t.unwrap_or(INF)).collect();
                    Cascade::new(times, 10.0).ok()
                })
                .collect();
            let cs = CascadeSet::new(4, 10.0, cascades).unwrap();
            let back = parse_cascades(&cascades_to_string(&cs), "mem").unwrap();
            prop_assert_eq!(back.cascades(), cs.cascades());
        }
    }
}
