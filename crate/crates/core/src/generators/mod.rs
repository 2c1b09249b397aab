//! Host-graph families, addressable by spec strings such as
//! `random_regular:n=200000,d=100,seed=7`.

mod anomaly;
mod pairing;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{read_graph, Graph};

pub use anomaly::{
    anomaly_construction, construction_feasibility, original_constant_instance, AnomalyParams,
    FeasibilityCheck, FeasibilityReport, OriginalConstantReport,
};
pub(crate) use pairing::regular_pairing;

/// A graph plus an optional partition of its vertices into equal consecutive
/// blocks (`class j = [j * class_size, (j + 1) * class_size)`).
#[derive(Debug, Clone)]
pub struct HostGraph {
    pub graph: Graph,
    pub class_size: Option<usize>,
}

impl HostGraph {
    pub fn plain(graph: Graph) -> Self {
        Self {
            graph,
            class_size: None,
        }
    }

    pub fn class_count(&self) -> Option<usize> {
        self.class_size.map(|s| self.graph.n() / s)
    }

    pub fn class_of(&self, v: usize) -> Option<usize> {
        self.class_size.map(|s| v / s)
    }
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!("complete graph needs n >= 2, got {n}")));
    }
    Ok(Graph::complete(n))
}

/// `Q^d` on bitstrings `0..2^d`.
pub fn hypercube(d: usize) -> Result<Graph> {
    if d == 0 {
        return Err(Error::invalid("hypercube dimension must be at least 1"));
    }
    if d > 30 {
        return Err(Error::Budget(format!("hypercube dimension {d} exceeds 30")));
    }
    let n = 1usize << d;
    let mut neighbors = vec![0u32; n * d];
    neighbors
        .par_chunks_mut(d)
        .enumerate()
        .for_each(|(v, list)| {
            for (i, slot) in list.iter_mut().enumerate() {
                *slot = (v ^ (1 << i)) as u32;
            }
            list.sort_unstable();
        });
    let offsets = (0..=n as u64).map(|v| v * d as u64).collect();
    Ok(Graph::from_csr_unchecked(offsets, neighbors))
}

/// Uniformly shuffled stub pairing with local rejection of self-loops and
/// parallel edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n {
        return Err(Error::invalid(format!("degree {d} must be below n = {n}")));
    }
    let slots = regular_pairing(n, d, seed, |_, _| false)?;
    let offsets = (0..=n as u64).map(|v| v * d as u64).collect();
    Ok(Graph::from_csr_unchecked(offsets, slots))
}

/// `count` disjoint copies of `K_{d+1}`.
pub fn disjoint_cliques(d: usize, count: usize) -> Result<HostGraph> {
    if count == 0 {
        return Err(Error::invalid("clique count must be at least 1"));
    }
    let k = d + 1;
    let mut edges = Vec::with_capacity(count * k * d / 2);
    for c in 0..count {
        let base = c * k;
        for i in 0..k {
            for j in i + 1..k {
                edges.push((base + i, base + j));
            }
        }
    }
    Ok(HostGraph {
        graph: Graph::from_edges(count * k, edges)?,
        class_size: Some(k),
    })
}

/// `count` copies of `K_{d+1}`, each giving up a matching of `⌈cd⌉ / 2`
/// internal edges whose freed stubs are paired across cliques at random.
/// The result stays `d`-regular with exactly `⌈cd⌉` edges leaving each clique.
pub fn linked_cliques(d: usize, count: usize, c: f64, seed: u64) -> Result<HostGraph> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::invalid(format!("link fraction must be in (0, 1], got {c}")));
    }
    if count < 2 {
        return Err(Error::Infeasible("linking needs at least two cliques".into()));
    }
    let stubs = (c * d as f64 - 1e-9).ceil() as usize;
    if stubs == 0 || stubs % 2 != 0 {
        return Err(Error::Infeasible(format!(
            "ceil(c*d) = {stubs} stubs per clique must be a positive even number"
        )));
    }
    let k = d + 1;
    let matched = |i: usize| i < stubs;
    let mut edges = Vec::new();
    for cl in 0..count {
        let base = cl * k;
        for i in 0..k {
            for j in i + 1..k {
                // drop the matching {0,1}, {2,3}, ... among the first `stubs` vertices
                if matched(j) && i % 2 == 0 && j == i + 1 {
                    continue;
                }
                edges.push((base + i, base + j));
            }
        }
    }
    let s = stubs as u32;
    let pairing = regular_pairing(count * stubs, 1, seed, move |a, b| a / s == b / s)?;
    for (i, &j) in pairing.iter().enumerate() {
        if (i as u32) < j {
            let global = |x: usize| (x / stubs) * k + x % stubs;
            edges.push((global(i), global(j as usize)));
        }
    }
    Ok(HostGraph {
        graph: Graph::from_edges(count * k, edges)?,
        class_size: Some(k),
    })
}

/// Graph families addressable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Complete,
    Hypercube,
    RandomRegular,
    DisjointCliques,
    LinkedCliques,
    Anomaly,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Complete,
        Family::Hypercube,
        Family::RandomRegular,
        Family::DisjointCliques,
        Family::LinkedCliques,
        Family::Anomaly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Complete => "complete",
            Family::Hypercube => "hypercube",
            Family::RandomRegular => "random_regular",
            Family::DisjointCliques => "disjoint_cliques",
            Family::LinkedCliques => "linked_cliques",
            Family::Anomaly => "anomaly",
        }
    }

    fn keys(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Family::Complete => (&["n"], &[]),
            Family::Hypercube => (&["d"], &[]),
            Family::RandomRegular => (&["n", "d"], &["seed"]),
            Family::DisjointCliques => (&["d", "count"], &[]),
            Family::LinkedCliques => (&["d", "count", "c"], &["seed"]),
            Family::Anomaly => (&["n", "d", "c1p", "nc"], &["seed"]),
        }
    }
}

/// Parsed `family:key=value,...` string. Parameters keep their original order
/// and spelling, so `to_string` reproduces the input exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    family: Family,
    params: Vec<(String, String)>,
}

impl GeneratorSpec {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    /// `true` if `s` starts with a known family name followed by `:`.
    pub fn looks_like_spec(s: &str) -> bool {
        s.split_once(':')
            .is_some_and(|(f, _)| Family::ALL.iter().any(|fam| fam.name() == f))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Spec {
            spec: self.to_string(),
            msg: msg.into(),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .raw(key)
            .ok_or_else(|| self.err(format!("missing `{key}`")))?;
        raw.parse()
            .map_err(|_| self.err(format!("cannot parse `{key}={raw}`")))
    }

    fn seed(&self) -> Result<u64> {
        match self.raw("seed") {
            None => Ok(0),
            Some(_) => self.get("seed"),
        }
    }

    pub fn build(&self) -> Result<HostGraph> {
        Ok(match self.family {
            Family::Complete => HostGraph::plain(complete_graph(self.get("n")?)?),
            Family::Hypercube => HostGraph::plain(hypercube(self.get("d")?)?),
            Family::RandomRegular => {
                HostGraph::plain(random_regular(self.get("n")?, self.get("d")?, self.seed()?)?)
            }
            Family::DisjointCliques => disjoint_cliques(self.get("d")?, self.get("count")?)?,
            Family::LinkedCliques => linked_cliques(
                self.get("d")?,
                self.get("count")?,
                self.get("c")?,
                self.seed()?,
            )?,
            Family::Anomaly => {
                let params = AnomalyParams {
                    n: self.get("n")?,
                    d: self.get("d")?,
                    c1_prime: self.get("c1p")?,
                    class_size: self.get("nc")?,
                };
                anomaly_construction(&params, self.seed()?)?
            }
        })
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: String| Error::Spec {
            spec: s.to_string(),
            msg,
        };
        let (fam, rest) = s
            .split_once(':')
            .ok_or_else(|| err("expected `family:key=value,...`".into()))?;
        let family = Family::ALL
            .into_iter()
            .find(|f| f.name() == fam)
            .ok_or_else(|| err(format!("unknown family `{fam}`")))?;
        let mut params: Vec<(String, String)> = Vec::new();
        if !rest.is_empty() {
            for item in rest.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected key=value, got `{item}`")))?;
                if k.is_empty() || v.is_empty() {
                    return Err(err(format!("empty key or value in `{item}`")));
                }
                if params.iter().any(|(seen, _)| seen == k) {
                    return Err(err(format!("repeated key `{k}`")));
                }
                params.push((k.to_string(), v.to_string()));
            }
        }
        let (required, optional) = family.keys();
        for (k, _) in &params {
            if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
                return Err(err(format!("unknown key `{k}` for {}", family.name())));
            }
        }
        for k in required {
            if !params.iter().any(|(seen, _)| seen == k) {
                return Err(err(format!("missing `{k}`")));
            }
        }
        Ok(GeneratorSpec { family, params })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family.name())?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Accepts either a generator spec string or a path to a graph file.
pub fn load_host(source: &str) -> Result<HostGraph> {
    if GeneratorSpec::looks_like_spec(source) {
        source.parse::<GeneratorSpec>()?.build()
    } else {
        Ok(HostGraph::plain(read_graph(source)?))
    }
}
