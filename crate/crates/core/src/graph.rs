//! Weighted retweet network, k-core extraction and label homophily.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::lexicon::Foundation;
use crate::textprep::TweetRecord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("edge ({0}, {1}) has zero weight")]
    ZeroWeight(String, String),
    #[error("user `{user}` labelled both {first} and {second}")]
    ConflictingLabel {
        user: String,
        first: String,
        second: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetNode {
    pub user_id: String,
    pub label: Option<Foundation>,
}

/// Accumulates undirected weighted edges keyed by unordered user pair.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    weights: BTreeMap<(String, String), u64>,
    labels: BTreeMap<String, Option<Foundation>>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a node label. A second, different label for the same user is
    /// an error; `None` never overrides a known label.
    pub fn set_label(&mut self, user: &str, label: Option<Foundation>) -> Result<(), GraphError> {
        match self.labels.get_mut(user) {
            Some(existing) => match (*existing, label) {
                (Some(a), Some(b)) if a != b => {
                    return Err(GraphError::ConflictingLabel {
                        user: user.to_string(),
                        first: a.to_string(),
                        second: b.to_string(),
                    })
                }
                (None, Some(b)) => *existing = Some(b),
                _ => {}
            },
            None => {
                self.labels.insert(user.to_string(), label);
            }
        }
        Ok(())
    }

    pub fn add_edge(&mut self, a: &str, b: &str, weight: u64) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a.to_string()));
        }
        if weight == 0 {
            return Err(GraphError::ZeroWeight(a.to_string(), b.to_string()));
        }
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        *self.weights.entry(key).or_insert(0) += weight;
        Ok(())
    }

    /// Nodes are the endpoints of at least one edge, ordered by user id.
    pub fn build(self) -> RetweetNetwork {
        let mut ids: Vec<&String> = self.weights.keys().flat_map(|(a, b)| [a, b]).collect();
        ids.sort();
        ids.dedup();
        let nodes: Vec<NetNode> = ids
            .iter()
            .map(|id| NetNode {
                user_id: (*id).clone(),
                label: self.labels.get(*id).copied().flatten(),
            })
            .collect();
        let index: HashMap<String, usize> = nodes.iter().enumerate().map(|(i, n)| (n.user_id.clone(), i)).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for ((a, b), w) in &self.weights {
            let (ia, ib) = (index[a], index[b]);
            adjacency[ia].push((ib, *w));
            adjacency[ib].push((ia, *w));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        RetweetNetwork {
            nodes,
            index,
            adjacency,
            edge_count: self.weights.len(),
        }
    }
}

/// Undirected weighted graph over users. Node indices follow user-id order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RetweetNetwork {
    nodes: Vec<NetNode>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, u64)>>,
    edge_count: usize,
}

impl RetweetNetwork {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NetNode] {
        &self.nodes
    }

    pub fn index_of(&self, user: &str) -> Option<usize> {
        self.index.get(user).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, u64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u64> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        self.adjacency[ia]
            .binary_search_by_key(&ib, |&(n, _)| n)
            .ok()
            .map(|pos| self.adjacency[ia][pos].1)
    }

    /// Each undirected edge once, as (lower index, higher index, weight),
    /// in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().filter(move |&&(j, _)| j > i).map(move |&(j, w)| (i, j, w)))
    }

    /// A builder holding this network's edges and labels, for extension.
    pub fn to_builder(&self) -> NetworkBuilder {
        self.filtered_builder(|_| true)
    }

    fn filtered_builder(&self, keep: impl Fn(usize) -> bool) -> NetworkBuilder {
        let mut b = NetworkBuilder::new();
        for (i, j, w) in self.edges() {
            if keep(i) && keep(j) {
                let (ni, nj) = (&self.nodes[i], &self.nodes[j]);
                b.add_edge(&ni.user_id, &nj.user_id, w).expect("valid edge");
                b.set_label(&ni.user_id, ni.label).expect("consistent label");
                b.set_label(&nj.user_id, nj.label).expect("consistent label");
            }
        }
        b
    }

    /// GEXF 1.3 document with the moral label as a node attribute.
    pub fn to_gexf(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str("<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
        out.push_str("  <graph mode=\"static\" defaultedgetype=\"undirected\">\n");
        out.push_str("    <attributes class=\"node\">\n");
        out.push_str("      <attribute id=\"label\" title=\"moral_label\" type=\"string\"/>\n");
        out.push_str("    </attributes>\n");
        out.push_str("    <nodes>\n");
        for n in &self.nodes {
            let id = xml_escape(&n.user_id);
            let label = n.label.map_or("", Foundation::name);
            let _ = writeln!(
                out,
                "      <node id=\"{id}\" label=\"{id}\"><attvalues><attvalue for=\"label\" value=\"{label}\"/></attvalues></node>"
            );
        }
        out.push_str("    </nodes>\n");
        out.push_str("    <edges>\n");
        for (k, (i, j, w)) in self.edges().enumerate() {
            let _ = writeln!(
                out,
                "      <edge id=\"{k}\" source=\"{}\" target=\"{}\" weight=\"{w}\"/>",
                xml_escape(&self.nodes[i].user_id),
                xml_escape(&self.nodes[j].user_id)
            );
        }
        out.push_str("    </edges>\n");
        out.push_str("  </graph>\n");
        out.push_str("</gexf>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Builds the retweet network among labelled users. Each retweet adds one
/// to the weight of the unordered pair; self-retweets and retweets touching
/// an unlabelled user are ignored.
pub fn build_network<'a, I>(records: I, labelled: &BTreeMap<String, Foundation>) -> RetweetNetwork
where
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let mut b = NetworkBuilder::new();
    for rec in records {
        let Some(target) = rec.retweet_of_user_id.as_deref() else {
            continue;
        };
        if target == rec.user_id {
            continue;
        }
        let (Some(&la), Some(&lb)) = (labelled.get(&rec.user_id), labelled.get(target)) else {
            continue;
        };
        b.add_edge(&rec.user_id, target, 1).expect("distinct endpoints");
        b.set_label(&rec.user_id, Some(la)).expect("single label per user");
        b.set_label(target, Some(lb)).expect("single label per user");
    }
    b.build()
}

/// Maximal subgraph in which every node has at least `k` neighbours.
pub fn k_core(net: &RetweetNetwork, k: usize) -> RetweetNetwork {
    let n = net.node_count();
    let mut degree: Vec<usize> = (0..n).map(|i| net.degree(i)).collect();
    let mut removed = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| degree[i] < k).collect();
    for &i in &queue {
        removed[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &(j, _) in net.neighbors(i) {
            if !removed[j] {
                degree[j] -= 1;
                if degree[j] < k {
                    removed[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    net.filtered_builder(|i| !removed[i]).build()
}

/// Share of node `i`'s incident edge weight that goes to neighbours with the
/// same label. `None` for unlabelled or isolated nodes.
pub fn node_homophily(net: &RetweetNetwork, i: usize) -> Option<f64> {
    let label = net.nodes[i].label?;
    let (mut same, mut total) = (0u64, 0u64);
    for &(j, w) in net.neighbors(i) {
        total += w;
        if net.nodes[j].label == Some(label) {
            same += w;
        }
    }
    (total > 0).then(|| same as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoundationHomophily {
    pub foundation: Foundation,
    /// Labelled nodes with at least one edge.
    pub n_nodes: usize,
    /// Mean node homophily; `None` when `n_nodes == 0`.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeHomophily {
    pub user_id: String,
    pub label: Foundation,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomophilyReport {
    pub foundations: Vec<FoundationHomophily>,
    /// Ordered by foundation, then user id.
    pub nodes: Vec<NodeHomophily>,
}

impl HomophilyReport {
    pub fn score(&self, f: Foundation) -> Option<f64> {
        self.foundations
            .iter()
            .find(|h| h.foundation == f)
            .and_then(|h| h.score)
    }
}

/// Per-foundation mean of node homophily over labelled, non-isolated nodes.
pub fn network_homophily(net: &RetweetNetwork) -> HomophilyReport {
    let mut per_label: Vec<Vec<NodeHomophily>> = vec![Vec::new(); 5];
    for (i, node) in net.nodes.iter().enumerate() {
        let Some(label) = node.label else { continue };
        let Some(j) = label.basic_index() else { continue };
        if let Some(value) = node_homophily(net, i) {
            per_label[j].push(NodeHomophily {
                user_id: node.user_id.clone(),
                label,
                value,
            });
        }
    }
    let foundations = Foundation::BASIC
        .iter()
        .zip(&per_label)
        .map(|(&foundation, nodes)| FoundationHomophily {
            foundation,
            n_nodes: nodes.len(),
            score: (!nodes.is_empty()).then(|| nodes.iter().map(|n| n.value).sum::<f64>() / nodes.len() as f64),
        })
        .collect();
    HomophilyReport {
        foundations,
        nodes: per_label.into_iter().flatten().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Foundation::*;

    fn net(edges: &[(&str, &str, u64)], labels: &[(&str, Foundation)]) -> RetweetNetwork {
        let mut b = NetworkBuilder::new();
        for &(u, l) in labels {
            b.set_label(u, Some(l)).unwrap();
        }
        for &(x, y, w) in edges {
            b.add_edge(x, y, w).unwrap();
        }
        b.build()
    }

    fn retweet(id: &str, user: &str, of: &str) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            user_id: user.into(),
            text: "RT".into(),
            lang: crate::textprep::Lang::En,
            timestamp: 0,
            retweet_of_user_id: Some(of.into()),
            retweet_of_tweet_id: Some(format!("{of}-t")),
        }
    }

    #[test]
    fn retweets_accumulate_undirected() {
        let labelled: BTreeMap<String, Foundation> = [("A".to_string(), Care), ("B".to_string(), Purity)].into();
        let recs = [
            retweet("1", "A", "B"),
            retweet("2", "A", "B"),
            retweet("3", "B", "A"),
            retweet("4", "A", "C"),
            retweet("5", "A", "A"),
        ];
        let g = build_network(&recs, &labelled);
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(g.weight("A", "B"), Some(3));
        assert_eq!(g.index_of("C"), None);
        assert!(build_network(&[], &labelled).is_empty());
    }

    #[test]
    fn k_core_examples() {
        let labels = [("A", Care), ("B", Care), ("C", Care), ("D", Care)];
        let g = net(&[("A", "B", 1), ("B", "C", 1), ("C", "A", 1), ("C", "D", 1)], &labels);
        let core = k_core(&g, 2);
        let ids: Vec<&str> = core.nodes().iter().map(|n| n.user_id.as_str()).collect();
        assert_eq!(ids, vec!["A", "B", "C"]);
        assert_eq!(core.edge_count(), 3);
        assert_eq!(core.nodes()[0].label, Some(Care));

        let path = net(&[("A", "B", 1), ("B", "C", 1)], &labels);
        assert!(k_core(&path, 2).is_empty());
        assert_eq!(k_core(&path, 1), path);
    }

    #[test]
    fn node_homophily_examples() {
        let g = net(
            &[("A", "B", 2), ("A", "C", 1)],
            &[("A", Care), ("B", Care), ("C", Purity)],
        );
        let a = g.index_of("A").unwrap();
        assert_eq!(node_homophily(&g, a), Some(2.0 / 3.0));
        assert_eq!(node_homophily(&g, g.index_of("B").unwrap()), Some(1.0));
        assert_eq!(node_homophily(&g, g.index_of("C").unwrap()), Some(0.0));
    }

    #[test]
    fn network_homophily_examples() {
        let g = net(&[("A", "B", 1)], &[("A", Care), ("B", Care)]);
        let r = network_homophily(&g);
        assert_eq!(r.score(Care), Some(1.0));
        assert_eq!(r.foundations[0].n_nodes, 2);
        for h in &r.foundations[1..] {
            assert_eq!((h.n_nodes, h.score), (0, None));
        }

        let g = net(&[("A", "B", 1)], &[("A", Care), ("B", Purity)]);
        let r = network_homophily(&g);
        assert_eq!(r.score(Care), Some(0.0));
        assert_eq!(r.score(Purity), Some(0.0));
    }

    #[test]
    fn builder_errors() {
        let mut b = NetworkBuilder::new();
        assert!(matches!(b.add_edge("a", "a", 1), Err(GraphError::SelfLoop(_))));
        assert!(matches!(b.add_edge("a", "b", 0), Err(GraphError::ZeroWeight(..))));
        b.set_label("a", Some(Care)).unwrap();
        b.set_label("a", None).unwrap();
        assert!(b.set_label("a", Some(Purity)).is_err());
    }

    #[test]
    fn gexf_escapes_and_lists_everything() {
        let g = net(&[("a&b", "c", 4)], &[("a&b", Care)]);
        let x = g.to_gexf();
        assert!(x.contains("id=\"a&amp;b\""));
        assert!(x.contains("weight=\"4\""));
        assert!(x.contains("value=\"Care\""));
        assert!(x.contains("<node id=\"c\" label=\"c\"><attvalues><attvalue for=\"label\" value=\"\"/>"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn graphs() -> impl Strategy<Value = (Vec<(u8, u8, u64)>, Vec<u8>)> {
            (
                proptest::collection::vec((0u8..12, 0u8..12, 1u64..6), 0..40),
                proptest::collection::vec(0u8..5, 12),
            )
        }

        fn make(edges: &[(u8, u8, u64)], labels: &[u8], scale: u64) -> RetweetNetwork {
            let mut b = NetworkBuilder::new();
            for (i, &l) in labels.iter().enumerate() {
                b.set_label(&format!("n{i:02}"), Some(Foundation::BASIC[l as usize]))
                    .unwrap();
            }
            for &(x, y, w) in edges {
                if x != y {
                    b.add_edge(&format!("n{x:02}"), &format!("n{y:02}"), w * scale).unwrap();
                }
            }
            b.build()
        }

        proptest! {
            #[test]
            fn homophily_bounded_and_scale_invariant((edges, labels) in graphs(), scale in 1u64..9) {
                let g = make(&edges, &labels, 1);
                let s = make(&edges, &labels, scale);
                for i in 0..g.node_count() {
                    let h = node_homophily(&g, i).unwrap();
                    prop_assert!((0.0..=1.0).contains(&h));
                    prop_assert_eq!(Some(h), node_homophily(&s, i));
                }
                for f in network_homophily(&g).foundations {
                    if let Some(v) = f.score { prop_assert!((0.0..=1.0).contains(&v)); }
                }
            }

            #[test]
            fn k_core_min_degree_and_maximal((edges, labels) in graphs(), k in 1usize..5) {
                let g = make(&edges, &labels, 1);
                let core = k_core(&g, k);
                for i in 0..core.node_count() {
                    prop_assert!(core.degree(i) >= k);
                }
                // adding back any removed node leaves it with fewer than k core neighbours
                for node in g.nodes() {
                    if core.index_of(&node.user_id).is_some() { continue; }
                    let i = g.index_of(&node.user_id).unwrap();
                    let in_core = g.neighbors(i).iter()
                        .filter(|&&(j, _)| core.index_of(&g.nodes()[j].user_id).is_some())
                        .count();
                    prop_assert!(in_core < k);
                }
            }
        }
    }
}
