//! Normalized spectral distance between unequal-length series, pairwise
//! distance matrices, agglomerative clustering, and dendrogram export.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::d_statistics;
use crate::series::{prepare_comparison, TimeSeries};
use crate::spectral::ComparisonGrids;

/// Normalized distance from the D-statistics:
/// sqrt(max(1 - 4*d12/(d1 + d2), 0)).
///
/// The ratio subtracted is the normalized cross term (d12 concentrates at
/// half the scale of d1 and d2, hence the 4), so identical spectra give 0
/// and spectra with disjoint support give 1. The max guards against the
/// sampling noise that can push the radicand negative.
fn normalized_distance(d1: f64, d12: f64, d2: f64) -> f64 {
    (1.0 - 4.0 * d12 / (d1 + d2)).max(0.0).sqrt()
}

/// Distance in [0, 1] between the spectral densities of two series.
///
/// Both series are centered and compared on the Fourier grid of the
/// shorter one, so the value does not depend on argument order. A common
/// rescaling of both series cancels; rescaling one series alone moves its
/// spectral density and therefore the distance (variance is part of the
/// spectrum, not nuisance).
pub fn spectral_distance(a: &TimeSeries, b: &TimeSeries) -> Result<f64> {
    let input = prepare_comparison(a, b, true);
    let g = ComparisonGrids::compute(&input);
    let ds = d_statistics(&g).map_err(|e| {
        Error::Degenerate(format!("pair ({}, {}): {e}", a.label(), b.label()))
    })?;
    Ok(normalized_distance(ds.d1, ds.d12, ds.d2))
}

/// Symmetric pairwise distance matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    d: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Wrap an explicit matrix, checking symmetry, zero diagonal, range
    /// and label uniqueness.
    pub fn new(labels: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let m = labels.len();
        if m < 2 {
            return Err(Error::InvalidParam(
                "distance matrix needs at least 2 series".into(),
            ));
        }
        let uniq: std::collections::BTreeSet<&String> = labels.iter().collect();
        if uniq.len() != m {
            return Err(Error::InvalidParam(
                "distance matrix labels must be unique".into(),
            ));
        }
        if d.len() != m || d.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidParam(format!(
                "distance matrix must be {m}x{m}"
            )));
        }
        for i in 0..m {
            if d[i][i] != 0.0 {
                return Err(Error::InvalidParam("diagonal must be zero".into()));
            }
            for j in 0..m {
                let v = d[i][j];
                if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "distance entry ({i},{j}) = {v} outside [0,1]"
                    )));
                }
                if d[i][j] != d[j][i] {
                    return Err(Error::InvalidParam(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { labels, d })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.d
    }
}

/// All pairwise spectral distances. Each unordered pair is computed once
/// (the shorter member defines the grid either way, so one evaluation
/// serves both triangle halves). Labels must be unique.
pub fn distance_matrix(set: &[TimeSeries]) -> Result<DistanceMatrix> {
    let m = set.len();
    if m < 2 {
        return Err(Error::InvalidParam(
            "clustering needs at least 2 series".into(),
        ));
    }
    let labels: Vec<String> = set.iter().map(|s| s.label().to_string()).collect();
    {
        let uniq: std::collections::BTreeSet<&String> = labels.iter().collect();
        if uniq.len() != m {
            return Err(Error::InvalidParam(
                "series labels must be unique; deduplicate before clustering".into(),
            ));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let values: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| spectral_distance(&set[i], &set[j]))
        .collect();
    let mut d = vec![vec![0.0; m]; m];
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        d[i][j] = v;
        d[j][i] = v;
    }
    DistanceMatrix::new(labels, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Average,
    Complete,
    Single,
}

impl FromStr for Linkage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Self::Average),
            "complete" => Ok(Self::Complete),
            "single" => Ok(Self::Single),
            other => Err(Error::InvalidParam(format!(
                "unknown linkage {other:?}; expected average, complete or single"
            ))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Average => "average",
            Self::Complete => "complete",
            Self::Single => "single",
        })
    }
}

/// Merge tree node: a labeled leaf or an internal merge with its height.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        label: String,
    },
    Internal {
        left: Box<Node>,
        right: Box<Node>,
        height: f64,
    },
}

impl Node {
    pub fn height(&self) -> f64 {
        match self {
            Node::Leaf { .. } => 0.0,
            Node::Internal { height, .. } => *height,
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Node::Leaf { label } => out.push(label),
            Node::Internal { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    /// Smallest leaf label in the subtree; the deterministic sort key.
    fn key(&self) -> &str {
        match self {
            Node::Leaf { label } => label,
            Node::Internal { left, right, .. } => left.key().min(right.key()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub root: Node,
}

impl Dendrogram {
    pub fn leaf_labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out
    }

    /// Merge heights in nondecreasing order.
    pub fn heights(&self) -> Vec<f64> {
        fn walk(n: &Node, out: &mut Vec<f64>) {
            if let Node::Internal {
                left,
                right,
                height,
            } = n
            {
                out.push(*height);
                walk(left, out);
                walk(right, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Partition into k groups by undoing the k-1 highest merges. Each
    /// group is the sorted label list of one remaining subtree; groups are
    /// sorted by their first label.
    pub fn cut(&self, k: usize) -> Result<Vec<Vec<String>>> {
        let total = self.leaf_labels().len();
        if k == 0 || k > total {
            return Err(Error::InvalidParam(format!(
                "cannot cut {total}-leaf tree into {k} clusters"
            )));
        }
        let mut parts: Vec<&Node> = vec![&self.root];
        while parts.len() < k {
            // split the subtree with the greatest merge height; ties by key
            let (idx, _) = parts
                .iter()
                .enumerate()
                .filter(|(_, n)| matches!(n, Node::Internal { .. }))
                .max_by(|(_, a), (_, b)| {
                    a.height()
                        .partial_cmp(&b.height())
                        .unwrap()
                        .then_with(|| b.key().cmp(a.key()))
                })
                .expect("leaf count bounds k");
            let node = parts.remove(idx);
            if let Node::Internal { left, right, .. } = node {
                parts.push(left);
                parts.push(right);
            }
        }
        let mut groups: Vec<Vec<String>> = parts
            .into_iter()
            .map(|n| {
                let mut leaves = Vec::new();
                n.collect_leaves(&mut leaves);
                let mut g: Vec<String> = leaves.into_iter().map(String::from).collect();
                g.sort();
                g
            })
            .collect();
        groups.sort();
        Ok(groups)
    }
}

struct Cluster {
    node: Node,
    members: Vec<usize>,
}

fn linkage_distance(m: &DistanceMatrix, a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    let mut acc: f64 = match linkage {
        Linkage::Single => f64::INFINITY,
        Linkage::Complete => f64::NEG_INFINITY,
        Linkage::Average => 0.0,
    };
    for &i in a {
        for &j in b {
            let v = m.value(i, j);
            acc = match linkage {
                Linkage::Single => acc.min(v),
                Linkage::Complete => acc.max(v),
                Linkage::Average => acc + v,
            };
        }
    }
    match linkage {
        Linkage::Average => acc / (a.len() * b.len()) as f64,
        _ => acc,
    }
}

/// Sequential agglomerative clustering: repeatedly merge the two closest
/// clusters under the linkage, recording the merge distance as the node
/// height. Ties are broken by the smallest (lexicographic) pair of cluster
/// keys, where a cluster's key is its smallest leaf label, so the result
/// is deterministic and independent of input order up to relabeling.
pub fn agglomerate(matrix: &DistanceMatrix, linkage: Linkage) -> Dendrogram {
    let mut clusters: Vec<Cluster> = matrix
        .labels()
        .iter()
        .enumerate()
        .map(|(i, label)| Cluster {
            node: Node::Leaf {
                label: label.clone(),
            },
            members: vec![i],
        })
        .collect();
    while clusters.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let d = linkage_distance(matrix, &clusters[i].members, &clusters[j].members, linkage);
                let better = match best {
                    None => true,
                    Some((bi, bj, bd)) => {
                        if d != bd {
                            d < bd
                        } else {
                            let ka = clusters[i].node.key().min(clusters[j].node.key());
                            let kb = clusters[i].node.key().max(clusters[j].node.key());
                            let ba = clusters[bi].node.key().min(clusters[bj].node.key());
                            let bb = clusters[bi].node.key().max(clusters[bj].node.key());
                            (ka, kb) < (ba, bb)
                        }
                    }
                };
                if better {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, height) = best.expect("at least two clusters");
        // remove j first: j > i keeps i's index stable
        let cj = clusters.remove(j);
        let ci = clusters.remove(i);
        let (left, right) = if ci.node.key() <= cj.node.key() {
            (ci.node, cj.node)
        } else {
            (cj.node, ci.node)
        };
        let mut members = ci.members;
        members.extend(cj.members);
        members.sort_unstable();
        clusters.push(Cluster {
            node: Node::Internal {
                left: Box::new(left),
                right: Box::new(right),
                height,
            },
            members,
        });
    }
    Dendrogram {
        root: clusters.pop().expect("nonempty").node,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Newick,
    Json,
}

impl FromStr for TreeFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "newick" => Ok(Self::Newick),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParam(format!(
                "unknown tree format {other:?}; expected newick or json"
            ))),
        }
    }
}

/// Percent-escape every byte outside [A-Za-z0-9_.-].
fn escape_label(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for b in label.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn unescape_label(escaped: &str) -> Result<String> {
    let bytes = escaped.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            if i + 2 >= bytes.len() + 1 {
                return Err(Error::InvalidParam(format!(
                    "truncated percent escape in label {escaped:?}"
                )));
            }
            let hex = escaped
                .get(i + 1..i + 3)
                .ok_or_else(|| Error::InvalidParam(format!("bad escape in {escaped:?}")))?;
            let v = u8::from_str_radix(hex, 16)
                .map_err(|_| Error::InvalidParam(format!("bad escape %{hex} in {escaped:?}")))?;
            out.push(v);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out)
        .map_err(|_| Error::InvalidParam(format!("label {escaped:?} escapes invalid UTF-8")))
}

/// Branch lengths come from subtracting heights, which can leave trailing
/// binary noise (0.3 - 0.1 is not exactly 0.2 in floating point); format
/// at 12 decimals and strip trailing zeros so the display is clean.
fn fmt_branch(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn newick_node(node: &Node, out: &mut String) {
    match node {
        Node::Leaf { label } => out.push_str(&escape_label(label)),
        Node::Internal {
            left,
            right,
            height,
        } => {
            out.push('(');
            newick_node(left, out);
            out.push(':');
            out.push_str(&fmt_branch(height - left.height()));
            out.push(',');
            newick_node(right, out);
            out.push(':');
            out.push_str(&fmt_branch(height - right.height()));
            out.push(')');
        }
    }
}

fn json_node(node: &Node) -> serde_json::Value {
    match node {
        Node::Leaf { label } => serde_json::json!({ "label": escape_label(label) }),
        Node::Internal {
            left,
            right,
            height,
        } => serde_json::json!({
            "children": [json_node(left), json_node(right)],
            "height": height,
        }),
    }
}

/// Render the tree. Newick writes branch lengths as parent height minus
/// child height with a trailing semicolon; JSON nests
/// {label | children: [...], height}. Labels are percent-escaped to the
/// [A-Za-z0-9_.-] alphabet in both formats.
pub fn export_dendrogram(t: &Dendrogram, format: TreeFormat) -> String {
    match format {
        TreeFormat::Newick => {
            let mut out = String::new();
            newick_node(&t.root, &mut out);
            out.push(';');
            out
        }
        TreeFormat::Json => {
            serde_json::to_string_pretty(&json_node(&t.root)).expect("tree serializes")
        }
    }
}

/// Parse the JSON produced by [`export_dendrogram`] back into a tree.
pub fn parse_dendrogram_json(text: &str) -> Result<Dendrogram> {
    fn node_from(v: &serde_json::Value) -> Result<Node> {
        if let Some(label) = v.get("label").and_then(|l| l.as_str()) {
            return Ok(Node::Leaf {
                label: unescape_label(label)?,
            });
        }
        let children = v
            .get("children")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::InvalidParam("tree node needs label or children".into()))?;
        if children.len() != 2 {
            return Err(Error::InvalidParam(
                "tree nodes must have exactly 2 children".into(),
            ));
        }
        let height = v
            .get("height")
            .and_then(|h| h.as_f64())
            .ok_or_else(|| Error::InvalidParam("internal node needs a height".into()))?;
        Ok(Node::Internal {
            left: Box::new(node_from(&children[0])?),
            right: Box::new(node_from(&children[1])?),
            height,
        })
    }
    let v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParam(format!("invalid tree JSON: {e}")))?;
    Ok(Dendrogram {
        root: node_from(&v)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procgen::{replication_rng, simulate, ModelSpec};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn sim(model: &ModelSpec, n: usize, seed: u64, rep: u64, label: &str) -> TimeSeries {
        let mut rng = replication_rng(seed, "cluster-test", rep);
        let pad = model.recommended_pad();
        let z: Vec<f64> = (0..n + 2 * pad).map(|_| rng.sample(StandardNormal)).collect();
        simulate(model, n, &z).unwrap().relabeled(label)
    }

    fn matrix3(dab: f64, dac: f64, dbc: f64) -> DistanceMatrix {
        DistanceMatrix::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                vec![0.0, dab, dac],
                vec![dab, 0.0, dbc],
                vec![dac, dbc, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn algebraic_endpoints() {
        let c = 0.37;
        assert_eq!(normalized_distance(c, c, c), 0.0);
        assert_eq!(normalized_distance(0.2, 0.0, 0.3), 1.0);
    }

    #[test]
    fn distance_is_order_independent_and_bounded() {
        let a = sim(&ModelSpec::x1(), 300, 1, 0, "a");
        let b = sim(&ModelSpec::x2(), 200, 1, 1, "b");
        let d1 = spectral_distance(&a, &b).unwrap();
        let d2 = spectral_distance(&b, &a).unwrap();
        assert_eq!(d1, d2);
        assert!((0.0..=1.0).contains(&d1));
    }

    #[test]
    fn distance_invariant_under_common_rescaling() {
        let a = sim(&ModelSpec::x1(), 256, 2, 0, "a");
        let b = sim(&ModelSpec::x3(), 384, 2, 1, "b");
        let c = 250.0;
        let a_scaled =
            TimeSeries::new("as", a.values().iter().map(|v| c * v).collect()).unwrap();
        let b_scaled =
            TimeSeries::new("bs", b.values().iter().map(|v| c * v).collect()).unwrap();
        let d = spectral_distance(&a, &b).unwrap();
        let ds = spectral_distance(&a_scaled, &b_scaled).unwrap();
        assert!((d - ds).abs() < 1e-10, "{d} vs {ds}");
    }

    #[test]
    fn different_spectra_farther_than_identical() {
        let a = sim(&ModelSpec::x1(), 1024, 3, 0, "a");
        let same = spectral_distance(&a, &a.clone().relabeled("a2")).unwrap();
        let b = sim(&ModelSpec::x2(), 1024, 3, 1, "b");
        let diff = spectral_distance(&a, &b).unwrap();
        assert!(same < 0.5, "identical-series distance {same}");
        assert!(diff > same, "{diff} vs {same}");
    }

    #[test]
    fn matrix_shape_and_symmetry() {
        let set = vec![
            sim(&ModelSpec::x1(), 256, 4, 0, "s0"),
            sim(&ModelSpec::x1(), 300, 4, 1, "s1"),
            sim(&ModelSpec::x2(), 256, 4, 2, "s2"),
        ];
        let m = distance_matrix(&set).unwrap();
        assert_eq!(m.labels(), &["s0", "s1", "s2"]);
        for i in 0..3 {
            assert_eq!(m.value(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(m.value(i, j), m.value(j, i));
                assert!((0.0..=1.0).contains(&m.value(i, j)));
            }
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        let set = vec![
            sim(&ModelSpec::x1(), 256, 5, 0, "same"),
            sim(&ModelSpec::x1(), 256, 5, 1, "same"),
        ];
        assert!(distance_matrix(&set).is_err());
    }

    #[test]
    fn two_leaves_merge_at_their_distance() {
        let m = DistanceMatrix::new(
            vec!["A".into(), "B".into()],
            vec![vec![0.0, 0.3], vec![0.3, 0.0]],
        )
        .unwrap();
        let t = agglomerate(&m, Linkage::Average);
        assert_eq!(t.root.height(), 0.3);
        assert_eq!(export_dendrogram(&t, TreeFormat::Newick), "(A:0.3,B:0.3);");
    }

    #[test]
    fn three_leaf_hand_example() {
        let m = matrix3(0.1, 0.9, 0.9);
        for linkage in [Linkage::Average, Linkage::Complete, Linkage::Single] {
            let t = agglomerate(&m, linkage);
            let h = t.heights();
            assert_eq!(h[0], 0.1, "{linkage}");
            if linkage == Linkage::Complete {
                assert_eq!(h[1], 0.9);
            }
            assert_eq!(t.cut(2).unwrap(), vec![vec!["A", "B"], vec!["C"]]);
        }
    }

    #[test]
    fn nested_newick_branch_lengths() {
        let m = matrix3(0.1, 0.3, 0.25);
        let t = agglomerate(&m, Linkage::Complete);
        assert_eq!(
            export_dendrogram(&t, TreeFormat::Newick),
            "((A:0.1,B:0.1):0.2,C:0.3);"
        );
    }

    #[test]
    fn tie_break_prefers_smallest_label_pair() {
        let m = matrix3(0.5, 0.5, 0.5);
        let t = agglomerate(&m, Linkage::Average);
        // all pairs tie at 0.5; (A,B) must merge first
        if let Node::Internal { left, .. } = &t.root {
            let mut leaves = Vec::new();
            left.collect_leaves(&mut leaves);
            leaves.sort();
            assert_eq!(leaves, vec!["A", "B"]);
        } else {
            panic!("root must be internal");
        }
    }

    #[test]
    fn heights_nondecreasing_and_leaves_preserved() {
        let mut rng = replication_rng(6, "cluster-test", 0);
        let m = 7;
        let labels: Vec<String> = (0..m).map(|i| format!("s{i}")).collect();
        let mut d = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let v: f64 = rng.sample::<f64, _>(rand::distr::StandardUniform);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        let matrix = DistanceMatrix::new(labels.clone(), d).unwrap();
        for linkage in [Linkage::Average, Linkage::Complete, Linkage::Single] {
            let t = agglomerate(&matrix, linkage);
            let h = t.heights();
            assert_eq!(h.len(), m - 1);
            assert!(h.windows(2).all(|w| w[0] <= w[1]), "{linkage}: {h:?}");
            let mut leaves: Vec<String> =
                t.leaf_labels().into_iter().map(String::from).collect();
            leaves.sort();
            assert_eq!(leaves, labels);
        }
    }

    fn merge_sets(node: &Node, out: &mut Vec<(Vec<String>, f64)>) {
        if let Node::Internal {
            left,
            right,
            height,
        } = node
        {
            let mut leaves = Vec::new();
            node.collect_leaves(&mut leaves);
            let mut set: Vec<String> = leaves.into_iter().map(String::from).collect();
            set.sort();
            out.push((set, *height));
            merge_sets(left, out);
            merge_sets(right, out);
        }
    }

    #[test]
    fn permuting_input_gives_isomorphic_tree() {
        let labels = ["A", "B", "C", "D"];
        let d = [
            [0.0, 0.12, 0.55, 0.70],
            [0.12, 0.0, 0.60, 0.65],
            [0.55, 0.60, 0.0, 0.20],
            [0.70, 0.65, 0.20, 0.0],
        ];
        let m1 = DistanceMatrix::new(
            labels.iter().map(|s| s.to_string()).collect(),
            d.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap();
        let perm = [2usize, 0, 3, 1];
        let m2 = DistanceMatrix::new(
            perm.iter().map(|&i| labels[i].to_string()).collect(),
            perm.iter()
                .map(|&i| perm.iter().map(|&j| d[i][j]).collect())
                .collect(),
        )
        .unwrap();
        for linkage in [Linkage::Average, Linkage::Complete, Linkage::Single] {
            let mut s1 = Vec::new();
            let mut s2 = Vec::new();
            merge_sets(&agglomerate(&m1, linkage).root, &mut s1);
            merge_sets(&agglomerate(&m2, linkage).root, &mut s2);
            s1.sort_by(|a, b| a.partial_cmp(b).unwrap());
            s2.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(s1, s2, "{linkage}");
        }
    }

    #[test]
    fn cut_bounds() {
        let t = agglomerate(&matrix3(0.1, 0.9, 0.8), Linkage::Average);
        assert_eq!(t.cut(1).unwrap(), vec![vec!["A", "B", "C"]]);
        assert_eq!(
            t.cut(3).unwrap(),
            vec![vec!["A"], vec!["B"], vec!["C"]]
        );
        assert!(t.cut(0).is_err());
        assert!(t.cut(4).is_err());
    }

    #[test]
    fn label_escaping_round_trip() {
        assert_eq!(escape_label("my series"), "my%20series");
        assert_eq!(escape_label("a_b.c-d"), "a_b.c-d");
        assert_eq!(escape_label("50%"), "50%25");
        for label in ["plain", "two words", "μ-wave", "a,b:c(d)e;f"] {
            assert_eq!(unescape_label(&escape_label(label)).unwrap(), label);
        }
    }

    #[test]
    fn newick_escapes_labels() {
        let m = DistanceMatrix::new(
            vec!["series one".into(), "b".into()],
            vec![vec![0.0, 0.4], vec![0.4, 0.0]],
        )
        .unwrap();
        let t = agglomerate(&m, Linkage::Single);
        assert_eq!(
            export_dendrogram(&t, TreeFormat::Newick),
            "(b:0.4,series%20one:0.4);"
        );
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let m = matrix3(0.1, 0.3, 0.25);
        for linkage in [Linkage::Average, Linkage::Complete, Linkage::Single] {
            let t = agglomerate(&m, linkage);
            let text = export_dendrogram(&t, TreeFormat::Json);
            let back = parse_dendrogram_json(&text).unwrap();
            assert_eq!(back, t);
        }
        // labels needing escapes survive the trip
        let m2 = DistanceMatrix::new(
            vec!["läbel".into(), "two words".into()],
            vec![vec![0.0, 0.2], vec![0.2, 0.0]],
        )
        .unwrap();
        let t2 = agglomerate(&m2, Linkage::Average);
        assert_eq!(
            parse_dendrogram_json(&export_dendrogram(&t2, TreeFormat::Json)).unwrap(),
            t2
        );
    }
}
