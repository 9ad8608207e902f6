//! Internal consistency, external separability and the per-attribute relevance vector.
//!
//! Two routes compute the same quantities. [`internal_consistency`] and
//! [`external_separability`] sum over node pairs for a given weight vector.
//! [`relevance_vector`] decomposes the same sums per attribute, so that for
//! any nonnegative `w`, `I = w · x_I` and `E = w · x_E`; this is the route the
//! focus optimizer uses.
//!
//! Degrees and `m` always refer to the full graph. Attribute values are
//! assumed to lie in `[0, 1]` (enforced at graph construction).
//!
//! An attribute is *supported* by a neighborhood when at least one member has
//! a nonzero value for it. Kronecker-delta similarity is only evaluated on
//! supported attributes: comparing two absent entries of an attribute nobody
//! in `C` exhibits would otherwise add a contribution for every attribute of
//! the graph.

use serde::{Deserialize, Serialize};

use crate::error::{AmenError, Result};
use crate::graph::{AttrId, AttributeRow, AttributedGraph, Neighborhood, NodeId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    /// Weighted dot product `w · (x_i ∘ x_j)`.
    #[default]
    Dot,
    /// Per-attribute Kronecker delta `Σ_f w_f [x_i(f) = x_j(f)]`.
    Delta,
    /// Dot product inside the neighborhood, delta across the boundary. Binary attributes only.
    BinaryMixed,
}

impl SimilarityKind {
    fn internal(self) -> Kernel {
        match self {
            SimilarityKind::Dot | SimilarityKind::BinaryMixed => Kernel::Dot,
            SimilarityKind::Delta => Kernel::Delta,
        }
    }

    fn external(self) -> Kernel {
        match self {
            SimilarityKind::Dot => Kernel::Dot,
            SimilarityKind::Delta | SimilarityKind::BinaryMixed => Kernel::Delta,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SimilarityKind::Dot => "dot",
            SimilarityKind::Delta => "delta",
            SimilarityKind::BinaryMixed => "binary-mixed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kernel {
    Dot,
    Delta,
}

/// Which ordered member pairs `(i, j)` enter the internal-consistency sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairConvention {
    /// All of `C × C`, including `i = j` (where `A_ii = 0`). Makes `I_max = |C|²` exact.
    #[default]
    WithDiagonal,
    /// Ordered pairs with `i ≠ j`; `I_max = |C|(|C| - 1)`.
    OffDiagonal,
}

pub const PAIR_CONVENTION: PairConvention = PairConvention::WithDiagonal;

/// Relevance of one attribute to one neighborhood.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttributeRelevance {
    pub attr: AttrId,
    pub supported: bool,
    pub x_internal: f64,
    pub x_external: f64,
    pub x_internal_tilde: f64,
    pub hat_internal: f64,
    pub hat_external: f64,
    /// `hat_internal + hat_external`, in `[-1, 1]`.
    pub x: f64,
}

/// Per-attribute decomposition of normality for one neighborhood.
///
/// Only supported attributes are stored; every unsupported attribute has
/// `x_I = x_E = x_Ĩ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelevanceVector {
    attribute_count: usize,
    attrs: Vec<AttrId>,
    x_internal: Vec<f64>,
    x_external: Vec<f64>,
    x_internal_tilde: Vec<f64>,
    internal_min: f64,
    internal_max: f64,
}

impl RelevanceVector {
    pub fn attribute_count(&self) -> usize {
        self.attribute_count
    }

    /// Supported attribute ids, ascending.
    pub fn supported(&self) -> &[AttrId] {
        &self.attrs
    }

    pub fn is_supported(&self, attr: AttrId) -> bool {
        self.attrs.binary_search(&attr).is_ok()
    }

    pub fn internal_min(&self) -> f64 {
        self.internal_min
    }

    pub fn internal_max(&self) -> f64 {
        self.internal_max
    }

    fn hat_internal(&self, x_internal: f64) -> f64 {
        (x_internal - self.internal_min) / (self.internal_max - self.internal_min)
    }

    fn hat_external(x_external: f64, x_internal_tilde: f64) -> f64 {
        let volume = x_internal_tilde - x_external;
        if volume == 0.0 {
            0.0
        } else {
            x_external / volume
        }
    }

    fn make_entry(&self, attr: AttrId, supported: bool, xi: f64, xe: f64, xt: f64) -> AttributeRelevance {
        let hat_internal = self.hat_internal(xi);
        let hat_external = Self::hat_external(xe, xt);
        AttributeRelevance {
            attr,
            supported,
            x_internal: xi,
            x_external: xe,
            x_internal_tilde: xt,
            hat_internal,
            hat_external,
            x: hat_internal + hat_external,
        }
    }

    pub fn entry(&self, slot: usize) -> AttributeRelevance {
        self.make_entry(
            self.attrs[slot],
            true,
            self.x_internal[slot],
            self.x_external[slot],
            self.x_internal_tilde[slot],
        )
    }

    /// Entries for supported attributes in ascending attribute order.
    pub fn entries(&self) -> impl Iterator<Item = AttributeRelevance> + '_ {
        (0..self.attrs.len()).map(|s| self.entry(s))
    }

    /// Entry for any attribute of the graph, supported or not.
    pub fn get(&self, attr: AttrId) -> AttributeRelevance {
        match self.attrs.binary_search(&attr) {
            Ok(slot) => self.entry(slot),
            Err(_) => self.make_entry(attr, false, 0.0, 0.0, 0.0),
        }
    }

    /// `(attr, x(attr))` over supported attributes.
    pub fn scores(&self) -> Vec<(AttrId, f64)> {
        self.entries().map(|e| (e.attr, e.x)).collect()
    }

    /// `w · x_I` over all attributes.
    pub fn dot_internal(&self, weights: &[f64]) -> f64 {
        self.attrs
            .iter()
            .zip(&self.x_internal)
            .map(|(&f, &v)| weights[f as usize] * v)
            .sum()
    }

    /// `w · x_E` over all attributes.
    pub fn dot_external(&self, weights: &[f64]) -> f64 {
        self.attrs
            .iter()
            .zip(&self.x_external)
            .map(|(&f, &v)| weights[f as usize] * v)
            .sum()
    }
}

/// Penalty weight of a cross-edge: `1 - min(1, k_i k_b / 2m)`.
pub fn cross_edge_penalty(graph: &AttributedGraph, i: NodeId, b: NodeId) -> Result<f64> {
    Ok(1.0 - graph.expected_edge_probability(i, b, true)?)
}

fn surprise(ki: f64, kj: f64, two_m: f64) -> f64 {
    1.0 - (ki * kj / two_m).min(1.0)
}

fn supported_attrs(graph: &AttributedGraph, members: &[NodeId]) -> Vec<AttrId> {
    let mut attrs: Vec<AttrId> = members
        .iter()
        .flat_map(|&i| graph.attributes(i).ids.iter().copied())
        .collect();
    attrs.sort_unstable();
    attrs.dedup();
    attrs
}

fn check_binary(graph: &AttributedGraph, nb: &Neighborhood) -> Result<()> {
    for &v in nb.members().iter().chain(nb.boundary()) {
        for (f, x) in graph.attributes(v).iter() {
            if x != 1.0 {
                return Err(AmenError::NonBinaryAttribute {
                    node: v as usize,
                    attr: f as usize,
                    value: x,
                });
            }
        }
    }
    Ok(())
}

fn check_preconditions(graph: &AttributedGraph, nb: &Neighborhood, sim: SimilarityKind) -> Result<()> {
    if graph.edge_count() == 0 {
        return Err(AmenError::UndefinedNullModel);
    }
    if nb.size() < 2 {
        return Err(AmenError::DegenerateNeighborhood("fewer than 2 members".into()));
    }
    if sim == SimilarityKind::BinaryMixed {
        check_binary(graph, nb)?;
    }
    Ok(())
}

/// Visit every attribute where two sparse rows intersect.
fn for_each_common(a: AttributeRow<'_>, b: AttributeRow<'_>, mut visit: impl FnMut(AttrId, f64, f64)) {
    let (mut p, mut q) = (0, 0);
    while p < a.ids.len() && q < b.ids.len() {
        match a.ids[p].cmp(&b.ids[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                visit(a.ids[p], a.values[p], b.values[q]);
                p += 1;
                q += 1;
            }
        }
    }
}

/// Visit every attribute on which two sparse rows disagree (absent counts as 0).
fn for_each_difference(a: AttributeRow<'_>, b: AttributeRow<'_>, mut visit: impl FnMut(AttrId)) {
    let (mut p, mut q) = (0, 0);
    loop {
        match (a.ids.get(p), b.ids.get(q)) {
            (None, None) => break,
            (Some(&f), None) => {
                visit(f);
                p += 1;
            }
            (None, Some(&f)) => {
                visit(f);
                q += 1;
            }
            (Some(&f), Some(&g)) => match f.cmp(&g) {
                std::cmp::Ordering::Less => {
                    visit(f);
                    p += 1;
                }
                std::cmp::Ordering::Greater => {
                    visit(g);
                    q += 1;
                }
                std::cmp::Ordering::Equal => {
                    if a.values[p] != b.values[q] {
                        visit(f);
                    }
                    p += 1;
                    q += 1;
                }
            },
        }
    }
}

pub fn relevance_vector(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    sim: SimilarityKind,
) -> Result<RelevanceVector> {
    relevance_vector_with(graph, nb, sim, PAIR_CONVENTION)
}

/// Relevance vector in `O(|E(C)| r + |E_B| r + |C| r log r)` for row length `r`,
/// independent of the size of the rest of the graph.
pub fn relevance_vector_with(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    sim: SimilarityKind,
    convention: PairConvention,
) -> Result<RelevanceVector> {
    check_preconditions(graph, nb, sim)?;
    let two_m = graph.two_m();
    let members = nb.members();
    let attrs = supported_attrs(graph, members);
    let slots = attrs.len();
    let slot = |f: AttrId| attrs.binary_search(&f).ok();
    let deg = |v: NodeId| graph.degree(v) as f64;

    let volume: f64 = members.iter().map(|&i| deg(i)).sum();
    let volume_sq: f64 = members.iter().map(|&i| deg(i) * deg(i)).sum();
    let c = members.len() as f64;
    let (internal_min, internal_max) = match convention {
        PairConvention::WithDiagonal => (-(volume * volume) / two_m, c * c),
        PairConvention::OffDiagonal => (-(volume * volume - volume_sq) / two_m, c * (c - 1.0)),
    };

    let mut x_internal = vec![0.0; slots];
    let mut x_internal_tilde = vec![0.0; slots];
    let mut x_external = vec![0.0; slots];

    match sim.internal() {
        Kernel::Dot => {
            let mut weighted = vec![0.0; slots];
            let mut weighted_sq = vec![0.0; slots];
            for &i in members {
                let k = deg(i);
                for (f, v) in graph.attributes(i).iter() {
                    let s = slot(f).expect("member attributes are supported");
                    weighted[s] += k * v;
                    weighted_sq[s] += k * k * v * v;
                }
            }
            for s in 0..slots {
                let null = match convention {
                    PairConvention::WithDiagonal => weighted[s] * weighted[s],
                    PairConvention::OffDiagonal => weighted[s] * weighted[s] - weighted_sq[s],
                };
                x_internal[s] = -null / two_m;
            }
            let mut edge_sum = vec![0.0; slots];
            let mut tilde_sum = vec![0.0; slots];
            for &(i, j) in nb.internal_edges() {
                let pen = surprise(deg(i), deg(j), two_m);
                for_each_common(graph.attributes(i), graph.attributes(j), |f, vi, vj| {
                    let s = slot(f).expect("member attributes are supported");
                    edge_sum[s] += vi * vj;
                    tilde_sum[s] += pen * vi * vj;
                });
            }
            for s in 0..slots {
                x_internal[s] += 2.0 * edge_sum[s];
                x_internal_tilde[s] = 2.0 * tilde_sum[s];
            }
        }
        Kernel::Delta => {
            // Null term: members with equal values at f form groups; Σ_{i,j in group} k_i k_j = (Σ k)².
            let mut entries: Vec<(usize, u64, f64)> = Vec::new();
            for &i in members {
                let k = deg(i);
                for (f, v) in graph.attributes(i).iter() {
                    entries.push((slot(f).expect("supported"), v.to_bits(), k));
                }
            }
            entries.sort_unstable_by_key(|e| (e.0, e.1));
            let mut start = 0;
            while start < entries.len() {
                let s = entries[start].0;
                let mut end = start;
                let mut present = 0.0;
                let mut squares = 0.0;
                while end < entries.len() && entries[end].0 == s {
                    let bits = entries[end].1;
                    let mut group = 0.0;
                    while end < entries.len() && entries[end].0 == s && entries[end].1 == bits {
                        group += entries[end].2;
                        end += 1;
                    }
                    present += group;
                    squares += group * group;
                }
                let absent = volume - present;
                let mut null = squares + absent * absent;
                if convention == PairConvention::OffDiagonal {
                    null -= volume_sq;
                }
                x_internal[s] = -null / two_m;
                start = end;
            }

            let edge_count = nb.internal_edges().len() as f64;
            let mut pen_total = 0.0;
            let mut differ_count = vec![0usize; slots];
            let mut differ_pen = vec![0.0; slots];
            for &(i, j) in nb.internal_edges() {
                let pen = surprise(deg(i), deg(j), two_m);
                pen_total += pen;
                for_each_difference(graph.attributes(i), graph.attributes(j), |f| {
                    let s = slot(f).expect("member attributes are supported");
                    differ_count[s] += 1;
                    differ_pen[s] += pen;
                });
            }
            for s in 0..slots {
                x_internal[s] += 2.0 * (edge_count - differ_count[s] as f64);
                x_internal_tilde[s] = (2.0 * (pen_total - differ_pen[s])).max(0.0);
            }
        }
    }

    match sim.external() {
        Kernel::Dot => {
            let mut penalty = vec![0.0; slots];
            for &(i, b) in nb.cross_edges() {
                let pen = surprise(deg(i), deg(b), two_m);
                for_each_common(graph.attributes(i), graph.attributes(b), |f, vi, vb| {
                    let s = slot(f).expect("member attributes are supported");
                    penalty[s] += pen * vi * vb;
                });
            }
            for s in 0..slots {
                x_external[s] = 0.0 - penalty[s];
            }
        }
        Kernel::Delta => {
            let mut pen_total = 0.0;
            let mut differ_pen = vec![0.0; slots];
            for &(i, b) in nb.cross_edges() {
                let pen = surprise(deg(i), deg(b), two_m);
                pen_total += pen;
                for_each_difference(graph.attributes(i), graph.attributes(b), |f| {
                    if let Some(s) = slot(f) {
                        differ_pen[s] += pen;
                    }
                });
            }
            for s in 0..slots {
                x_external[s] = 0.0 - (pen_total - differ_pen[s]).max(0.0);
            }
        }
    }

    Ok(RelevanceVector {
        attribute_count: graph.attribute_count(),
        attrs,
        x_internal,
        x_external,
        x_internal_tilde,
        internal_min,
        internal_max,
    })
}

fn check_weights(graph: &AttributedGraph, weights: &[f64]) -> Result<()> {
    if weights.len() != graph.attribute_count() {
        return Err(AmenError::InvalidWeights(format!(
            "length {} but graph has {} attributes",
            weights.len(),
            graph.attribute_count()
        )));
    }
    if let Some((f, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < 0.0)
    {
        return Err(AmenError::InvalidWeights(format!(
            "weight {w} at attribute {f} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Weighted similarity of two nodes, with delta restricted to `support`.
fn similarity(
    a: AttributeRow<'_>,
    b: AttributeRow<'_>,
    weights: &[f64],
    support: &[AttrId],
    kernel: Kernel,
) -> f64 {
    match kernel {
        Kernel::Dot => {
            let mut s = 0.0;
            for_each_common(a, b, |f, va, vb| s += weights[f as usize] * va * vb);
            s
        }
        Kernel::Delta => support
            .iter()
            .filter(|&&f| a.get(f) == b.get(f))
            .map(|&f| weights[f as usize])
            .sum(),
    }
}

pub fn internal_consistency(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    weights: &[f64],
    sim: SimilarityKind,
) -> Result<f64> {
    internal_consistency_with(graph, nb, weights, sim, PAIR_CONVENTION)
}

/// `I = Σ_{i,j ∈ C} (A_ij - k_i k_j / 2m) s(x_i, x_j | w)` by direct pair summation.
pub fn internal_consistency_with(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    weights: &[f64],
    sim: SimilarityKind,
    convention: PairConvention,
) -> Result<f64> {
    check_preconditions(graph, nb, sim)?;
    check_weights(graph, weights)?;
    let two_m = graph.two_m();
    let support = supported_attrs(graph, nb.members());
    let kernel = sim.internal();
    let mut total = 0.0;
    for &i in nb.members() {
        for &j in nb.members() {
            if i == j && convention == PairConvention::OffDiagonal {
                continue;
            }
            let a = if graph.has_edge(i, j) { 1.0 } else { 0.0 };
            let coef = a - graph.degree(i) as f64 * graph.degree(j) as f64 / two_m;
            total += coef * similarity(graph.attributes(i), graph.attributes(j), weights, &support, kernel);
        }
    }
    Ok(total)
}

/// `E = -Σ_{cross (i,b)} (1 - min(1, k_i k_b / 2m)) s(x_i, x_b | w)`, always `≤ 0`.
pub fn external_separability(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    weights: &[f64],
    sim: SimilarityKind,
) -> Result<f64> {
    check_preconditions(graph, nb, sim)?;
    check_weights(graph, weights)?;
    let two_m = graph.two_m();
    let support = supported_attrs(graph, nb.members());
    let kernel = sim.external();
    let mut penalty = 0.0;
    for &(i, b) in nb.cross_edges() {
        let pen = surprise(graph.degree(i) as f64, graph.degree(b) as f64, two_m);
        penalty += pen * similarity(graph.attributes(i), graph.attributes(b), weights, &support, kernel);
    }
    Ok(0.0 - penalty)
}

/// `N = I + E` for a fixed weight vector.
pub fn normality(
    graph: &AttributedGraph,
    nb: &Neighborhood,
    weights: &[f64],
    sim: SimilarityKind,
) -> Result<f64> {
    Ok(internal_consistency(graph, nb, weights, sim)? + external_separability(graph, nb, weights, sim)?)
}

/// Size-normalized normality `N̂ = w · (x̂_I + x̂_E)` over all attributes.
pub fn normalized_normality(rv: &RelevanceVector, weights: &[f64]) -> Result<f64> {
    if weights.len() != rv.attribute_count() {
        return Err(AmenError::InvalidWeights(format!(
            "length {} but relevance vector has {} attributes",
            weights.len(),
            rv.attribute_count()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(AmenError::InvalidWeights("weights must be finite and nonnegative".into()));
    }
    let unsupported_x = rv.get(AttrId::MAX).x;
    let mut total = 0.0;
    let mut slot = 0;
    for (f, &w) in weights.iter().enumerate() {
        if slot < rv.attrs.len() && rv.attrs[slot] as usize == f {
            total += w * rv.entry(slot).x;
            slot += 1;
        } else if w != 0.0 {
            total += w * unsupported_x;
        }
    }
    Ok(total)
}
