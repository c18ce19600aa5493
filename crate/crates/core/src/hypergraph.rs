//! Hypergraphs, their entanglement structures `t_H`, and groupings of
//! vertices.
//!
//! Packing convention for `t_H`: the factor of vertex `v` is the row-major
//! product of the local spaces of its incidences, ordered by the position
//! of `v` inside the edge and then by edge index. Vertices without
//! incidences get dimension 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{for_each_product, pack, GroupingSpec, Index, Tensor};

/// Upper limit on `∏ nnz(t_e)` for [`build_structure`].
pub const MAX_STRUCTURE_ENTRIES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::InvalidParameter(format!("edge {i} is empty")));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertices) {
                return Err(Error::InvalidParameter(format!("edge {i} uses vertex {v} of {vertices}")));
            }
            let mut sorted = e.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != e.len() {
                return Err(Error::InvalidParameter(format!("edge {i} = {e:?} repeats a vertex")));
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Common edge size, if all edges have the same size.
    pub fn uniformity(&self) -> Option<usize> {
        let k = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == k).then_some(k)
    }

    /// `(position in edge, edge index)` for every vertex, in packing order.
    pub fn incidences(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.vertices];
        for (ei, e) in self.edges.iter().enumerate() {
            for (pos, &v) in e.iter().enumerate() {
                out[v].push((pos, ei));
            }
        }
        for list in &mut out {
            list.sort_unstable();
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    pub fn to_json(&self) -> Value {
        json!({"vertices": self.vertices, "edges": self.edges})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let vertices = v
            .get("vertices")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("hypergraph without `vertices`".into()))? as usize;
        let edges: Vec<Vec<usize>> = serde_json::from_value(
            v.get("edges").cloned().ok_or_else(|| Error::Parse("hypergraph without `edges`".into()))?,
        )?;
        Self::new(vertices, edges)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Disjoint,
    Strassen,
    Triangular,
    Kagome,
    Fan,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "disjoint" => Self::Disjoint,
            "strassen" => Self::Strassen,
            "triangular" => Self::Triangular,
            "kagome" => Self::Kagome,
            "fan" => Self::Fan,
            other => return Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Disjoint => "disjoint",
            Self::Strassen => "strassen",
            Self::Triangular => "triangular",
            Self::Kagome => "kagome",
            Self::Fan => "fan",
        })
    }
}

/// Lattice cells `(i, j)` with `i, j ≥ 0`, in shells `max(i, j) = s`,
/// row-major inside each shell.
fn shell_cells() -> impl Iterator<Item = (i64, i64)> {
    (0i64..).flat_map(|s| (0..=s).flat_map(move |i| (0..=s).filter(move |&j| i.max(j) == s).map(move |j| (i, j))))
}

/// Number vertex keys by first appearance.
fn number_edges<K: Eq + std::hash::Hash + Clone>(keyed: Vec<Vec<K>>) -> Hypergraph {
    let mut ids: HashMap<K, usize> = HashMap::new();
    let edges = keyed
        .into_iter()
        .map(|e| {
            e.into_iter()
                .map(|k| {
                    let next = ids.len();
                    *ids.entry(k).or_insert(next)
                })
                .collect()
        })
        .collect();
    Hypergraph { vertices: ids.len(), edges }
}

/// Up-triangles of the triangular lattice, one per cell. Each edge lists
/// its vertices by the 3-colouring `(i + 2j) mod 3`, colour 0 first.
fn triangular(n: usize) -> Hypergraph {
    let keyed = shell_cells()
        .take(n)
        .map(|(i, j)| {
            let mut tri = [(i, j), (i + 1, j), (i, j + 1)];
            tri.sort_by_key(|&(a, b)| (a + 2 * b).rem_euclid(3));
            tri.to_vec()
        })
        .collect();
    number_edges(keyed)
}

/// Kagome triangles: per cell `R` the up triangle `(A_R, B_R, C_R)` and then
/// the down triangle `(A_R, B_{R−a₁}, C_{R−a₂})`, listed by sublattice.
fn kagome(n: usize) -> Hypergraph {
    let keyed = shell_cells()
        .flat_map(|(x, y)| {
            [
                vec![(0u8, x, y), (1, x, y), (2, x, y)],
                vec![(0u8, x, y), (1, x - 1, y), (2, x, y - 1)],
            ]
        })
        .take(n)
        .collect();
    number_edges(keyed)
}

pub fn make_family(family: Family, n: usize, k: usize) -> Result<Hypergraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("families need n ≥ 1 edges".into()));
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("edge size k={k} must be at least 2")));
    }
    let needs_three = matches!(family, Family::Triangular | Family::Kagome | Family::Fan);
    if needs_three && k != 3 {
        return Err(Error::InvalidParameter(format!("the {family} family is 3-uniform, got k={k}")));
    }
    Ok(match family {
        Family::Disjoint => Hypergraph { vertices: k * n, edges: (0..n).map(|i| (k * i..k * i + k).collect()).collect() },
        Family::Strassen => Hypergraph { vertices: k, edges: vec![(0..k).collect(); n] },
        Family::Triangular => triangular(n),
        Family::Kagome => kagome(n),
        Family::Fan => Hypergraph { vertices: n + 2, edges: (0..n).map(|i| vec![0, 1, 2 + i]).collect() },
    })
}

/// One tensor per hyperedge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeAssignment<S> {
    tensors: Vec<Tensor<S>>,
}

impl<S: Scalar> EdgeAssignment<S> {
    pub fn per_edge(tensors: Vec<Tensor<S>>) -> Self {
        Self { tensors }
    }

    /// The same tensor on all `edges` edges.
    pub fn broadcast(t: &Tensor<S>, edges: usize) -> Self {
        Self { tensors: vec![t.clone(); edges] }
    }

    pub fn tensors(&self) -> &[Tensor<S>] {
        &self.tensors
    }

    fn check(&self, h: &Hypergraph) -> Result<()> {
        if self.tensors.len() != h.edge_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} tensors for {} edges",
                self.tensors.len(),
                h.edge_count()
            )));
        }
        for (t, e) in self.tensors.iter().zip(h.edges()) {
            if t.order() != e.len() {
                return Err(Error::OrderMismatch(e.len(), t.order()));
            }
        }
        Ok(())
    }

    /// Dimension of vertex `v`'s factor given its incidences.
    fn vertex_dims(&self, inc: &[Vec<(usize, usize)>]) -> Vec<usize> {
        inc.iter().map(|list| list.iter().map(|&(pos, e)| self.tensors[e].dims()[pos]).product()).collect()
    }
}

/// `t_H`: the tensor product of the edge tensors with each vertex's local
/// spaces merged into one factor.
pub fn build_structure<S: Scalar>(h: &Hypergraph, a: &EdgeAssignment<S>) -> Result<Tensor<S>> {
    a.check(h)?;
    let potential = a.tensors.iter().try_fold(1usize, |acc, t| acc.checked_mul(t.nnz()));
    if potential.is_none_or(|p| p > MAX_STRUCTURE_ENTRIES) {
        return Err(Error::TooLarge(format!("structure tensor would exceed {MAX_STRUCTURE_ENTRIES} entries")));
    }
    let inc = h.incidences();
    let dims = a.vertex_dims(&inc);
    let entry_lists: Vec<Vec<(&Index, &S)>> = a.tensors.iter().map(|t| t.entries().collect()).collect();
    let mut out = Tensor::zeros(dims)?;
    for_each_product(&entry_lists, |choice| {
        let idx: Index = inc
            .iter()
            .map(|list| pack(list.iter().map(|&(pos, e)| (choice[e].0[pos], a.tensors[e].dims()[pos]))))
            .collect();
        let v = choice.iter().skip(1).fold(choice[0].1.clone(), |acc, (_, x)| acc.mul(x));
        out.accumulate(idx, &v);
    });
    Ok(out)
}

/// Surjective vertex map `source → target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupingMap {
    pub map: Vec<usize>,
}

impl GroupingMap {
    pub fn new(map: Vec<usize>) -> Self {
        Self { map }
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    pub fn target_count(&self) -> usize {
        self.map.iter().max().map_or(0, |m| m + 1)
    }

    pub fn to_json(&self) -> Value {
        json!({"map": self.map})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let map = serde_json::from_value(v.get("map").cloned().ok_or_else(|| Error::Parse("missing `map`".into()))?)?;
        Ok(Self { map })
    }

    fn image(&self, e: &[usize]) -> Vec<usize> {
        e.iter().map(|&v| self.map[v]).collect()
    }
}

/// Whether `g` sends every edge of `source` to an edge of `target` with
/// distinct vertices.
pub fn is_homomorphism(source: &Hypergraph, target: &Hypergraph, g: &GroupingMap) -> bool {
    if g.map.len() != source.vertex_count() || g.map.iter().any(|&u| u >= target.vertex_count()) {
        return false;
    }
    source.edges().iter().all(|e| {
        let img = g.image(e);
        let mut sorted = img.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == img.len() && target.edges().contains(&img)
    })
}

/// How the factors of `t_{H̃}` are regrouped into those of `t_H` after a fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedGrouping {
    source: Hypergraph,
    map: Vec<usize>,
    targets: usize,
}

impl InducedGrouping {
    /// Regroup `t = build_structure(source, a)` into
    /// `build_structure(fold(source), a)`.
    pub fn apply<S: Scalar>(&self, t: &Tensor<S>, a: &EdgeAssignment<S>) -> Result<Tensor<S>> {
        a.check(&self.source)?;
        let inc = self.source.incidences();
        if t.dims() != a.vertex_dims(&inc) {
            return Err(Error::ShapeMismatch(format!(
                "tensor dims {:?} do not match the structure of the source hypergraph",
                t.dims()
            )));
        }
        // Split every vertex factor into one factor per incidence (or a
        // single dimension-1 placeholder) and remember what each one is.
        let mut parts = Vec::with_capacity(inc.len());
        let mut labels: Vec<(usize, Option<(usize, usize)>)> = Vec::new();
        for (v, list) in inc.iter().enumerate() {
            if list.is_empty() {
                parts.push(vec![1]);
                labels.push((self.map[v], None));
            } else {
                parts.push(list.iter().map(|&(pos, e)| a.tensors[e].dims()[pos]).collect());
                labels.extend(list.iter().map(|&i| (self.map[v], Some(i))));
            }
        }
        let split = t.split(&parts)?;
        let mut blocks: Vec<Vec<(Option<(usize, usize)>, usize)>> = vec![Vec::new(); self.targets];
        for (slot, (u, label)) in labels.into_iter().enumerate() {
            blocks[u].push((label, slot));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                // Incidences in packing order, placeholders last.
                b.sort_by_key(|(label, slot)| (label.is_none(), *label, *slot));
                b.into_iter().map(|(_, slot)| slot).collect()
            })
            .collect();
        split.group(&GroupingSpec::new(blocks))
    }
}

/// Image of `h` under `g`, edge order and multiplicity preserved, with the
/// induced factor regrouping.
pub fn fold(h: &Hypergraph, g: &GroupingMap) -> Result<(Hypergraph, InducedGrouping)> {
    if g.map.len() != h.vertex_count() {
        return Err(Error::NotHomomorphism(format!(
            "map has {} entries for {} vertices",
            g.map.len(),
            h.vertex_count()
        )));
    }
    let targets = g.target_count();
    let mut hit = vec![false; targets];
    for &u in &g.map {
        hit[u] = true;
    }
    if let Some(u) = hit.iter().position(|x| !x) {
        return Err(Error::NotHomomorphism(format!("target vertex {u} has no preimage")));
    }
    let edges: Vec<Vec<usize>> = h.edges().iter().map(|e| g.image(e)).collect();
    let image = Hypergraph::new(targets, edges).map_err(|e| Error::NotHomomorphism(e.to_string()))?;
    Ok((image, InducedGrouping { source: h.clone(), map: g.map.clone(), targets }))
}

/// A fold of a lattice patch onto a fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanFolding {
    pub source: Hypergraph,
    pub fan: Hypergraph,
    pub map: GroupingMap,
    /// Source edges landing on each fan feather.
    pub covering: usize,
}

/// Fold size: every feather is covered exactly this many times.
pub const FAN_COVERING: usize = 6;

/// Split `items` (vertex, degree) into bins of degree sum exactly `cap`.
fn exact_bins(items: &[(usize, usize)], cap: usize) -> Option<Vec<usize>> {
    fn go(items: &[(usize, usize)], i: usize, loads: &mut Vec<usize>, assign: &mut [usize], cap: usize) -> bool {
        if i == items.len() {
            return loads.iter().all(|&l| l == cap);
        }
        let w = items[i].1;
        let mut tried_empty = false;
        for b in 0..loads.len() {
            if loads[b] + w > cap || (loads[b] == 0 && std::mem::replace(&mut tried_empty, true)) {
                continue;
            }
            loads[b] += w;
            assign[i] = b;
            if go(items, i + 1, loads, assign, cap) {
                return true;
            }
            loads[b] -= w;
        }
        false
    }
    let total: usize = items.iter().map(|x| x.1).sum();
    if !total.is_multiple_of(cap) {
        return None;
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(items[i].1));
    let sorted: Vec<(usize, usize)> = order.iter().map(|&i| items[i]).collect();
    let mut loads = vec![0; total / cap];
    let mut assign = vec![0; items.len()];
    if !go(&sorted, 0, &mut loads, &mut assign, cap) {
        return None;
    }
    let mut out = vec![0; items.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = assign[k];
    }
    Some(out)
}

/// Fold the `n`-edge triangular or kagome patch onto a fan.
///
/// Vertices in edge position 0 (colour 0, or sublattice A) go to the first
/// hub, position 1 to the second hub, and position-2 vertices are grouped
/// into leaves whose degrees sum to [`FAN_COVERING`]. Needs `n` to be a
/// multiple of the covering.
pub fn fold_to_fan(family: Family, n: usize) -> Result<FanFolding> {
    if !matches!(family, Family::Triangular | Family::Kagome) {
        return Err(Error::InvalidParameter(format!("no fan folding for the {family} family")));
    }
    if !n.is_multiple_of(FAN_COVERING) {
        return Err(Error::InvalidParameter(format!(
            "a {n}-edge patch cannot cover fan feathers exactly {FAN_COVERING} times"
        )));
    }
    let source = make_family(family, n, 3)?;
    let leaves: Vec<(usize, usize)> = (0..source.vertex_count())
        .filter(|&v| source.edges().iter().any(|e| e[2] == v))
        .map(|v| (v, source.degree(v)))
        .collect();
    let bins = exact_bins(&leaves, FAN_COVERING).ok_or_else(|| {
        Error::InvalidParameter(format!("the {n}-edge {family} patch has no exact {FAN_COVERING}-fold leaf grouping"))
    })?;
    let leaf_bin: BTreeMap<usize, usize> = leaves.iter().zip(&bins).map(|(&(v, _), &b)| (v, b)).collect();
    let mut map = vec![usize::MAX; source.vertex_count()];
    for e in source.edges() {
        map[e[0]] = 0;
        map[e[1]] = 1;
        map[e[2]] = 2 + leaf_bin[&e[2]];
    }
    let map = GroupingMap::new(map);
    let fan = make_family(Family::Fan, n / FAN_COVERING, 3)?;
    if !is_homomorphism(&source, &fan, &map) {
        return Err(Error::NotHomomorphism(format!("{family} patch does not fold onto the fan")));
    }
    let (image, _) = fold(&source, &map)?;
    let covering = fan.edges().iter().map(|f| image.edges().iter().filter(|e| *e == f).count()).min().unwrap_or(0);
    Ok(FanFolding { source, fan, map, covering })
}

/// Write `H_n` as a grouping of `⌊n/n₀⌋` disjoint copies of `H_{n₀}` plus a
/// remainder `H_{n mod n₀}`. Only for the disjoint and Strassen families.
pub fn subadditive_split(family: Family, n: usize, n0: usize, k: usize) -> Result<(Hypergraph, GroupingMap)> {
    if n0 == 0 || n0 > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ n₀={n0} ≤ n={n}")));
    }
    if !matches!(family, Family::Disjoint | Family::Strassen) {
        return Err(Error::InvalidParameter(format!("subadditive splitting is not provided for the {family} family")));
    }
    let mut pieces = vec![n0; n / n0];
    if !n.is_multiple_of(n0) {
        pieces.push(n % n0);
    }
    let (mut vertices, mut edges, mut map) = (0, Vec::new(), Vec::new());
    let mut edge_offset = 0;
    for &m in &pieces {
        let part = make_family(family, m, k)?;
        edges.extend(part.edges().iter().map(|e| e.iter().map(|v| v + vertices).collect::<Vec<_>>()));
        map.extend((0..part.vertex_count()).map(|v| match family {
            Family::Strassen => v,
            _ => v + k * edge_offset,
        }));
        vertices += part.vertex_count();
        edge_offset += m;
    }
    Ok((Hypergraph::new(vertices, edges)?, GroupingMap::new(map)))
}
