// Copyright 2026 The nonadditive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Simple undirected graphs on labelled vertices, vertex permutations and
//! graph-state stabilizers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{BinaryVector, PauliOperator};

pub type Label = u32;
pub type Edge = (Label, Label);

/// Simple graph; vertex `i` of `vertices` is qubit `i` of any operator built from it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertices: Vec<Label>,
    adjacency: Vec<BinaryVector>,
}

impl Graph {
    pub fn edgeless(vertices: Vec<Label>) -> Result<Self> {
        let set: BTreeSet<_> = vertices.iter().collect();
        if set.len() != vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex label".into()));
        }
        let n = vertices.len();
        Ok(Self {
            vertices,
            adjacency: vec![BinaryVector::zeros(n); n],
        })
    }

    pub fn new(vertices: Vec<Label>, edges: &[Edge]) -> Result<Self> {
        let mut g = Self::edgeless(vertices)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: Label, b: Label) -> Result<()> {
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop at {a}")));
        }
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        self.adjacency[ia].set(ib, true);
        self.adjacency[ib].set(ia, true);
        Ok(())
    }

    pub fn vertices(&self) -> &[Label] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: Label) -> Result<usize> {
        self.vertices
            .iter()
            .position(|&u| u == v)
            .ok_or(Error::UnknownVertex(v))
    }

    pub fn has_edge(&self, a: Label, b: Label) -> Result<bool> {
        Ok(self.adjacency[self.index_of(a)?].get(self.index_of(b)?))
    }

    /// Neighbourhood of `v` as a mask over vertex positions.
    pub fn neighbor_mask(&self, v: Label) -> Result<&BinaryVector> {
        Ok(&self.adjacency[self.index_of(v)?])
    }

    pub fn neighbors(&self, v: Label) -> Result<Vec<Label>> {
        Ok(self
            .neighbor_mask(v)?
            .iter_ones()
            .map(|i| self.vertices[i])
            .collect())
    }

    /// Edges as `(min, max)` label pairs sorted lexicographically.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (i, row) in self.adjacency.iter().enumerate() {
            for j in row.iter_ones().filter(|&j| j > i) {
                let (a, b) = (self.vertices[i], self.vertices[j]);
                out.push((a.min(b), a.max(b)));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertices.clone(),
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self> {
        let edges: Vec<Edge> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(j.vertices.clone(), &edges)
    }
}

/// Canonical JSON graph: sorted edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<Label>,
    pub edges: Vec<[Label; 2]>,
}

/// Loop graph on labels `1..=n`.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cycle needs n >= 3, got {n}")));
    }
    let n = n as Label;
    let edges: Vec<Edge> = (1..=n).map(|i| (i, i % n + 1)).collect();
    Graph::new((1..=n).collect(), &edges)
}

/// Bijection on vertex labels; labels not listed are fixed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationMap {
    mapping: BTreeMap<Label, Label>,
}

impl PermutationMap {
    pub fn identity(domain: &[Label]) -> Self {
        Self {
            mapping: domain.iter().map(|&v| (v, v)).collect(),
        }
    }

    pub fn from_mapping(mapping: BTreeMap<Label, Label>) -> Result<Self> {
        let image: BTreeSet<_> = mapping.values().collect();
        let domain: BTreeSet<_> = mapping.keys().collect();
        if image != domain {
            return Err(Error::InvalidPermutation("mapping is not a bijection".into()));
        }
        Ok(Self { mapping })
    }

    /// Product of disjoint cycles acting on `domain`.
    pub fn from_cycles(domain: &[Label], cycles: &[&[Label]]) -> Result<Self> {
        let mut mapping: BTreeMap<Label, Label> = domain.iter().map(|&v| (v, v)).collect();
        let mut seen = BTreeSet::new();
        for cyc in cycles {
            for (i, &v) in cyc.iter().enumerate() {
                if !mapping.contains_key(&v) {
                    return Err(Error::InvalidPermutation(format!("{v} outside domain")));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidPermutation(format!("{v} repeated in cycles")));
                }
                mapping.insert(v, cyc[(i + 1) % cyc.len()]);
            }
        }
        Ok(Self { mapping })
    }

    pub fn apply(&self, v: Label) -> Label {
        self.mapping.get(&v).copied().unwrap_or(v)
    }

    pub fn apply_set(&self, set: &BTreeSet<Label>) -> BTreeSet<Label> {
        set.iter().map(|&v| self.apply(v)).collect()
    }

    pub fn domain(&self) -> impl Iterator<Item = Label> + '_ {
        self.mapping.keys().copied()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let keys: BTreeSet<Label> = self.domain().chain(other.domain()).collect();
        Self {
            mapping: keys
                .into_iter()
                .map(|v| (v, self.apply(other.apply(v))))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().all(|(a, b)| a == b)
    }

    pub fn moves(&self, v: Label) -> bool {
        self.apply(v) != v
    }

    fn normalized(&self) -> BTreeMap<Label, Label> {
        self.mapping
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(&a, &b)| (a, b))
            .collect()
    }
}

/// True iff `perm` maps edges to edges.
pub fn is_automorphism(g: &Graph, perm: &PermutationMap) -> Result<bool> {
    let vs: BTreeSet<Label> = g.vertices().iter().copied().collect();
    let dom: BTreeSet<Label> = perm.domain().collect();
    if !dom.is_subset(&vs) {
        return Err(Error::InvalidPermutation(
            "permutation domain differs from vertex set".into(),
        ));
    }
    for (a, b) in g.edges() {
        if !g.has_edge(perm.apply(a), perm.apply(b))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closure of `generators` under composition, identity included.
pub fn close_group(domain: &[Label], generators: &[PermutationMap]) -> Vec<PermutationMap> {
    let id = PermutationMap::identity(domain);
    let mut seen: BTreeSet<BTreeMap<Label, Label>> = BTreeSet::new();
    let mut group = vec![id.clone()];
    seen.insert(id.normalized());
    let mut frontier = vec![id];
    while let Some(p) = frontier.pop() {
        for g in generators {
            let q = g.compose(&p);
            if seen.insert(q.normalized()) {
                group.push(q.clone());
                frontier.push(q);
            }
        }
    }
    group
}

/// Partition of all unordered vertex pairs into orbits of the group generated by `group`.
///
/// Each orbit is sorted, and orbits are ordered by their smallest pair.
pub fn edge_orbits(vertices: &[Label], group: &[PermutationMap]) -> Vec<Vec<Edge>> {
    let closed = close_group(vertices, group);
    let mut assigned: BTreeSet<Edge> = BTreeSet::new();
    let mut orbits = Vec::new();
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            if assigned.contains(&(a, b)) {
                continue;
            }
            let orbit: BTreeSet<Edge> = closed
                .iter()
                .map(|p| {
                    let (x, y) = (p.apply(a), p.apply(b));
                    (x.min(y), x.max(y))
                })
                .collect();
            assigned.extend(orbit.iter().copied());
            orbits.push(orbit.into_iter().collect());
        }
    }
    orbits
}

/// `X_v Z_{N(v)}` with qubit order given by the vertex list.
pub fn graph_state_stabilizer(g: &Graph, v: Label) -> Result<PauliOperator> {
    let i = g.index_of(v)?;
    let x = BinaryVector::from_ones(g.len(), [i])?;
    PauliOperator::from_masks(x, g.neighbor_mask(v)?.clone(), 0)
}

/// The two involutions that fix the 10-vertex seed graph.
pub fn seed_symmetries() -> (PermutationMap, PermutationMap) {
    let dom: Vec<Label> = (0..10).collect();
    let pi = PermutationMap::from_cycles(&dom, &[&[1, 4], &[2, 3], &[6, 9], &[7, 8]]).unwrap();
    let tau = PermutationMap::from_cycles(&dom, &[&[1, 2], &[3, 4], &[6, 7], &[8, 9]]).unwrap();
    (pi, tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_cycle() {
        let g = cycle_graph(9).unwrap();
        assert_eq!(g.edges().len(), 9);
        for v in 1..=9 {
            assert_eq!(g.neighbors(v).unwrap().len(), 2);
        }
        let rot: BTreeMap<Label, Label> = (1..=9).map(|i| (i, (i + 2) % 9 + 1)).collect();
        let rot = PermutationMap::from_mapping(rot).unwrap();
        assert!(is_automorphism(&g, &rot).unwrap());
        assert_eq!(cycle_graph(3).unwrap().edges(), vec![(1, 2), (1, 3), (2, 3)]);
        assert!(cycle_graph(2).is_err());
    }

    #[test]
    fn automorphism_checks() {
        let g = cycle_graph(5).unwrap();
        assert!(is_automorphism(&g, &PermutationMap::identity(g.vertices())).unwrap());
        let swap = PermutationMap::from_cycles(g.vertices(), &[&[1, 2]]).unwrap();
        assert!(!is_automorphism(&g, &swap).unwrap());
        let bad = PermutationMap::from_cycles(&[0, 1], &[&[0, 1]]).unwrap();
        assert!(is_automorphism(&g, &bad).is_err());
        assert!(PermutationMap::from_cycles(&[1, 2], &[&[1, 1]]).is_err());
    }

    #[test]
    fn orbits_of_trivial_group() {
        let vs: Vec<Label> = (0..10).collect();
        let o = edge_orbits(&vs, &[]);
        assert_eq!(o.len(), 45);
        assert!(o.iter().all(|orb| orb.len() == 1));
    }

    /// Brute-force orbit count: union-find over pairs, joining each pair with its images under the generators.
    fn orbit_count_oracle(n: Label, gens: &[PermutationMap]) -> usize {
        let pairs: Vec<Edge> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let idx = |e: Edge| pairs.iter().position(|&p| p == e).unwrap();
        let mut parent: Vec<usize> = (0..pairs.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for &(a, b) in &pairs {
            for g in gens {
                let (x, y) = (g.apply(a), g.apply(b));
                let (i, j) = (idx((a, b)), idx((x.min(y), x.max(y))));
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
        (0..pairs.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    #[test]
    fn orbits_of_seed_group() {
        let (pi, tau) = seed_symmetries();
        let vs: Vec<Label> = (0..10).collect();
        let group = close_group(&vs, &[pi.clone(), tau.clone()]);
        assert_eq!(group.len(), 4);
        let orbits = edge_orbits(&vs, &[pi.clone(), tau.clone()]);
        assert!(orbits.iter().any(|o| o == &vec![(0, 5)]));
        let expected = orbit_count_oracle(10, &[pi, tau]);
        assert_eq!(orbits.len(), expected);
        assert!((12..=45).contains(&orbits.len()));
        // partition: disjoint, covering, closed
        let all: BTreeSet<Edge> = orbits.iter().flatten().copied().collect();
        assert_eq!(all.len(), 45);
        assert_eq!(orbits.iter().map(Vec::len).sum::<usize>(), 45);
        for orb in &orbits {
            for p in &group {
                for &(a, b) in orb {
                    let (x, y) = (p.apply(a), p.apply(b));
                    assert!(orb.contains(&(x.min(y), x.max(y))));
                }
            }
        }
    }

    #[test]
    fn stabilizers() {
        let g = Graph::edgeless(vec![1, 2, 3]).unwrap();
        assert_eq!(graph_state_stabilizer(&g, 2).unwrap().to_string(), "i^0 IXI");
        let c = cycle_graph(9).unwrap();
        assert_eq!(graph_state_stabilizer(&c, 1).unwrap().to_string(), "i^0 XZIIIIIIZ");
        let e = Graph::new(vec![4, 7], &[(4, 7)]).unwrap();
        assert_eq!(graph_state_stabilizer(&e, 4).unwrap().to_string(), "i^0 XZ");
        assert!(graph_state_stabilizer(&e, 5).is_err());
        for g in [c, cycle_graph(10).unwrap()] {
            let stabs: Vec<_> = g
                .vertices()
                .iter()
                .map(|&v| graph_state_stabilizer(&g, v).unwrap())
                .collect();
            for a in &stabs {
                for b in &stabs {
                    assert!(a.commutes(b).unwrap());
                }
            }
        }
    }

    #[test]
    fn json_is_canonical() {
        let g = Graph::new(vec![0, 1, 2], &[(2, 0), (1, 0)]).unwrap();
        let j = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(j, r#"{"vertices":[0,1,2],"edges":[[0,1],[0,2]]}"#);
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
    }
}
