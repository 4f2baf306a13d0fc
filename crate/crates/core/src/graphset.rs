//! Partition of the database into connected graphs.
//!
//! Every node belongs to exactly one graph; a graph is identified by its
//! smallest node uid. Edge direction is ignored. Adding an edge merges the
//! smaller graph into the larger; removing one splits its graph by re-adding
//! what remains.

use im::{OrdMap, OrdSet};

use crate::value::Uid;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Graph {
    pub nodes: OrdSet<Uid>,
    pub edges: OrdSet<Uid>,
}

impl Graph {
    pub fn representative(&self) -> Uid {
        *self.nodes.get_min().expect("graphs are never empty")
    }
}

#[derive(Clone, Debug, Default)]
pub struct GraphSet {
    /// Node to component slot. Slots are internal; representatives are public.
    slot: OrdMap<Uid, u64>,
    graphs: OrdMap<u64, Graph>,
    edge_ends: OrdMap<Uid, (Uid, Uid)>,
    next_slot: u64,
}

impl GraphSet {
    pub fn new() -> GraphSet {
        GraphSet::default()
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn contains_node(&self, node: Uid) -> bool {
        self.slot.contains_key(&node)
    }

    pub fn graph_of(&self, node: Uid) -> Option<&Graph> {
        self.slot.get(&node).and_then(|s| self.graphs.get(s))
    }

    pub fn representative(&self, node: Uid) -> Option<Uid> {
        self.graph_of(node).map(Graph::representative)
    }

    /// All graphs ordered by representative.
    pub fn graphs(&self) -> Vec<&Graph> {
        let mut v: Vec<&Graph> = self.graphs.values().collect();
        v.sort_by_key(|g| g.representative());
        v
    }

    pub fn add_node(&mut self, node: Uid) {
        if self.slot.contains_key(&node) {
            return;
        }
        let s = self.next_slot;
        self.next_slot += 1;
        self.slot.insert(node, s);
        self.graphs.insert(s, Graph { nodes: OrdSet::unit(node), edges: OrdSet::new() });
    }

    /// Removes a node together with any edges still attached to it.
    pub fn remove_node(&mut self, node: Uid) {
        let Some(g) = self.graph_of(node).cloned() else { return };
        for e in g.edges.iter() {
            if let Some(&(l, a)) = self.edge_ends.get(e) {
                if l == node || a == node {
                    self.remove_edge(*e);
                }
            }
        }
        if let Some(s) = self.slot.remove(&node) {
            self.graphs.remove(&s);
        }
    }

    pub fn add_edge(&mut self, edge: Uid, leaving: Uid, arriving: Uid) {
        if self.edge_ends.contains_key(&edge) {
            self.remove_edge(edge);
        }
        self.add_node(leaving);
        self.add_node(arriving);
        self.edge_ends.insert(edge, (leaving, arriving));
        let sl = self.slot[&leaving];
        let sa = self.slot[&arriving];
        if sl == sa {
            let mut g = self.graphs[&sl].clone();
            g.edges.insert(edge);
            self.graphs.insert(sl, g);
            return;
        }
        let (big, small) =
            if self.graphs[&sl].nodes.len() >= self.graphs[&sa].nodes.len() { (sl, sa) } else { (sa, sl) };
        let small_g = self.graphs.remove(&small).unwrap();
        let mut big_g = self.graphs[&big].clone();
        for n in small_g.nodes.iter() {
            self.slot.insert(*n, big);
        }
        big_g.nodes = big_g.nodes.union(small_g.nodes);
        big_g.edges = big_g.edges.union(small_g.edges);
        big_g.edges.insert(edge);
        self.graphs.insert(big, big_g);
    }

    pub fn remove_edge(&mut self, edge: Uid) {
        let Some((l, _)) = self.edge_ends.remove(&edge) else { return };
        let s = self.slot[&l];
        let g = self.graphs.remove(&s).unwrap();
        for n in g.nodes.iter() {
            self.slot.remove(n);
        }
        for n in g.nodes.iter() {
            self.add_node(*n);
        }
        for e in g.edges.iter().filter(|e| **e != edge) {
            let (a, b) = self.edge_ends[e];
            self.edge_ends.remove(e);
            self.add_edge(*e, a, b);
        }
    }
}
