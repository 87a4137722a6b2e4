//! Join and split trees merged into a contour tree, then reduced to
//! critical nodes.

use std::cmp::Ordering;

use super::{IngestError, ScalarGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtKind {
    /// The zero region touching the boundary ring.
    Root,
    Extremum,
    Saddle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtNode {
    /// Grid cell, `None` for the root.
    pub cell: Option<usize>,
    pub level: f64,
    pub kind: CtKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourTreeEdge {
    /// Node away from the root.
    pub inner: usize,
    pub outer: usize,
    /// Values of the cells owned by the edge: its regular cells and the
    /// inner node's own cell.
    pub cells: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourTree {
    pub nodes: Vec<CtNode>,
    pub edges: Vec<ContourTreeEdge>,
    pub spacing: f64,
}

impl ContourTree {
    pub fn root(&self) -> usize {
        self.nodes.iter().position(|n| n.kind == CtKind::Root).expect("root node")
    }

    pub fn up_edge(&self, node: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.inner == node)
    }

    pub fn child_edges(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].outer == node).collect()
    }

    /// Cells enclosed by the outer end of `edge`.
    pub fn total_cells(&self, edge: usize) -> usize {
        let e = &self.edges[edge];
        e.cells.len() + self.child_edges(e.inner).iter().map(|&c| self.total_cells(c)).sum::<usize>()
    }

    pub fn count(&self, kind: CtKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Grid with the boundary zero region collapsed into one extra vertex.
struct Collapsed {
    value: Vec<f64>,
    adj: Vec<Vec<usize>>,
    /// Grid cell of each vertex; the last vertex is the root.
    cell: Vec<Option<usize>>,
}

fn collapse(g: &ScalarGrid) -> Collapsed {
    let n = g.len();
    let mut outside = vec![false; n];
    let mut stack: Vec<usize> = (0..n)
        .filter(|&i| {
            let (x, y) = (i % g.width, i / g.width);
            x == 0 || y == 0 || x == g.width - 1 || y == g.height - 1
        })
        .collect();
    for &i in &stack {
        outside[i] = true;
    }
    while let Some(i) = stack.pop() {
        for j in g.neighbors(i) {
            if !outside[j] && g.values[j] == 0.0 {
                outside[j] = true;
                stack.push(j);
            }
        }
    }
    let mut id = vec![usize::MAX; n];
    let mut cell = Vec::new();
    let mut value = Vec::new();
    for i in 0..n {
        if !outside[i] {
            id[i] = cell.len();
            cell.push(Some(i));
            value.push(g.values[i]);
        }
    }
    let root = cell.len();
    cell.push(None);
    value.push(0.0);
    let mut adj = vec![Vec::new(); root + 1];
    for i in 0..n {
        if outside[i] {
            continue;
        }
        for j in g.neighbors(i) {
            let t = if outside[j] { root } else { id[j] };
            if !adj[id[i]].contains(&t) {
                adj[id[i]].push(t);
                if t == root {
                    adj[root].push(id[i]);
                }
            }
        }
    }
    Collapsed { value, adj, cell }
}

fn order(c: &Collapsed, a: usize, b: usize) -> Ordering {
    c.value[a].total_cmp(&c.value[b]).then(a.cmp(&b))
}

/// Merge tree as parent links toward the end of `sequence`.
fn merge_tree(c: &Collapsed, sequence: &[usize]) -> Vec<Option<usize>> {
    let n = c.value.len();
    let mut dsu = Dsu::new(n);
    let mut seen = vec![false; n];
    let mut last = vec![0usize; n];
    let mut parent = vec![None; n];
    for &v in sequence {
        seen[v] = true;
        last[v] = v;
        for &u in &c.adj[v] {
            if !seen[u] {
                continue;
            }
            let (ru, rv) = (dsu.find(u), dsu.find(v));
            if ru != rv {
                parent[last[ru]] = Some(v);
                dsu.parent[ru] = rv;
                last[rv] = v;
            }
        }
    }
    parent
}

struct Tree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    fn new(parent: Vec<Option<usize>>) -> Self {
        let mut children = vec![Vec::new(); parent.len()];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        Tree { parent, children }
    }

    /// Removes `v`, attaching its only child (if any) to its parent.
    fn splice(&mut self, v: usize) {
        let p = self.parent[v].take();
        if let Some(p) = p {
            self.children[p].retain(|&x| x != v);
        }
        debug_assert!(self.children[v].len() <= 1);
        if let Some(c) = self.children[v].pop() {
            self.parent[c] = p;
            if let Some(p) = p {
                self.children[p].push(c);
            }
        }
    }
}

/// Arcs of the full contour tree over collapsed vertices.
fn full_contour_tree(c: &Collapsed) -> Vec<(usize, usize)> {
    let n = c.value.len();
    let mut asc: Vec<usize> = (0..n).collect();
    asc.sort_by(|&a, &b| order(c, a, b));
    let desc: Vec<usize> = asc.iter().rev().copied().collect();
    // join: superlevel components merging downward; split: the reverse
    let mut join = Tree::new(merge_tree(c, &desc));
    let mut split = Tree::new(merge_tree(c, &asc));
    let mut removed = vec![false; n];
    let mut queued = vec![false; n];
    // upper leaf: nothing above in the join tree; lower leaf: the reverse
    let side = |j: &Tree, s: &Tree, v: usize| -> Option<bool> {
        if j.children[v].is_empty() && s.children[v].len() <= 1 && j.parent[v].is_some() {
            Some(true)
        } else if s.children[v].is_empty() && j.children[v].len() <= 1 && s.parent[v].is_some() {
            Some(false)
        } else {
            None
        }
    };
    let mut queue: Vec<usize> = (0..n).filter(|&v| side(&join, &split, v).is_some()).collect();
    for &v in &queue {
        queued[v] = true;
    }
    let mut arcs = Vec::with_capacity(n.saturating_sub(1));
    let mut head = 0;
    while arcs.len() + 1 < n && head < queue.len() {
        let v = queue[head];
        head += 1;
        let Some(upper) = side(&join, &split, v) else {
            queued[v] = false;
            continue;
        };
        let (this, other) = if upper { (&mut join, &mut split) } else { (&mut split, &mut join) };
        let u = this.parent[v].expect("leaf has a parent");
        let (p, ch) = (other.parent[v], other.children[v].first().copied());
        arcs.push((v, u));
        this.splice(v);
        other.splice(v);
        removed[v] = true;
        for w in [Some(u), p, ch].into_iter().flatten() {
            if !removed[w] && !queued[w] && side(&join, &split, w).is_some() {
                queued[w] = true;
                queue.push(w);
            }
        }
    }
    arcs
}

pub fn contour_tree(g: &ScalarGrid) -> Result<ContourTree, IngestError> {
    let c = collapse(g);
    let n = c.value.len();
    let root = n - 1;
    let arcs = full_contour_tree(&c);
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &arcs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut nodes = vec![CtNode { cell: None, level: 0.0, kind: CtKind::Root }];
    let mut edges = Vec::new();
    // walk away from the root; each stack entry is (vertex, previous, outer node)
    let mut stack: Vec<(usize, usize, usize)> = adj[root].iter().map(|&v| (v, root, 0)).collect();
    stack.reverse();
    while let Some((start, from, outer)) = stack.pop() {
        let mut cells = Vec::new();
        let (mut v, mut prev) = (start, from);
        while adj[v].len() == 2 {
            cells.push(c.value[v]);
            let next = if adj[v][0] == prev { adj[v][1] } else { adj[v][0] };
            prev = v;
            v = next;
        }
        let degree = adj[v].len();
        let kind = match degree {
            1 => CtKind::Extremum,
            3 => CtKind::Saddle,
            _ => return Err(IngestError::NonMorseGrid { cell: c.cell[v].unwrap_or(usize::MAX), degree }),
        };
        cells.push(c.value[v]);
        let id = nodes.len();
        nodes.push(CtNode { cell: c.cell[v], level: c.value[v], kind });
        edges.push(ContourTreeEdge { inner: id, outer, cells });
        let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| w != prev).collect();
        next.reverse();
        stack.extend(next.into_iter().map(|w| (w, v, id)));
    }
    Ok(ContourTree { nodes, edges, spacing: g.spacing })
}

/// Removes leaf edges whose level span is below `eps`, smallest first,
/// merging the cells into the surviving edge.
pub fn prune(t: &ContourTree, eps: f64) -> ContourTree {
    let mut t = t.clone();
    loop {
        let cand = (0..t.edges.len())
            .filter(|&e| t.nodes[t.edges[e].inner].kind == CtKind::Extremum && t.nodes[t.edges[e].outer].kind == CtKind::Saddle)
            .map(|e| ((t.nodes[t.edges[e].inner].level - t.nodes[t.edges[e].outer].level).abs(), e))
            .filter(|x| x.0 < eps)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let Some((_, e)) = cand else { break };
        let s = t.edges[e].outer;
        let leaf = t.edges.remove(e);
        let sib = t.child_edges(s)[0];
        let up = t.up_edge(s).expect("saddle has a parent");
        // sibling absorbs the saddle and the parent edge
        let mut cells = std::mem::take(&mut t.edges[sib].cells);
        cells.extend(leaf.cells);
        cells.append(&mut t.edges[up].cells);
        t.edges[sib].cells = cells;
        t.edges[sib].outer = t.edges[up].outer;
        t.edges.remove(up);
        // drop node s and reindex
        t.nodes.remove(s);
        let leaf_node = if leaf.inner > s { leaf.inner - 1 } else { leaf.inner };
        t.nodes.remove(leaf_node);
        let fix = |x: usize| {
            let x = if x > s { x - 1 } else { x };
            if x > leaf_node { x - 1 } else { x }
        };
        for ed in &mut t.edges {
            ed.inner = fix(ed.inner);
            ed.outer = fix(ed.outer);
        }
    }
    t
}
