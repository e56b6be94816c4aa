//! Brute-force enumeration of labelled graphs on a handful of vertices.

#![allow(dead_code)]

/// Which connected graphs count as components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// every block is a single edge
    Trees,
    /// every block is an edge or a cycle
    Cacti,
    /// every block is a complete graph
    Husimi,
}

pub const FAMILIES: [(Family, &str); 3] =
    [(Family::Trees, "trees"), (Family::Cacti, "cacti"), (Family::Husimi, "husimi")];

struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    fn from_mask(n: usize, pairs: &[(usize, usize)], mask: u32) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        Graph { n, adj }
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    fn components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Edge sets of the blocks (biconnected components), by Tarjan's
    /// algorithm with an edge stack.
    fn blocks(&self) -> Vec<Vec<(usize, usize)>> {
        struct State<'a> {
            g: &'a Graph,
            disc: Vec<usize>,
            low: Vec<usize>,
            time: usize,
            stack: Vec<(usize, usize)>,
            out: Vec<Vec<(usize, usize)>>,
        }
        fn dfs(st: &mut State, u: usize, parent: Option<usize>) {
            st.time += 1;
            st.disc[u] = st.time;
            st.low[u] = st.time;
            for i in 0..st.g.adj[u].len() {
                let v = st.g.adj[u][i];
                if st.disc[v] == 0 {
                    st.stack.push((u, v));
                    dfs(st, v, Some(u));
                    st.low[u] = st.low[u].min(st.low[v]);
                    if st.low[v] >= st.disc[u] {
                        let mut block = Vec::new();
                        while let Some(e) = st.stack.pop() {
                            block.push(e);
                            if e == (u, v) {
                                break;
                            }
                        }
                        st.out.push(block);
                    }
                } else if Some(v) != parent && st.disc[v] < st.disc[u] {
                    st.stack.push((u, v));
                    st.low[u] = st.low[u].min(st.disc[v]);
                }
            }
        }
        let mut st = State {
            g: self,
            disc: vec![0; self.n],
            low: vec![0; self.n],
            time: 0,
            stack: Vec::new(),
            out: Vec::new(),
        };
        for s in 0..self.n {
            if st.disc[s] == 0 {
                dfs(&mut st, s, None);
            }
        }
        st.out
    }

    fn every_block(&self, family: Family) -> bool {
        self.blocks().iter().all(|edges| {
            let mut verts: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            verts.sort_unstable();
            verts.dedup();
            let (m, e) = (verts.len(), edges.len());
            match family {
                Family::Trees => e == 1,
                Family::Cacti => e == 1 || e == m,
                Family::Husimi => {
                    e == m * (m - 1) / 2
                        && verts.iter().enumerate().all(|(i, &a)| {
                            verts[i + 1..].iter().all(|&b| self.has_edge(a, b))
                        })
                }
            }
        })
    }
}

/// `counts[k]` = number of graphs on `{1..n}` with `k` components, all of
/// which belong to the family.
pub fn brute_force_counts(n: usize, family: Family) -> Vec<u64> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    let mut counts = vec![0u64; n + 1];
    for mask in 0u32..(1u32 << pairs.len()) {
        let g = Graph::from_mask(n, &pairs, mask);
        if g.every_block(family) {
            counts[g.components()] += 1;
        }
    }
    counts
}
