//! Maximum clique by branch and bound with greedy colouring bounds.

pub(crate) struct BitGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl BitGraph {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self { n, words, adj: vec![0; n * words] }
    }

    pub(crate) fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i * self.words + j / 64] |= 1 << (j % 64);
        self.adj[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn degree(&self, i: usize) -> u32 {
        self.adj[i * self.words..(i + 1) * self.words].iter().map(|w| w.count_ones()).sum()
    }
}

pub(crate) struct CliqueOutcome {
    /// Sorted vertex indices.
    pub members: Vec<usize>,
    /// False when the node budget ran out; `members` is then only a lower bound.
    pub exhaustive: bool,
}

struct Search<'a> {
    g: &'a BitGraph,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    /// Orders `p` by colour class; `colors[i]` bounds the clique size within `order[..=i]`.
    fn colour_sort(&self, p: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in p {
            match classes.iter_mut().find(|c| c.iter().all(|&u| !self.g.has_edge(u, v))) {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(p.len());
        let mut colors = Vec::with_capacity(p.len());
        for (k, c) in classes.into_iter().enumerate() {
            for v in c {
                order.push(v);
                colors.push(k + 1);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, r: &mut Vec<usize>, p: &[usize]) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let (order, colors) = self.colour_sort(p);
        for i in (0..order.len()).rev() {
            if r.len() + colors[i] <= self.best.len() {
                return;
            }
            let v = order[i];
            r.push(v);
            let next: Vec<usize> = order[..i].iter().copied().filter(|&w| self.g.has_edge(v, w)).collect();
            if next.is_empty() {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
            } else {
                self.expand(r, &next);
            }
            r.pop();
            if self.aborted {
                return;
            }
        }
    }
}

fn greedy(g: &BitGraph, order: &[usize]) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for &start in order.iter().take(64) {
        let mut c = vec![start];
        for &v in order {
            if v != start && c.iter().all(|&u| g.has_edge(u, v)) {
                c.push(v);
            }
        }
        if c.len() > best.len() {
            best = c;
        }
    }
    best
}

pub(crate) fn max_clique(g: &BitGraph, node_budget: u64) -> CliqueOutcome {
    if g.n == 0 {
        return CliqueOutcome { members: Vec::new(), exhaustive: true };
    }
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut s = Search { g, best: greedy(g, &order), nodes: 0, budget: node_budget, aborted: false };
    // colour_sort consumes vertices from the back
    order.reverse();
    s.expand(&mut Vec::new(), &order);
    let mut members = s.best;
    members.sort_unstable();
    CliqueOutcome { members, exhaustive: !s.aborted }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(g: &BitGraph) -> usize {
        (0u32..1 << g.n)
            .filter(|&m| {
                let vs: Vec<usize> = (0..g.n).filter(|&i| m >> i & 1 == 1).collect();
                vs.iter().enumerate().all(|(a, &i)| vs[a + 1..].iter().all(|&j| g.has_edge(i, j)))
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_graphs() {
        let mut g = BitGraph::new(6);
        for (i, j) in [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5), (2, 4)] {
            g.add_edge(i, j);
        }
        let c = max_clique(&g, u64::MAX);
        assert!(c.exhaustive);
        assert_eq!(c.members.len(), 3);
        assert_eq!(brute(&g), 3);
        assert_eq!(max_clique(&BitGraph::new(4), 100).members.len(), 1);
    }

    #[test]
    fn matches_brute_force_on_pseudo_random_graphs() {
        let mut state: u64 = 0x9e3779b97f4a7c15;
        for _ in 0..40 {
            let n = 12;
            let mut g = BitGraph::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if state >> 62 != 0 {
                        g.add_edge(i, j);
                    }
                }
            }
            let c = max_clique(&g, u64::MAX);
            assert_eq!(c.members.len(), brute(&g));
            assert!(c.members.iter().enumerate().all(|(a, &i)| c.members[a + 1..].iter().all(|&j| g.has_edge(i, j))));
        }
    }
}
