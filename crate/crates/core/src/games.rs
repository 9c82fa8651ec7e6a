//! Graphs, two-player games and the standard game constructions.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Simple undirected loopless graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    /// Builds a graph from an undirected edge list.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![false; n * n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::BadInput(format!("edge ({i},{j}) out of range for {n} vertices")));
            }
            if i == j {
                return Err(Error::BadInput(format!("loop at vertex {i}")));
            }
            adj[i * n + j] = true;
            adj[j * n + i] = true;
        }
        Ok(Self { n, adj })
    }

    pub fn from_adjacency(n: usize, adj: Vec<bool>) -> Result<Self> {
        if adj.len() != n * n {
            return Err(Error::ShapeMismatch(format!("adjacency of length {} for {n} vertices", adj.len())));
        }
        for i in 0..n {
            if adj[i * n + i] {
                return Err(Error::BadInput(format!("loop at vertex {i}")));
            }
            for j in 0..i {
                if adj[i * n + j] != adj[j * n + i] {
                    return Err(Error::BadInput(format!("adjacency not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { n, adj })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
        }
    }

    /// `K_c`.
    pub fn complete(c: usize) -> Self {
        assert!(c >= 1, "complete graph needs at least one vertex");
        Self::empty(c).complement()
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).filter(|(i, j)| i != j).collect();
        Self::new(n, &edges).expect("cycle edges are valid")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are valid")
    }

    /// Same vertices, complementary edge relation (off the diagonal).
    pub fn complement(&self) -> Self {
        let n = self.n;
        let adj = (0..n * n)
            .map(|idx| idx / n != idx % n && !self.adj[idx])
            .collect();
        Self { n, adj }
    }

    /// Graph with vertex `i` renamed to `sigma[i]`.
    pub fn relabel(&self, sigma: &[usize]) -> Result<Self> {
        crate::densities::check_bijection(sigma)?;
        if sigma.len() != self.n {
            return Err(Error::ShapeMismatch("relabeling has the wrong length".into()));
        }
        let n = self.n;
        let mut adj = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                adj[sigma[i] * n + sigma[j]] = self.adjacent(i, j);
            }
        }
        Ok(Self { n, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacent(i, j))
            .collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| self.adjacent(i, j)).count())
            .collect()
    }

    pub fn adjacency_matrix(&self) -> CMatrix {
        CMatrix::from_real_fn(self.n, self.n, |i, j| if self.adjacent(i, j) { 1.0 } else { 0.0 })
    }

    fn relation(&self, i: usize, j: usize) -> Relation {
        if i == j {
            Relation::Equal
        } else if self.adjacent(i, j) {
            Relation::Adjacent
        } else {
            Relation::Distinct
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    Equal,
    Adjacent,
    Distinct,
}

/// Two-player game with predicate `lambda(x, y, a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    n_a: usize,
    n_b: usize,
    k_a: usize,
    k_b: usize,
    lambda: Vec<bool>,
    input_labels: Option<Vec<String>>,
    output_labels: Option<Vec<String>>,
}

impl Game {
    /// Game whose predicate accepts every tuple.
    pub fn permissive(n_a: usize, n_b: usize, k_a: usize, k_b: usize) -> Self {
        Self {
            n_a,
            n_b,
            k_a,
            k_b,
            lambda: vec![true; n_a * n_b * k_a * k_b],
            input_labels: None,
            output_labels: None,
        }
    }

    pub fn from_fn(n_a: usize, n_b: usize, k_a: usize, k_b: usize, f: impl Fn(usize, usize, usize, usize) -> bool) -> Self {
        let mut g = Self::permissive(n_a, n_b, k_a, k_b);
        for x in 0..n_a {
            for y in 0..n_b {
                for a in 0..k_a {
                    for b in 0..k_b {
                        let i = g.index(x, y, a, b);
                        g.lambda[i] = f(x, y, a, b);
                    }
                }
            }
        }
        g
    }

    /// Game from the list of losing tuples `(x, y, a, b)`.
    pub fn from_zeros(n_a: usize, n_b: usize, k_a: usize, k_b: usize, zeros: &[[usize; 4]]) -> Result<Self> {
        let mut g = Self::permissive(n_a, n_b, k_a, k_b);
        for &[x, y, a, b] in zeros {
            if x >= n_a || y >= n_b || a >= k_a || b >= k_b {
                return Err(Error::ShapeMismatch(format!("zero tuple ({x},{y},{a},{b}) out of range")));
            }
            g.set(x, y, a, b, false);
        }
        Ok(g)
    }

    pub fn with_labels(mut self, inputs: Vec<String>, outputs: Vec<String>) -> Result<Self> {
        if inputs.len() != self.n_a.max(self.n_b) || outputs.len() != self.k_a.max(self.k_b) {
            return Err(Error::ShapeMismatch("label count does not match the game".into()));
        }
        self.input_labels = Some(inputs);
        self.output_labels = Some(outputs);
        Ok(self)
    }

    #[inline]
    fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.n_b + y) * self.k_a + a) * self.k_b + b
    }

    pub fn lambda(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        self.lambda[self.index(x, y, a, b)]
    }

    pub fn set(&mut self, x: usize, y: usize, a: usize, b: usize, value: bool) {
        let i = self.index(x, y, a, b);
        self.lambda[i] = value;
    }

    /// `(nA, nB, kA, kB)`.
    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.n_a, self.n_b, self.k_a, self.k_b)
    }

    pub fn input_labels(&self) -> Option<&[String]> {
        self.input_labels.as_deref()
    }

    pub fn output_labels(&self) -> Option<&[String]> {
        self.output_labels.as_deref()
    }

    /// Losing tuples in lexicographic `(x, y, a, b)` order.
    pub fn zeros(&self) -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for x in 0..self.n_a {
            for y in 0..self.n_b {
                for a in 0..self.k_a {
                    for b in 0..self.k_b {
                        if !self.lambda(x, y, a, b) {
                            out.push([x, y, a, b]);
                        }
                    }
                }
            }
        }
        out
    }

    fn square(&self) -> bool {
        self.n_a == self.n_b && self.k_a == self.k_b
    }

    /// Identical questions force identical answers: `lambda(v, v, a, b) = 0`
    /// for `a != b`.
    pub fn is_synchronous(&self) -> bool {
        self.square()
            && (0..self.n_a).all(|v| {
                (0..self.k_a).all(|a| (0..self.k_b).all(|b| a == b || !self.lambda(v, v, a, b)))
            })
    }

    /// Literal form that additionally requires `lambda(v, v, a, a) = 1`.
    pub fn is_synchronous_strict(&self) -> bool {
        self.is_synchronous() && (0..self.n_a).all(|v| (0..self.k_a).all(|a| self.lambda(v, v, a, a)))
    }

    /// Synchronous, and distinct questions force distinct answers.
    pub fn is_bisynchronous(&self) -> bool {
        self.is_synchronous()
            && (0..self.n_a).all(|x| {
                (0..self.n_b).all(|y| x == y || (0..self.k_a).all(|a| !self.lambda(x, y, a, a)))
            })
    }

    /// True iff the deterministic strategy `x -> f[x]` never loses.
    pub fn accepts_deterministic(&self, f: &[usize]) -> bool {
        assert!(self.square() && f.len() == self.n_a, "deterministic strategy needs a square game");
        (0..self.n_a).all(|x| (0..self.n_b).all(|y| self.lambda(x, y, f[x], f[y])))
    }

    /// Inputs and outputs exchanged: `flip(a, b, x, y) = lambda(x, y, a, b)`.
    pub fn flip(&self) -> Game {
        let mut g = Game::from_fn(self.k_a, self.k_b, self.n_a, self.n_b, |a, b, x, y| self.lambda(x, y, a, b));
        g.input_labels = self.output_labels.clone();
        g.output_labels = self.input_labels.clone();
        g
    }

    /// Bisynchronous game that also asks for the question back: outputs are
    /// pairs `(x', a)` encoded as `x' * k + a`.
    pub fn bisync_lift(&self) -> Result<Game> {
        if !self.is_synchronous() {
            return Err(Error::NotSynchronous);
        }
        let (n, k) = (self.n_a, self.k_a);
        Ok(Game::from_fn(n, n, n * k, n * k, |x, y, oa, ob| {
            let (xp, a) = (oa / k, oa % k);
            let (yp, b) = (ob / k, ob % k);
            xp == x && yp == y && self.lambda(x, y, a, b)
        }))
    }
}

/// Graph homomorphism game `Hom(G, H)`.
pub fn hom_game(g: &Graph, h: &Graph) -> Game {
    Game::from_fn(g.n(), g.n(), h.n(), h.n(), |x, y, a, b| {
        let same_question_split = x == y && a != b;
        let edge_broken = g.adjacent(x, y) && !h.adjacent(a, b);
        !(same_question_split || edge_broken)
    })
}

/// Graph isomorphism game `Iso(G, H)` on the disjoint union of the vertex
/// sets. Vertex `i < |G|` is `G:i`, vertex `|G| + j` is `H:j`.
pub fn iso_game(g: &Graph, h: &Graph) -> Game {
    let ng = g.n();
    let total = ng + h.n();
    let in_g = |v: usize| v < ng;
    // (G-vertex, H-vertex) of a question/answer pair in opposite graphs
    let split = |q: usize, r: usize| if in_g(q) { (q, r - ng) } else { (r, q - ng) };
    let game = Game::from_fn(total, total, total, total, |x, y, a, b| {
        if in_g(x) == in_g(a) || in_g(y) == in_g(b) {
            return false;
        }
        let (ga, ha) = split(x, a);
        let (gb, hb) = split(y, b);
        g.relation(ga, gb) == h.relation(ha, hb)
    });
    let labels: Vec<String> = (0..total)
        .map(|v| if in_g(v) { format!("G:{v}") } else { format!("H:{}", v - ng) })
        .collect();
    game.with_labels(labels.clone(), labels).expect("labels sized to the vertex union")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_functions(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
        (0..k.pow(n as u32)).map(move |mut code| {
            (0..n)
                .map(|_| {
                    let v = code % k;
                    code /= k;
                    v
                })
                .collect()
        })
    }

    fn all_permutations(n: usize) -> Vec<Vec<usize>> {
        all_functions(n, n)
            .filter(|f| {
                let mut seen = vec![false; n];
                f.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
            })
            .collect()
    }

    #[test]
    fn hom_games_classification() {
        let k3 = Graph::complete(3);
        let c5 = Graph::cycle(5);
        assert!(hom_game(&k3, &k3).is_synchronous());
        assert!(hom_game(&k3, &c5).is_bisynchronous());
        assert!(!hom_game(&c5, &k3).is_bisynchronous());
        assert!(hom_game(&c5, &k3).is_synchronous());
    }

    #[test]
    fn hom_k2_k2_entries() {
        let g = hom_game(&Graph::complete(2), &Graph::complete(2));
        assert!(!g.lambda(0, 1, 0, 0));
        assert!(g.lambda(0, 1, 0, 1));
    }

    #[test]
    fn k3_is_not_two_colorable() {
        let g = hom_game(&Graph::complete(3), &Graph::complete(2));
        assert_eq!(all_functions(3, 2).count(), 8);
        assert!(all_functions(3, 2).all(|f| !g.accepts_deterministic(&f)));
    }

    #[test]
    fn non_synchronous_game() {
        let mut g = Game::from_fn(2, 2, 2, 2, |x, y, a, b| x != y || a == b);
        assert!(g.is_synchronous());
        g.set(0, 0, 0, 1, true);
        assert!(!g.is_synchronous());
    }

    #[test]
    fn strict_synchronous_needs_diagonal_ones() {
        let mut g = hom_game(&Graph::complete(3), &Graph::complete(3));
        assert!(g.is_synchronous_strict());
        g.set(1, 1, 2, 2, false);
        assert!(g.is_synchronous() && !g.is_synchronous_strict());
    }

    #[test]
    fn iso_game_rules() {
        let c5 = Graph::cycle(5);
        let g = iso_game(&c5, &c5);
        assert!(g.is_synchronous());
        assert!(g.is_bisynchronous());
        // identity relabeling: G:i -> H:i and H:j -> G:j
        let f: Vec<usize> = (0..10).map(|v| (v + 5) % 10).collect();
        assert!(g.accepts_deterministic(&f));
        let labels = g.input_labels().unwrap();
        assert_eq!(labels[0], "G:0");
        assert_eq!(labels[7], "H:2");
    }

    #[test]
    fn iso_game_single_vertex() {
        let k1 = Graph::complete(1);
        let g = iso_game(&k1, &k1);
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let opposite = (x != a) && (y != b);
                        assert_eq!(g.lambda(x, y, a, b), opposite);
                    }
                }
            }
        }
    }

    #[test]
    fn flip_is_involution_and_preserves_bisync() {
        let g = hom_game(&Graph::complete(3), &Graph::cycle(5));
        assert_eq!(g.flip().flip(), g);
        assert!(g.flip().is_bisynchronous());
        let h = hom_game(&Graph::cycle(5), &Graph::complete(3));
        assert!(!h.flip().is_bisynchronous());
    }

    #[test]
    fn flip_of_complete_into_path_has_dead_question() {
        let flipped = hom_game(&Graph::complete(3), &Graph::path(3)).flip();
        // vertices 0 and 2 of P_3 are distinct and non-adjacent
        assert!((0..3).all(|a| (0..3).all(|b| !flipped.lambda(0, 2, a, b))));
    }

    #[test]
    fn lift_is_bisynchronous_and_lifts_strategies() {
        let g = hom_game(&Graph::cycle(5), &Graph::complete(3));
        let lift = g.bisync_lift().unwrap();
        assert!(lift.is_bisynchronous());
        assert_eq!(lift.shape(), (5, 5, 15, 15));
        let coloring = [0, 1, 0, 1, 2];
        assert!(g.accepts_deterministic(&coloring));
        let lifted: Vec<usize> = coloring.iter().enumerate().map(|(x, &c)| x * 3 + c).collect();
        assert!(lift.accepts_deterministic(&lifted));
    }

    #[test]
    fn lift_rejects_non_synchronous() {
        let g = Game::permissive(2, 2, 2, 2);
        assert_eq!(g.bisync_lift(), Err(Error::NotSynchronous));
    }

    #[test]
    fn complements() {
        let c5 = Graph::cycle(5);
        assert_eq!(c5.complement().complement(), c5);
        assert_eq!(Graph::complete(3).complement(), Graph::empty(3));
        // the pentagram is a pentagon: some relabeling maps C5 onto its complement
        let comp = c5.complement();
        let perms = all_permutations(5);
        assert_eq!(perms.len(), 120);
        assert!(perms.iter().any(|s| c5.relabel(s).unwrap() == comp));
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, &[(0, 0)]).is_err());
        assert!(Graph::new(3, &[(0, 3)]).is_err());
        assert!(Graph::from_adjacency(2, vec![false, true, false, false]).is_err());
    }
}
