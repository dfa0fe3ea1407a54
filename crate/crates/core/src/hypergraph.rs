//! Hypergraph model of receiver knowledge: one vertex per data packet, one
//! hyperedge per unfinished receiver connecting its undecoded wanted packets.
//! Provides the greedy minimal-vertex-cover heuristic that drives the cover
//! coding scheme, plus exhaustive strong-coloring and perfect-solution oracles
//! for small instances.

use crate::error::Error;
use crate::model::{ReceiverDecoder, Sfm};

const BRUTE_FORCE_VERTEX_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    /// Hyperedges as sorted vertex lists; vertices are packet indices.
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(edges: Vec<Vec<usize>>) -> Self {
        let edges = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e.dedup();
                e
            })
            .filter(|e| !e.is_empty())
            .collect();
        Hypergraph { edges }
    }

    /// One hyperedge per unfinished receiver over its current Wants set.
    pub fn from_states(decoders: &[ReceiverDecoder]) -> Self {
        Hypergraph::new(
            decoders
                .iter()
                .filter(|d| !d.finished())
                .map(|d| d.wants_now())
                .collect(),
        )
    }

    pub fn from_sfm(sfm: &Sfm) -> Self {
        Hypergraph::new((0..sfm.receivers()).map(|n| sfm.wants_of(n)).collect())
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices incident to at least one hyperedge, sorted.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self.edges.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Parses the fixture format: one line per hyperedge, space-separated
    /// 1-based vertex indices; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut edge = Vec::new();
            for tok in line.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| Error::BadHypergraphLine {
                    line: i + 1,
                    reason: format!("not an index: {tok:?}"),
                })?;
                if v == 0 {
                    return Err(Error::BadHypergraphLine {
                        line: i + 1,
                        reason: "vertex indices are 1-based".into(),
                    });
                }
                edge.push(v - 1);
            }
            edges.push(edge);
        }
        Ok(Hypergraph::new(edges))
    }

    /// Emits the fixture format (1-based indices).
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCover {
    cover: Vec<usize>,
}

impl VertexCover {
    pub fn vertices(&self) -> &[usize] {
        &self.cover
    }

    pub fn covers(&self, h: &Hypergraph) -> bool {
        h.edges()
            .iter()
            .all(|e| e.iter().any(|v| self.cover.contains(v)))
    }

    /// True iff some hyperedge meets the cover in exactly one vertex; this is
    /// the instant-decodability witness of a cover-coded packet.
    pub fn has_single_incidence(&self, h: &Hypergraph) -> bool {
        h.edges()
            .iter()
            .any(|e| e.iter().filter(|v| self.cover.contains(v)).count() == 1)
    }
}

/// Greedy minimal vertex cover: repeatedly take the most popular vertex
/// (incident hyperedge count, lowest index on ties), remove it together with
/// the hyperedges it covers, then prune in reverse selection order so that no
/// chosen vertex is redundant.
pub fn minimal_vertex_cover(h: &Hypergraph) -> Result<VertexCover, Error> {
    if h.is_empty() {
        return Err(Error::EmptyHypergraph);
    }
    let mut alive: Vec<&Vec<usize>> = h.edges().iter().collect();
    let mut chosen: Vec<usize> = Vec::new();
    while !alive.is_empty() {
        let mut weight: std::collections::BTreeMap<usize, usize> = Default::default();
        for e in &alive {
            for &v in *e {
                *weight.entry(v).or_insert(0) += 1;
            }
        }
        // BTreeMap iteration is ascending, so `>` keeps the lowest index on ties.
        let (&best, _) = weight
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("nonempty hypergraph has weights");
        chosen.push(best);
        alive.retain(|e| !e.contains(&best));
    }
    // The greedy pass can leave a later vertex covering everything an earlier
    // one did; drop redundant picks so the single-incidence property holds.
    let mut cover = chosen.clone();
    for &v in chosen.iter().rev() {
        let without: Vec<usize> = cover.iter().copied().filter(|&u| u != v).collect();
        let still_covers = h
            .edges()
            .iter()
            .all(|e| e.iter().any(|u| without.contains(u)));
        if still_covers {
            cover = without;
        }
    }
    cover.sort_unstable();
    let cover = VertexCover { cover };
    debug_assert!(cover.covers(h));
    assert!(
        cover.vertices().iter().all(|&v| {
            h.edges()
                .iter()
                .any(|e| e.contains(&v) && e.iter().filter(|u| cover.cover.contains(u)).count() == 1)
        }),
        "cover contains a vertex with no single-incidence witness"
    );
    Ok(cover)
}

/// A partition of the vertices into classes such that no class meets any
/// hyperedge more than once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongColoring {
    pub classes: Vec<Vec<usize>>,
}

impl StrongColoring {
    pub fn is_valid(&self, h: &Hypergraph) -> bool {
        h.edges().iter().all(|e| {
            self.classes
                .iter()
                .all(|class| e.iter().filter(|v| class.contains(v)).count() <= 1)
        })
    }
}

/// Exhaustive size-r strong coloring via backtracking on the primal graph
/// (two vertices conflict iff they share a hyperedge), with canonical color
/// ordering to prune symmetric assignments.
pub fn strong_coloring_bruteforce(
    h: &Hypergraph,
    r: usize,
) -> Result<Option<StrongColoring>, Error> {
    let vertices = h.vertices();
    if vertices.len() > BRUTE_FORCE_VERTEX_LIMIT {
        return Err(Error::TooLarge {
            what: "vertices",
            got: vertices.len(),
            limit: BRUTE_FORCE_VERTEX_LIMIT,
        });
    }
    if r == 0 {
        return Ok(if vertices.is_empty() {
            Some(StrongColoring { classes: vec![] })
        } else {
            None
        });
    }
    let index_of: std::collections::BTreeMap<usize, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // adjacency[i] = bitmask of vertices sharing a hyperedge with i
    let mut adjacency = vec![0u32; vertices.len()];
    for e in h.edges() {
        if e.len() > r {
            // A hyperedge larger than the number of colors can never be
            // strongly colored.
            return Ok(None);
        }
        for &a in e {
            for &b in e {
                if a != b {
                    adjacency[index_of[&a]] |= 1 << index_of[&b];
                }
            }
        }
    }
    let mut color = vec![usize::MAX; vertices.len()];
    let mut class_mask = vec![0u32; r];

    fn assign(
        i: usize,
        used: usize,
        r: usize,
        adjacency: &[u32],
        color: &mut [usize],
        class_mask: &mut [u32],
    ) -> bool {
        if i == adjacency.len() {
            return true;
        }
        // Canonical ordering: vertex i may open at most one new color class.
        let limit = (used + 1).min(r);
        for c in 0..limit {
            if class_mask[c] & adjacency[i] == 0 {
                color[i] = c;
                class_mask[c] |= 1 << i;
                let next_used = used.max(c + 1);
                if assign(i + 1, next_used, r, adjacency, color, class_mask) {
                    return true;
                }
                class_mask[c] &= !(1 << i);
                color[i] = usize::MAX;
            }
        }
        false
    }

    if !assign(0, 0, r, &adjacency, &mut color, &mut class_mask) {
        return Ok(None);
    }
    let mut classes = vec![Vec::new(); r];
    for (i, &v) in vertices.iter().enumerate() {
        classes[color[i]].push(v);
    }
    let coloring = StrongColoring { classes };
    debug_assert!(coloring.is_valid(h));
    Ok(Some(coloring))
}

/// Whether an erasure-free instance whose receivers all want the same number r
/// of packets admits a perfect solution: r ordered coded packets that let every
/// receiver decode one new wanted packet per transmission. Equivalent to the
/// wants-hypergraph having a size-r strong coloring; the color classes are the
/// coding sets.
pub fn perfect_solution_exists(sfm: &Sfm) -> Result<(bool, Vec<Vec<usize>>), Error> {
    let mut r: Option<usize> = None;
    for n in 0..sfm.receivers() {
        let w = sfm.w(n);
        if w == 0 {
            continue;
        }
        match r {
            None => r = Some(w),
            Some(prev) if prev != w => {
                return Err(Error::NonUniformWants { a: prev, b: w })
            }
            _ => {}
        }
    }
    let r = match r {
        None => return Ok((true, Vec::new())),
        Some(r) => r,
    };
    let h = Hypergraph::from_sfm(sfm);
    match strong_coloring_bruteforce(&h, r)? {
        None => Ok((false, Vec::new())),
        Some(coloring) => {
            let sets: Vec<Vec<usize>> = coloring
                .classes
                .into_iter()
                .filter(|c| !c.is_empty())
                .collect();
            Ok((true, sets))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walkthrough_edges() -> Vec<Vec<usize>> {
        vec![vec![0, 3], vec![1, 4], vec![2, 5], vec![0, 1, 2]]
    }

    #[test]
    fn cover_of_walkthrough_initial_state() {
        let h = Hypergraph::new(walkthrough_edges());
        let c = minimal_vertex_cover(&h).unwrap();
        assert_eq!(c.vertices(), &[0, 1, 2]);
        assert!(c.covers(&h));
        assert!(c.has_single_incidence(&h));
    }

    #[test]
    fn cover_of_single_edge_is_lowest_vertex() {
        let h = Hypergraph::new(vec![vec![1]]);
        assert_eq!(minimal_vertex_cover(&h).unwrap().vertices(), &[1]);
        let h2 = Hypergraph::new(vec![vec![1, 2]]);
        assert_eq!(minimal_vertex_cover(&h2).unwrap().vertices(), &[1]);
    }

    #[test]
    fn cover_of_empty_hypergraph_is_an_error() {
        let h = Hypergraph::new(vec![]);
        assert!(matches!(
            minimal_vertex_cover(&h),
            Err(Error::EmptyHypergraph)
        ));
    }

    #[test]
    fn cover_is_minimal_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let vs = rng.gen_range(2..10usize);
            let ne = rng.gen_range(1..8usize);
            let edges: Vec<Vec<usize>> = (0..ne)
                .map(|_| {
                    let size = rng.gen_range(1..=vs.min(4));
                    let mut e: Vec<usize> =
                        (0..size).map(|_| rng.gen_range(0..vs)).collect();
                    e.sort_unstable();
                    e.dedup();
                    e
                })
                .collect();
            let h = Hypergraph::new(edges);
            let c = minimal_vertex_cover(&h).unwrap();
            assert!(c.covers(&h));
            assert!(c.has_single_incidence(&h));
            // Removing any single vertex must break coverage.
            for &v in c.vertices() {
                let without: Vec<usize> =
                    c.vertices().iter().copied().filter(|&u| u != v).collect();
                let still = h
                    .edges()
                    .iter()
                    .all(|e| e.iter().any(|u| without.contains(u)));
                assert!(!still, "vertex {v} is redundant in {:?}", c.vertices());
            }
        }
    }

    #[test]
    fn strong_coloring_three_uniform_cycle() {
        let h = Hypergraph::new(vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]]);
        let coloring = strong_coloring_bruteforce(&h, 3).unwrap().unwrap();
        assert!(coloring.is_valid(&h));
        assert_eq!(coloring.classes.iter().map(|c| c.len()).sum::<usize>(), 6);
    }

    #[test]
    fn triangle_is_not_two_strong_colorable() {
        let h = Hypergraph::new(vec![vec![0, 1], vec![1, 2], vec![2, 0]]);
        assert!(strong_coloring_bruteforce(&h, 2).unwrap().is_none());
        assert!(strong_coloring_bruteforce(&h, 3).unwrap().is_some());
    }

    #[test]
    fn single_edge_colors_one_vertex_per_class() {
        let h = Hypergraph::new(vec![vec![0, 1, 2, 3]]);
        let c = strong_coloring_bruteforce(&h, 4).unwrap().unwrap();
        assert!(c.is_valid(&h));
        assert!(strong_coloring_bruteforce(&h, 3).unwrap().is_none());
    }

    #[test]
    fn oversized_instance_is_refused() {
        let h = Hypergraph::new(vec![(0..25).collect()]);
        assert!(matches!(
            strong_coloring_bruteforce(&h, 25),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn perfect_solution_on_three_uniform_cycle() {
        let sfm = Sfm::from_wants_lists(
            6,
            &[vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]],
        );
        let (ok, sets) = perfect_solution_exists(&sfm).unwrap();
        assert!(ok);
        assert_eq!(sets.len(), 3);
        // Every coding set meets every wants set exactly once.
        for set in &sets {
            for n in 0..3 {
                let wants = sfm.wants_of(n);
                assert_eq!(set.iter().filter(|v| wants.contains(v)).count(), 1);
            }
        }
    }

    #[test]
    fn perfect_solution_refuses_non_uniform_wants() {
        let sfm = Sfm::from_wants_lists(2, &[vec![0], vec![1], vec![0, 1]]);
        assert!(matches!(
            perfect_solution_exists(&sfm),
            Err(Error::NonUniformWants { .. })
        ));
    }

    #[test]
    fn perfect_solution_single_receiver_single_packet() {
        let sfm = Sfm::from_wants_lists(1, &[vec![0]]);
        let (ok, sets) = perfect_solution_exists(&sfm).unwrap();
        assert!(ok);
        assert_eq!(sets, vec![vec![0]]);
    }

    #[test]
    fn fixture_format_round_trips() {
        let text = "1 4\n2 5\n3 6\n1 2 3\n";
        let h = Hypergraph::parse(text).unwrap();
        assert_eq!(h.edges(), &walkthrough_edges()[..]);
        assert_eq!(h.emit(), text);
        assert!(Hypergraph::parse("0 1\n").is_err());
        assert!(Hypergraph::parse("1 x\n").is_err());
    }
}
