use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::{embed_with_complement, AmbientSpace, TreeError, VertexLattice, VertexType};
use crate::lattice::{invariants, jordan_form, Block, Gram, Matrix};
use crate::local_ring::{RingConfig, Q};

/// Cap on the number of vertices a support enumeration may visit.
pub const SUPPORT_BUDGET: usize = 50_000;

/// Vertex lattices `Λ` with `L ⊆ Λ^♯`, their incidences, boundary and skeleton.
#[derive(Clone, Debug)]
pub struct SupportSet {
    pub v0: Vec<VertexLattice>,
    pub v2: Vec<VertexLattice>,
    /// `(i, j)` with `v0[i] ⊂ v2[j]`.
    pub incidence: Vec<(usize, usize)>,
    /// Per type-0 vertex: some type-2 lattice containing it is outside the support.
    pub boundary: Vec<bool>,
    pub skeleton0: Vec<bool>,
    pub skeleton2: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SupportCounts {
    pub v0: u64,
    pub v2: u64,
    pub boundary: u64,
    pub skeleton: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphNode {
    pub id: usize,
    #[serde(rename = "type")]
    pub kind: usize,
    pub boundary: bool,
    pub skeleton: bool,
    pub basis: Vec<Vec<String>>,
    pub neighbors: Vec<usize>,
}

/// Adjacency-list view of a support, type-0 vertices first.
#[derive(Clone, Debug, Serialize)]
pub struct SupportGraph {
    pub counts: SupportCounts,
    pub nodes: Vec<GraphNode>,
}

impl SupportSet {
    pub fn counts(&self) -> SupportCounts {
        let n = |v: &[bool]| v.iter().filter(|&&b| b).count() as u64;
        SupportCounts {
            v0: self.v0.len() as u64,
            v2: self.v2.len() as u64,
            boundary: n(&self.boundary),
            skeleton: n(&self.skeleton0) + n(&self.skeleton2),
        }
    }

    /// Number of type-2 members containing `v0[i]`.
    pub fn up_degree(&self, i: usize) -> usize {
        self.incidence.iter().filter(|(a, _)| *a == i).count()
    }

    pub fn to_graph(&self) -> SupportGraph {
        let off = self.v0.len();
        let mut adj = vec![Vec::new(); off + self.v2.len()];
        for &(i, j) in &self.incidence {
            adj[i].push(off + j);
            adj[off + j].push(i);
        }
        let fmt_basis = |m: &Matrix| {
            (0..m.rows).map(|r| (0..m.cols).map(|c| m[(r, c)].to_string()).collect()).collect()
        };
        let mut nodes = Vec::new();
        for (i, v) in self.v0.iter().enumerate() {
            nodes.push(GraphNode {
                id: i,
                kind: 0,
                boundary: self.boundary[i],
                skeleton: self.skeleton0[i],
                basis: fmt_basis(&v.basis),
                neighbors: adj[i].clone(),
            });
        }
        for (j, v) in self.v2.iter().enumerate() {
            nodes.push(GraphNode {
                id: off + j,
                kind: 2,
                boundary: false,
                skeleton: self.skeleton2[j],
                basis: fmt_basis(&v.basis),
                neighbors: adj[off + j].clone(),
            });
        }
        SupportGraph { counts: self.counts(), nodes }
    }
}

/// Support of a standalone rank-2 `L♭`, inside `L♭ ⊥ ⟨t⟩`.
pub fn enumerate_support(cfg: &RingConfig, lflat: &Gram, t: &Q) -> Result<SupportSet, TreeError> {
    if lflat.rank() != 2 {
        return Err(TreeError::Rank(lflat.rank()));
    }
    let amb = embed_with_complement(cfg, lflat, t)?;
    let y = amb.basis.clone();
    enumerate_support_in(&amb, &y, SUPPORT_BUDGET)
}

/// Breadth-first search over `{Λ : y ⊆ Λ^♯}`, which is connected.
pub fn enumerate_support_in(amb: &AmbientSpace, y: &Matrix, budget: usize) -> Result<SupportSet, TreeError> {
    let cfg = &amb.cfg;
    let gy = Gram::new(amb.gram(y))?;
    if !gy.is_integral(cfg) {
        return Err(TreeError::NotIntegral);
    }
    let start = amb.vertex_over(y)?;
    if !amb.dual_contains(&start, y) {
        return Err(TreeError::Unsupported("start vertex is not in the support".into()));
    }
    let mut set = SupportSet {
        v0: Vec::new(),
        v2: Vec::new(),
        incidence: Vec::new(),
        boundary: Vec::new(),
        skeleton0: Vec::new(),
        skeleton2: Vec::new(),
    };
    let mut index: HashMap<_, (VertexType, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    let insert = |set: &mut SupportSet, index: &mut HashMap<_, _>, v: VertexLattice| -> usize {
        let list = match v.kind {
            VertexType::Zero => &mut set.v0,
            VertexType::Two => &mut set.v2,
        };
        list.push(v.clone());
        let i = list.len() - 1;
        if v.kind == VertexType::Zero {
            set.boundary.push(false);
        }
        index.insert(v.key, (v.kind, i));
        i
    };
    let i = insert(&mut set, &mut index, start.clone());
    queue.push_back((start.kind, i));
    while let Some((kind, i)) = queue.pop_front() {
        if index.len() > budget {
            return Err(TreeError::Budget(budget));
        }
        let lam = match kind {
            VertexType::Zero => set.v0[i].clone(),
            VertexType::Two => set.v2[i].clone(),
        };
        for nb in amb.neighbors(&lam) {
            let j = match index.get(&nb.key) {
                Some(&(_, j)) => Some(j),
                None if amb.dual_contains(&nb, y) => {
                    let nk = nb.kind;
                    let j = insert(&mut set, &mut index, nb);
                    queue.push_back((nk, j));
                    Some(j)
                }
                None => None,
            };
            match (kind, j) {
                (VertexType::Zero, Some(j)) => set.incidence.push((i, j)),
                (VertexType::Zero, None) => set.boundary[i] = true,
                _ => {}
            }
        }
    }
    set.incidence.sort();
    let (s0, s2) = skeleton_flags(amb, y, &set)?;
    set.skeleton0 = s0;
    set.skeleton2 = s2;
    Ok(set)
}

/// For fundamental invariants `(2a, b)`, the skeleton is the support of `π^{-a}y`;
/// for `(2a+1, 2a+1)` it is empty. Only defined for rank-2 `y`.
fn skeleton_flags(amb: &AmbientSpace, y: &Matrix, set: &SupportSet) -> Result<(Vec<bool>, Vec<bool>), TreeError> {
    let none = (vec![false; set.v0.len()], vec![false; set.v2.len()]);
    if y.cols != 2 {
        return Ok(none);
    }
    let inv = invariants(&amb.cfg, &Gram::new(amb.gram(y))?)?;
    let f = inv.fund[0];
    if f % 2 != 0 {
        return Ok(none);
    }
    let ys = y.scale(&amb.cfg.pi_pow(-f / 2));
    let flag = |vs: &[VertexLattice]| vs.iter().map(|v| amb.dual_contains(v, &ys)).collect();
    Ok((flag(&set.v0), flag(&set.v2)))
}

/// Class of the orthogonal complement of `y` inside the ambient space: `det Φ / det y`.
pub fn complement_class(amb: &AmbientSpace, y: &Matrix) -> Q {
    let dphi = amb.phi.det();
    let dy = amb.gram(y).det();
    dphi / dy.a
}

/// The three shapes of a rank-2 support: a ball around a type-2 vertex, a ball
/// around a type-0 vertex, or a neighborhood of a segment of `L(x₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    Hyperbolic { a: u32 },
    Nonsplit { a: u32 },
    Split { a: u32, r: u32 },
}

/// Shape of the support of `L♭` when its orthogonal complement has class `t`.
pub fn shape_of(cfg: &RingConfig, lflat: &Gram, t: &Q) -> Result<Shape, TreeError> {
    if lflat.rank() != 2 {
        return Err(TreeError::Rank(lflat.rank()));
    }
    if !lflat.is_integral(cfg) {
        return Err(TreeError::NotIntegral);
    }
    let jf = jordan_form(cfg, lflat)?;
    match jf.blocks.as_slice() {
        [Block::Binary { exp, .. }] => Ok(Shape::Hyperbolic { a: ((exp - 1) / 2) as u32 }),
        [Block::Unary { exp: e1, .. }, Block::Unary { value: v2, exp: e2 }] => {
            let (a, b) = ((e1 / 2) as u32, (e2 / 2) as u32);
            let u2 = v2 / cfg.neg_pi0_pow(e2 / 2);
            let split = cfg.chi(&(-(u2 * t))).map_err(|e| TreeError::Unsupported(e.to_string()))? == 1;
            if split {
                Ok(Shape::Split { a, r: b - a })
            } else {
                Ok(Shape::Nonsplit { a })
            }
        }
        _ => Err(TreeError::Unsupported("unexpected Jordan splitting".into())),
    }
}

fn geom(q: u64, j: u32) -> u64 {
    q.pow(j)
}

/// Counts for the `R`-neighborhood (in edges) of a subtree with `n0`/`n2`
/// vertices of each type, `e0`/`e2` edges leaving it from each type.
fn neighborhood(q: u64, n0: u64, n2: u64, e0: u64, e2: u64, radius: u32) -> SupportCounts {
    let (mut v0, mut v2) = (n0, n2);
    for j in 0..radius {
        let w = geom(q, j);
        if j % 2 == 0 {
            v2 += e0 * w;
            v0 += e2 * w;
        } else {
            v0 += e0 * w;
            v2 += e2 * w;
        }
    }
    let boundary = match radius {
        0 => n0,
        r if r % 2 == 0 => e0 * geom(q, r - 1),
        r => e2 * geom(q, r - 1),
    };
    SupportCounts { v0, v2, boundary, skeleton: 0 }
}

/// Closed-form support counts `(|V⁰|, |V²|, |B|, |S|)` from the shape.
pub fn support_counts_closed(cfg: &RingConfig, lflat: &Gram, t: &Q) -> Result<SupportCounts, TreeError> {
    let q = cfg.q();
    Ok(match shape_of(cfg, lflat, t)? {
        Shape::Hyperbolic { a } => neighborhood(q, 0, 1, 0, q + 1, 2 * a + 1),
        Shape::Nonsplit { a } => SupportCounts { skeleton: 1, ..neighborhood(q, 1, 0, q + 1, 0, 2 * a) },
        Shape::Split { a, r } => {
            let n0 = 1 + 2 * (1..=r).map(|i| geom(q, i)).sum::<u64>();
            let n2 = 2 * (0..r).map(|i| geom(q, i)).sum::<u64>();
            let inner = n0 + n2 - 1;
            let c = neighborhood(q, n0, n2, (q + 1) * n0 - inner, (q + 1) * n2 - inner, 2 * a);
            SupportCounts { skeleton: n0 + n2, ..c }
        }
    })
}
