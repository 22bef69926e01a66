//! Projective planes over GF(q) and the graphs and designs built on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec, FieldTables};
use crate::graph::{Graph, LinearHypergraph};

/// Largest field order accepted for projective-space enumeration.
pub const MAX_PG_ORDER: u32 = 81;
/// Guard on the number of points produced by [`enumerate_pg_points`].
pub const MAX_PG_POINTS: u64 = 1_000_000;

/// A point of PG(dim, q), scaled so its first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: Vec<FieldElement>,
}

impl ProjectivePoint {
    /// Normalizes `coords`. Fails on the zero vector or mixed fields.
    pub fn new(coords: Vec<FieldElement>) -> Result<Self> {
        let spec = *coords
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty coordinate vector".into()))?
            .spec();
        if coords.iter().any(|c| *c.spec() != spec) {
            return Err(Error::FieldMismatch);
        }
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or_else(|| Error::InvalidParameter("the zero vector is not a projective point".into()))?;
        let scale = lead.inv()?;
        Ok(ProjectivePoint { coords: coords.iter().map(|c| *c * scale).collect() })
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Canonical indices of the coordinates.
    pub fn indices(&self) -> Vec<usize> {
        self.coords.iter().map(|c| c.index() as usize).collect()
    }

    /// The standard bilinear form `sum u_i v_i`.
    pub fn dot(&self, other: &ProjectivePoint) -> Result<FieldElement> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::InvalidParameter("points of different dimension".into()));
        }
        let mut acc = self.coords[0].spec().zero();
        for (a, b) in self.coords.iter().zip(&other.coords) {
            acc = acc.checked_add(&a.checked_mul(b)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{}", c.index())?;
        }
        write!(f, ")")
    }
}

fn pg_point_count(dim: u32, q: u32) -> u64 {
    (0..=dim).map(|i| (q as u64).pow(i)).sum()
}

/// Normalized coordinate index vectors of PG(dim, q), lexicographic.
pub(crate) fn pg_indices(dim: usize, q: usize) -> Result<Vec<Vec<usize>>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("projective dimension must be at least 1".into()));
    }
    let count = pg_point_count(dim as u32, q as u32);
    if count > MAX_PG_POINTS {
        return Err(Error::InvalidParameter(format!(
            "PG({dim},{q}) has {count} points, above the limit of {MAX_PG_POINTS}"
        )));
    }
    let len = dim + 1;
    let mut out = Vec::with_capacity(count as usize);
    let mut v = vec![0usize; len];
    // `v` walks all vectors in lexicographic order; keep the normalized ones
    loop {
        if v.iter().find(|&&c| c != 0) == Some(&1) {
            out.push(v.clone());
        }
        let mut i = len;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            v[i] += 1;
            if v[i] < q {
                break;
            }
            v[i] = 0;
        }
    }
}

fn check_pg_field(spec: &FieldSpec) -> Result<()> {
    if spec.order() > MAX_PG_ORDER {
        return Err(Error::UnsupportedField(format!(
            "GF({}) is above the supported order {MAX_PG_ORDER}",
            spec.order()
        )));
    }
    Ok(())
}

/// All points of PG(dim, q) in canonical lexicographic order.
pub fn enumerate_pg_points(dim: usize, spec: &FieldSpec) -> Result<Vec<ProjectivePoint>> {
    check_pg_field(spec)?;
    let pts = pg_indices(dim, spec.order() as usize)?;
    Ok(pts
        .into_iter()
        .map(|v| ProjectivePoint { coords: v.iter().map(|&i| spec.element(i as u32)).collect() })
        .collect())
}

fn tables_for(q: u32) -> Result<FieldTables> {
    let spec = FieldSpec::from_order(q)?;
    check_pg_field(&spec)?;
    FieldTables::new(spec)
}

/// The orthogonal-polarity graph of PG(2, q) with its absolute points.
#[derive(Clone, Debug)]
pub struct PolarityGraph {
    pub q: u32,
    pub graph: Graph,
    /// Points with `u . u = 0`; they have degree `q` once loops are dropped.
    pub absolute: Vec<usize>,
}

/// `ER_q` together with its absolute points.
pub fn er_polarity(q: u32) -> Result<PolarityGraph> {
    let t = tables_for(q)?;
    let pts = pg_indices(2, q as usize)?;
    let n = pts.len();
    let absolute = (0..n).filter(|&i| t.dot(&pts[i], &pts[i]) == 0).collect();
    let graph = Graph::from_fn(n, |u, v| t.dot(&pts[u], &pts[v]) == 0);
    Ok(PolarityGraph { q, graph, absolute })
}

/// The Erdős–Rényi polarity graph `ER_q`: points of PG(2, q), `u ~ v` iff
/// `u . v = 0`, loops dropped.
pub fn polarity_graph(q: u32) -> Result<Graph> {
    Ok(er_polarity(q)?.graph)
}

/// Points with blocks given as sorted point-index lists.
#[derive(Clone, Debug)]
pub struct BlockDesign {
    pub points: Vec<ProjectivePoint>,
    pub blocks: Vec<Vec<usize>>,
    pub v: usize,
    pub block_size: usize,
    /// Blocks through each point, when constant.
    pub point_degree: Option<usize>,
}

impl BlockDesign {
    fn new(points: Vec<ProjectivePoint>, blocks: Vec<Vec<usize>>) -> Self {
        let v = points.len();
        let block_size = blocks.first().map_or(0, Vec::len);
        let mut deg = vec![0usize; v];
        for b in &blocks {
            for &p in b {
                deg[p] += 1;
            }
        }
        let point_degree = deg.first().copied().filter(|d| deg.iter().all(|x| x == d));
        BlockDesign { points, blocks, v, block_size, point_degree }
    }

    /// For each point, the indices of the blocks containing it.
    pub fn point_blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.v];
        for (i, b) in self.blocks.iter().enumerate() {
            for &p in b {
                out[p].push(i);
            }
        }
        out
    }
}

/// Largest `q` for the Hermitian unital (the curve lives over GF(q^2)).
pub const MAX_UNITAL_Q: u32 = 8;

/// The Hermitian unital in PG(2, q^2): points with
/// `N(x0) + N(x1) + N(x2) = 0` where `N(a) = a^(q+1)`, blocks the secant lines.
pub fn hermitian_unital(q: u32) -> Result<BlockDesign> {
    if !(2..=MAX_UNITAL_Q).contains(&q) || crate::gf::prime_power(q).is_none() {
        return Err(Error::UnsupportedField(format!(
            "Hermitian unital needs a prime power q <= {MAX_UNITAL_Q}, got {q}"
        )));
    }
    let qq = q * q;
    let t = tables_for(qq)?;
    let pts = pg_indices(2, qq as usize)?;
    let norm: Vec<usize> = (0..qq as usize).map(|a| t.pow(a, q as u64 + 1)).collect();
    let on_curve: Vec<usize> = (0..pts.len())
        .filter(|&i| {
            let p = &pts[i];
            t.add(t.add(norm[p[0]], norm[p[1]]), norm[p[2]]) == 0
        })
        .collect();
    // lines of PG(2, q^2) are indexed by their dual coordinates
    let mut blocks = Vec::new();
    for line in &pts {
        let meet: Vec<usize> = on_curve
            .iter()
            .enumerate()
            .filter(|&(_, &pi)| t.dot(line, &pts[pi]) == 0)
            .map(|(k, _)| k)
            .collect();
        if meet.len() > 1 {
            if meet.len() != q as usize + 1 {
                return Err(Error::InvalidParameter(format!(
                    "line meets the Hermitian curve in {} points",
                    meet.len()
                )));
            }
            blocks.push(meet);
        }
    }
    let spec = *t.spec();
    let points = on_curve
        .iter()
        .map(|&i| ProjectivePoint { coords: pts[i].iter().map(|&c| spec.element(c as u32)).collect() })
        .collect();
    Ok(BlockDesign::new(points, blocks))
}

/// Dual of the unital: one vertex per block, one hyperedge per point holding
/// the `q^2` blocks through it.
pub fn unital_line_hypergraph(q: u32) -> Result<LinearHypergraph> {
    let design = hermitian_unital(q)?;
    LinearHypergraph::new(design.blocks.len(), design.point_blocks())
}

/// Adjacency rule for `Γ[q,s]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BipAdjacency {
    /// `χ(Q(x,y)) = 1` on canonical representatives.
    #[default]
    Character,
    /// `Q(x,y) = 0`, which does not depend on the representatives.
    Orthogonal,
}

impl fmt::Display for BipAdjacency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BipAdjacency::Character => "character",
            BipAdjacency::Orthogonal => "orthogonal",
        })
    }
}

impl FromStr for BipAdjacency {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "character" => Ok(BipAdjacency::Character),
            "orthogonal" | "symmetrized" => Ok(BipAdjacency::Orthogonal),
            _ => Err(Error::Parse(format!("unknown adjacency rule '{s}'"))),
        }
    }
}

pub const MAX_BIP_Q: u32 = 13;
pub const MAX_BIP_S: usize = 4;

/// `Γ[q,s]` with its vertex coordinates.
#[derive(Clone, Debug)]
pub struct BipGraph {
    pub q: u32,
    pub s: usize,
    pub adjacency: BipAdjacency,
    /// Smallest nonresidue, as a canonical index.
    pub xi: u32,
    /// Canonical representatives of the vertices, as coordinate indices.
    pub vertices: Vec<Vec<usize>>,
    pub graph: Graph,
}

/// `Γ[q,s]` with the default rule.
pub fn bip_graph(q: u32, s: usize) -> Result<Graph> {
    Ok(bip_construct(q, s, BipAdjacency::Character)?.graph)
}

/// Vertices: points of PG(s, q) with `χ(Q(x,x)) = 1`, where
/// `Q(x,y) = ξ x1 y1 + x2 y2 + ... + x_{s+1} y_{s+1}`.
pub fn bip_construct(q: u32, s: usize, adjacency: BipAdjacency) -> Result<BipGraph> {
    let spec = FieldSpec::from_order(q)?;
    if spec.characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if q > MAX_BIP_Q || !(1..=MAX_BIP_S).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "Γ[q,s] supports odd q <= {MAX_BIP_Q} and 1 <= s <= {MAX_BIP_S}, got q={q}, s={s}"
        )));
    }
    let t = FieldTables::new(spec)?;
    let xi = crate::gf::smallest_nonresidue(&spec)?.index() as usize;
    let half = (q as u64 - 1) / 2;
    let chi = |a: usize| -> i8 {
        match (a, t.pow(a, half)) {
            (0, _) => 0,
            (_, 1) => 1,
            _ => -1,
        }
    };
    let form = |x: &[usize], y: &[usize]| -> usize {
        let head = t.mul(xi, t.mul(x[0], y[0]));
        t.add(head, t.dot(&x[1..], &y[1..]))
    };
    let vertices: Vec<Vec<usize>> = pg_indices(s, q as usize)?
        .into_iter()
        .filter(|x| chi(form(x, x)) == 1)
        .collect();
    let graph = Graph::from_fn(vertices.len(), |u, v| {
        let val = form(&vertices[u], &vertices[v]);
        match adjacency {
            BipAdjacency::Character => chi(val) == 1,
            BipAdjacency::Orthogonal => val == 0,
        }
    });
    Ok(BipGraph { q, s, adjacency, xi: xi as u32, vertices, graph })
}
