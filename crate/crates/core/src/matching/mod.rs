//! Anyon matching graphs and the two matching decoders.
//!
//! Each anyon species is matched separately. Every real anyon gets a virtual
//! partner on the nearer of its two absorbing boundaries; the virtual anyons
//! on one boundary are joined by zero-weight edges so unused partners can
//! pair off for free. With this graph the chains found always have the same
//! logical parity for that species. Adding one extra virtual vertex per
//! boundary (zero-weight edges to that boundary's virtuals, boundary-distance
//! edges to every real anyon, and a weight-`L` edge between the two extras)
//! forces the opposite parity. Solving both graphs for both species gives a
//! minimum-weight chain in each of the four logical classes.

mod blossom;

use crate::code_geometry::{CodeLayout, Coord, EquivalenceClass, PauliFrame, Syndrome};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    /// Violated Z-stabilizers, created by bit flips. Absorbed at top/bottom.
    P,
    /// Violated X-stabilizers, created by phase flips. Absorbed at left/right.
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    /// Top for p-anyons, left for s-anyons.
    Low,
    /// Bottom for p-anyons, right for s-anyons.
    High,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// Index into [`MatchingProblem::anyons`].
    Real(usize),
    /// Boundary partner of the real anyon with the given index.
    Virtual {
        partner: usize,
        boundary: Boundary,
    },
    ExtraVirtual(Boundary),
}

#[derive(Clone, Debug)]
pub struct MatchingProblem {
    pub species: Species,
    pub distance: usize,
    /// Stabilizer indices (into the Z list for `P`, the X list for `S`).
    pub anyons: Vec<u32>,
    pub coords: Vec<Coord>,
    pub vertices: Vec<VertexKind>,
    pub edges: Vec<(usize, usize, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    /// `(u, v)` with `u < v`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: u64,
}

/// Minimum-weight chains, one per logical class, indexed by
/// [`EquivalenceClass::index`].
#[derive(Clone, Debug)]
pub struct ClassChainSet {
    pub frames: [PauliFrame; 4],
    /// Matching weight of each chain (a Y counts twice).
    pub weights: [u64; 4],
}

impl ClassChainSet {
    pub fn frame(&self, class: EquivalenceClass) -> &PauliFrame {
        &self.frames[class.index()]
    }
}

#[derive(Clone, Debug)]
pub struct DecoderVerdict<T> {
    pub class: EquivalenceClass,
    /// Per-class score; lower is better. Matching weight for the standard
    /// decoder, effective error count for the class-resolved decoder, `⟨n⟩`
    /// or the free-energy integral for the samplers.
    pub scores: [T; 4],
    pub correction: PauliFrame,
}

/// Index of the smallest score; ties go to the earlier class in
/// `I, X, Z, Y` order. NaN scores never win.
pub fn argmin_class<T: PartialOrd + Copy>(scores: &[T; 4]) -> EquivalenceClass {
    let mut best = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.partial_cmp(&s).is_none() {
            continue;
        }
        match best {
            Some((_, b)) if s >= b => {}
            _ => best = Some((i, s)),
        }
    }
    EquivalenceClass::from_index(best.map_or(0, |b| b.0))
}

impl Species {
    fn anyon_coord(self, layout: &CodeLayout, idx: u32) -> Coord {
        match self {
            Species::P => layout.z_stabilizers()[idx as usize].coord,
            Species::S => layout.x_stabilizers()[idx as usize].coord,
        }
    }

    /// Coordinate across the absorbing boundaries.
    fn across(self, c: Coord) -> i32 {
        match self {
            Species::P => c.r,
            Species::S => c.c,
        }
    }

    /// Number of qubits between an anyon and a boundary.
    pub fn boundary_distance(self, distance: usize, c: Coord, b: Boundary) -> u32 {
        let x = self.across(c);
        let d = match b {
            Boundary::Low => x + 1,
            Boundary::High => 2 * distance as i32 - 1 - x,
        };
        (d / 2) as u32
    }

    pub fn nearer_boundary(self, distance: usize, c: Coord) -> Boundary {
        if self.boundary_distance(distance, c, Boundary::Low) <= self.boundary_distance(distance, c, Boundary::High) {
            Boundary::Low
        } else {
            Boundary::High
        }
    }

    fn toggle(self, frame: &mut PauliFrame, q: usize) {
        match self {
            Species::P => frame.toggle_x(q),
            Species::S => frame.toggle_z(q),
        }
    }
}

/// Qubits between two anyons of the same species.
pub fn anyon_distance(a: Coord, b: Coord) -> u32 {
    (((a.r - b.r).abs() + (a.c - b.c).abs()) / 2) as u32
}

pub fn build_problem(layout: &CodeLayout, anyons: &[u32], species: Species, force_class_flip: bool) -> MatchingProblem {
    let l = layout.distance();
    let k = anyons.len();
    let coords: Vec<Coord> = anyons.iter().map(|&a| species.anyon_coord(layout, a)).collect();
    let mut vertices: Vec<VertexKind> = (0..k).map(VertexKind::Real).collect();
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            edges.push((i, j, anyon_distance(coords[i], coords[j])));
        }
    }
    for (i, &c) in coords.iter().enumerate() {
        let boundary = species.nearer_boundary(l, c);
        vertices.push(VertexKind::Virtual { partner: i, boundary });
        edges.push((i, k + i, species.boundary_distance(l, c, boundary)));
    }
    for i in 0..k {
        for j in i + 1..k {
            if boundary_of(&vertices[k + i]) == boundary_of(&vertices[k + j]) {
                edges.push((k + i, k + j, 0));
            }
        }
    }
    if force_class_flip {
        let extra = [2 * k, 2 * k + 1];
        for (&v, b) in extra.iter().zip([Boundary::Low, Boundary::High]) {
            vertices.push(VertexKind::ExtraVirtual(b));
            for (i, &c) in coords.iter().enumerate() {
                edges.push((i, v, species.boundary_distance(l, c, b)));
            }
            for i in 0..k {
                if boundary_of(&vertices[k + i]) == Some(b) {
                    edges.push((k + i, v, 0));
                }
            }
        }
        edges.push((extra[0], extra[1], l as u32));
    }
    MatchingProblem { species, distance: l, anyons: anyons.to_vec(), coords, vertices, edges }
}

fn boundary_of(v: &VertexKind) -> Option<Boundary> {
    match *v {
        VertexKind::Real(_) => None,
        VertexKind::Virtual { boundary, .. } | VertexKind::ExtraVirtual(boundary) => Some(boundary),
    }
}

/// Exact minimum-weight perfect matching of an arbitrary edge list.
pub fn min_weight_perfect_matching_edges(n_vertices: usize, edges: &[(usize, usize, u32)]) -> Result<Matching> {
    if n_vertices == 0 {
        return Ok(Matching { pairs: Vec::new(), total_weight: 0 });
    }
    if n_vertices % 2 == 1 {
        return Err(Error::Infeasible { vertices: n_vertices });
    }
    // Maximum cardinality first, then maximum of (K - w): the minimum-weight
    // perfect matching whenever a perfect matching exists.
    let top = edges.iter().map(|e| e.2 as i64).max().unwrap_or(0) + 1;
    let flipped: Vec<(usize, usize, i64)> = edges.iter().map(|&(u, v, w)| (u, v, top - w as i64)).collect();
    let mate = blossom::max_weight_matching(n_vertices, &flipped, true);
    let mut pairs = Vec::with_capacity(n_vertices / 2);
    for (u, m) in mate.iter().enumerate() {
        match m {
            None => return Err(Error::Infeasible { vertices: n_vertices }),
            Some(v) if u < *v => pairs.push((u, *v)),
            _ => {}
        }
    }
    let mut best = std::collections::HashMap::with_capacity(edges.len());
    for &(u, v, w) in edges {
        let key = (u.min(v), u.max(v));
        let e = best.entry(key).or_insert(w);
        *e = (*e).min(w);
    }
    let total_weight = pairs.iter().map(|p| best[p] as u64).sum();
    Ok(Matching { pairs, total_weight })
}

pub fn min_weight_perfect_matching(problem: &MatchingProblem) -> Result<Matching> {
    min_weight_perfect_matching_edges(problem.vertices.len(), &problem.edges)
}

fn lay_path(frame: &mut PauliFrame, layout: &CodeLayout, species: Species, from: Coord, to: Coord) {
    // rows first, then columns
    let mut r = from.r;
    let step = (to.r - r).signum();
    while r != to.r {
        species.toggle(frame, layout.qubit_at(r + step, from.c).expect("path leaves the lattice"));
        r += 2 * step;
    }
    let mut c = from.c;
    let step = (to.c - c).signum();
    while c != to.c {
        species.toggle(frame, layout.qubit_at(to.r, c + step).expect("path leaves the lattice"));
        c += 2 * step;
    }
}

fn lay_to_boundary(frame: &mut PauliFrame, layout: &CodeLayout, species: Species, from: Coord, b: Boundary) {
    let side = layout.side();
    let target = match (species, b) {
        (Species::P, Boundary::Low) => Coord::new(-1, from.c),
        (Species::P, Boundary::High) => Coord::new(side, from.c),
        (Species::S, Boundary::Low) => Coord::new(from.r, -1),
        (Species::S, Boundary::High) => Coord::new(from.r, side),
    };
    let (dr, dc) = ((target.r - from.r).signum(), (target.c - from.c).signum());
    let mut at = from;
    while at != target {
        species.toggle(frame, layout.qubit_at(at.r + dr, at.c + dc).expect("path leaves the lattice"));
        at = Coord::new(at.r + 2 * dr, at.c + 2 * dc);
    }
}

/// Realises each matched pair as a Manhattan path of single-qubit errors
/// (σx for p-anyons, σz for s-anyons).
pub fn chain_from_matching(layout: &CodeLayout, problem: &MatchingProblem, matching: &Matching) -> PauliFrame {
    let mut frame = PauliFrame::identity(layout.n_qubits());
    let species = problem.species;
    for &(u, v) in &matching.pairs {
        match (problem.vertices[u], problem.vertices[v]) {
            (VertexKind::Real(i), VertexKind::Real(j)) => {
                lay_path(&mut frame, layout, species, problem.coords[i], problem.coords[j]);
            }
            (VertexKind::Real(i), VertexKind::Virtual { boundary, .. })
            | (VertexKind::Virtual { boundary, .. }, VertexKind::Real(i))
            | (VertexKind::Real(i), VertexKind::ExtraVirtual(boundary))
            | (VertexKind::ExtraVirtual(boundary), VertexKind::Real(i)) => {
                lay_to_boundary(&mut frame, layout, species, problem.coords[i], boundary);
            }
            (VertexKind::ExtraVirtual(_), VertexKind::ExtraVirtual(_)) => {
                let logical = match species {
                    Species::P => layout.logical_x_support(),
                    Species::S => layout.logical_z_support(),
                };
                for &q in logical {
                    species.toggle(&mut frame, q as usize);
                }
            }
            _ => {}
        }
    }
    frame
}

/// The unforced and the class-flipped minimum-weight chain for one species.
#[derive(Clone, Debug)]
pub struct SpeciesChains {
    pub frames: [PauliFrame; 2],
    pub weights: [u64; 2],
}

pub fn species_chains(layout: &CodeLayout, anyons: &[u32], species: Species) -> Result<SpeciesChains> {
    let solve = |flip| -> Result<(PauliFrame, u64)> {
        let problem = build_problem(layout, anyons, species, flip);
        let m = min_weight_perfect_matching(&problem)?;
        Ok((chain_from_matching(layout, &problem, &m), m.total_weight))
    };
    let (f0, w0) = solve(false)?;
    let (f1, w1) = solve(true)?;
    Ok(SpeciesChains { frames: [f0, f1], weights: [w0, w1] })
}

/// Both species' chain pairs and their four products.
#[derive(Clone, Debug)]
pub struct MatchingOutcome {
    pub p: SpeciesChains,
    pub s: SpeciesChains,
    pub chains: ClassChainSet,
}

pub fn match_syndrome(layout: &CodeLayout, syndrome: &Syndrome) -> Result<MatchingOutcome> {
    let p = species_chains(layout, &syndrome.p_anyons, Species::P)?;
    let s = species_chains(layout, &syndrome.s_anyons, Species::S)?;
    let mut frames: [Option<PauliFrame>; 4] = Default::default();
    let mut weights = [0u64; 4];
    for fp in 0..2 {
        for fs in 0..2 {
            let frame = &p.frames[fp] * &s.frames[fs];
            let class = layout.class_of(&frame);
            let slot = &mut frames[class.index()];
            if slot.is_some() {
                return Err(Error::InvalidParameter(format!(
                    "forced matchings did not realise four classes (class {} repeated)",
                    class.label()
                )));
            }
            *slot = Some(frame);
            weights[class.index()] = p.weights[fp] + s.weights[fs];
        }
    }
    let frames = frames.map(|f| f.expect("all four classes filled"));
    Ok(MatchingOutcome { p, s, chains: ClassChainSet { frames, weights } })
}

impl MatchingOutcome {
    /// Standard matching: each species takes its overall lightest chain,
    /// preferring the unforced graph on ties. Scores are matching weights.
    pub fn standard_verdict<T: Scalar>(&self, layout: &CodeLayout) -> DecoderVerdict<T> {
        let fp = (self.p.weights[1] < self.p.weights[0]) as usize;
        let fs = (self.s.weights[1] < self.s.weights[0]) as usize;
        let correction = &self.p.frames[fp] * &self.s.frames[fs];
        let class = layout.class_of(&correction);
        DecoderVerdict { class, scores: self.chains.weights.map(T::of_u64), correction }
    }

    /// Class-resolved matching: the four chains compared by their effective
    /// error count under the true model (a Y counts once for depolarizing
    /// noise).
    pub fn enhanced_verdict<T: Scalar>(&self, model: &NoiseModel<T>) -> Result<DecoderVerdict<T>> {
        let costs = model.costs()?;
        let scores = [0, 1, 2, 3].map(|i| costs.of_counts(&self.chains.frames[i].counts()));
        let class = argmin_class(&scores);
        Ok(DecoderVerdict { class, scores, correction: self.chains.frames[class.index()].clone() })
    }
}

/// Standard minimum-weight perfect matching decoder.
pub fn decode_standard<T: Scalar>(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    _model: &NoiseModel<T>,
) -> Result<DecoderVerdict<T>> {
    Ok(match_syndrome(layout, syndrome)?.standard_verdict(layout))
}

/// Class-resolved matching decoder; also returns the per-class chains used to
/// seed the samplers.
pub fn decode_enhanced<T: Scalar>(
    layout: &CodeLayout,
    syndrome: &Syndrome,
    model: &NoiseModel<T>,
) -> Result<(DecoderVerdict<T>, ClassChainSet)> {
    let outcome = match_syndrome(layout, syndrome)?;
    let verdict = outcome.enhanced_verdict(model)?;
    Ok((verdict, outcome.chains))
}
