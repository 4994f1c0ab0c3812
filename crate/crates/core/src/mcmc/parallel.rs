//! Rectangle-partitioned sweep.
//!
//! Stabilizers are grouped into square blocks of `rectangle_size` stabilizer
//! rows and columns. A rectangle is the set of qubits its stabilizers touch,
//! so neighbouring rectangles share the qubits along their common edge. Block
//! `(i, j)` gets group `2 (i mod 2) + (j mod 2)`; rectangles of one group
//! share no qubit, so one stabilizer per rectangle of a group can be probed
//! at the same time. Turn `t` probes the `t`-th non-empty group, cyclically.
//!
//! Each rectangle keeps its own tally of `n`, counting a qubit shared by `m`
//! rectangles with weight `1/m`; the tallies sum to the global `n`.

use std::fmt::Write;

use arrayvec::ArrayVec;
use rand::Rng;

use super::{MeanEstimate, MetropolisChain};
use crate::code_geometry::{CodeLayout, Pauli};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Stabilizer rows and columns per rectangle when unspecified.
pub const DEFAULT_RECTANGLE_SIZE: usize = 4;

/// Lowest common multiple of the possible sharing multiplicities 1 to 4.
const SHARE_UNIT: u64 = 12;

#[derive(Clone, Debug)]
pub struct Rectangle {
    pub id: usize,
    pub block: (usize, usize),
    pub group: u8,
    /// Global stabilizer ids, ascending.
    pub stabilizers: Vec<u32>,
    /// Qubits touched by the stabilizers, ascending.
    pub qubits: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct ParallelSchedule {
    rectangle_size: usize,
    side: i32,
    blocks_per_axis: usize,
    rectangles: Vec<Rectangle>,
    /// Non-empty groups in turn order, each a list of rectangle ids.
    turns: Vec<Vec<usize>>,
    /// Per qubit, the rectangles containing it.
    qubit_rects: Vec<ArrayVec<u32, 4>>,
}

pub fn parallel_sweep_schedule(layout: &CodeLayout, rectangle_size: usize) -> Result<ParallelSchedule> {
    if rectangle_size < 2 {
        return Err(invalid(format!("rectangles need at least 2 stabilizer rows and columns, got {rectangle_size}")));
    }
    let span = 2 * rectangle_size as i32;
    let side = layout.side();
    let nb = (side as usize).div_ceil(span as usize);
    let mut rectangles: Vec<Rectangle> = (0..nb * nb)
        .map(|id| Rectangle {
            id,
            block: (id / nb, id % nb),
            group: (2 * ((id / nb) % 2) + (id % nb) % 2) as u8,
            stabilizers: Vec::new(),
            qubits: Vec::new(),
        })
        .collect();
    for (sid, s) in layout.stabilizers().enumerate() {
        let (i, j) = ((s.coord.r / span) as usize, (s.coord.c / span) as usize);
        let rect = &mut rectangles[i * nb + j];
        rect.stabilizers.push(sid as u32);
        rect.qubits.extend(s.support.iter().copied());
    }
    rectangles.retain(|r| !r.stabilizers.is_empty());
    let mut qubit_rects = vec![ArrayVec::<u32, 4>::new(); layout.n_qubits()];
    for (id, rect) in rectangles.iter_mut().enumerate() {
        rect.id = id;
        rect.qubits.sort_unstable();
        rect.qubits.dedup();
        for &q in &rect.qubits {
            qubit_rects[q as usize].push(id as u32);
        }
    }
    let turns: Vec<Vec<usize>> = (0..4u8)
        .map(|g| rectangles.iter().filter(|r| r.group == g).map(|r| r.id).collect::<Vec<_>>())
        .filter(|g| !g.is_empty())
        .collect();
    Ok(ParallelSchedule { rectangle_size, side, blocks_per_axis: nb, rectangles, turns, qubit_rects })
}

impl ParallelSchedule {
    pub fn rectangle_size(&self) -> usize {
        self.rectangle_size
    }

    pub fn rectangles(&self) -> &[Rectangle] {
        &self.rectangles
    }

    /// Rectangle ids probed on each turn of a cycle.
    pub fn turns(&self) -> &[Vec<usize>] {
        &self.turns
    }

    /// Rectangles containing qubit `q`.
    pub fn rectangles_of_qubit(&self, q: usize) -> &[u32] {
        &self.qubit_rects[q]
    }

    pub fn is_sequential(&self) -> bool {
        self.rectangles.len() == 1
    }

    /// Weight of qubit `q` in each of its rectangles' tallies, in units of
    /// `1/12`.
    pub fn share(&self, q: usize) -> u64 {
        SHARE_UNIT / self.qubit_rects[q].len() as u64
    }

    /// Text picture of the partition: one character per lattice site, the
    /// group digit at stabilizers and `.` at qubits, then one line per
    /// rectangle.
    pub fn dump(&self, layout: &CodeLayout) -> String {
        let mut grid = vec![vec![' '; self.side as usize]; self.side as usize];
        for q in layout.qubits() {
            grid[q.r as usize][q.c as usize] = '.';
        }
        for rect in &self.rectangles {
            for &s in &rect.stabilizers {
                let c = layout.stabilizer(s as usize).coord;
                grid[c.r as usize][c.c as usize] = char::from(b'0' + rect.group);
            }
        }
        let mut out = String::new();
        writeln!(
            out,
            "rectangle_size {} blocks {}x{}",
            self.rectangle_size, self.blocks_per_axis, self.blocks_per_axis
        )
        .unwrap();
        for row in grid {
            writeln!(out, "{}", row.into_iter().collect::<String>().trim_end()).unwrap();
        }
        for r in &self.rectangles {
            writeln!(
                out,
                "rect {} block {} {} group {} stabilizers {} qubits {}",
                r.id,
                r.block.0,
                r.block.1,
                r.group,
                r.stabilizers.len(),
                r.qubits.len()
            )
            .unwrap();
        }
        out
    }
}

/// A Metropolis chain driven by a [`ParallelSchedule`].
#[derive(Clone, Debug)]
pub struct ParallelChain<'a, T> {
    chain: MetropolisChain<'a, T>,
    schedule: &'a ParallelSchedule,
    turn: usize,
    /// Per rectangle, current shared-weighted x, y, z counts.
    local: Vec<[u64; 3]>,
    /// Per rectangle, sums of `local` over recorded turns.
    local_total: Vec<[u64; 3]>,
}

fn slot(p: Pauli) -> Option<usize> {
    match p {
        Pauli::I => None,
        Pauli::X => Some(0),
        Pauli::Y => Some(1),
        Pauli::Z => Some(2),
    }
}

impl<'a, T: Scalar> ParallelChain<'a, T> {
    pub fn new(chain: MetropolisChain<'a, T>, schedule: &'a ParallelSchedule) -> Self {
        let mut local = vec![[0u64; 3]; schedule.rectangles.len()];
        for (q, p) in chain.frame().iter().enumerate() {
            if let Some(k) = slot(p) {
                for &r in schedule.rectangles_of_qubit(q) {
                    local[r as usize][k] += schedule.share(q);
                }
            }
        }
        let n = local.len();
        ParallelChain { chain, schedule, turn: 0, local, local_total: vec![[0; 3]; n] }
    }

    pub fn chain(&self) -> &MetropolisChain<'a, T> {
        &self.chain
    }

    /// Probes one random stabilizer in every rectangle of the current group,
    /// then records `n`.
    pub fn turn(&mut self) {
        let group = &self.schedule.turns[self.turn % self.schedule.turns.len()];
        self.turn += 1;
        for &rid in group {
            let rect = &self.schedule.rectangles[rid];
            let k = self.chain.rng_mut().gen_range(0..rect.stabilizers.len());
            let sid = rect.stabilizers[k] as usize;
            let support = self.chain.layout.stabilizer(sid).support.clone();
            let before: ArrayVec<Pauli, 4> = support.iter().map(|&q| self.chain.frame().get(q as usize)).collect();
            if self.chain.propose(sid) {
                for (&q, old) in support.iter().zip(before) {
                    let q = q as usize;
                    let new = self.chain.frame().get(q);
                    let w = self.schedule.share(q);
                    for &r in self.schedule.rectangles_of_qubit(q) {
                        let l = &mut self.local[r as usize];
                        if let Some(k) = slot(old) {
                            l[k] -= w;
                        }
                        if let Some(k) = slot(new) {
                            l[k] += w;
                        }
                    }
                }
            }
        }
        self.chain.record();
        for (t, l) in self.local_total.iter_mut().zip(&self.local) {
            for k in 0..3 {
                t[k] += l[k];
            }
        }
    }

    pub fn run(&mut self, turns: u64) {
        for _ in 0..turns {
            self.turn();
        }
        debug_assert_eq!(self.summed_local(), {
            let c = self.chain.counts();
            [c.x as u64 * SHARE_UNIT, c.y as u64 * SHARE_UNIT, c.z as u64 * SHARE_UNIT]
        });
    }

    fn summed_local(&self) -> [u64; 3] {
        self.local.iter().fold([0; 3], |a, l| [a[0] + l[0], a[1] + l[1], a[2] + l[2]])
    }

    /// Mean `n` of rectangle `r`'s share over the recorded turns.
    pub fn rectangle_mean(&self, r: usize) -> T {
        let t = &self.local_total[r];
        let steps = T::of_u64(self.chain.step_count() * SHARE_UNIT);
        let c = &self.chain.costs.cost;
        (c[1] * T::of_u64(t[0]) + c[2] * T::of_u64(t[1]) + c[3] * T::of_u64(t[2])) / steps
    }

    /// `⟨n⟩` assembled from the rectangle tallies, with the batch-means error
    /// of the global chain.
    pub fn estimate(&self) -> MeanEstimate<T> {
        let global = self.chain.estimate();
        let mean = (0..self.local.len()).fold(T::zero(), |a, r| a + self.rectangle_mean(r));
        MeanEstimate { mean, ..global }
    }
}
