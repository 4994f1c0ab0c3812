//! Planar surface code of distance `L`.
//!
//! All objects live on one integer grid `0 <= r, c <= 2L - 2`:
//!
//! * data qubits at `r + c` even,
//! * Z-type stabilizers at (odd `r`, even `c`),
//! * X-type stabilizers at (even `r`, odd `c`),
//!
//! and every stabilizer acts on the qubits at `(r ± 1, c)` and `(r, c ± 1)`
//! that lie inside the grid. Violated Z-stabilizers are p-anyons and are
//! absorbed by the top and bottom edges (virtual rows `r = -1` and
//! `r = 2L - 1`); violated X-stabilizers are s-anyons, absorbed by the left
//! and right edges. This is the usual drawing rotated by 90 degrees.

mod frame;

use std::fmt::Write as _;

use arrayvec::ArrayVec;

pub use frame::{Pauli, PauliCounts, PauliFrame};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub r: i32,
    pub c: i32,
}

impl Coord {
    pub fn new(r: i32, c: i32) -> Self {
        Coord { r, c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabKind {
    /// Product of σx; detects phase flips.
    X,
    /// Product of σz; detects bit flips.
    Z,
}

impl StabKind {
    /// The single-qubit Pauli the stabilizer is built from.
    pub fn pauli(self) -> Pauli {
        match self {
            StabKind::X => Pauli::X,
            StabKind::Z => Pauli::Z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub kind: StabKind,
    pub coord: Coord,
    pub support: ArrayVec<u32, 4>,
}

/// Violated stabilizers, as sorted indices into the layout's Z and X lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Syndrome {
    /// Violated Z-stabilizers.
    pub p_anyons: Vec<u32>,
    /// Violated X-stabilizers.
    pub s_anyons: Vec<u32>,
}

impl Syndrome {
    pub fn is_empty(&self) -> bool {
        self.p_anyons.is_empty() && self.s_anyons.is_empty()
    }
}

/// One of the four logical classes, as two parities.
///
/// `bit_h` is the parity of the Z part on the reference X̄ and `bit_v` the
/// parity of the X part on the reference Z̄.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivalenceClass {
    pub bit_h: bool,
    pub bit_v: bool,
}

impl EquivalenceClass {
    pub const I: Self = EquivalenceClass { bit_h: false, bit_v: false };
    pub const X: Self = EquivalenceClass { bit_h: false, bit_v: true };
    pub const Z: Self = EquivalenceClass { bit_h: true, bit_v: false };
    pub const Y: Self = EquivalenceClass { bit_h: true, bit_v: true };
    /// Tie-break priority order.
    pub const ALL: [Self; 4] = [Self::I, Self::X, Self::Z, Self::Y];

    pub fn index(self) -> usize {
        (self.bit_h as usize) << 1 | self.bit_v as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }

    pub fn xor(self, o: Self) -> Self {
        EquivalenceClass { bit_h: self.bit_h ^ o.bit_h, bit_v: self.bit_v ^ o.bit_v }
    }

    pub fn label(self) -> &'static str {
        ["I", "X", "Z", "Y"][self.index()]
    }
}

#[derive(Clone, Debug)]
pub struct CodeLayout {
    distance: usize,
    qubits: Vec<Coord>,
    grid: Vec<Option<u32>>,
    z_stabilizers: Vec<Stabilizer>,
    x_stabilizers: Vec<Stabilizer>,
    /// Per qubit, global ids of the stabilizers acting on it.
    qubit_stabs: Vec<ArrayVec<u32, 4>>,
    logical_x: Vec<u32>,
    logical_z: Vec<u32>,
    logical_x_mask: Vec<u64>,
    logical_z_mask: Vec<u64>,
}

impl CodeLayout {
    pub fn new(distance: usize) -> Result<Self> {
        if distance < 2 {
            return Err(invalid(format!("code distance must be at least 2, got {distance}")));
        }
        if distance > 4096 {
            return Err(invalid(format!("code distance {distance} is unreasonably large")));
        }
        let side = 2 * distance as i32 - 1;
        let mut qubits = Vec::new();
        let mut grid = vec![None; (side * side) as usize];
        for r in 0..side {
            for c in 0..side {
                if (r + c) % 2 == 0 {
                    grid[(r * side + c) as usize] = Some(qubits.len() as u32);
                    qubits.push(Coord::new(r, c));
                }
            }
        }
        let at = |r: i32, c: i32| -> Option<u32> {
            if (0..side).contains(&r) && (0..side).contains(&c) {
                grid[(r * side + c) as usize]
            } else {
                None
            }
        };
        let mut z_stabilizers = Vec::new();
        let mut x_stabilizers = Vec::new();
        for r in 0..side {
            for c in 0..side {
                if (r + c) % 2 == 0 {
                    continue;
                }
                let kind = if r % 2 == 1 { StabKind::Z } else { StabKind::X };
                let support: ArrayVec<u32, 4> =
                    [(r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)].iter().filter_map(|&(a, b)| at(a, b)).collect();
                let s = Stabilizer { kind, coord: Coord::new(r, c), support };
                match kind {
                    StabKind::Z => z_stabilizers.push(s),
                    StabKind::X => x_stabilizers.push(s),
                }
            }
        }
        let n_z = z_stabilizers.len();
        let mut qubit_stabs = vec![ArrayVec::new(); qubits.len()];
        for (i, s) in z_stabilizers.iter().chain(&x_stabilizers).enumerate() {
            for &q in &s.support {
                qubit_stabs[q as usize].push(i as u32);
            }
        }
        debug_assert_eq!(n_z, x_stabilizers.len());

        let logical_x: Vec<u32> = (0..side).step_by(2).map(|r| at(r, 0).unwrap()).collect();
        let logical_z: Vec<u32> = (0..side).step_by(2).map(|c| at(0, c).unwrap()).collect();
        let mask = |qs: &[u32]| {
            let mut f = PauliFrame::identity(qubits.len());
            for &q in qs {
                f.toggle_x(q as usize);
            }
            f.x_words().to_vec()
        };
        let logical_x_mask = mask(&logical_x);
        let logical_z_mask = mask(&logical_z);
        Ok(CodeLayout {
            distance,
            grid,
            qubit_stabs,
            logical_x,
            logical_z,
            logical_x_mask,
            logical_z_mask,
            qubits,
            z_stabilizers,
            x_stabilizers,
        })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// Side length of the coordinate grid, `2L - 1`.
    pub fn side(&self) -> i32 {
        2 * self.distance as i32 - 1
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn n_stabilizers(&self) -> usize {
        self.z_stabilizers.len() + self.x_stabilizers.len()
    }

    pub fn qubits(&self) -> &[Coord] {
        &self.qubits
    }

    pub fn qubit_at(&self, r: i32, c: i32) -> Option<usize> {
        let side = self.side();
        if (0..side).contains(&r) && (0..side).contains(&c) {
            self.grid[(r * side + c) as usize].map(|q| q as usize)
        } else {
            None
        }
    }

    pub fn z_stabilizers(&self) -> &[Stabilizer] {
        &self.z_stabilizers
    }

    pub fn x_stabilizers(&self) -> &[Stabilizer] {
        &self.x_stabilizers
    }

    /// Stabilizer by global id: Z-stabilizers first, then X-stabilizers.
    pub fn stabilizer(&self, id: usize) -> &Stabilizer {
        let nz = self.z_stabilizers.len();
        if id < nz {
            &self.z_stabilizers[id]
        } else {
            &self.x_stabilizers[id - nz]
        }
    }

    pub fn stabilizers(&self) -> impl Iterator<Item = &Stabilizer> {
        self.z_stabilizers.iter().chain(&self.x_stabilizers)
    }

    /// Global ids of the stabilizers acting on `q`.
    pub fn stabilizers_of_qubit(&self, q: usize) -> &[u32] {
        &self.qubit_stabs[q]
    }

    /// Qubits of the reference X̄ (column `c = 0`).
    pub fn logical_x_support(&self) -> &[u32] {
        &self.logical_x
    }

    /// Qubits of the reference Z̄ (row `r = 0`).
    pub fn logical_z_support(&self) -> &[u32] {
        &self.logical_z
    }

    pub fn logical_x(&self) -> PauliFrame {
        let mut f = PauliFrame::identity(self.n_qubits());
        for &q in &self.logical_x {
            f.toggle_x(q as usize);
        }
        f
    }

    pub fn logical_z(&self) -> PauliFrame {
        let mut f = PauliFrame::identity(self.n_qubits());
        for &q in &self.logical_z {
            f.toggle_z(q as usize);
        }
        f
    }

    /// Representative frame of a class: the matching product of X̄ and Z̄.
    pub fn logical(&self, class: EquivalenceClass) -> PauliFrame {
        let mut f = PauliFrame::identity(self.n_qubits());
        if class.bit_v {
            f *= &self.logical_x();
        }
        if class.bit_h {
            f *= &self.logical_z();
        }
        f
    }

    /// Stabilizer as a frame.
    pub fn stabilizer_frame(&self, id: usize) -> PauliFrame {
        let mut f = PauliFrame::identity(self.n_qubits());
        apply_stabilizer(&mut f, self.stabilizer(id));
        f
    }

    pub fn syndrome_of(&self, frame: &PauliFrame) -> Syndrome {
        assert_eq!(frame.len(), self.n_qubits(), "frame sized for a different layout");
        let odd = |s: &Stabilizer, bit: &dyn Fn(usize) -> bool| {
            s.support.iter().filter(|&&q| bit(q as usize)).count() % 2 == 1
        };
        let p_anyons = (0..self.z_stabilizers.len() as u32)
            .filter(|&i| odd(&self.z_stabilizers[i as usize], &|q| frame.x_bit(q)))
            .collect();
        let s_anyons = (0..self.x_stabilizers.len() as u32)
            .filter(|&i| odd(&self.x_stabilizers[i as usize], &|q| frame.z_bit(q)))
            .collect();
        Syndrome { p_anyons, s_anyons }
    }

    pub fn class_of(&self, frame: &PauliFrame) -> EquivalenceClass {
        let parity = |words: &[u64], mask: &[u64]| {
            words.iter().zip(mask).map(|(w, m)| (w & m).count_ones()).sum::<u32>() % 2 == 1
        };
        EquivalenceClass {
            bit_h: parity(frame.z_words(), &self.logical_x_mask),
            bit_v: parity(frame.x_words(), &self.logical_z_mask),
        }
    }

    /// Line-oriented listing of qubits and stabilizers, ordered by `(r, c)`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "distance {}", self.distance).unwrap();
        for (i, q) in self.qubits.iter().enumerate() {
            writeln!(out, "qubit {i} {} {}", q.r, q.c).unwrap();
        }
        let mut all: Vec<(usize, &Stabilizer)> = self.stabilizers().enumerate().collect();
        all.sort_by_key(|(_, s)| s.coord);
        for (id, s) in all {
            let tag = match s.kind {
                StabKind::X => "xstab",
                StabKind::Z => "zstab",
            };
            let support: Vec<String> = s.support.iter().map(u32::to_string).collect();
            writeln!(out, "{tag} {id} {} {} {}", s.coord.r, s.coord.c, support.join(" ")).unwrap();
        }
        out
    }
}

/// Multiplies `frame` by the stabilizer in place.
pub fn apply_stabilizer(frame: &mut PauliFrame, stab: &Stabilizer) {
    match stab.kind {
        StabKind::X => stab.support.iter().for_each(|&q| frame.toggle_x(q as usize)),
        StabKind::Z => stab.support.iter().for_each(|&q| frame.toggle_z(q as usize)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_closed_forms() {
        for l in 2..9 {
            let layout = CodeLayout::new(l).unwrap();
            assert_eq!(layout.n_qubits(), l * l + (l - 1) * (l - 1));
            assert_eq!(layout.n_stabilizers(), 2 * l * (l - 1));
            assert_eq!(layout.z_stabilizers().len(), l * (l - 1));
            assert_eq!(layout.n_qubits(), layout.n_stabilizers() + 1);
        }
        assert!(CodeLayout::new(1).is_err());
        assert!(CodeLayout::new(0).is_err());
    }

    #[test]
    fn hand_counted_small_codes() {
        let l2 = CodeLayout::new(2).unwrap();
        assert_eq!((l2.n_qubits(), l2.n_stabilizers()), (5, 4));
        let l3 = CodeLayout::new(3).unwrap();
        assert_eq!((l3.n_qubits(), l3.n_stabilizers()), (13, 12));
        let l4 = CodeLayout::new(4).unwrap();
        assert_eq!((l4.n_qubits(), l4.n_stabilizers()), (25, 24));
        assert_eq!(l4.x_stabilizers().len(), 12);
    }

    #[test]
    fn supports_have_three_or_four_qubits() {
        let layout = CodeLayout::new(5).unwrap();
        let side = layout.side();
        for s in layout.stabilizers() {
            let interior = s.coord.r > 0 && s.coord.c > 0 && s.coord.r < side - 1 && s.coord.c < side - 1;
            if interior {
                assert_eq!(s.support.len(), 4);
            } else {
                assert_eq!(s.support.len(), 3);
            }
        }
    }

    #[test]
    fn stabilizers_commute() {
        let layout = CodeLayout::new(4).unwrap();
        for x in layout.x_stabilizers() {
            for z in layout.z_stabilizers() {
                let overlap = x.support.iter().filter(|q| z.support.contains(q)).count();
                assert_eq!(overlap % 2, 0);
            }
        }
    }

    #[test]
    fn single_errors_on_l3() {
        let layout = CodeLayout::new(3).unwrap();
        let q = layout.qubit_at(2, 2).unwrap();
        let mut f = PauliFrame::identity(layout.n_qubits());
        f.set(q, Pauli::X);
        let s = layout.syndrome_of(&f);
        assert_eq!((s.p_anyons.len(), s.s_anyons.len()), (2, 0));
        f.set(q, Pauli::Y);
        let s = layout.syndrome_of(&f);
        assert_eq!((s.p_anyons.len(), s.s_anyons.len()), (2, 2));
        // Z-stabilizers (1,2) and (3,2); X-stabilizers (2,1) and (2,3).
        let zc: Vec<Coord> = s.p_anyons.iter().map(|&i| layout.z_stabilizers()[i as usize].coord).collect();
        let xc: Vec<Coord> = s.s_anyons.iter().map(|&i| layout.x_stabilizers()[i as usize].coord).collect();
        assert_eq!(zc, vec![Coord::new(1, 2), Coord::new(3, 2)]);
        assert_eq!(xc, vec![Coord::new(2, 1), Coord::new(2, 3)]);
    }

    #[test]
    fn apply_stabilizer_examples() {
        let layout = CodeLayout::new(3).unwrap();
        let id = layout.z_stabilizers().len() + 2;
        let stab = layout.stabilizer(id).clone();
        assert_eq!(stab.kind, StabKind::X);

        let mut f = PauliFrame::identity(layout.n_qubits());
        apply_stabilizer(&mut f, &stab);
        assert_eq!(f.weight(), stab.support.len());
        assert!(stab.support.iter().all(|&q| f.get(q as usize) == Pauli::X));
        apply_stabilizer(&mut f, &stab);
        assert_eq!(f.weight(), 0);

        let mut g = PauliFrame::identity(layout.n_qubits());
        let q0 = stab.support[0] as usize;
        g.set(q0, Pauli::Z);
        let before = g.weight();
        apply_stabilizer(&mut g, &stab);
        assert_eq!(g.get(q0), Pauli::Y);
        assert_eq!(g.weight() - before, stab.support.len() - 1);
    }

    #[test]
    fn logical_operators() {
        let layout = CodeLayout::new(3).unwrap();
        let xbar = layout.logical_x();
        let zbar = layout.logical_z();
        assert!(layout.syndrome_of(&xbar).is_empty());
        assert!(layout.syndrome_of(&zbar).is_empty());
        assert_eq!(layout.class_of(&PauliFrame::identity(13)), EquivalenceClass::I);
        assert_eq!(layout.class_of(&xbar), EquivalenceClass { bit_h: false, bit_v: true });
        assert_eq!(layout.class_of(&zbar), EquivalenceClass::Z);
        // σy on every qubit of X̄'s support
        let mut y = PauliFrame::identity(13);
        for &q in layout.logical_x_support() {
            y.set(q as usize, Pauli::Y);
        }
        assert_eq!(layout.class_of(&y), EquivalenceClass::Y);
        // X̄ and Z̄ overlap on exactly one qubit
        let overlap = layout.logical_x_support().iter().filter(|q| layout.logical_z_support().contains(q)).count();
        assert_eq!(overlap, 1);
        for c in EquivalenceClass::ALL {
            assert_eq!(layout.class_of(&layout.logical(c)), c);
        }
    }

    #[test]
    fn stabilizer_group_is_trivial_at_l3() {
        let layout = CodeLayout::new(3).unwrap();
        let n = layout.n_stabilizers();
        let mut f = PauliFrame::identity(layout.n_qubits());
        for k in 1u32..(1 << n) {
            let bit = k.trailing_zeros() as usize;
            apply_stabilizer(&mut f, layout.stabilizer(bit));
            assert!(layout.syndrome_of(&f).is_empty());
            assert_eq!(layout.class_of(&f), EquivalenceClass::I);
        }
    }

    #[test]
    fn dump_is_sorted() {
        let layout = CodeLayout::new(2).unwrap();
        let text = layout.dump();
        assert!(text.starts_with("distance 2\nqubit 0 0 0\n"));
        assert_eq!(text.lines().count(), 1 + 5 + 4);
        assert!(text.contains("zstab 0 1 0 0 2 3\n"));
    }
}
