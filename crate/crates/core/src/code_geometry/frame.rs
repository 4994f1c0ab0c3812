use std::fmt;
use std::ops::{Mul, MulAssign};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Index into `[I, X, Y, Z]` tables.
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Number of qubits carrying each non-identity Pauli.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliCounts {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl PauliCounts {
    /// Error count with a Y counted once.
    pub fn weight(&self) -> u32 {
        self.x + self.y + self.z
    }

    /// Error count with a Y counted as one bit flip plus one phase flip,
    /// i.e. the quantity minimised by matching the two anyon species apart.
    pub fn separable_weight(&self) -> u32 {
        self.x + 2 * self.y + self.z
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.x, self.y, self.z]
    }

    pub(crate) fn add(&mut self, p: Pauli) {
        match p {
            Pauli::I => {}
            Pauli::X => self.x += 1,
            Pauli::Y => self.y += 1,
            Pauli::Z => self.z += 1,
        }
    }

    pub(crate) fn remove(&mut self, p: Pauli) {
        match p {
            Pauli::I => {}
            Pauli::X => self.x -= 1,
            Pauli::Y => self.y -= 1,
            Pauli::Z => self.z -= 1,
        }
    }
}

/// Pauli assignment to every data qubit, stored as an x bit-plane and a z
/// bit-plane.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    len: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

#[inline]
fn split(q: usize) -> (usize, u64) {
    (q / 64, 1u64 << (q % 64))
}

impl PauliFrame {
    pub fn identity(len: usize) -> Self {
        let words = len.div_ceil(64);
        PauliFrame { len, x: vec![0; words], z: vec![0; words] }
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut f = PauliFrame::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            f.set(q, p);
        }
        f
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        let (w, m) = split(q);
        Pauli::from_bits(self.x[w] & m != 0, self.z[w] & m != 0)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (w, m) = split(q);
        let (x, z) = p.bits();
        if x {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if z {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        let (w, m) = split(q);
        self.x[w] & m != 0
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        let (w, m) = split(q);
        self.z[w] & m != 0
    }

    #[inline]
    pub fn toggle_x(&mut self, q: usize) {
        let (w, m) = split(q);
        self.x[w] ^= m;
    }

    #[inline]
    pub fn toggle_z(&mut self, q: usize) {
        let (w, m) = split(q);
        self.z[w] ^= m;
    }

    /// Multiplies qubit `q` by `p` (phases dropped).
    #[inline]
    pub fn mul_qubit(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        if x {
            self.toggle_x(q);
        }
        if z {
            self.toggle_z(q);
        }
    }

    /// Number of qubits with a non-identity Pauli.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn counts(&self) -> PauliCounts {
        let mut c = PauliCounts::default();
        for (x, z) in self.x.iter().zip(&self.z) {
            c.x += (x & !z).count_ones();
            c.y += (x & z).count_ones();
            c.z += (!x & z).count_ones();
        }
        c
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// The X part of the frame (Y becomes X, Z becomes I).
    pub fn x_part(&self) -> PauliFrame {
        PauliFrame { len: self.len, x: self.x.clone(), z: vec![0; self.z.len()] }
    }

    /// The Z part of the frame.
    pub fn z_part(&self) -> PauliFrame {
        PauliFrame { len: self.len, x: vec![0; self.x.len()], z: self.z.clone() }
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len).map(move |q| self.get(q))
    }

    /// Little-endian byte image of the two bit-planes, x first.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.x.iter().chain(&self.z).flat_map(|w| w.to_le_bytes()).collect()
    }
}

impl MulAssign<&PauliFrame> for PauliFrame {
    fn mul_assign(&mut self, rhs: &PauliFrame) {
        assert_eq!(self.len, rhs.len, "frame sizes differ");
        for (a, b) in self.x.iter_mut().zip(&rhs.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&rhs.z) {
            *a ^= b;
        }
    }
}

impl Mul<&PauliFrame> for &PauliFrame {
    type Output = PauliFrame;

    fn mul(self, rhs: &PauliFrame) -> PauliFrame {
        let mut out = self.clone();
        out *= rhs;
        out
    }
}

impl fmt::Debug for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .iter()
            .map(|p| match p {
                Pauli::I => '.',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            })
            .collect();
        write!(f, "PauliFrame({s})")
    }
}
