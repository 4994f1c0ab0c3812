//! Deterministic low-weight error patterns.
//!
//! A straight chain of `(L+1)/2` bit flips running from the top boundary
//! down the middle column is closer to the bottom boundary's completion, so
//! any matching decoder completes it to a logical. Marking the two ends of
//! the chain with Y errors adds phase-flip anyons that only a decoder
//! comparing whole-chain weights with Y counted once can use.

use std::fmt;

use crate::code_geometry::{CodeLayout, Pauli, PauliFrame};
use crate::error::{invalid, Result};
use crate::matching::match_syndrome;
use crate::noise::NoiseModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FatalCase {
    pub distance: usize,
    pub name: &'static str,
    pub frame: PauliFrame,
    pub expect_standard: bool,
    pub expect_enhanced: bool,
    pub standard_ok: bool,
    pub enhanced_ok: bool,
}

impl FatalCase {
    pub fn passed(&self) -> bool {
        self.standard_ok == self.expect_standard && self.enhanced_ok == self.expect_enhanced
    }
}

#[derive(Clone, Debug, Default)]
pub struct FatalReport {
    pub cases: Vec<FatalCase>,
}

impl FatalReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(FatalCase::passed)
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "correct"
    } else {
        "wrong"
    }
}

impl fmt::Display for FatalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            writeln!(
                f,
                "{} L={} {}: standard {} (expected {}), enhanced {} (expected {})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.distance,
                c.name,
                ok(c.standard_ok),
                ok(c.expect_standard),
                ok(c.enhanced_ok),
                ok(c.expect_enhanced),
            )?;
        }
        Ok(())
    }
}

/// Frame with `len` errors down the middle column from row 0; the errors at
/// the two ends are Y when `marked`.
pub fn column_chain(layout: &CodeLayout, len: usize, marked: bool) -> PauliFrame {
    let c = layout.distance() as i32 - 1;
    let mut f = PauliFrame::identity(layout.n_qubits());
    for k in 0..len {
        let q = layout.qubit_at(2 * k as i32, c).expect("chain stays on the lattice");
        let end = k == 0 || k + 1 == len;
        f.set(q, if marked && end { Pauli::Y } else { Pauli::X });
    }
    f
}

pub fn fatal_pattern_suite(distances: &[usize]) -> Result<FatalReport> {
    let mut report = FatalReport::default();
    let model = NoiseModel::<f64>::depolarizing(0.01)?;
    for &l in distances {
        if l % 2 == 0 || l < 3 {
            return Err(invalid(format!("fatal patterns need an odd distance >= 3, got {l}")));
        }
        let layout = CodeLayout::new(l)?;
        let long = l.div_ceil(2);
        let cases = [
            ("marked half chain", column_chain(&layout, long, true), false, true),
            ("plain half chain", column_chain(&layout, long, false), false, false),
            ("short chain", column_chain(&layout, l / 2, false), true, true),
        ];
        for (name, frame, expect_standard, expect_enhanced) in cases {
            let truth = layout.class_of(&frame);
            let m = match_syndrome(&layout, &layout.syndrome_of(&frame))?;
            let standard_ok = m.standard_verdict::<f64>(&layout).class == truth;
            let enhanced_ok = m.enhanced_verdict(&model)?.class == truth;
            report.cases.push(FatalCase {
                distance: l,
                name,
                frame,
                expect_standard,
                expect_enhanced,
                standard_ok,
                enhanced_ok,
            });
        }
    }
    Ok(report)
}
