#![allow(dead_code)]

use num_complex::Complex64;
use rlw_core::group::{circle, GroupElement, Signature, SingularSet};
use rlw_core::lw_data::{sixj_bounds, Label, LwData, Scalars};
use rlw_core::surface::{admissible_representative, Coloring, CycleBasis, RibbonGraph};
use rlw_core::{Error, Result};
use serde_json::{json, Value};

/// Fibonacci ⊗ P(N, c): tag = 2a + x with a ∈ ℤ/N and x ∈ {0 = 1, 1 = τ}.
///
/// The Fibonacci factor is the tetrahedrally symmetric gauge with d = (1, φ);
/// its 6j value depends only on which tetrahedron edges carry the trivial label.
pub struct FibP {
    n: u32,
    c: f64,
    sig: Signature,
    singular: SingularSet,
}

pub fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

impl FibP {
    pub fn new(n: u32, c: f64) -> Self {
        FibP { n, c, sig: Signature::circle(), singular: SingularSet::TorsionDividing(6) }
    }

    fn split(&self, j: &Label) -> (u32, u32) {
        (j.tag / 2, j.tag % 2)
    }

    fn fib_admissible(x: [u32; 3]) -> bool {
        x.iter().sum::<u32>() != 1
    }

    fn fib_sixj(x: [u32; 6]) -> f64 {
        let f = phi();
        let trivial: Vec<usize> = (0..6).filter(|&i| x[i] == 0).collect();
        match trivial.len() {
            0 => -1.0 / (f * f),
            1 => 1.0 / f,
            // Two trivial edges are necessarily opposite: (0,3), (1,4), (2,5).
            2 => 1.0 / f,
            3 => 1.0 / f.sqrt(),
            6 => 1.0,
            _ => unreachable!("inadmissible Fibonacci tetrahedron"),
        }
    }
}

impl LwData for FibP {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn singular(&self) -> &SingularSet {
        &self.singular
    }

    fn labels(&self, g: &GroupElement) -> Result<Vec<Label>> {
        if !self.singular.is_generic(g) {
            return Err(Error::Domain(g.to_string()));
        }
        Ok((0..2 * self.n).map(|t| Label::new(g.clone(), t)).collect())
    }

    fn dual(&self, j: &Label) -> Result<Label> {
        let (a, x) = self.split(j);
        Ok(Label::new(j.degree.neg(), 2 * ((self.n - a) % self.n) + x))
    }

    fn delta(&self, i: &Label, j: &Label, k: &Label) -> Result<u32> {
        let (ai, xi) = self.split(i);
        let (aj, xj) = self.split(j);
        let (ak, xk) = self.split(k);
        let deg = (&(&i.degree + &j.degree) + &k.degree).is_zero();
        Ok(u32::from(deg && (ai + aj + ak) % self.n == 0 && Self::fib_admissible([xi, xj, xk])))
    }

    fn scalars(&self, i: &Label) -> Result<Scalars> {
        let df = if self.split(i).1 == 1 { phi() } else { 1.0 };
        let dd = 2.0 + phi();
        Ok(Scalars { d: self.c * df, b: df / dd / f64::from(self.n), beta: 1.0 })
    }

    fn gamma(&self, i: &Label, j: &Label, k: &Label, n: u32) -> Result<f64> {
        let delta = self.delta(i, j, k)?;
        if n < 1 || n > delta {
            return Err(Error::Index(format!("gamma index {n} outside 1..={delta}")));
        }
        Ok(1.0)
    }

    fn sixj(&self, j: [&Label; 6], a: [u32; 4]) -> Result<Complex64> {
        let b = sixj_bounds(self, j)?;
        if a.iter().zip(b).any(|(&x, m)| x < 1 || x > m) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let x = j.map(|l| self.split(l).1);
        Ok(Complex64::new(Self::fib_sixj(x) / self.c, 0.0))
    }

    fn describe(&self) -> Value {
        json!({"family": "FibP", "N": self.n, "c": self.c})
    }
}

/// The tree/cotree coloring with the given holonomy, moved into an admissible gauge.
pub fn admissible_coloring(graph: &RibbonGraph, data: &dyn LwData, hol: &[GroupElement]) -> Coloring {
    let phi = CycleBasis::new(graph).coloring(graph, data.signature(), hol).expect("holonomy coloring");
    let mut cands: Vec<GroupElement> = Vec::new();
    for h in hol {
        cands.push(h.clone());
        cands.push(h.neg());
    }
    for q in [5, 7, 11] {
        for a in 1..q {
            cands.push(circle(a, q));
        }
    }
    admissible_representative(graph, &phi, data.singular(), &cands, 1_000_000).expect("admissible gauge").1
}

pub fn fifths(a: i64, b: i64) -> Vec<GroupElement> {
    vec![circle(a, 5), circle(b, 5)]
}
