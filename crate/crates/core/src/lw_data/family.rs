use num_complex::Complex64;
use serde_json::{json, Value};

use super::{Label, LwData, Scalars};
use crate::error::{Error, Result};
use crate::group::{GroupElement, Signature, SingularSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// d = c, N6j = 1/c.
    P,
    /// d = −c, N6j = −1/c.
    M,
    /// As P with γ = γ0 and β = γ0^(−2/3).
    F,
}

/// Pointed families over ℚ/ℤ with X = {x : 6x = 0} and I_g = {g} × ℤ/N.
#[derive(Debug, Clone)]
pub struct Family {
    kind: FamilyKind,
    n: u32,
    c: f64,
    gamma0: f64,
    sig: Signature,
    singular: SingularSet,
}

impl Family {
    pub fn new(kind: FamilyKind, n: u32, c: f64, gamma0: f64) -> Result<Self> {
        if n == 0 || !(c.is_finite() && c > 0.0) || !(gamma0.is_finite() && gamma0 != 0.0) {
            return Err(Error::Parse(format!("family parameters out of range: N={n}, c={c}, gamma0={gamma0}")));
        }
        if kind != FamilyKind::F && gamma0 != 1.0 {
            return Err(Error::Parse("gamma0 only applies to family F".into()));
        }
        Ok(Family { kind, n, c, gamma0, sig: Signature::circle(), singular: SingularSet::TorsionDividing(6) })
    }

    pub fn p(n: u32, c: f64) -> Self {
        Family::new(FamilyKind::P, n, c, 1.0).expect("valid P parameters")
    }

    pub fn m(n: u32, c: f64) -> Self {
        Family::new(FamilyKind::M, n, c, 1.0).expect("valid M parameters")
    }

    pub fn f(n: u32, c: f64, gamma0: f64) -> Self {
        Family::new(FamilyKind::F, n, c, gamma0).expect("valid F parameters")
    }

    pub fn rank(&self) -> u32 {
        self.n
    }

    fn check(&self, j: &Label) -> Result<()> {
        if !self.sig.contains(&j.degree) || j.tag >= self.n {
            return Err(Error::MissingData(format!("unknown label {j}")));
        }
        if !self.singular.is_generic(&j.degree) {
            return Err(Error::Domain(j.degree.to_string()));
        }
        Ok(())
    }

    fn fuses(&self, i: &Label, j: &Label, k: &Label) -> bool {
        (&(&i.degree + &j.degree) + &k.degree).is_zero() && (i.tag + j.tag + k.tag).is_multiple_of(self.n)
    }
}

impl LwData for Family {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn singular(&self) -> &SingularSet {
        &self.singular
    }

    fn labels(&self, g: &GroupElement) -> Result<Vec<Label>> {
        if !self.sig.contains(g) {
            return Err(Error::GroupArithmetic(format!("{g} is not in Q/Z")));
        }
        if !self.singular.is_generic(g) {
            return Err(Error::Domain(g.to_string()));
        }
        Ok((0..self.n).map(|a| Label::new(g.clone(), a)).collect())
    }

    fn dual(&self, j: &Label) -> Result<Label> {
        self.check(j)?;
        Ok(Label::new(j.degree.neg(), (self.n - j.tag) % self.n))
    }

    fn delta(&self, i: &Label, j: &Label, k: &Label) -> Result<u32> {
        self.check(i)?;
        self.check(j)?;
        self.check(k)?;
        Ok(u32::from(self.fuses(i, j, k)))
    }

    fn scalars(&self, i: &Label) -> Result<Scalars> {
        self.check(i)?;
        let d = if self.kind == FamilyKind::M { -self.c } else { self.c };
        Ok(Scalars { d, b: 1.0 / f64::from(self.n), beta: self.gamma0.powf(-2.0 / 3.0) })
    }

    fn gamma(&self, i: &Label, j: &Label, k: &Label, n: u32) -> Result<f64> {
        let delta = self.delta(i, j, k)?;
        if n < 1 || n > delta {
            return Err(Error::Index(format!("gamma index {n} outside 1..={delta} for ({i},{j},{k})")));
        }
        Ok(self.gamma0)
    }

    fn sixj(&self, j: [&Label; 6], a: [u32; 4]) -> Result<Complex64> {
        let bounds = super::sixj_bounds(self, j)?;
        if a.iter().zip(bounds).any(|(&x, b)| x < 1 || x > b) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = if self.kind == FamilyKind::M { -1.0 / self.c } else { 1.0 / self.c };
        Ok(Complex64::new(v, 0.0))
    }

    fn describe(&self) -> Value {
        let kind = match self.kind {
            FamilyKind::P => "P",
            FamilyKind::M => "M",
            FamilyKind::F => "F",
        };
        let mut v = json!({"family": kind, "N": self.n, "c": self.c});
        if self.kind == FamilyKind::F {
            v["gamma0"] = json!(self.gamma0);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::circle as frac;

    #[test]
    fn labels_and_domain() {
        let p = Family::p(3, 2.0);
        let ls = p.labels(&frac(1, 5)).unwrap();
        assert_eq!(ls.iter().map(|l| l.to_string()).collect::<Vec<_>>(), ["1/5:0", "1/5:1", "1/5:2"]);
        assert!(matches!(p.labels(&frac(1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn fusion_and_scalars() {
        let p = Family::p(3, 2.0);
        let l = |a, q, t| Label::new(frac(a, q), t);
        assert_eq!(p.delta(&l(1, 5, 1), &l(2, 5, 1), &l(2, 5, 1)).unwrap(), 1);
        assert_eq!(p.delta(&l(1, 5, 1), &l(2, 5, 1), &l(2, 5, 0)).unwrap(), 0);
        assert_eq!(p.delta(&l(1, 5, 0), &l(2, 5, 0), &l(3, 5, 0)).unwrap(), 0);
        let s = p.scalars(&l(1, 5, 0)).unwrap();
        assert_eq!((s.d, s.b, s.beta), (2.0, 1.0 / 3.0, 1.0));
        let m = Family::m(2, 1.0).scalars(&l(1, 5, 0)).unwrap();
        assert_eq!((m.d, m.b, m.beta), (-1.0, 0.5, 1.0));
        assert_eq!(p.dual(&l(1, 5, 1)).unwrap(), l(4, 5, 2));
    }

    #[test]
    fn gamma_values_and_range() {
        let f = Family::f(2, 1.0, 2.0);
        let (i, j, k) = (Label::new(frac(1, 5), 1), Label::new(frac(2, 5), 1), Label::new(frac(2, 5), 0));
        assert_eq!(f.gamma(&i, &j, &k, 1).unwrap(), 2.0);
        assert!(matches!(f.gamma(&i, &j, &k, 2), Err(Error::Index(_))));
        let beta = f.scalars(&i).unwrap().beta;
        assert!((4.0 * beta.powi(3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sixj_support() {
        let p = Family::p(2, 2.0);
        let m = Family::m(2, 2.0);
        let z = |a, q| Label::new(frac(a, q), 0);
        // j3 = j1+j2, j5 = j3+j4, j6 = j5−j1
        let j = [z(1, 5), z(1, 7), z(12, 35), z(1, 7), z(17, 35), z(10, 35)];
        let r = [&j[0], &j[1], &j[2], &j[3], &j[4], &j[5]];
        assert_eq!(p.sixj(r, [1, 1, 1, 1]).unwrap().re, 0.5);
        assert_eq!(m.sixj(r, [1, 1, 1, 1]).unwrap().re, -0.5);
        assert_eq!(p.sixj(r, [1, 2, 1, 1]).unwrap().re, 0.0);
        assert_eq!(p.sixj(r, [0, 1, 1, 1]).unwrap().re, 0.0);
    }
}
