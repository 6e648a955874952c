//! Explicit matrices of c(e_j) and ĉ(e_j) on ∧*ℝⁿ, used as an oracle for the
//! Wick trace and for the flat operator check.

use crate::clifford::{word_generators, Channel, Clifford, Generator};
use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Poly};

pub const MAX_N: usize = 8;

/// Dense 2ⁿ×2ⁿ matrix; basis vectors are subsets of {1..n} as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtMatrix {
    pub n: usize,
    dim: usize,
    entries: Vec<GaussRat>,
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::SizeGuard(n));
    }
    Ok(())
}

/// Sign (−1)^{#{s ∈ S : s < j}} for 0-based j.
fn below_sign(set: usize, j: usize) -> i64 {
    if (set & ((1 << j) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Image of basis vector `set` under c(e_j) (ĉ if `hat`): (sign, new set).
fn apply_gen(set: usize, j: usize, hat: bool) -> (i64, usize) {
    let s = below_sign(set, j);
    if set & (1 << j) == 0 {
        (s, set | (1 << j))
    } else if hat {
        (s, set ^ (1 << j))
    } else {
        (-s, set ^ (1 << j))
    }
}

impl ExtMatrix {
    pub fn zero(n: usize) -> Result<Self> {
        guard(n)?;
        let dim = 1 << n;
        Ok(ExtMatrix { n, dim, entries: vec![GaussRat::zero(); dim * dim] })
    }
    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zero(n)?;
        for i in 0..m.dim {
            m.set(i, i, GaussRat::one());
        }
        Ok(m)
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn get(&self, r: usize, c: usize) -> &GaussRat {
        &self.entries[r * self.dim + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: GaussRat) {
        self.entries[r * self.dim + c] = v;
    }
    pub fn add(&self, o: &Self) -> Self {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect();
        ExtMatrix { n: self.n, dim: self.dim, entries }
    }
    pub fn sub(&self, o: &Self) -> Self {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect();
        ExtMatrix { n: self.n, dim: self.dim, entries }
    }
    pub fn scale(&self, c: &GaussRat) -> Self {
        let entries = self.entries.iter().map(|a| a * c).collect();
        ExtMatrix { n: self.n, dim: self.dim, entries }
    }
    pub fn mul(&self, o: &Self) -> Self {
        let d = self.dim;
        let mut out = vec![GaussRat::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &o.entries[k * d + j];
                    if !b.is_zero() {
                        out[i * d + j] = &out[i * d + j] + &(a * b);
                    }
                }
            }
        }
        ExtMatrix { n: self.n, dim: d, entries: out }
    }
    pub fn trace(&self) -> GaussRat {
        (0..self.dim).fold(GaussRat::zero(), |acc, i| &acc + self.get(i, i))
    }
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

fn build(j: usize, n: usize, hat: bool) -> Result<ExtMatrix> {
    guard(n)?;
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange(format!("generator index {j} at n = {n}")));
    }
    let mut m = ExtMatrix::zero(n)?;
    for set in 0..m.dim {
        let (s, img) = apply_gen(set, j - 1, hat);
        m.set(img, set, GaussRat::int(s));
    }
    Ok(m)
}

/// c(e_j) = ε(e_j*) − ι(e_j*).
pub fn build_c(j: usize, n: usize) -> Result<ExtMatrix> {
    build(j, n, false)
}

/// ĉ(e_j) = ε(e_j*) + ι(e_j*).
pub fn build_chat(j: usize, n: usize) -> Result<ExtMatrix> {
    build(j, n, true)
}

pub fn build_generator(g: Generator, n: usize) -> Result<ExtMatrix> {
    match g.channel {
        Channel::C => build_c(g.index as usize, n),
        Channel::Chat => build_chat(g.index as usize, n),
        Channel::Jet => Err(Error::Unsupported(format!("{g} has no matrix model"))),
    }
}

/// Matrix of a Clifford element whose coefficients are numbers.
pub fn to_matrix(a: &Clifford<Poly>, n: usize) -> Result<ExtMatrix> {
    let mut out = ExtMatrix::zero(n)?;
    for (w, c) in a.terms() {
        let c = c.constant_value().ok_or_else(|| Error::Unsupported(format!("symbolic coefficient {c}")))?;
        let mut m = ExtMatrix::identity(n)?;
        for g in word_generators(*w) {
            m = m.mul(&build_generator(g, n)?);
        }
        out = out.add(&m.scale(&c));
    }
    Ok(out)
}

/// Trace of the ordered product, computed by pushing each basis vector
/// through the generators (each maps a basis vector to ± a basis vector).
pub fn oracle_trace(word: &[Generator], n: usize) -> Result<GaussRat> {
    guard(n)?;
    for g in word {
        if g.channel == Channel::Jet {
            return Err(Error::Unsupported(format!("{g} has no matrix model")));
        }
        if g.index == 0 || g.index as usize > n {
            return Err(Error::IndexOutOfRange(format!("{g} at n = {n}")));
        }
    }
    let mut total: i64 = 0;
    for start in 0..(1usize << n) {
        let mut set = start;
        let mut sign = 1;
        for g in word.iter().rev() {
            let (s, img) = apply_gen(set, g.index as usize - 1, g.channel == Channel::Chat);
            sign *= s;
            set = img;
        }
        if set == start {
            total += sign;
        }
    }
    Ok(GaussRat::int(total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_matrix() {
        let c = build_c(1, 1).unwrap();
        assert_eq!(*c.get(0, 1), GaussRat::int(-1));
        assert_eq!(*c.get(1, 0), GaussRat::int(1));
        assert!(c.get(0, 0).is_zero() && c.get(1, 1).is_zero());
    }

    #[test]
    fn clifford_relations() {
        for n in 1..=5 {
            let id = ExtMatrix::identity(n).unwrap();
            for i in 1..=n {
                let ci = build_c(i, n).unwrap();
                let hi = build_chat(i, n).unwrap();
                for j in 1..=n {
                    let cj = build_c(j, n).unwrap();
                    let hj = build_chat(j, n).unwrap();
                    let d = if i == j { 2 } else { 0 };
                    assert_eq!(ci.mul(&cj).add(&cj.mul(&ci)), id.scale(&GaussRat::int(-d)));
                    assert_eq!(hi.mul(&hj).add(&hj.mul(&hi)), id.scale(&GaussRat::int(d)));
                    assert!(ci.mul(&hj).add(&hj.mul(&ci)).is_zero());
                }
            }
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(ExtMatrix::identity(4).unwrap().trace(), GaussRat::int(16));
        let w = [Generator::c(1), Generator::c(1)];
        assert_eq!(oracle_trace(&w, 4).unwrap(), GaussRat::int(-16));
        assert!(oracle_trace(&[Generator::c(1), Generator::c(2)], 4).unwrap().is_zero());
        let w = [Generator::c(1), Generator::chat(2), Generator::chat(2), Generator::c(1)];
        assert_eq!(oracle_trace(&w, 4).unwrap(), GaussRat::int(-16));
        assert!(matches!(oracle_trace(&[Generator::jet(1)], 4), Err(Error::Unsupported(_))));
        assert!(matches!(build_c(1, 9), Err(Error::SizeGuard(9))));
    }

    #[test]
    fn oracle_matches_matrix_product() {
        let n = 3;
        let w = [Generator::c(1), Generator::chat(2), Generator::c(3), Generator::chat(1)];
        let mut m = ExtMatrix::identity(n).unwrap();
        for g in &w {
            m = m.mul(&build_generator(*g, n).unwrap());
        }
        assert_eq!(m.trace(), oracle_trace(&w, n).unwrap());
    }
}
