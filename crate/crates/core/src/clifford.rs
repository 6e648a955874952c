//! Clifford word algebra with generators c(e_i), ĉ(e_i) and the jet
//! generators for ∂ₓₙc(ξ′), plus the Wick-pairing trace.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Poly, Ring, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    C,
    Chat,
    Jet,
}

/// A generator; ordered by (channel, index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub channel: Channel,
    pub index: u8,
}

pub const MAX_DIM: usize = 8;

impl Generator {
    pub fn c(i: u8) -> Self {
        Generator { channel: Channel::C, index: i }
    }
    pub fn chat(i: u8) -> Self {
        Generator { channel: Channel::Chat, index: i }
    }
    pub fn jet(i: u8) -> Self {
        Generator { channel: Channel::Jet, index: i }
    }
    pub fn bit(self) -> u32 {
        let base = match self.channel {
            Channel::C => 0,
            Channel::Chat => 8,
            Channel::Jet => 16,
        };
        1u32 << (base + self.index as u32 - 1)
    }
    pub fn from_bit(pos: u32) -> Self {
        let index = (pos % 8 + 1) as u8;
        match pos / 8 {
            0 => Generator::c(index),
            1 => Generator::chat(index),
            _ => Generator::jet(index),
        }
    }
    /// Checks the index range for dimension `n`.
    pub fn validate(self, n: usize) -> Result<()> {
        let hi = if self.channel == Channel::Jet { n - 1 } else { n };
        if self.index == 0 || self.index as usize > hi || n > MAX_DIM {
            return Err(Error::IndexOutOfRange(format!("{self} at n = {n}")));
        }
        Ok(())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.channel {
            Channel::C => write!(f, "c({})", self.index),
            Channel::Chat => write!(f, "ch({})", self.index),
            Channel::Jet => write!(f, "jet({})", self.index),
        }
    }
}

/// A normal-ordered word, one bit per generator.
pub type Word = u32;

pub fn word_generators(w: Word) -> Vec<Generator> {
    (0..24).filter(|b| w & (1 << b) != 0).map(Generator::from_bit).collect()
}

pub fn word_from(gens: &[Generator]) -> Word {
    gens.iter().fold(0, |w, g| w | g.bit())
}

/// Value of the pairing: `coef · h′^hp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub coef_half: i64,
    pub hp: u8,
}

impl Pairing {
    const ZERO: Pairing = Pairing { coef_half: 0, hp: 0 };
    pub fn is_zero(self) -> bool {
        self.coef_half == 0
    }
    /// The value as a polynomial (coef_half is twice the pairing).
    pub fn to_poly(self) -> Poly {
        Poly::monomial(
            {
                let mut m = [0u8; crate::scalar::NVARS];
                m[Var::HPrime.index()] = self.hp;
                m
            },
            GaussRat::frac(self.coef_half, 2),
        )
    }
}

/// The symmetric bilinear form B on generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairingForm;

impl PairingForm {
    /// B(a, b) stored doubled, so that 2B is an integer multiple of a power of h′.
    pub fn pair(a: Generator, b: Generator) -> Result<Pairing> {
        use Channel::*;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let same = a.index == b.index;
        Ok(match (a.channel, b.channel) {
            (C, C) if same => Pairing { coef_half: -2, hp: 0 },
            (Chat, Chat) if same => Pairing { coef_half: 2, hp: 0 },
            (C, Jet) if same => Pairing { coef_half: -1, hp: 1 },
            (Jet, Jet) => {
                return Err(Error::UndefinedPairing(a.to_string(), b.to_string()));
            }
            _ => Pairing::ZERO,
        })
    }
}

/// One term of a word product: factor·h′^hp·word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct WordTerm {
    word: Word,
    coef: i64,
    hp: u8,
}

/// Right multiplication of a normal-ordered word by one generator.
fn mul_gen(w: Word, g: Generator) -> Result<Vec<WordTerm>> {
    let gb = g.bit();
    let pos = gb.trailing_zeros();
    let higher = if pos >= 31 { 0 } else { w & !((gb << 1) - 1) };
    let r = higher.count_ones();
    let sign = if r % 2 == 0 { 1 } else { -1 };
    let mut out = Vec::with_capacity(1 + r as usize);
    if w & gb != 0 {
        let p = PairingForm::pair(g, g)?;
        out.push(WordTerm { word: w ^ gb, coef: sign * p.coef_half / 2, hp: p.hp });
    } else {
        out.push(WordTerm { word: w | gb, coef: sign, hp: 0 });
    }
    let mut rest = higher;
    while rest != 0 {
        let hbit = rest & rest.wrapping_neg();
        rest ^= hbit;
        let h = Generator::from_bit(hbit.trailing_zeros());
        let p = PairingForm::pair(h, g)?;
        if p.is_zero() {
            continue;
        }
        let above = (higher & !((hbit << 1) - 1)).count_ones();
        let s = if above % 2 == 0 { 1 } else { -1 };
        out.push(WordTerm { word: w ^ hbit, coef: s * p.coef_half, hp: p.hp });
    }
    Ok(out)
}

fn word_mul(w1: Word, w2: Word) -> Result<Vec<WordTerm>> {
    let mut cur: BTreeMap<(Word, u8), i64> = BTreeMap::new();
    cur.insert((w1, 0), 1);
    let mut rest = w2;
    while rest != 0 {
        let b = rest & rest.wrapping_neg();
        rest ^= b;
        let g = Generator::from_bit(b.trailing_zeros());
        let mut next: BTreeMap<(Word, u8), i64> = BTreeMap::new();
        for ((w, hp), c) in cur {
            for t in mul_gen(w, g)? {
                *next.entry((t.word, hp + t.hp)).or_insert(0) += c * t.coef;
            }
        }
        next.retain(|_, c| *c != 0);
        cur = next;
    }
    Ok(cur.into_iter().map(|((word, hp), coef)| WordTerm { word, coef, hp }).collect())
}

fn factor_poly(coef: i64, hp: u8) -> Poly {
    let mut m = [0u8; crate::scalar::NVARS];
    m[Var::HPrime.index()] = hp;
    Poly::monomial(m, GaussRat::int(coef))
}

/// tr(g₁…g₂ₖ)/tr[id] by the Wick recursion; pairings with zero value are
/// skipped before their subtrace is expanded.
pub fn wick(gens: &[Generator]) -> Result<Poly> {
    if gens.is_empty() {
        return Ok(Poly::one());
    }
    if gens.len() % 2 == 1 {
        return Ok(Poly::zero());
    }
    let g1 = gens[0];
    let mut acc = Poly::zero();
    for j in 1..gens.len() {
        let p = PairingForm::pair(g1, gens[j])?;
        if p.is_zero() {
            continue;
        }
        let rest: Vec<Generator> = gens[1..j].iter().chain(&gens[j + 1..]).copied().collect();
        let sub = wick(&rest)?;
        if sub.is_zero() {
            continue;
        }
        let t = &p.to_poly() * &sub;
        // position j (0-based) carries sign (−1)^(j−1)
        if j % 2 == 1 {
            acc = &acc + &t;
        } else {
            acc = &acc - &t;
        }
    }
    Ok(acc)
}

/// Normalised trace of a normal-ordered word.
fn word_wick(w: Word) -> Result<Poly> {
    if w == 0 {
        return Ok(Poly::one());
    }
    let c = w & 0xFF;
    let jet = (w >> 16) & 0xFF;
    // an unpaired ĉ or c can never be contracted
    if (w >> 8) & 0xFF != 0 || c & !jet != 0 || w.count_ones() % 2 == 1 {
        return Ok(Poly::zero());
    }
    wick(&word_generators(w))
}

pub fn trace_id(n: usize) -> GaussRat {
    GaussRat::int(1i64 << n)
}

/// Element of the Clifford algebra with coefficients in `R`.
#[derive(Clone, PartialEq)]
pub struct Clifford<R: Ring> {
    terms: BTreeMap<Word, R>,
}

pub type CliffordElement = Clifford<Poly>;

impl<R: Ring> Default for Clifford<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Ring> Clifford<R> {
    pub fn zero() -> Self {
        Clifford { terms: BTreeMap::new() }
    }
    pub fn scalar(r: R) -> Self {
        Self::term(0, r)
    }
    pub fn one() -> Self {
        Self::scalar(R::one())
    }
    pub fn term(w: Word, r: R) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(w, r);
        }
        Clifford { terms }
    }
    pub fn gen(g: Generator) -> Self {
        Self::term(g.bit(), R::one())
    }
    pub fn c(i: u8) -> Self {
        Self::gen(Generator::c(i))
    }
    pub fn chat(i: u8) -> Self {
        Self::gen(Generator::chat(i))
    }
    pub fn jet(i: u8) -> Self {
        Self::gen(Generator::jet(i))
    }
    /// Σ v_i c(e_i).
    pub fn c_vec(v: &[GaussRat]) -> Self {
        let mut out = Self::zero();
        for (i, x) in v.iter().enumerate() {
            out.add_term(Generator::c(i as u8 + 1).bit(), R::from_poly(Poly::constant(x.clone())));
        }
        out
    }
    /// Σ v_i ĉ(e_i).
    pub fn chat_vec(v: &[GaussRat]) -> Self {
        let mut out = Self::zero();
        for (i, x) in v.iter().enumerate() {
            out.add_term(Generator::chat(i as u8 + 1).bit(), R::from_poly(Poly::constant(x.clone())));
        }
        out
    }
    /// c(ξ′) = Σ_{i≤m} ξᵢ c(e_i).
    pub fn c_xi_prime(m: usize) -> Self {
        let mut out = Self::zero();
        for i in 1..=m as u8 {
            out.add_term(Generator::c(i).bit(), R::from_poly(Poly::xi(i)));
        }
        out
    }
    /// ∂ₓₙc(ξ′) = Σ_{i≤m} ξᵢ JET(i).
    pub fn jet_xi_prime(m: usize) -> Self {
        let mut out = Self::zero();
        for i in 1..=m as u8 {
            out.add_term(Generator::jet(i).bit(), R::from_poly(Poly::xi(i)));
        }
        out
    }
    /// c(ξ) = c(ξ′) + ξₙ c(dxₙ).
    pub fn c_xi(n: usize) -> Self {
        let mut out = Self::c_xi_prime(n - 1);
        out.add_term(Generator::c(n as u8).bit(), R::from_poly(Poly::xin()));
        out
    }

    fn add_term(&mut self, w: Word, r: R) {
        if r.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                let s = v.add(&r);
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(w, r);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &R)> {
        self.terms.iter()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, w: Word) -> R {
        self.terms.get(&w).cloned().unwrap_or_else(R::zero)
    }
    /// The coefficient when the element is a pure scalar.
    pub fn as_scalar(&self) -> Option<R> {
        match self.terms.len() {
            0 => Some(R::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }
    pub fn generators_used(&self) -> Word {
        self.terms.keys().fold(0, |a, w| a | w)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, r) in &o.terms {
            out.add_term(*w, r.clone());
        }
        out
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Self {
        Clifford { terms: self.terms.iter().map(|(w, r)| (*w, r.neg())).collect() }
    }
    pub fn scale(&self, r: &R) -> Self {
        let mut out = Self::zero();
        for (w, v) in &self.terms {
            out.add_term(*w, v.mul(r));
        }
        out
    }
    pub fn scale_poly(&self, p: &Poly) -> Self {
        self.scale(&R::from_poly(p.clone()))
    }
    pub fn map_coeffs(&self, f: impl Fn(&R) -> R) -> Self {
        let mut out = Self::zero();
        for (w, v) in &self.terms {
            out.add_term(*w, f(v));
        }
        out
    }
    pub fn try_map_coeffs(&self, f: impl Fn(&R) -> Result<R>) -> Result<Self> {
        let mut out = Self::zero();
        for (w, v) in &self.terms {
            out.add_term(*w, f(v)?);
        }
        Ok(out)
    }
    /// Changes the coefficient ring.
    pub fn convert<S: Ring>(&self, f: impl Fn(&R) -> S) -> Clifford<S> {
        let mut out = Clifford::<S>::zero();
        for (w, v) in &self.terms {
            out.add_term(*w, f(v));
        }
        out
    }
    pub fn try_convert<S: Ring>(&self, f: impl Fn(&R) -> Result<S>) -> Result<Clifford<S>> {
        let mut out = Clifford::<S>::zero();
        for (w, v) in &self.terms {
            out.add_term(*w, f(v)?);
        }
        Ok(out)
    }

    /// Normal-ordered product.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (w1, r1) in &self.terms {
            for (w2, r2) in &o.terms {
                let prod = r1.mul(r2);
                if prod.is_zero() {
                    continue;
                }
                for t in word_mul(*w1, *w2)? {
                    out.add_term(t.word, prod.mul(&R::from_poly(factor_poly(t.coef, t.hp))));
                }
            }
        }
        Ok(out)
    }

    /// Product of several factors, left to right.
    pub fn product(factors: &[&Self]) -> Result<Self> {
        let mut acc = Self::one();
        for f in factors {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }

    /// Builds the ordered product of an arbitrary generator sequence.
    pub fn from_sequence(gens: &[Generator]) -> Result<Self> {
        let mut acc = Self::one();
        for g in gens {
            acc = acc.mul(&Self::gen(*g))?;
        }
        Ok(acc)
    }

    /// tr on ∧*ℝⁿ ⊗ ℂ, i.e. 2ⁿ times the Wick value.
    pub fn trace(&self, n: usize) -> Result<R> {
        let id = R::from_poly(Poly::constant(trace_id(n)));
        let mut acc = R::zero();
        for (w, r) in &self.terms {
            let v = word_wick(*w)?;
            if !v.is_zero() {
                acc = acc.add(&r.mul(&R::from_poly(v)));
            }
        }
        Ok(acc.mul(&id))
    }

    /// tr(a·b) without forming the full product.
    pub fn trace_product(&self, o: &Self, n: usize) -> Result<R> {
        let id = R::from_poly(Poly::constant(trace_id(n)));
        let mut acc = R::zero();
        for (w1, r1) in &self.terms {
            for (w2, r2) in &o.terms {
                let x = w1 ^ w2;
                let c = x & 0xFF;
                let jet = (x >> 16) & 0xFF;
                let both_jets = (w1 >> 16) != 0 && (w2 >> 16) != 0;
                if !both_jets && ((x >> 8) & 0xFF != 0 || c & !jet != 0 || x.count_ones() % 2 == 1) {
                    continue;
                }
                let mut scal = Poly::zero();
                for t in word_mul(*w1, *w2)? {
                    let v = word_wick(t.word)?;
                    if !v.is_zero() {
                        scal = &scal + &(&v * &factor_poly(t.coef, t.hp));
                    }
                }
                if !scal.is_zero() {
                    acc = acc.add(&r1.mul(r2).mul(&R::from_poly(scal)));
                }
            }
        }
        Ok(acc.mul(&id))
    }

    /// Applies the sphere normal form to every coefficient.
    pub fn normalize_sphere(&self, m: usize) -> Self {
        self.map_coeffs(|r| r.normalize_sphere(m))
    }
}

/// Inverse of `a` when a² is the central scalar `square`; `m` is the number
/// of tangential ξ coordinates used to normalise a² (0 disables it).
pub fn invert_central_square<R: Ring>(a: &Clifford<R>, square: &R, m: usize) -> Result<Clifford<R>> {
    let sq = a.mul(a)?.normalize_sphere(m);
    let s = sq.as_scalar().ok_or_else(|| Error::NonInvertible("square is not a scalar".into()))?;
    if s.is_zero() || !s.sub(square).normalize_sphere(m).is_zero() {
        return Err(Error::NonInvertible(format!("square {:?} differs from {:?}", s, square)));
    }
    a.try_map_coeffs(|r| r.try_div(square).ok_or_else(|| Error::NonInvertible("square value is not a unit".into())))
}

impl<R: Ring> fmt::Debug for Clifford<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(w, r)| format!("{:?}*{}", r, word_string(*w))).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub fn word_string(w: Word) -> String {
    if w == 0 {
        return "1".into();
    }
    word_generators(w).iter().map(|g| g.to_string()).collect::<Vec<_>>().join("*")
}

impl fmt::Display for Clifford<Poly> {
    /// `c(1)*ch(2) - 3/2*hp*c(4)`; compound coefficients are parenthesised.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<(&Word, &Poly)> = self.terms.iter().collect();
        order.sort_by_key(|(w, _)| (w.count_ones(), word_generators(**w)));
        let mut first = true;
        for (w, r) in order {
            let rs = r.to_string();
            let simple = r.len() == 1 && !rs.contains(' ');
            let (neg, body) = if *w == 0 {
                if simple {
                    (rs.starts_with('-'), rs.trim_start_matches('-').to_string())
                } else {
                    (false, format!("({rs})"))
                }
            } else if rs == "1" {
                (false, word_string(*w))
            } else if rs == "-1" {
                (true, word_string(*w))
            } else if simple {
                (rs.starts_with('-'), format!("{}*{}", rs.trim_start_matches('-'), word_string(*w)))
            } else {
                (false, format!("({rs})*{}", word_string(*w)))
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Cl = Clifford<Poly>;

    #[test]
    fn c1_squared() {
        let c1 = Cl::c(1);
        assert_eq!(c1.mul(&c1).unwrap(), Cl::scalar(Poly::int(-1)));
    }

    #[test]
    fn c_and_chat_anticommute() {
        let (a, b) = (Cl::c(1), Cl::chat(1));
        assert!(a.mul(&b).unwrap().add(&b.mul(&a).unwrap()).is_zero());
    }

    #[test]
    fn sandwich() {
        let r = Cl::product(&[&Cl::c(1), &Cl::c(4), &Cl::c(1)]).unwrap();
        assert_eq!(r, Cl::c(4));
    }

    #[test]
    fn traces_of_cn_squared() {
        let cn4 = Cl::c(4);
        assert_eq!(cn4.trace_product(&cn4, 4).unwrap(), Poly::int(-16));
        let cn6 = Cl::c(6);
        assert_eq!(cn6.trace_product(&cn6, 6).unwrap(), Poly::int(-64));
    }

    #[test]
    fn jet_pairing_calibration() {
        // tr[∂ₓₙc(ξ′)c(ξ′)] = −½h′|ξ′|²·16 at n = 4
        let j = Cl::jet_xi_prime(3);
        let c = Cl::c_xi_prime(3);
        let tr = j.trace_product(&c, 4).unwrap().reduce_sphere(3);
        assert_eq!(tr, &Poly::var(Var::HPrime) * &Poly::var(Var::U).scale(&GaussRat::int(-8)));
    }

    #[test]
    fn jet_jet_is_undefined() {
        let r = Cl::jet(1).mul(&Cl::jet(1));
        assert!(matches!(r, Err(Error::UndefinedPairing(_, _))));
        let r = Cl::jet(2).mul(&Cl::jet(1));
        assert!(matches!(r, Err(Error::UndefinedPairing(_, _))));
        // already ordered: no swap needed
        assert!(Cl::jet(1).mul(&Cl::jet(2)).is_ok());
        assert!(matches!(Cl::jet(1).mul(&Cl::jet(2)).unwrap().trace(4), Err(Error::UndefinedPairing(_, _))));
    }

    #[test]
    fn inversion() {
        let cn = Cl::c(4);
        assert_eq!(invert_central_square(&cn, &Poly::int(-1), 0).unwrap(), cn.neg());
        let bad = Cl::c(1).add(&Cl::chat(1));
        assert!(matches!(invert_central_square(&bad, &Poly::int(1), 0), Err(Error::NonInvertible(_))));
    }

    #[test]
    fn wick_on_sequences() {
        let g = [Generator::c(1), Generator::c(2), Generator::c(1), Generator::c(2)];
        // c1c2c1c2 = −c1c1c2c2 = −1
        assert_eq!(wick(&g).unwrap(), Poly::int(-1));
    }

    #[test]
    fn render() {
        let e = Cl::c(1).mul(&Cl::chat(3)).unwrap().sub(&Cl::c(4).scale(&Poly::frac(3, 2)));
        assert_eq!(e.to_string(), "-3/2*c(4) + c(1)*ch(3)");
    }
}
