//! Exact arithmetic: rationals, Gaussian rationals, sparse multivariate
//! polynomials over a fixed symbol set, and rational functions of ξₙ whose
//! denominators are kept in factored form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    BigRational::from_integer(BigInt::from(p))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Malformed(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// re + i·im with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }
    pub fn real(re: Rat) -> Self {
        GaussRat { re, im: Rat::zero() }
    }
    pub fn int(n: i64) -> Self {
        Self::real(rat_int(n))
    }
    pub fn frac(p: i64, q: i64) -> Self {
        Self::real(rat(p, q))
    }
    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }
    pub fn zero() -> Self {
        Self::int(0)
    }
    pub fn one() -> Self {
        Self::int(1)
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(GaussRat { re: &self.re / &d, im: -(&self.im / &d) })
    }
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
    pub fn scale(&self, r: &Rat) -> Self {
        GaussRat { re: &self.re * r, im: &self.im * r }
    }
}

impl Ord for GaussRat {
    fn cmp(&self, o: &Self) -> Ordering {
        self.re.cmp(&o.re).then_with(|| self.im.cmp(&o.im))
    }
}
impl PartialOrd for GaussRat {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}
impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}
impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}
#[allow(clippy::suspicious_arithmetic_impl)]
impl<'a> Div<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.inv().expect("division by zero GaussRat")
    }
}
impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}
impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}
macro_rules! owned_binops {
    ($t:ty: $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { $tr::$m(&self, &o) }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, o: &'a $t) -> $t { $tr::$m(&self, o) }
        }
    )*};
}
owned_binops!(GaussRat: Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_rat(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({} - {}*i)", fmt_rat(&self.re), fmt_rat(&-self.im.clone()))
                } else {
                    write!(f, "({} + {}*i)", fmt_rat(&self.re), fmt_rat(&self.im))
                }
            }
        }
    }
}

pub const NVARS: usize = 17;
/// Number of scalar (non-ξ, non-u) symbols.
pub const NSCALAR: usize = 7;

/// The commuting indeterminates of the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    TBar,
    HPrime,
    Pi,
    Omega,
    K,
    SNorm,
    /// |ξ′|² before restriction to the unit cosphere.
    U,
    XiN,
    /// ξ₁..ξ₈
    Xi(u8),
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::T => 0,
            Var::TBar => 1,
            Var::HPrime => 2,
            Var::Pi => 3,
            Var::Omega => 4,
            Var::K => 5,
            Var::SNorm => 6,
            Var::U => 7,
            Var::XiN => 8,
            Var::Xi(k) => {
                assert!((1..=8).contains(&k), "xi index {k} out of range");
                8 + k as usize
            }
        }
    }
    pub fn from_index(i: usize) -> Var {
        match i {
            0 => Var::T,
            1 => Var::TBar,
            2 => Var::HPrime,
            3 => Var::Pi,
            4 => Var::Omega,
            5 => Var::K,
            6 => Var::SNorm,
            7 => Var::U,
            8 => Var::XiN,
            9..=16 => Var::Xi((i - 8) as u8),
            _ => panic!("variable index {i} out of range"),
        }
    }
    pub fn name(self) -> String {
        match self {
            Var::T => "t".into(),
            Var::TBar => "tbar".into(),
            Var::HPrime => "hp".into(),
            Var::Pi => "pi".into(),
            Var::Omega => "Omega".into(),
            Var::K => "K".into(),
            Var::SNorm => "SNorm".into(),
            Var::U => "u".into(),
            Var::XiN => "xin".into(),
            Var::Xi(k) => format!("xi({k})"),
        }
    }
    /// JSON key used in report power maps.
    pub fn json_key(self) -> String {
        match self {
            Var::HPrime => "hprime".into(),
            Var::Xi(k) => format!("xi{k}"),
            v => v.name(),
        }
    }
    pub fn from_json_key(s: &str) -> Option<Var> {
        Some(match s {
            "t" => Var::T,
            "tbar" => Var::TBar,
            "hprime" => Var::HPrime,
            "pi" => Var::Pi,
            "Omega" => Var::Omega,
            "K" => Var::K,
            "SNorm" => Var::SNorm,
            "u" => Var::U,
            "xin" => Var::XiN,
            _ => {
                let k: u8 = s.strip_prefix("xi")?.parse().ok()?;
                if !(1..=8).contains(&k) {
                    return None;
                }
                Var::Xi(k)
            }
        })
    }
}

pub type Mono = [u8; NVARS];

const ONE_MONO: Mono = [0; NVARS];

/// Sparse polynomial with Gaussian-rational coefficients. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, GaussRat>,
}

/// Scalar outputs are polynomials free of u and ξ.
pub type ScalarExpr = Poly;

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }
    pub fn one() -> Self {
        Self::constant(GaussRat::one())
    }
    pub fn constant(c: GaussRat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(ONE_MONO, c);
        }
        p
    }
    pub fn int(n: i64) -> Self {
        Self::constant(GaussRat::int(n))
    }
    pub fn frac(p: i64, q: i64) -> Self {
        Self::constant(GaussRat::frac(p, q))
    }
    pub fn i() -> Self {
        Self::constant(GaussRat::i())
    }
    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }
    pub fn var_pow(v: Var, e: u8) -> Self {
        let mut m = ONE_MONO;
        m[v.index()] = e;
        Self::monomial(m, GaussRat::one())
    }
    pub fn monomial(m: Mono, c: GaussRat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }
    pub fn xi(k: u8) -> Self {
        Self::var(Var::Xi(k))
    }
    pub fn xin() -> Self {
        Self::var(Var::XiN)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &GaussRat)> {
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
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == ONE_MONO)
    }
    /// The value if the polynomial is constant.
    pub fn constant_value(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return Some(GaussRat::zero());
        }
        if self.is_constant() {
            self.terms.get(&ONE_MONO).cloned()
        } else {
            None
        }
    }
    pub fn coeff(&self, m: &Mono) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    fn add_term(&mut self, m: Mono, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree(&self, v: Var) -> u32 {
        let i = v.index();
        self.terms.keys().map(|m| m[i] as u32).max().unwrap_or(0)
    }

    /// Whether any term involves one of the given variables.
    pub fn mentions(&self, vars: &[Var]) -> bool {
        self.terms.keys().any(|m| vars.iter().any(|v| m[v.index()] > 0))
    }

    /// True when no u or ξ variable occurs.
    pub fn is_scalar_expr(&self) -> bool {
        self.terms.keys().all(|m| m[NSCALAR..].iter().all(|&e| e == 0))
    }

    /// Splits by powers of `v`: result[k] is the coefficient of vᵏ.
    pub fn coeffs_in(&self, v: Var) -> Vec<Poly> {
        let i = v.index();
        let mut out: Vec<Poly> = vec![Poly::zero(); self.degree(v) as usize + 1];
        for (m, c) in &self.terms {
            let k = m[i] as usize;
            let mut mm = *m;
            mm[i] = 0;
            out[k].terms.insert(mm, c.clone());
        }
        out
    }

    pub fn from_coeffs(v: Var, cs: &[Poly]) -> Poly {
        let i = v.index();
        let mut out = Poly::zero();
        for (k, p) in cs.iter().enumerate() {
            for (m, c) in &p.terms {
                let mut mm = *m;
                mm[i] += k as u8;
                out.add_term(mm, c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let i = v.index();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut mm = *m;
            let e = mm[i];
            mm[i] -= 1;
            out.add_term(mm, c.scale(&rat_int(e as i64)));
        }
        out
    }

    /// Substitutes the constant `val` for `v`.
    pub fn eval_var(&self, v: Var, val: &GaussRat) -> Poly {
        let i = v.index();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut mm = *m;
            let e = mm[i];
            mm[i] = 0;
            out.add_term(mm, c * &val.pow(e as u32));
        }
        out
    }

    pub fn subst(&self, v: Var, val: &Poly) -> Poly {
        let cs = self.coeffs_in(v);
        let mut out = Poly::zero();
        let mut pw = Poly::one();
        for c in cs {
            out.add_assign_ref(&(&c * &pw));
            pw = &pw * val;
        }
        out
    }

    /// Exchanges two variables (used for t ↔ t̄).
    pub fn swap_vars(&self, a: Var, b: Var) -> Poly {
        let (ia, ib) = (a.index(), b.index());
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut mm = *m;
                    mm.swap(ia, ib);
                    (mm, c.clone())
                })
                .collect(),
        }
    }

    /// Rewrites ξ_m² as u − Σ_{i<m} ξᵢ², the normal form modulo |ξ′|² = u
    /// for m tangential coordinates.
    pub fn reduce_sphere(&self, m: usize) -> Poly {
        if m == 0 {
            return self.clone();
        }
        let top = Var::Xi(m as u8).index();
        let mut repl = Poly::var(Var::U);
        for i in 1..m {
            repl = &repl - &Poly::var_pow(Var::Xi(i as u8), 2);
        }
        let mut out = Poly::zero();
        let mut stack: Vec<(Mono, GaussRat)> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        while let Some((mono, c)) = stack.pop() {
            if mono[top] < 2 {
                out.add_term(mono, c);
                continue;
            }
            let mut base = mono;
            base[top] -= 2;
            for (rm, rc) in &repl.terms {
                let mut nm = base;
                for k in 0..NVARS {
                    nm[k] += rm[k];
                }
                stack.push((nm, &c * rc));
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&GaussRat) -> GaussRat) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Divides by a nonzero constant.
    pub fn div_const(&self, c: &GaussRat) -> Poly {
        self.scale(&c.inv().expect("division by zero constant"))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        out.add_assign_ref(small);
        out
    }
}
impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -c);
        }
        out
    }
}
impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = *m1;
                for k in 0..NVARS {
                    m[k] += m2[k];
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}
impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}
impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
owned_binops!(Poly: Add add, Sub sub, Mul mul);

fn fmt_mono(m: &Mono) -> Vec<String> {
    let mut out = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = Var::from_index(i).name();
        if e == 1 {
            out.push(name);
        } else {
            out.push(format!("{name}^{e}"));
        }
    }
    out
}

impl fmt::Display for Poly {
    /// Canonical rendering, e.g. `-3/2*pi*hp*Omega` or `65/8*hp - 41/8*i*hp`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let factors = fmt_mono(m);
            // a complex coefficient is written as a real and an imaginary term
            let mut parts = Vec::new();
            if !c.re.is_zero() {
                parts.push((c.re.is_negative(), c.re.abs(), false));
            }
            if !c.im.is_zero() {
                parts.push((c.im.is_negative(), c.im.abs(), true));
            }
            for (neg, mag, imag) in parts {
                let mut body = Vec::new();
                if !mag.is_one() || (factors.is_empty() && !imag) {
                    body.push(fmt_rat(&mag));
                }
                if imag {
                    body.push("i".to_string());
                }
                body.extend(factors.iter().cloned());
                let body = body.join("*");
                if first {
                    if neg {
                        write!(f, "-{body}")?;
                    } else {
                        write!(f, "{body}")?;
                    }
                    first = false;
                } else if neg {
                    write!(f, " - {body}")?;
                } else {
                    write!(f, " + {body}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Coefficient rings the Clifford algebra can carry.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_poly(p: Poly) -> Self;
    /// Exact division when the divisor is a unit of the representation.
    fn try_div(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    /// Normal form modulo Σ_{i≤m} ξᵢ² = u.
    fn normalize_sphere(&self, _m: usize) -> Self {
        self.clone()
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_poly(p: Poly) -> Self {
        p
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        let c = o.constant_value()?;
        c.inv().map(|ci| self.scale(&ci))
    }
    fn normalize_sphere(&self, m: usize) -> Self {
        self.reduce_sphere(m)
    }
}

// ---------------------------------------------------------------------------
// Univariate helpers in ξₙ with Poly coefficients.

fn trim(v: &mut Vec<Poly>) {
    while v.len() > 1 && v.last().is_some_and(|p| p.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        v.push(Poly::zero());
    }
}

fn upoly_mul(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j].add_assign_ref(&(x * y));
            }
        }
    }
    out
}

/// (ξ − r)^e as coefficient vector.
fn linear_pow(r: &GaussRat, e: u32) -> Vec<GaussRat> {
    let mut out = vec![GaussRat::one()];
    for _ in 0..e {
        let mut next = vec![GaussRat::zero(); out.len() + 1];
        for (k, c) in out.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] - &(c * r);
        }
        out = next;
    }
    out
}

fn binom(n: u64, k: u64) -> Rat {
    let mut acc = rat_int(1);
    for j in 0..k {
        acc = acc * rat_int((n - j) as i64) / rat_int((j + 1) as i64);
    }
    acc
}

fn const_vec(v: &[GaussRat]) -> Vec<Poly> {
    v.iter().map(|c| Poly::constant(c.clone())).collect()
}

/// Rational function N(ξₙ)/Π(ξₙ − r)^m. N may carry other variables as
/// coefficients; the denominator roots are exact Gaussian rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: Poly,
    den: Vec<(GaussRat, u32)>,
}

/// One term c/(ξₙ − root)^power of a partial fraction expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct PfTerm {
    pub root: GaussRat,
    pub power: u32,
    pub coeff: Poly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractions {
    /// Polynomial part in ξₙ.
    pub poly: Poly,
    pub terms: Vec<PfTerm>,
}

impl PartialFractions {
    pub fn reconstruct(&self) -> RationalFn {
        let mut acc = RationalFn::polynomial(self.poly.clone());
        for t in &self.terms {
            let f = RationalFn::new(t.coeff.clone(), vec![(t.root.clone(), t.power)]).expect("single root");
            acc = acc.add(&f);
        }
        acc
    }
}

impl RationalFn {
    /// Builds N/Π(ξₙ−r)^m; a root listed twice is rejected.
    pub fn new(num: Poly, den: Vec<(GaussRat, u32)>) -> Result<Self> {
        let mut d: Vec<(GaussRat, u32)> = den.into_iter().filter(|(_, m)| *m > 0).collect();
        d.sort_by(|a, b| a.0.cmp(&b.0));
        for w in d.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Malformed(format!("repeated root {} in factored denominator", w[0].0)));
            }
        }
        if num.is_zero() {
            d.clear();
        }
        Ok(RationalFn { num, den: d })
    }

    pub fn polynomial(num: Poly) -> Self {
        RationalFn { num, den: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::polynomial(Poly::zero())
    }

    /// num / (1 + ξₙ²)^p.
    pub fn over_one_plus_xi2(num: Poly, p: u32) -> Self {
        Self::new(num, vec![(GaussRat::i(), p), (-GaussRat::i(), p)]).expect("distinct roots")
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }
    pub fn denominator(&self) -> &[(GaussRat, u32)] {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn den_degree(&self) -> u32 {
        self.den.iter().map(|(_, m)| *m).sum()
    }

    fn expanded_den(&self) -> Vec<GaussRat> {
        let mut acc = vec![GaussRat::one()];
        for (r, m) in &self.den {
            let f = linear_pow(r, *m);
            let mut next = vec![GaussRat::zero(); acc.len() + f.len() - 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    next[i + j] = &next[i + j] + &(a * b);
                }
            }
            acc = next;
        }
        acc
    }

    /// Rewrites over the denominator with multiplicities `target` (a superset).
    fn lift(&self, target: &[(GaussRat, u32)]) -> Poly {
        let mut num = self.num.coeffs_in(Var::XiN);
        for (r, m) in target {
            let have = self.den.iter().find(|(s, _)| s == r).map_or(0, |(_, k)| *k);
            if *m > have {
                num = upoly_mul(&num, &const_vec(&linear_pow(r, m - have)));
            }
        }
        Poly::from_coeffs(Var::XiN, &num)
    }

    fn merged_den(&self, o: &RationalFn) -> Vec<(GaussRat, u32)> {
        let mut map: BTreeMap<GaussRat, u32> = BTreeMap::new();
        for (r, m) in self.den.iter().chain(o.den.iter()) {
            let e = map.entry(r.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        map.into_iter().collect()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let den = self.merged_den(o);
        let num = &self.lift(&den) + &o.lift(&den);
        RationalFn::new(num, den).expect("merged roots distinct")
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        if self.is_zero() || o.is_zero() {
            return RationalFn::zero();
        }
        let mut map: BTreeMap<GaussRat, u32> = BTreeMap::new();
        for (r, m) in self.den.iter().chain(o.den.iter()) {
            *map.entry(r.clone()).or_insert(0) += *m;
        }
        RationalFn::new(&self.num * &o.num, map.into_iter().collect()).expect("distinct")
    }

    pub fn scale(&self, p: &Poly) -> RationalFn {
        RationalFn::new(&self.num * p, self.den.clone()).expect("distinct")
    }

    /// Cancels common linear factors between numerator and denominator.
    pub fn reduce(&self) -> RationalFn {
        let mut num = self.num.coeffs_in(Var::XiN);
        let mut den = self.den.clone();
        for (r, m) in den.iter_mut() {
            while *m > 0 {
                // synthetic division by (ξ − r)
                let d = num.len() - 1;
                if d == 0 {
                    break;
                }
                let mut q = vec![Poly::zero(); d];
                let mut carry = Poly::zero();
                for k in (0..=d).rev() {
                    let v = &num[k] + &carry;
                    if k == 0 {
                        carry = v;
                    } else {
                        q[k - 1] = v.clone();
                        carry = v.scale(r);
                    }
                }
                if !carry.is_zero() {
                    break;
                }
                num = q;
                *m -= 1;
            }
        }
        trim(&mut num);
        RationalFn::new(Poly::from_coeffs(Var::XiN, &num), den).expect("distinct")
    }

    /// ∂/∂ξₙ by the quotient rule on the factored denominator.
    pub fn d_xi_n(&self) -> RationalFn {
        if self.is_zero() {
            return RationalFn::zero();
        }
        let n = self.num.coeffs_in(Var::XiN);
        let dn = self.num.derivative(Var::XiN).coeffs_in(Var::XiN);
        // N' Π(ξ−r) − N Σ_r m_r Π_{s≠r}(ξ−s)
        let mut all = vec![Poly::one()];
        for (r, _) in &self.den {
            all = upoly_mul(&all, &const_vec(&linear_pow(r, 1)));
        }
        let mut out = upoly_mul(&dn, &all);
        for (idx, (_, m)) in self.den.iter().enumerate() {
            let mut others = vec![Poly::one()];
            for (j, (s, _)) in self.den.iter().enumerate() {
                if j != idx {
                    others = upoly_mul(&others, &const_vec(&linear_pow(s, 1)));
                }
            }
            let t = upoly_mul(&n, &others);
            let f = GaussRat::int(-(*m as i64));
            for (k, c) in t.iter().enumerate() {
                if out.len() <= k {
                    out.resize(k + 1, Poly::zero());
                }
                out[k].add_assign_ref(&c.scale(&f));
            }
        }
        let den = self.den.iter().map(|(r, m)| (r.clone(), m + 1)).collect();
        RationalFn::new(Poly::from_coeffs(Var::XiN, &out), den).expect("distinct").reduce()
    }

    /// Maps every ξₙ-coefficient of the numerator.
    pub fn map_num(&self, f: impl Fn(&Poly) -> Poly) -> RationalFn {
        let cs: Vec<Poly> = self.num.coeffs_in(Var::XiN).iter().map(f).collect();
        RationalFn::new(Poly::from_coeffs(Var::XiN, &cs), self.den.clone()).expect("distinct")
    }

    pub fn partial_fractions(&self) -> PartialFractions {
        let num = self.num.coeffs_in(Var::XiN);
        // polynomial part by long division through the monic expanded denominator
        let d = self.expanded_den();
        let dd = d.len() - 1;
        let mut rem = num.clone();
        let mut quot = vec![Poly::zero(); rem.len().saturating_sub(dd).max(1)];
        if rem.len() > dd {
            for k in (dd..rem.len()).rev() {
                let lead = rem[k].clone();
                if lead.is_zero() {
                    continue;
                }
                quot[k - dd] = lead.clone();
                for (j, dj) in d.iter().enumerate() {
                    rem[k - dd + j] = &rem[k - dd + j] - &lead.scale(dj);
                }
            }
        }
        trim(&mut quot);
        let mut terms = Vec::new();
        for (idx, (r, m)) in self.den.iter().enumerate() {
            let order = *m as usize;
            // numerator shifted: N(r + y)
            let mut shifted = vec![Poly::zero(); num.len()];
            for (j, a) in num.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let mut rp = GaussRat::one();
                for k in (0..=j).rev() {
                    // coefficient of y^k in (r+y)^j is C(j,k) r^(j−k)
                    let c = GaussRat::real(binom(j as u64, k as u64)) * &rp;
                    shifted[k].add_assign_ref(&a.scale(&c));
                    rp = &rp * r;
                }
            }
            shifted.truncate(order);
            let mut series = shifted;
            series.resize(order, Poly::zero());
            for (j, (s, ms)) in self.den.iter().enumerate() {
                if j == idx {
                    continue;
                }
                // (r − s + y)^(−ms) = c^(−ms) Σ_k (−1)^k C(ms+k−1, k) (y/c)^k
                let c = r - s;
                let cinv = c.inv().expect("distinct roots");
                let base = cinv.pow(*ms);
                let mut ser = Vec::with_capacity(order);
                let mut cp = GaussRat::one();
                for k in 0..order {
                    let mut b = GaussRat::real(binom((*ms as u64) + k as u64 - 1, k as u64));
                    if k % 2 == 1 {
                        b = -b;
                    }
                    ser.push(Poly::constant(&(&base * &b) * &cp));
                    cp = &cp * &cinv;
                }
                let mut prod = upoly_mul(&series, &ser);
                prod.truncate(order);
                series = prod;
            }
            for (k, c) in series.into_iter().enumerate() {
                if !c.is_zero() {
                    terms.push(PfTerm { root: r.clone(), power: (order - k) as u32, coeff: c });
                }
            }
        }
        PartialFractions { poly: Poly::from_coeffs(Var::XiN, &quot), terms }
    }

    fn check_projectable(&self) -> Result<PartialFractions> {
        for (r, _) in &self.den {
            if r.im.is_zero() {
                return Err(Error::RealPole(r.to_string()));
            }
        }
        let pf = self.partial_fractions();
        if !pf.poly.is_zero() {
            return Err(Error::PolynomialPart);
        }
        Ok(pf)
    }

    fn rebuild(terms: impl Iterator<Item = PfTerm>) -> RationalFn {
        let mut acc = RationalFn::zero();
        for t in terms {
            let f = RationalFn::new(t.coeff, vec![(t.root, t.power)]).expect("single");
            acc = acc.add(&f);
        }
        acc
    }

    /// Upper-half-plane part of the partial fraction expansion.
    pub fn pi_plus(&self) -> Result<RationalFn> {
        let pf = self.check_projectable()?;
        Ok(Self::rebuild(pf.terms.into_iter().filter(|t| t.root.im.is_positive())))
    }

    /// Lower-half-plane part.
    pub fn pi_minus(&self) -> Result<RationalFn> {
        let pf = self.check_projectable()?;
        Ok(Self::rebuild(pf.terms.into_iter().filter(|t| t.root.im.is_negative())))
    }

    /// Σ residues at poles with positive imaginary part.
    pub fn uhp_residue_sum(&self) -> Result<Poly> {
        let pf = self.check_projectable()?;
        let mut acc = Poly::zero();
        for t in pf.terms {
            if t.power == 1 && t.root.im.is_positive() {
                acc.add_assign_ref(&t.coeff);
            }
        }
        Ok(acc)
    }

    /// ξₙ ↦ −ξₙ together with complex conjugation of all coefficients.
    pub fn reflect_conj(&self) -> RationalFn {
        let cs = self.num.coeffs_in(Var::XiN);
        let sign = if self.den_degree() % 2 == 1 { -1 } else { 1 };
        let flipped: Vec<Poly> = cs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let c = c.map_coeffs(|g| g.conj());
                if (k % 2 == 1) == (sign == 1) {
                    -c
                } else {
                    c
                }
            })
            .collect();
        // Π(−ξ − r)^m = (−1)^deg Π(ξ + r)^m; conjugate roots too.
        let den = self.den.iter().map(|(r, m)| (-r.conj(), *m)).collect();
        RationalFn::new(Poly::from_coeffs(Var::XiN, &flipped), den).expect("distinct")
    }

    /// Applies u → 1 style substitutions to the numerator coefficients.
    pub fn eval_var(&self, v: Var, val: &GaussRat) -> RationalFn {
        RationalFn::new(self.num.eval_var(v, val), self.den.clone()).expect("distinct")
    }

    /// Exact equality as functions (cross-multiplication).
    pub fn equals(&self, o: &RationalFn) -> bool {
        self.sub(o).reduce().num.is_zero()
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(r, m)| {
                let lin = if r.is_zero() { "xin".to_string() } else { format!("(xin - {r})") };
                if *m == 1 {
                    lin
                } else {
                    format!("{lin}^{m}")
                }
            })
            .collect();
        write!(f, "({})/({})", self.num, den.join("*"))
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({self})")
    }
}

impl Ring for RationalFn {
    fn zero() -> Self {
        RationalFn::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        RationalFn::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalFn::mul(self, o)
    }
    fn neg(&self) -> Self {
        RationalFn::neg(self)
    }
    fn from_poly(p: Poly) -> Self {
        RationalFn::polynomial(p)
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        if !o.den.is_empty() {
            return None;
        }
        let c = o.num.constant_value()?;
        let ci = c.inv()?;
        Some(RationalFn::new(self.num.scale(&ci), self.den.clone()).expect("distinct"))
    }
    fn normalize_sphere(&self, m: usize) -> Self {
        RationalFn::new(self.num.reduce_sphere(m), self.den.clone()).expect("distinct").reduce()
    }
}

/// Ring operation selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &ScalarExpr, b: &ScalarExpr, op: PolyOp) -> ScalarExpr {
    match op {
        PolyOp::Add => a + b,
        PolyOp::Sub => a - b,
        PolyOp::Mul => a * b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Poly {
        Poly::var(Var::T)
    }
    fn tb() -> Poly {
        Poly::var(Var::TBar)
    }

    #[test]
    fn ring_identities() {
        assert_eq!(&(&t() + &tb()) * &(&t() - &tb()), &t().pow(2) - &tb().pow(2));
        let sq = (&tb() - &t()).pow(2);
        assert_eq!(sq, &(&t().pow(2) - &(&t() * &tb()).scale(&GaussRat::int(2))) + &tb().pow(2));
    }

    #[test]
    fn a27_bracket_at_n4() {
        let n = 4i64;
        let tt = &t() * &tb();
        let br = &(&(&(&t().pow(2) + &tb().pow(2)) * &Poly::int(n - 2)) - &tt.scale(&GaussRat::int(2 * n)))
            + &tt.scale(&GaussRat::int(4));
        let lhs = br.scale(&GaussRat::frac(-1, 4));
        let rhs = (&tb() - &t()).pow(2).scale(&GaussRat::frac(-1, 2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn two_simple_poles() {
        let f = RationalFn::over_one_plus_xi2(Poly::one(), 1);
        let pf = f.partial_fractions();
        assert!(pf.poly.is_zero());
        let half_i_inv = GaussRat::new(rat_int(0), rat(-1, 2)); // 1/(2i)
        for term in &pf.terms {
            assert_eq!(term.power, 1);
            let expect = if term.root == GaussRat::i() { half_i_inv.clone() } else { -half_i_inv.clone() };
            assert_eq!(term.coeff, Poly::constant(expect));
        }
        assert!(pf.reconstruct().equals(&f));
    }

    #[test]
    fn improper_input() {
        let f = RationalFn::new(Poly::xin().pow(2), vec![(GaussRat::i(), 2)]).unwrap();
        let pf = f.partial_fractions();
        assert_eq!(pf.poly, Poly::one());
        assert!(pf.reconstruct().equals(&f));
        assert_eq!(f.pi_plus(), Err(Error::PolynomialPart));
    }

    #[test]
    fn repeated_root_rejected() {
        let r = RationalFn::new(Poly::one(), vec![(GaussRat::i(), 1), (GaussRat::i(), 2)]);
        assert!(matches!(r, Err(Error::Malformed(_))));
    }

    #[test]
    fn uhp_part_of_linear_over_double() {
        // (a + ξ b)/((ξ−i)²(ξ+i)²) with symbolic a = t, b = tbar
        let num = &t() + &(&Poly::xin() * &tb());
        let f = RationalFn::over_one_plus_xi2(num, 2);
        let pp = f.pi_plus().unwrap();
        let i = Poly::i();
        let c2 = (&t() + &(&i * &tb())).scale(&GaussRat::frac(-1, 4));
        let c1 = (&i * &t()).scale(&GaussRat::frac(-1, 4));
        let expect = RationalFn::new(c2, vec![(GaussRat::i(), 2)])
            .unwrap()
            .add(&RationalFn::new(c1, vec![(GaussRat::i(), 1)]).unwrap());
        assert!(pp.equals(&expect), "{pp}");
    }

    #[test]
    fn derivative_matches_power_rule() {
        let f = RationalFn::over_one_plus_xi2(Poly::one(), 1);
        let d = f.d_xi_n();
        let expect = RationalFn::over_one_plus_xi2(Poly::xin().scale(&GaussRat::int(-2)), 2);
        assert!(d.equals(&expect));
    }

    #[test]
    fn sphere_reduction() {
        let s = &(&Poly::xi(1).pow(2) + &Poly::xi(2).pow(2)) + &Poly::xi(3).pow(2);
        assert_eq!(s.reduce_sphere(3), Poly::var(Var::U));
    }

    #[test]
    fn render() {
        let p = Poly::frac(-3, 2) * Poly::var(Var::Pi) * Poly::var(Var::HPrime) * Poly::var(Var::Omega);
        assert_eq!(p.to_string(), "-3/2*hp*pi*Omega");
        let q = &Poly::frac(65, 8) - &Poly::constant(GaussRat::new(rat_int(0), rat(41, 8)));
        assert_eq!(q.to_string(), "65/8 - 41/8*i");
    }
}
