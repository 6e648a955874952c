//! Boundary symbol calculus at x₀: coefficients are Laurent polynomials in
//! L = u + ξₙ² (u = |ξ′|² before restriction), words are Clifford words.

use std::collections::BTreeMap;
use std::fmt;

use crate::clifford::{invert_central_square, Channel, Clifford, Generator, Word};
use crate::error::{Error, Result};
use crate::scalar::{GaussRat, Poly, RationalFn, Ring, Var};

/// L = u + ξₙ².
pub fn l_poly() -> Poly {
    &Poly::var(Var::U) + &Poly::var_pow(Var::XiN, 2)
}

/// num / L^pow with pow ≥ 0.
#[derive(Clone)]
pub struct LFrac {
    pub num: Poly,
    pub pow: u32,
}

impl LFrac {
    pub fn new(num: Poly, pow: i32) -> Self {
        if pow < 0 {
            LFrac { num: &num * &l_poly().pow((-pow) as u32), pow: 0 }
        } else {
            LFrac { num, pow: pow as u32 }
        }
    }
    pub fn poly(num: Poly) -> Self {
        LFrac { num, pow: 0 }
    }
    /// L^e for any integer e.
    pub fn l_power(e: i32) -> Self {
        LFrac::new(Poly::one(), -e)
    }

    fn lift(&self, pow: u32) -> Poly {
        &self.num * &l_poly().pow(pow - self.pow)
    }

    /// Removes factors of L from the numerator.
    pub fn simplify(&self) -> LFrac {
        let mut num = self.num.clone();
        let mut pow = self.pow as i32;
        while !num.is_zero() {
            match div_by_l(&num) {
                Some(q) => {
                    num = q;
                    pow -= 1;
                }
                None => break,
            }
        }
        if num.is_zero() {
            return LFrac::poly(Poly::zero());
        }
        LFrac::new(num, pow)
    }

    /// (c, e) with self = c·L^e, when it has that form.
    pub fn as_l_monomial(&self) -> Option<(GaussRat, i32)> {
        let mut num = self.num.clone();
        let mut e = -(self.pow as i32);
        while let Some(q) = div_by_l(&num) {
            num = q;
            e += 1;
        }
        num.constant_value().filter(|c| !c.is_zero()).map(|c| (c, e))
    }

    pub fn d_xi_n(&self) -> LFrac {
        let p = self.pow as i64;
        let dp = self.num.derivative(Var::XiN);
        let a = &dp * &l_poly();
        let b = (&self.num * &Poly::xin()).scale(&GaussRat::int(2 * p));
        LFrac { num: &a - &b, pow: self.pow + 1 }
    }

    /// ∂ₓₙ at x₀ through ∂ₓₙu = h′u.
    pub fn d_x_n(&self) -> LFrac {
        let hu = &Poly::var(Var::HPrime) * &Poly::var(Var::U);
        let p = self.pow as i64;
        let a = &self.num.derivative(Var::U) * &l_poly();
        let b = self.num.scale(&GaussRat::int(p));
        LFrac { num: &hu * &(&a - &b), pow: self.pow + 1 }
    }

    /// Sets u = 1: the denominator becomes (ξₙ − i)^p (ξₙ + i)^p.
    pub fn restrict(&self) -> RationalFn {
        let num = self.num.eval_var(Var::U, &GaussRat::one());
        RationalFn::over_one_plus_xi2(num, self.pow)
    }
}

/// Quotient by L = ξₙ² + u when the division is exact.
fn div_by_l(p: &Poly) -> Option<Poly> {
    let mut c = p.coeffs_in(Var::XiN);
    if c.len() < 3 {
        return None;
    }
    let u = Poly::var(Var::U);
    let mut q = vec![Poly::zero(); c.len() - 2];
    for k in (2..c.len()).rev() {
        let lead = c[k].clone();
        q[k - 2] = lead.clone();
        c[k - 2] = &c[k - 2] - &(&lead * &u);
    }
    if c[0].is_zero() && c[1].is_zero() {
        Some(Poly::from_coeffs(Var::XiN, &q))
    } else {
        None
    }
}

impl PartialEq for LFrac {
    fn eq(&self, o: &Self) -> bool {
        let top = self.pow.max(o.pow);
        self.lift(top) == o.lift(top)
    }
}

impl fmt::Debug for LFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pow == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/L^{}", self.num, self.pow)
        }
    }
}

impl Ring for LFrac {
    fn zero() -> Self {
        LFrac::poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        let top = self.pow.max(o.pow);
        let num = &self.lift(top) + &o.lift(top);
        if num.is_zero() {
            return Self::zero();
        }
        LFrac { num, pow: top }
    }
    fn mul(&self, o: &Self) -> Self {
        let num = &self.num * &o.num;
        if num.is_zero() {
            return Self::zero();
        }
        LFrac { num, pow: self.pow + o.pow }
    }
    fn neg(&self) -> Self {
        LFrac { num: -&self.num, pow: self.pow }
    }
    fn from_poly(p: Poly) -> Self {
        LFrac::poly(p)
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        let (c, e) = o.as_l_monomial()?;
        let c = c.inv()?;
        Some(LFrac::new(self.num.scale(&c), self.pow as i32 + e))
    }
    fn normalize_sphere(&self, m: usize) -> Self {
        let num = self.num.reduce_sphere(m);
        if num.is_zero() {
            return Self::zero();
        }
        LFrac { num, pow: self.pow }
    }
}

/// A boundary symbol before restriction to |ξ′| = 1.
pub type Symbol = Clifford<LFrac>;
/// A symbol after restriction: coefficients are rational functions of ξₙ.
pub type RestrictedSymbol = Clifford<RationalFn>;

pub fn lift(c: &Clifford<Poly>) -> Symbol {
    c.convert(|p| LFrac::poly(p.clone()))
}

/// Symbol components indexed by order.
#[derive(Clone, Debug, Default)]
pub struct GradedSymbol {
    pub orders: BTreeMap<i32, Symbol>,
}

impl GradedSymbol {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn with(mut self, order: i32, s: Symbol) -> Self {
        self.orders.insert(order, s);
        self
    }
    pub fn get(&self, order: i32) -> Result<&Symbol> {
        self.orders.get(&order).ok_or_else(|| Error::Invariant(format!("symbol has no order {order} component")))
    }
    pub fn lead(&self) -> Option<i32> {
        self.orders.keys().next_back().copied()
    }
}

pub fn d_xi_n(s: &Symbol) -> Symbol {
    s.map_coeffs(|c| c.d_xi_n())
}

/// ∂ₓₙ at x₀ in the first-jet model.
pub fn d_x_n(s: &Symbol, n: usize) -> Result<Symbol> {
    let mut out = Symbol::zero();
    for (w, c) in s.terms() {
        out = out.add(&Symbol::term(*w, c.d_x_n()));
        out = out.add(&d_x_n_word(*w, n)?.scale(c));
    }
    Ok(out)
}

fn d_x_n_word(w: Word, n: usize) -> Result<Symbol> {
    if w >> 16 != 0 {
        return Err(Error::JetOrderExceeded(format!("second x_n-derivative of {}", crate::clifford::word_string(w))));
    }
    if (w >> 8) & 0xFF != 0 {
        return Err(Error::JetOrderExceeded(format!("no x_n-jet is modelled for {}", crate::clifford::word_string(w))));
    }
    let tangential = w & ((1 << (n - 1)) - 1);
    match tangential.count_ones() {
        0 => Ok(Symbol::zero()),
        1 => {
            let seq: Vec<Generator> = crate::clifford::word_generators(w)
                .into_iter()
                .map(|g| if g.channel == Channel::C && (g.index as usize) < n { Generator::jet(g.index) } else { g })
                .collect();
            Symbol::from_sequence(&seq)
        }
        _ => {
            Err(Error::JetOrderExceeded(format!("{} has several tangential factors", crate::clifford::word_string(w))))
        }
    }
}

/// D_xₙ = −i∂ₓₙ.
pub fn big_d_x_n(s: &Symbol, n: usize) -> Result<Symbol> {
    Ok(d_x_n(s, n)?.scale(&LFrac::poly(Poly::i().scale(&GaussRat::int(-1)))))
}

pub fn restrict(s: &Symbol) -> RestrictedSymbol {
    s.convert(|c| c.restrict())
}

pub fn pi_plus(s: &RestrictedSymbol) -> Result<RestrictedSymbol> {
    s.try_map_coeffs(|c| c.pi_plus())
}

pub fn pi_minus(s: &RestrictedSymbol) -> Result<RestrictedSymbol> {
    s.try_map_coeffs(|c| c.pi_minus())
}

pub fn d_xi_n_restricted(s: &RestrictedSymbol) -> RestrictedSymbol {
    s.map_coeffs(|c| c.d_xi_n())
}

/// Symbol of the inverse to `depth` orders below the leading one.
pub fn invert(p: &GradedSymbol, lead: i32, depth: usize, n: usize) -> Result<GradedSymbol> {
    let m = n - 1;
    let pm = p.get(lead)?;
    let sq = pm
        .mul(pm)?
        .normalize_sphere(m)
        .as_scalar()
        .ok_or_else(|| Error::NonInvertible("leading symbol squares to a non-scalar".into()))?
        .simplify();
    let q0 = invert_central_square(pm, &sq, m)?;
    let mut out = GradedSymbol::new().with(-lead, q0.clone());
    if depth >= 2 {
        let pm1 = p.get(lead - 1)?;
        let inner = pm1.mul(&q0)?.add(&d_xi_n(pm).mul(&big_d_x_n(&q0, n)?)?);
        let q1 = q0.mul(&inner)?.neg().normalize_sphere(m);
        out = out.with(-lead - 1, q1);
    }
    if depth > 2 {
        return Err(Error::Unsupported(format!("inversion depth {depth}")));
    }
    Ok(out)
}

/// Order-`target` part of σ(P∘Q) at x₀. Only ξₙ/xₙ jets contribute: the
/// tangential x-derivatives vanish at x₀.
pub fn compose_orders(p: &GradedSymbol, q: &GradedSymbol, target: i32, n: usize) -> Result<Symbol> {
    let m = n - 1;
    let mut out = Symbol::zero();
    for (a, pa) in &p.orders {
        for (b, qb) in &q.orders {
            let s = a + b;
            if s == target {
                out = out.add(&pa.mul(qb)?);
            } else if s - 1 == target {
                let qb = qb.normalize_sphere(m);
                out = out.add(&d_xi_n(pa).mul(&big_d_x_n(&qb, n)?)?);
            } else if s - 2 == target && !d_xi_n(&d_xi_n(pa)).is_zero() {
                return Err(Error::JetOrderExceeded(format!(
                    "order {target} needs second x_n-derivatives of the order {b} part"
                )));
            }
        }
    }
    Ok(out.normalize_sphere(m))
}

/// Exact zero test after sphere normalisation.
pub fn symbol_is_zero(s: &Symbol, n: usize) -> bool {
    s.normalize_sphere(n - 1).terms().all(|(_, c)| c.simplify().is_zero())
}

/// Exact equality after sphere normalisation.
pub fn symbols_equal(a: &Symbol, b: &Symbol, n: usize) -> bool {
    symbol_is_zero(&a.sub(b), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i_poly() -> Poly {
        Poly::i()
    }

    /// ic(ξ)/L^p
    fn icxi_over(n: usize, p: i32) -> Symbol {
        lift(&Clifford::<Poly>::c_xi(n)).scale(&LFrac::new(i_poly(), p))
    }

    #[test]
    fn second_xi_derivative() {
        let n = 4;
        let s = icxi_over(n, 1);
        let d2 = d_xi_n(&d_xi_n(&s));
        let cn = lift(&Clifford::c(n as u8));
        let cp = lift(&Clifford::c_xi_prime(n - 1));
        let cx = lift(&Clifford::c_xi(n));
        let a = cn
            .scale(&LFrac::poly(Poly::xin().scale(&GaussRat::int(6))))
            .add(&cp.scale(&LFrac::poly(Poly::int(2))))
            .scale(&LFrac::new(Poly::int(-1), 2));
        let b = cx.scale(&LFrac::new(Poly::xin().pow(2).scale(&GaussRat::int(8)), 3));
        let expect = a.add(&b).scale(&LFrac::poly(i_poly()));
        assert!(symbols_equal(&d2, &expect, n));
    }

    #[test]
    fn x_derivative_of_first_order_inverse() {
        let n = 4;
        let s = icxi_over(n, 1);
        let d = d_x_n(&s, n).unwrap();
        let jet = lift(&Clifford::jet_xi_prime(n - 1)).scale(&LFrac::new(i_poly(), 1));
        let hu = &Poly::var(Var::HPrime) * &Poly::var(Var::U);
        let second = icxi_over(n, 2).scale(&LFrac::poly(hu));
        assert!(symbols_equal(&d, &jet.sub(&second), n));
        // c(dxₙ)/L² ↦ −2h′u c(dxₙ)/L³
        let s = lift(&Clifford::c(n as u8)).scale(&LFrac::new(Poly::one(), 2));
        let hu2 = (&Poly::var(Var::HPrime) * &Poly::var(Var::U)).scale(&GaussRat::int(-2));
        let expect = lift(&Clifford::c(n as u8)).scale(&LFrac::new(hu2, 3));
        assert!(symbols_equal(&d_x_n(&s, n).unwrap(), &expect, n));
    }

    #[test]
    fn jet_order_guard() {
        let n = 4;
        let d = d_x_n(&icxi_over(n, 1), n).unwrap();
        assert!(matches!(d_x_n(&d, n), Err(Error::JetOrderExceeded(_))));
    }

    #[test]
    fn projection_of_cxi_over_l_squared() {
        let n = 4;
        let s = lift(&Clifford::c_xi(n)).scale(&LFrac::new(Poly::one(), 2));
        let pp = pi_plus(&restrict(&s)).unwrap();
        let den = vec![(GaussRat::i(), 2)];
        let ixi2 = &(&Poly::i() * &Poly::xin()) + &Poly::int(2);
        let mut expect = RestrictedSymbol::zero();
        for i in 1..n as u8 {
            let num = (&ixi2 * &Poly::xi(i)).scale(&GaussRat::frac(-1, 4));
            expect =
                expect.add(&RestrictedSymbol::term(Generator::c(i).bit(), RationalFn::new(num, den.clone()).unwrap()));
        }
        expect = expect.add(&RestrictedSymbol::term(
            Generator::c(n as u8).bit(),
            RationalFn::new(Poly::i().scale(&GaussRat::frac(-1, 4)), den).unwrap(),
        ));
        for (w, c) in pp.terms() {
            assert!(c.equals(&expect.coeff(*w)), "{w}: {c}");
        }
        assert_eq!(pp.len(), expect.len());
    }

    #[test]
    fn projection_of_jet_over_l() {
        let n = 4;
        let s = lift(&Clifford::jet_xi_prime(n - 1)).scale(&LFrac::new(i_poly(), 1));
        let pp = pi_plus(&restrict(&s)).unwrap();
        for i in 1..n as u8 {
            let c = pp.coeff(Generator::jet(i).bit());
            let e = RationalFn::new(Poly::xi(i).scale(&GaussRat::frac(1, 2)), vec![(GaussRat::i(), 1)]).unwrap();
            assert!(c.equals(&e));
        }
    }

    #[test]
    fn l_simplification() {
        let f = LFrac { num: &l_poly().pow(2) * &Poly::var(Var::T), pow: 3 };
        let s = f.simplify();
        assert_eq!(s.pow, 1);
        assert_eq!(s.num, Poly::var(Var::T));
    }
}
