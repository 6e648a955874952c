//! Boundary data at x₀ and the operator symbols built from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use num_traits::{One, Zero};

use crate::clifford::Clifford;
use crate::error::{Error, Result};
use crate::scalar::{fmt_rat, parse_rat, rat, rat_int, GaussRat, Poly, Rat, Var};
use crate::symbolcalc::{compose_orders, l_poly, lift, GradedSymbol, LFrac};

type Cl = Clifford<Poly>;

/// Normal-coordinate data at the boundary point x₀ for g = g^∂M/h(xₙ) + dxₙ².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryContext {
    pub n: usize,
}

impl BoundaryContext {
    pub fn new(n: usize) -> Result<Self> {
        if n != 4 && n != 6 {
            return Err(Error::Unsupported(format!("boundary computations need n ∈ {{4, 6}}, got {n}")));
        }
        Ok(BoundaryContext { n })
    }
    pub fn m(&self) -> usize {
        self.n - 1
    }
    fn hp(c: i64, d: i64) -> Poly {
        Poly::var(Var::HPrime).scale(&GaussRat::frac(c, d))
    }
    /// ω_{s,t}(e_i)(x₀), 1-based indices.
    pub fn omega(&self, s: usize, t: usize, i: usize) -> Poly {
        let n = self.n;
        if i < n && s == n && t == i {
            Self::hp(1, 2)
        } else if i < n && s == i && t == n {
            Self::hp(-1, 2)
        } else {
            Poly::zero()
        }
    }
    /// Γᵏ_{ij}(x₀).
    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> Poly {
        let n = self.n;
        if k == n && i == j && i < n {
            Self::hp(1, 2)
        } else if k < n && ((i == n && j == k) || (j == n && i == k)) {
            Self::hp(-1, 2)
        } else {
            Poly::zero()
        }
    }
    /// Γᵏ = Σᵢ Γᵏ_{ii} at x₀ (the metric is δ there).
    pub fn gamma_contracted(&self, k: usize) -> Poly {
        (1..=self.n).fold(Poly::zero(), |acc, i| &acc + &self.christoffel(k, i, i))
    }
}

/// A sub-bundle F⊥ = span{f_α} with the values S(e_i)f_α.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubbundleInstance {
    pub n: usize,
    pub k: usize,
    /// s[i][α] = S(e_{i+1}) f_{α+1} as an n-vector.
    pub s: Vec<Vec<Vec<Rat>>>,
    /// f[α] as an n-vector.
    pub f: Vec<Vec<Rat>>,
    pub seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    k: usize,
    #[serde(rename = "S")]
    s: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<Vec<Vec<String>>>,
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

fn unit(n: usize, j: usize) -> Vec<Rat> {
    (0..n).map(|i| if i == j { Rat::one() } else { Rat::zero() }).collect()
}

fn default_f(n: usize, k: usize) -> Vec<Vec<Rat>> {
    (0..k).map(|a| unit(n, n - k + a)).collect()
}

/// Rational rotation by a Pythagorean angle in the (p, q) plane.
fn givens(q: &mut [Vec<Rat>], p: usize, r: usize, s: &Rat) {
    let d = Rat::one() + s * s;
    let c = (Rat::one() - s * s) / &d;
    let sn = (rat_int(2) * s) / &d;
    for row in q.iter_mut() {
        let (a, b) = (row[p].clone(), row[r].clone());
        row[p] = &c * &a - &sn * &b;
        row[r] = &sn * &a + &c * &b;
    }
}

impl SubbundleInstance {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::Malformed(format!("rank k = {k} must satisfy 0 < k < n = {n}")));
        }
        let z = vec![vec![vec![Rat::zero(); n]; k]; n];
        Ok(SubbundleInstance { n, k, s: z, f: default_f(n, k), seed: None })
    }

    /// S(e_i)f_α = e_j, everything else zero (1-based).
    pub fn single_entry(n: usize, k: usize, i: usize, alpha: usize, j: usize) -> Result<Self> {
        let mut inst = Self::zero(n, k)?;
        inst.s[i - 1][alpha - 1] = unit(n, j - 1);
        inst.validate()?;
        Ok(inst)
    }

    /// Random rational instance; the frame f is a rational rotation of the
    /// last k coordinate vectors.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self> {
        let mut inst = Self::zero(n, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q: Vec<Vec<Rat>> = (0..n).map(|i| unit(n, i)).collect();
        for _ in 0..n {
            let p = rng.gen_range(0..n);
            let r = (p + rng.gen_range(1..n)) % n;
            let s = rat(rng.gen_range(-3..=3), rng.gen_range(1..=4));
            givens(&mut q, p, r, &s);
        }
        // columns of q are the rotated basis vectors
        let col = |j: usize| -> Vec<Rat> { q.iter().map(|row| row[j].clone()).collect() };
        inst.f = (0..k).map(|a| col(n - k + a)).collect();
        let fcomp: Vec<Vec<Rat>> = (0..n - k).map(col).collect();
        for i in 0..n {
            for a in 0..k {
                let mut v = vec![Rat::zero(); n];
                for b in &fcomp {
                    let w = rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += &w * y;
                    }
                }
                inst.s[i][a] = v;
            }
        }
        inst.seed = Some(seed);
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, k) = (self.n, self.k);
        if !(2..=8).contains(&n) {
            return Err(Error::Malformed(format!("dimension {n} out of range")));
        }
        if k == 0 || k >= n {
            return Err(Error::Malformed(format!("rank k = {k} must satisfy 0 < k < n = {n}")));
        }
        if self.f.len() != k || self.f.iter().any(|v| v.len() != n) {
            return Err(Error::Malformed("f must hold k vectors of length n".into()));
        }
        if self.s.len() != n || self.s.iter().any(|r| r.len() != k || r.iter().any(|v| v.len() != n)) {
            return Err(Error::Malformed("S must be an n × k × n array".into()));
        }
        for a in 0..k {
            for b in 0..k {
                let want = if a == b { Rat::one() } else { Rat::zero() };
                if dot(&self.f[a], &self.f[b]) != want {
                    return Err(Error::Invariant(format!("f_{} and f_{} are not orthonormal", a + 1, b + 1)));
                }
            }
        }
        for i in 0..n {
            for a in 0..k {
                for b in 0..k {
                    if !dot(&self.s[i][a], &self.f[b]).is_zero() {
                        return Err(Error::Invariant(format!(
                            "S(e_{})f_{} has a component along f_{}",
                            i + 1,
                            a + 1,
                            b + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Σ_{i,α} |S(e_i)f_α|².
    pub fn snorm_sq(&self) -> Rat {
        self.s.iter().flat_map(|r| r.iter()).fold(Rat::zero(), |acc, v| acc + dot(v, v))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("instance JSON: {e}")))?;
        let conv = |v: &Vec<String>| -> Result<Vec<Rat>> { v.iter().map(|x| parse_rat(x)).collect() };
        let s =
            file.s.iter().map(|row| row.iter().map(conv).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        let f = match &file.f {
            Some(f) => f.iter().map(conv).collect::<Result<Vec<_>>>()?,
            None => default_f(file.n, file.k),
        };
        let inst = SubbundleInstance { n: file.n, k: file.k, s, f, seed: None };
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        let conv = |v: &Vec<Rat>| v.iter().map(fmt_rat).collect::<Vec<_>>();
        let file = InstanceFile {
            n: self.n,
            k: self.k,
            s: self.s.iter().map(|r| r.iter().map(conv).collect()).collect(),
            f: Some(self.f.iter().map(conv).collect()),
        };
        serde_json::to_string(&file).expect("serialisable")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let h = Sha256::digest(self.to_json().as_bytes());
        h.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn gauss_vec(v: &[Rat]) -> Vec<GaussRat> {
    v.iter().map(|x| GaussRat::real(x.clone())).collect()
}

/// A = Σ_{i,α} c(e_i) ĉ(S(e_i)f_α) ĉ(f_α).
pub fn build_a(inst: &SubbundleInstance) -> Result<Cl> {
    inst.validate()?;
    let mut a = Cl::zero();
    for i in 0..inst.n {
        let ci = Cl::c(i as u8 + 1);
        for al in 0..inst.k {
            let sv = &inst.s[i][al];
            if sv.iter().all(|x| x.is_zero()) {
                continue;
            }
            let t = Cl::product(&[&ci, &Cl::chat_vec(&gauss_vec(sv)), &Cl::chat_vec(&gauss_vec(&inst.f[al]))])?;
            a = a.add(&t);
        }
    }
    Ok(a)
}

/// (Q₀¹, Q₀²) = (¼Σω c ĉ ĉ, −¼Σω c c c) at x₀.
pub fn build_q0(ctx: &BoundaryContext) -> Result<(Cl, Cl)> {
    let n = ctx.n;
    let mut q1 = Cl::zero();
    let mut q2 = Cl::zero();
    for i in 1..=n {
        for s in 1..=n {
            for t in 1..=n {
                let w = ctx.omega(s, t, i);
                if w.is_zero() {
                    continue;
                }
                let (ci, cs, ct) = (Cl::c(i as u8), Cl::c(s as u8), Cl::c(t as u8));
                let (hs, ht) = (Cl::chat(s as u8), Cl::chat(t as u8));
                q1 = q1.add(&Cl::product(&[&ci, &hs, &ht])?.scale(&w.scale(&GaussRat::frac(1, 4))));
                q2 = q2.add(&Cl::product(&[&ci, &cs, &ct])?.scale(&w.scale(&GaussRat::frac(-1, 4))));
            }
        }
    }
    Ok((q1, q2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    /// D_t
    Dt,
    /// D_t*
    DtStar,
    /// D_t* D_t D_t*
    StarTriple,
    /// D_t³
    Cube,
}

impl Operator {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "D_t" | "Dt" => Ok(Operator::Dt),
            "D_t*" | "DtStar" => Ok(Operator::DtStar),
            "D_t*D_tD_t*" | "StarTriple" => Ok(Operator::StarTriple),
            "D_t^3" | "Cube" => Ok(Operator::Cube),
            _ => Err(Error::Unsupported(format!("operator tag {s:?}"))),
        }
    }
}

/// How σ₂ of the third-order operators is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sigma2Model {
    /// The closed σ₂ formula at x₀, including the A-quadratic term.
    Lemma,
    /// The closed σ₂ formula without the A-quadratic term.
    LemmaLinearA,
    /// Direct composition of the three first-order symbols.
    Composed,
}

fn t_var(op: Operator) -> Poly {
    match op {
        Operator::DtStar => Poly::var(Var::TBar),
        _ => Poly::var(Var::T),
    }
}

/// σ₀ of D_t (t) or D_t* (t̄).
pub fn sigma0(ctx: &BoundaryContext, a: &Cl, tv: &Poly) -> Result<Cl> {
    let (q1, q2) = build_q0(ctx)?;
    Ok(q1.add(&q2).add(&a.scale(tv)))
}

pub fn build_sigma(op: Operator, ctx: &BoundaryContext, inst: &SubbundleInstance) -> Result<GradedSymbol> {
    build_sigma_with(op, ctx, inst, Sigma2Model::Lemma)
}

pub fn build_sigma_with(
    op: Operator,
    ctx: &BoundaryContext,
    inst: &SubbundleInstance,
    model: Sigma2Model,
) -> Result<GradedSymbol> {
    let n = ctx.n;
    if inst.n != n {
        return Err(Error::Malformed(format!("instance has n = {}, context has n = {n}", inst.n)));
    }
    let a = build_a(inst)?;
    let cxi = Cl::c_xi(n);
    let icxi = lift(&cxi).scale(&LFrac::poly(Poly::i()));
    match op {
        Operator::Dt | Operator::DtStar => {
            let s0 = sigma0(ctx, &a, &t_var(op))?;
            Ok(GradedSymbol::new().with(1, icxi).with(0, lift(&s0)))
        }
        Operator::StarTriple | Operator::Cube => {
            let lf = LFrac::poly(l_poly());
            let s3 = icxi.scale(&lf);
            let s2 = match model {
                Sigma2Model::Composed => {
                    let (first, second) = match op {
                        Operator::StarTriple => (Operator::DtStar, Operator::Dt),
                        _ => (Operator::Dt, Operator::Dt),
                    };
                    let p = build_sigma(first, ctx, inst)?;
                    let q = build_sigma(second, ctx, inst)?;
                    let pq = GradedSymbol::new()
                        .with(2, compose_orders(&p, &q, 2, n)?)
                        .with(1, compose_orders(&p, &q, 1, n)?);
                    compose_orders(&pq, &p, 2, n)?
                }
                _ => {
                    let (q1, q2) = build_q0(ctx)?;
                    let q = lift(&q1.add(&q2));
                    let hu = &Poly::var(Var::HPrime) * &Poly::var(Var::U);
                    let metric = lift(&Cl::c(n as u8)).scale(&LFrac::poly(hu));
                    let gam = ctx.gamma_contracted(n);
                    let conn = lift(&cxi).scale(&LFrac::poly(&gam * &Poly::xin().scale(&GaussRat::int(-2))));
                    let (tl, tm) = match op {
                        Operator::StarTriple => (Poly::var(Var::TBar), Poly::var(Var::T)),
                        _ => (Poly::var(Var::T), Poly::var(Var::T)),
                    };
                    let la = lift(&a.scale(&tl)).scale(&lf);
                    let cac = lift(&Cl::product(&[&cxi, &a.scale(&tm), &cxi])?);
                    let alin = la.sub(&cac).scale(&LFrac::poly(Poly::int(2)));
                    let mut s2 = metric.add(&conn).add(&alin).add(&q.scale(&lf));
                    if model == Sigma2Model::Lemma {
                        let at = a.scale(&tl);
                        s2 = s2.add(&lift(&at.mul(&at)?).scale(&lf));
                    }
                    s2
                }
            };
            Ok(GradedSymbol::new().with(3, s3).with(2, s2.normalize_sphere(n - 1)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_antisymmetry() {
        for n in [4, 6] {
            let ctx = BoundaryContext::new(n).unwrap();
            for i in 1..=n {
                for s in 1..=n {
                    for t in 1..=n {
                        assert_eq!(ctx.omega(s, t, i), -ctx.omega(t, s, i));
                    }
                }
            }
        }
    }

    #[test]
    fn q0_second_part() {
        for (n, c) in [(4, -3), (6, -5)] {
            let ctx = BoundaryContext::new(n).unwrap();
            let (_, q2) = build_q0(&ctx).unwrap();
            let hp = Poly::var(Var::HPrime).scale(&GaussRat::frac(c, 4));
            assert_eq!(q2, Cl::c(n as u8).scale(&hp));
        }
    }

    #[test]
    fn q0_first_part_shape() {
        let ctx = BoundaryContext::new(4).unwrap();
        let (q1, _) = build_q0(&ctx).unwrap();
        let mut expect = Cl::zero();
        for i in 1..4u8 {
            let w = Cl::product(&[&Cl::c(i), &Cl::chat(i), &Cl::chat(4)]).unwrap();
            expect = expect.add(&w.scale(&Poly::var(Var::HPrime).scale(&GaussRat::frac(-1, 4))));
        }
        assert_eq!(q1, expect);
        assert!(q1.trace_product(&Cl::c(4), 4).unwrap().is_zero());
    }

    #[test]
    fn contracted_gamma() {
        let ctx = BoundaryContext::new(6).unwrap();
        assert_eq!(ctx.gamma_contracted(6), Poly::var(Var::HPrime).scale(&GaussRat::frac(5, 2)));
        for k in 1..6 {
            assert!(ctx.gamma_contracted(k).is_zero());
        }
    }

    #[test]
    fn instances_validate() {
        for seed in 0..10 {
            let inst = SubbundleInstance::random(6, 2, seed).unwrap();
            assert!(inst.validate().is_ok());
            let back = SubbundleInstance::from_json(&inst.to_json()).unwrap();
            assert_eq!(back.s, inst.s);
        }
        let mut bad = SubbundleInstance::single_entry(4, 1, 1, 1, 2).unwrap();
        bad.s[0][0] = unit(4, 3);
        assert!(matches!(bad.validate(), Err(Error::Invariant(_))));
    }

    #[test]
    fn a_examples() {
        let z = SubbundleInstance::zero(4, 1).unwrap();
        assert!(build_a(&z).unwrap().is_zero());
        let inst = SubbundleInstance::single_entry(4, 1, 1, 1, 2).unwrap();
        let a = build_a(&inst).unwrap();
        assert_eq!(a.trace_product(&a, 4).unwrap(), Poly::int(16));
        assert!(a.trace_product(&Cl::c(4), 4).unwrap().is_zero());
    }

    #[test]
    fn star_and_plain_agree_without_s() {
        let ctx = BoundaryContext::new(4).unwrap();
        let z = SubbundleInstance::zero(4, 1).unwrap();
        let a = build_sigma(Operator::Dt, &ctx, &z).unwrap();
        let b = build_sigma(Operator::DtStar, &ctx, &z).unwrap();
        for o in [0, 1] {
            assert_eq!(a.get(o).unwrap(), b.get(o).unwrap());
        }
    }

    #[test]
    fn star_is_t_substitution() {
        let ctx = BoundaryContext::new(4).unwrap();
        let inst = SubbundleInstance::random(4, 1, 3).unwrap();
        let a = build_sigma(Operator::Dt, &ctx, &inst).unwrap();
        let b = build_sigma(Operator::DtStar, &ctx, &inst).unwrap();
        let swapped = a.get(0).unwrap().map_coeffs(|c| LFrac { num: c.num.swap_vars(Var::T, Var::TBar), pow: c.pow });
        assert_eq!(&swapped, b.get(0).unwrap());
    }
}
