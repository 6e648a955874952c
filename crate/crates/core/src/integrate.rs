//! ∫dξₙ by residues and ∫_{|ξ′|=1} by exact moments.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{rat_int, GaussRat, Mono, Poly, RationalFn, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contour {
    RealLine,
    /// A closed curve enclosing the upper half-plane poles.
    GammaPlus,
}

/// 2πi Σ_{Im r > 0} Res f, returned with the factor π as the `pi` symbol.
pub fn xi_n_integral(f: &RationalFn, contour: Contour) -> Result<Poly> {
    let res = match contour {
        Contour::RealLine => f.uhp_residue_sum()?,
        // the closed contour tolerates a polynomial part, which has no residue
        Contour::GammaPlus => {
            for (r, _) in f.denominator() {
                if r.im.is_zero() {
                    return Err(Error::RealPole(r.to_string()));
                }
            }
            let pf = f.partial_fractions();
            let mut acc = Poly::zero();
            for t in pf.terms {
                if t.power == 1 && t.root.im > Zero::zero() {
                    acc = &acc + &t.coeff;
                }
            }
            acc
        }
    };
    let two_pi_i = Poly::var(Var::Pi).scale(&GaussRat::new(rat_int(0), rat_int(2)));
    Ok(&res * &two_pi_i)
}

fn double_factorial_odd(a: u32) -> i64 {
    // (a − 1)!! for even a
    let mut acc = 1i64;
    let mut k = a as i64 - 1;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// ∫_{|ξ′|=1} p σ(ξ′) over the sphere in m coordinates, as a multiple of Ω.
/// The atom u = |ξ′|² evaluates to 1 there.
pub fn sphere_integral(p: &Poly, m: usize) -> Poly {
    let p = p.eval_var(Var::U, &GaussRat::one());
    let mut out = Poly::zero();
    for (mono, c) in p.terms() {
        let mut rest: Mono = *mono;
        let mut num = 1i64;
        let mut half = 0u32;
        let mut odd = false;
        for i in 1..=m {
            let idx = Var::Xi(i as u8).index();
            let a = mono[idx] as u32;
            if a % 2 == 1 {
                odd = true;
                break;
            }
            num *= double_factorial_odd(a);
            half += a / 2;
            rest[idx] = 0;
        }
        if odd {
            continue;
        }
        let mut den = 1i64;
        for l in 0..half {
            den *= m as i64 + 2 * l as i64;
        }
        rest[Var::Omega.index()] += 1;
        out = &out + &Poly::monomial(rest, c * &GaussRat::frac(num, den));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi() -> Poly {
        Poly::var(Var::Pi)
    }

    #[test]
    fn arctan_normalisation() {
        let f = RationalFn::over_one_plus_xi2(Poly::one(), 1);
        assert_eq!(xi_n_integral(&f, Contour::RealLine).unwrap(), pi());
    }

    #[test]
    fn gamma_plus_example() {
        let f = RationalFn::new(Poly::one(), vec![(GaussRat::i(), 2), (-GaussRat::i(), 3)]).unwrap();
        let v = xi_n_integral(&f, Contour::GammaPlus).unwrap();
        assert_eq!(v, pi().scale(&GaussRat::new(rat_int(0), crate::scalar::rat(-3, 8))));
    }

    #[test]
    fn odd_integrand() {
        let f = RationalFn::over_one_plus_xi2(Poly::xin(), 2);
        assert!(xi_n_integral(&f, Contour::RealLine).unwrap().is_zero());
    }

    #[test]
    fn real_pole_rejected() {
        let f = RationalFn::new(Poly::one(), vec![(GaussRat::int(1), 2)]).unwrap();
        assert!(matches!(xi_n_integral(&f, Contour::RealLine), Err(Error::RealPole(_))));
    }

    #[test]
    fn moments() {
        let om = Poly::var(Var::Omega);
        let odd = &(&Poly::xi(1) * &Poly::xi(2)) * &Poly::xi(3);
        assert!(sphere_integral(&odd, 3).is_zero());
        assert_eq!(sphere_integral(&Poly::one(), 3), om);
        assert_eq!(sphere_integral(&Poly::xi(1).pow(2), 3), om.scale(&GaussRat::frac(1, 3)));
        // ∫ξ₁⁴ over S^{m−1} = 3/(m(m+2))
        assert_eq!(sphere_integral(&Poly::xi(1).pow(4), 5), om.scale(&GaussRat::frac(3, 35)));
    }
}
