use kkw_core::clifford::{wick, Clifford, Generator};
use kkw_core::exterior_rep::oracle_trace;
use kkw_core::integrate::sphere_integral;
use kkw_core::scalar::{GaussRat, Mono, Poly, RationalFn, Var, NVARS};
use kkw_core::{parse_expr, Parsed};
use proptest::prelude::*;

type Cl = Clifford<Poly>;

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
        .prop_map(|(a, b, c, d)| &GaussRat::frac(a, b) + &(&GaussRat::i() * &GaussRat::frac(c, d)))
}

fn mono(vars: &[Var], exps: &[u8]) -> Mono {
    let mut m = [0u8; NVARS];
    for (v, e) in vars.iter().zip(exps) {
        m[v.index()] = *e;
    }
    m
}

fn poly() -> impl Strategy<Value = Poly> {
    let vars = [Var::HPrime, Var::T, Var::XiN, Var::Xi(1)];
    prop::collection::vec((prop::collection::vec(0u8..3, 4), gauss()), 0..4)
        .prop_map(move |ts| ts.into_iter().fold(Poly::zero(), |acc, (e, c)| &acc + &Poly::monomial(mono(&vars, &e), c)))
}

fn generator(n: u8, with_jet: bool) -> impl Strategy<Value = Generator> {
    let channels = if with_jet { 3u8 } else { 2 };
    (0..channels, 1..=n).prop_map(|(ch, i)| match ch {
        0 => Generator::c(i),
        1 => Generator::chat(i),
        _ => Generator::jet(i),
    })
}

/// Jet generators pair with nothing but c, so at most one factor of a
/// product may carry them.
fn element(n: u8, with_jet: bool) -> impl Strategy<Value = Cl> {
    let word = if with_jet {
        (prop::collection::vec(generator(n, false), 0..3), prop::option::of(1..=n))
            .prop_map(|(mut w, j)| {
                w.extend(j.map(Generator::jet));
                w
            })
            .boxed()
    } else {
        prop::collection::vec(generator(n, false), 0..4).boxed()
    };
    prop::collection::vec((word, gauss()), 0..4).prop_map(|ts| {
        ts.into_iter()
            .fold(Cl::zero(), |acc, (w, c)| acc.add(&Cl::from_sequence(&w).unwrap().scale(&Poly::constant(c))))
    })
}

/// A proper rational function in ξₙ with non-real poles.
fn rational() -> impl Strategy<Value = RationalFn> {
    (prop::collection::btree_map(0usize..8, 1u32..=3, 1..3), prop::collection::vec(gauss(), 1..4)).prop_map(
        |(roots, num)| {
            let pool = [(0, 1), (0, -1), (0, 2), (1, 1), (-1, -2), (2, -1), (-1, 3), (3, 1)];
            let den: Vec<(GaussRat, u32)> = roots
                .into_iter()
                .map(|(k, m)| (&GaussRat::int(pool[k].0) + &(&GaussRat::i() * &GaussRat::int(pool[k].1)), m))
                .collect();
            let deg: u32 = den.iter().map(|(_, m)| m).sum();
            let cs: Vec<Poly> = num.into_iter().take(deg as usize).map(Poly::constant).collect();
            RationalFn::new(Poly::from_coeffs(Var::XiN, &cs), den).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn poly_ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn gauss_inverse(a in gauss()) {
        match a.inv() {
            Some(b) => prop_assert!((&a * &b).is_one()),
            None => prop_assert!(a.is_zero()),
        }
    }

    #[test]
    fn partial_fractions_reconstruct(f in rational()) {
        prop_assert!(f.partial_fractions().reconstruct().equals(&f));
    }

    #[test]
    fn projections_split_identity(f in rational()) {
        let p = f.pi_plus().unwrap();
        let m = f.pi_minus().unwrap();
        prop_assert!(p.add(&m).equals(&f));
        prop_assert!(p.pi_plus().unwrap().equals(&p));
        prop_assert!(m.pi_plus().unwrap().is_zero());
    }

    #[test]
    fn reflection_commutes_with_projection(f in rational()) {
        let r = f.reflect_conj();
        prop_assert!(r.reflect_conj().equals(&f));
        prop_assert!(r.pi_plus().unwrap().equals(&f.pi_plus().unwrap().reflect_conj()));
    }

    #[test]
    fn moments_respect_sphere_relation(e in prop::collection::vec(0u8..3, 3), c in gauss()) {
        let m = 3;
        let p = Poly::monomial(mono(&[Var::Xi(1), Var::Xi(2), Var::Xi(3)], &e), c);
        let r2 = (1..=m as u8).fold(Poly::zero(), |acc, i| &acc + &Poly::xi(i).pow(2));
        prop_assert_eq!(sphere_integral(&(&p * &r2), m), sphere_integral(&p, m));
    }

    #[test]
    fn clifford_associative(a in element(4, true), b in element(4, false), c in element(5, false)) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn anticommutators(i in 1u8..=5, j in 1u8..=5) {
        let delta = if i == j { 2 } else { 0 };
        let ac = |x: &Cl, y: &Cl| x.mul(y).unwrap().add(&y.mul(x).unwrap());
        prop_assert_eq!(ac(&Cl::c(i), &Cl::c(j)), Cl::scalar(Poly::int(-delta)));
        prop_assert_eq!(ac(&Cl::chat(i), &Cl::chat(j)), Cl::scalar(Poly::int(delta)));
        prop_assert!(ac(&Cl::c(i), &Cl::chat(j)).is_zero());
    }

    #[test]
    fn parser_round_trip(a in element(4, true)) {
        let v = parse_expr(&a.to_string(), 4).unwrap();
        let back = match v {
            Parsed::Scalar(p) => Cl::scalar(p),
            Parsed::Clifford(c) => c,
        };
        prop_assert_eq!(back, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn wick_matches_matrix_oracle(
        (n, word) in (2u8..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(generator(n, false), 0..9)))
    ) {
        let n = n as usize;
        let oracle = oracle_trace(&word, n).unwrap();
        let id = GaussRat::int(1 << n);
        prop_assert_eq!(wick(&word).unwrap(), Poly::constant(&oracle / &id));
        prop_assert_eq!(Cl::from_sequence(&word).unwrap().trace(n).unwrap(), Poly::constant(oracle));
    }
}
