use criterion::{black_box, criterion_group, criterion_main, Criterion};
use kkw_core::clifford::{wick, Generator};
use kkw_core::geometry::{Sigma2Model, SubbundleInstance};
use kkw_core::pipelines::{compute_case, compute_theorem_cases, inverse_symbols, Case, CaseSpec, Theorem};
use kkw_core::scalar::{GaussRat, Poly, RationalFn, Var};
use kkw_core::{parse_expr, Clifford};

fn algebra(c: &mut Criterion) {
    let word: Vec<Generator> = (1..=6u8).flat_map(|i| [Generator::c(i), Generator::chat(7 - i)]).collect();
    c.bench_function("wick/12 generators", |b| b.iter(|| wick(black_box(&word)).unwrap()));

    let x = Clifford::<Poly>::c_xi(6).add(&Clifford::chat(2));
    let y = Clifford::<Poly>::jet_xi_prime(5).add(&Clifford::c(6));
    c.bench_function("clifford/mul c(xi)", |b| b.iter(|| black_box(&x).mul(black_box(&y)).unwrap()));

    let f = RationalFn::new(
        Poly::from_coeffs(Var::XiN, &[Poly::int(4), Poly::i(), Poly::int(-3), Poly::frac(1, 2)]),
        vec![(GaussRat::i(), 3), (-GaussRat::i(), 2)],
    )
    .unwrap();
    c.bench_function("rational/pi_plus", |b| b.iter(|| black_box(&f).pi_plus().unwrap()));

    c.bench_function("parser/trace", |b| {
        b.iter(|| parse_expr(black_box("trace(c(1)*ch(2)*c(1)*ch(2) + 3/2*c(4)*c(4))"), 4).unwrap())
    });
}

fn pipelines(c: &mut Criterion) {
    let inst4 = SubbundleInstance::random(4, 2, 7).unwrap();
    let inst6 = SubbundleInstance::random(6, 2, 7).unwrap();
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    g.bench_function("phi all cases", |b| b.iter(|| compute_theorem_cases(Theorem::Phi, black_box(&inst4)).unwrap()));
    let syms = inverse_symbols(Theorem::Psi, &inst6, Sigma2Model::Lemma).unwrap();
    g.bench_function("psi case b", |b| {
        b.iter(|| compute_case(&CaseSpec::standard(Theorem::Psi, Case::B), black_box(&syms)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, algebra, pipelines);
criterion_main!(benches);
