use confsym::bialgebra::{
    algebra_from_coproduct, build_double, check_asi, check_frobenius, check_homomorphism, coproduct_from_algebra,
    dual_bialgebra, induced_matched_pair, AsiMode, Coproduct,
};
use confsym::fixtures::{hb2, hb2_coboundary, podd, rank1};
use confsym::{Error, FreeModule, Poly, Rational, TensorElement};

fn p(s: &str) -> Poly {
    Poly::parse(s).unwrap()
}

#[test]
fn podd_is_asi_iff_p_is_odd() {
    for (expr, odd) in [("L", true), ("L^3", true), ("L + 5*L^3", true), ("1", false), ("L^2", false), ("L^2 + L", false)] {
        let (a, d) = podd(&p(expr)).unwrap();
        let full = check_asi(&a, &d, AsiMode::Full).unwrap();
        let reduced = check_asi(&a, &d, AsiMode::Reduced).unwrap();
        let pair = induced_matched_pair(&a, &d).unwrap().check();
        assert_eq!(full.passed(), odd, "full, p = {expr}: {full}");
        assert_eq!(reduced.passed(), odd, "reduced, p = {expr}: {reduced}");
        assert_eq!(pair.passed(), odd, "matched pair, p = {expr}: {pair}");
    }
}

#[test]
fn even_podd_fails_at_thq2_only() {
    let (a, d) = podd(&p("L^2")).unwrap();
    let v = check_asi(&a, &d, AsiMode::Full).unwrap();
    assert!(v.only("thq1").passed());
    let c = v.only("thq2");
    let first = c.first().unwrap();
    assert_eq!(first.indices, ["a", "a"]);
    // Δ(a) = a⊗b, so the residual only sees p(λ+∂) and p(−λ−∂) on a⊗a-type
    // products landing in b⊗b: it is p(u) + p(−u) times b ⊗ b with u linear.
    assert_eq!(first.component, ["b", "b"]);
    assert_eq!(first.residual.total_degree(), Some(2));
    let r = check_asi(&a, &d, AsiMode::Reduced).unwrap();
    assert!(r.fails("es8"));
}

#[test]
fn hb2_coboundary_is_asi() {
    for mode in [AsiMode::Full, AsiMode::Reduced] {
        assert!(check_asi(&hb2(), &hb2_coboundary(), mode).unwrap().passed());
    }
}

#[test]
fn asi_refuses_without_coassociativity() {
    let m = FreeModule::new(["a", "b"]).unwrap();
    let t = |i: usize, j: usize| TensorElement::monomial(vec![m.clone(), m.clone()], vec![i, j], Poly::one()).unwrap();
    let bad = Coproduct::new(&m, vec![t(1, 1), t(0, 1)]).unwrap();
    match check_asi(&hb2(), &bad, AsiMode::Full) {
        Err(Error::Refused { precondition, verdict }) => {
            assert_eq!(precondition, "coassociativity");
            assert!(verdict.fails("coassoc"));
        }
        other => panic!("expected refusal, got {other:?}"),
    }
}

#[test]
fn rank_one_dual_coproduct() {
    let k = Rational::from_integer(7.into());
    let d = coproduct_from_algebra(&rank1(k));
    assert_eq!(d.image(0).coefficient(&[0, 0]), p("7"));
    let back = algebra_from_coproduct(&d);
    assert_eq!(back.entry(0, 0, 0), &p("7"));
}

#[test]
fn double_of_odd_podd() {
    let (a, d) = podd(&p("L")).unwrap();
    let dbl = build_double(&a, &d).unwrap();
    let big = &dbl.algebra;
    assert_eq!(big.rank(), 4);
    assert!(big.check_associativity().passed());
    assert!(check_frobenius(big, &dbl.form).unwrap().passed());
    assert!(check_asi(big, &dbl.coproduct, AsiMode::Full).unwrap().passed());

    let i1 = check_homomorphism(&dbl.inclusion_a, &a, big, Some((&d, &dbl.coproduct))).unwrap();
    assert!(i1.passed(), "{i1}");
    let (dual_alg, dual_co) = dual_bialgebra(&a, &d);
    let i2 = check_homomorphism(&dbl.inclusion_dual, &dual_alg, big, Some((&dual_co.neg(), &dbl.coproduct))).unwrap();
    assert!(i2.passed(), "{i2}");
    // without the sign the second inclusion is not a coalgebra map
    let wrong = check_homomorphism(&dbl.inclusion_dual, &dual_alg, big, Some((&dual_co, &dbl.coproduct))).unwrap();
    assert!(wrong.fails("hom-coproduct") && wrong.only("hom-product").passed());
}

#[test]
fn double_mixed_products_match_the_explicit_formula() {
    // e_i λ e_j^* = Σ_k P_j^{ki}(∂, −λ−∂) e_k^* + Σ_k R_i^{jk}(−λ−∂, λ) e_k
    // e_i^* λ e_j = Σ_k R_j^{ki}(∂, −λ−∂) e_k + Σ_k P_i^{jk}(−λ−∂, λ) e_k^*
    // with P the product of A and R the product dual to Δ.
    let (a, d) = podd(&p("L")).unwrap();
    let rr = algebra_from_coproduct(&d);
    let dbl = build_double(&a, &d).unwrap();
    let n = a.rank();
    let flip = |q: &Poly| {
        let l = Poly::var(confsym::Var::L);
        let dd = Poly::var(confsym::Var::D);
        let nl = -&l - &dd;
        q.substitute(&[(confsym::Var::L, dd.clone()), (confsym::Var::D, nl)].into_iter().collect())
    };
    let swap = |q: &Poly| {
        let l = Poly::var(confsym::Var::L);
        let dd = Poly::var(confsym::Var::D);
        q.substitute(&[(confsym::Var::L, -&l - &dd), (confsym::Var::D, l.clone())].into_iter().collect())
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                assert_eq!(dbl.algebra.entry(i, n + j, n + k), &flip(a.entry(k, i, j)));
                assert_eq!(dbl.algebra.entry(i, n + j, k), &swap(rr.entry(j, k, i)));
                assert_eq!(dbl.algebra.entry(n + i, j, k), &flip(rr.entry(k, i, j)));
                assert_eq!(dbl.algebra.entry(n + i, j, n + k), &swap(a.entry(j, k, i)));
            }
        }
    }
}

#[test]
fn double_restricts_to_the_original_coproduct() {
    let (a, d) = podd(&p("L^3")).unwrap();
    let dbl = build_double(&a, &d).unwrap();
    let n = a.rank();
    for k in 0..n {
        for (idx, c) in d.image(k).terms() {
            assert_eq!(&dbl.coproduct.image(k).coefficient(idx), c);
        }
        assert_eq!(dbl.coproduct.image(k).terms().count(), d.image(k).terms().count());
    }
}

#[test]
fn double_refuses_non_asi_input() {
    let (a, d) = podd(&p("L^2")).unwrap();
    assert!(matches!(build_double(&a, &d), Err(Error::Refused { precondition: "ASI bialgebra", .. })));
}

#[test]
fn trivial_double() {
    let a = rank1(Rational::from_integer(0.into()));
    let dbl = build_double(&a, &Coproduct::zero(a.module())).unwrap();
    assert_eq!(dbl.algebra.rank(), 2);
    assert!(dbl.algebra.table().is_zero());
    assert!(check_frobenius(&dbl.algebra, &dbl.form).unwrap().passed());
}

#[test]
fn hb2_double_is_frobenius() {
    let dbl = build_double(&hb2(), &hb2_coboundary()).unwrap();
    assert_eq!(dbl.algebra.rank(), 4);
    assert!(check_frobenius(&dbl.algebra, &dbl.form).unwrap().passed());
    assert!(check_asi(&dbl.algebra, &dbl.coproduct, AsiMode::Reduced).unwrap().passed());
}

#[test]
fn dual_bialgebra_of_odd_podd() {
    for expr in ["L", "L^3 - 2*L"] {
        let (a, d) = podd(&p(expr)).unwrap();
        let (da, dd) = dual_bialgebra(&a, &d);
        assert!(check_asi(&da, &dd, AsiMode::Full).unwrap().passed());
        assert!(check_asi(&da, &dd, AsiMode::Reduced).unwrap().passed());
    }
}
