//! Acceptance criteria 1–10, one line each. Exits non-zero if any fails or
//! exceeds its time limit.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use confsym::bialgebra::{
    algebra_from_coproduct, build_double, check_asi, check_frobenius, check_homomorphism, coproduct_from_algebra,
    dual_bialgebra, induced_matched_pair, AsiMode, Coproduct,
};
use confsym::fixtures::{
    cur_dual2, dend_prec, dend_succ, hb2, hb2_form, hb2_perturbed_form, hb2_r, podd, rank1,
};
use confsym::ybe::{
    check_o_operator, classify_r, coboundary_coproduct, map_from_r, p_from_r, r_bullet_r, r_matrix,
    solution_from_o_operator,
};
use confsym::{
    BilinearTable, Bimodule, ConformalAlgebra, ConformalLinearMap, FreeModule, ModuleMap, Poly, Rational,
    TensorElement,
};
use confsym_cli::document::{emit_documents, parse_documents, BimoduleDoc, Document, MapDoc};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

type Outcome = Result<(), String>;

/// Number, name, time limit in seconds, body.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, what: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn p(s: &str) -> Poly {
    Poly::parse(s).unwrap()
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn fixture_asi(expr: &str) -> (bool, bool, bool) {
    let (a, d) = podd(&p(expr)).unwrap();
    let full = check_asi(&a, &d, AsiMode::Full).unwrap().passed();
    let reduced = check_asi(&a, &d, AsiMode::Reduced).unwrap().passed();
    let pair = induced_matched_pair(&a, &d).unwrap().check().passed();
    (full, reduced, pair)
}

fn criterion_1() -> Outcome {
    let a = hb2();
    ensure(a.check_associativity().passed(), "HB2 is not associative")?;
    let good = check_frobenius(&a, &hb2_form()).unwrap();
    ensure(good.passed(), format!("HB2 form rejected: {good}"))?;
    let bad = check_frobenius(&a, &hb2_perturbed_form()).unwrap();
    ensure(bad.fails("invariance"), "perturbed form passes invariance")?;
    ensure(bad.fails("nondegeneracy"), "perturbed form passes nondegeneracy")
}

fn criterion_2() -> Outcome {
    for (expr, odd) in [("L", true), ("L^3", true), ("L + 5*L^3", true), ("1", false), ("L^2", false)] {
        let (full, reduced, pair) = fixture_asi(expr);
        ensure(full == odd, format!("p = {expr}: full mode gives {full}"))?;
        ensure(reduced == full, format!("p = {expr}: reduced mode gives {reduced}"))?;
        ensure(pair == full, format!("p = {expr}: matched pair gives {pair}"))?;
    }
    Ok(())
}

/// Sparse polynomial in `L, D` of total degree at most 2 with small integer coefficients.
fn random_ld(rng: &mut StdRng) -> Poly {
    let mut out = Poly::zero();
    for mono in ["1", "L", "D", "L^2", "L*D", "D^2"] {
        if rng.random_bool(0.3) {
            out += p(mono) * Poly::constant(q(rng.random_range(-3..=3)));
        }
    }
    out
}

fn labels(n: usize) -> FreeModule {
    FreeModule::new((1..=n).map(|i| format!("e{i}"))).unwrap()
}

fn criterion_3() -> Outcome {
    let mut cases = vec![hb2(), rank1(q(1)), rank1(q(-2)), rank1(Rational::new(3.into(), 7.into()))];
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let a = ConformalAlgebra::from_fn(&labels(n), |_, _, _| random_ld(&mut rng)).unwrap();
        cases.push(a);
    }
    for a in &cases {
        let back = algebra_from_coproduct(&coproduct_from_algebra(a));
        let n = a.rank();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    ensure(
                        back.entry(i, j, k) == a.entry(i, j, k),
                        format!("entry ({i},{j};{k}) of\n{a}\nbecame {}", back.entry(i, j, k)),
                    )?;
                }
            }
        }
        ensure(back.module() == a.module(), "basis changed")?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let a = hb2();
    let c = classify_r(&a, &hb2_r()).unwrap();
    ensure(c.antisymmetric.passed(), "not antisymmetric")?;
    ensure(c.qw1.passed(), format!("qw1 fails: {}", c.qw1))?;
    ensure(c.thq3.passed(), format!("thq3 fails: {}", c.thq3))?;
    let ces = &c.cybe.counterexamples;
    ensure(ces.len() == 1, format!("expected one cybe counterexample, got {}", c.cybe))?;
    ensure(ces[0].component == ["b", "b", "b"], format!("cybe component {:?}", ces[0].component))?;
    ensure(ces[0].residual == p("3*x1^2 + 3*x1*x2 + 3*x2^2"), format!("cybe residual {}", ces[0].residual))?;

    let m = a.module().clone();
    let on_a = TensorElement::monomial(vec![m.clone(), m.clone()], vec![1, 1], p("-2*(x1^2 + x1*x2 + x2^2)")).unwrap();
    let expected = Coproduct::new(&m, vec![on_a, TensorElement::zero(vec![m.clone(), m.clone()])]).unwrap();
    let delta = coboundary_coproduct(&a, &hb2_r()).unwrap();
    ensure(delta == expected, format!("coboundary is\n{delta}"))?;
    ensure(check_asi(&a, &delta, AsiMode::Full).unwrap().passed(), "coboundary bialgebra is not ASI")
}

fn criterion_5() -> Outcome {
    let s = dend_succ().canonical_solution().unwrap();
    ensure(r_bullet_r(&s.algebra, &s.r).unwrap().is_zero(), "r•r is not identically zero")?;
    ensure(classify_r(&s.algebra, &s.r).unwrap().all_pass(), "classification is not all-pass")?;
    let a = rank1(q(1));
    let m = a.module().clone();
    let left_only = Bimodule::new(&a, a.table().clone(), BilinearTable::zero(&m, &m, &m)).unwrap();
    let id = ConformalLinearMap::new(&m, &m, vec![vec![p("1")]]).unwrap();
    let via_o = solution_from_o_operator(&left_only, &id).unwrap();
    ensure(via_o.algebra == s.algebra, "ambient algebras differ")?;
    ensure(via_o.r == s.r, format!("r differs: {} vs {}", via_o.r, s.r))
}

fn criterion_6() -> Outcome {
    let (a, d) = podd(&p("L")).unwrap();
    let dbl = build_double(&a, &d).unwrap();
    let big = &dbl.algebra;
    ensure(big.rank() == 4, format!("rank {}", big.rank()))?;
    ensure(big.check_associativity().passed(), "double is not associative")?;
    let f = check_frobenius(big, &dbl.form).unwrap();
    for id in ["symmetry", "invariance", "nondegeneracy"] {
        ensure(f.only(id).passed(), format!("form fails {id}"))?;
    }
    ensure(f.passed(), format!("form: {f}"))?;
    ensure(check_asi(big, &dbl.coproduct, AsiMode::Full).unwrap().passed(), "double is not ASI")?;
    let i1 = check_homomorphism(&dbl.inclusion_a, &a, big, Some((&d, &dbl.coproduct))).unwrap();
    ensure(i1.passed(), format!("i1: {i1}"))?;
    let (da, dd) = dual_bialgebra(&a, &d);
    let i2 = check_homomorphism(&dbl.inclusion_dual, &da, big, Some((&dd.neg(), &dbl.coproduct))).unwrap();
    ensure(i2.passed(), format!("i2: {i2}"))
}

fn antisym(a: &ConformalAlgebra, terms: &[(usize, usize, &str)]) -> TensorElement {
    let r = r_matrix(a, terms.iter().map(|&(i, j, c)| (i, j, p(c)))).unwrap();
    r.sub(&r.swap_legs(1, 2).unwrap()).unwrap()
}

fn criterion_7() -> Outcome {
    let mut cases = vec![(hb2(), hb2_r())];
    for d in [dend_succ(), dend_prec()] {
        let s = d.canonical_solution().unwrap();
        cases.push((s.algebra, s.r));
    }
    let (podd_l, _) = podd(&p("L")).unwrap();
    cases.push((podd_l.clone(), antisym(&podd_l, &[(0, 1, "1")])));
    cases.push((podd_l.clone(), antisym(&podd_l, &[(1, 1, "x1")])));
    let c = cur_dual2();
    cases.push((c.clone(), antisym(&c, &[(0, 1, "1")])));
    cases.push((c.clone(), antisym(&c, &[(1, 1, "x1 - 2*x2")])));
    cases.push((hb2(), antisym(&hb2(), &[(0, 0, "x1^2 - x2^2")])));
    let mut seen = [0, 0];
    for (a, r) in &cases {
        let cl = classify_r(a, r).unwrap();
        ensure(cl.antisymmetric.passed(), format!("fixture r = {r} is not antisymmetric"))?;
        let t0 = map_from_r(r).unwrap().at_zero();
        let o = check_o_operator(&t0, &Bimodule::regular(a).dual()).unwrap();
        ensure(o.passed() == cl.cybe.passed(), format!("r = {r}: cybe {} vs O-operator {}", cl.cybe, o))?;
        seen[usize::from(o.passed())] += 1;
    }
    ensure(seen[0] > 0 && seen[1] > 0, format!("one-sided fixture set {seen:?}"))?;

    for r in [hb2_r(), antisym(&hb2(), &[(0, 0, "x1^2 - x2^2")]), antisym(&hb2(), &[(1, 1, "x1")])] {
        let cybe = classify_r(&hb2(), &r).unwrap().cybe.passed();
        let (_, rb) = p_from_r(&hb2(), &hb2_form(), &r).unwrap();
        ensure(cybe == rb.passed(), format!("r = {r}: Rota-Baxter {rb}"))?;
    }
    let (p0, rb) = p_from_r(&hb2(), &hb2_form(), &hb2_r()).unwrap();
    let m = hb2().module().clone();
    let expected = ModuleMap::new(&m, &m, vec![vec![p("-1"), p("0")], vec![p("0"), p("1")]]).unwrap();
    ensure(p0 == expected, "P_0 is not a ↦ −a, b ↦ b")?;
    ensure(!rb.passed(), "P_0 passes the Rota-Baxter identity")?;

    let s = dend_succ().canonical_solution().unwrap();
    let dual = algebra_from_coproduct(&coboundary_coproduct(&s.algebra, &s.r).unwrap());
    let t0 = map_from_r(&s.r).unwrap().at_zero();
    let h = check_homomorphism(&t0, &dual, &s.algebra, None).unwrap();
    ensure(h.passed(), format!("T_0 is not a homomorphism: {h}"))
}

/// Associative algebras of rank at most 2.
fn random_associative(rng: &mut StdRng) -> ConformalAlgebra {
    match rng.random_range(0..4) {
        0 => {
            let f = random_ld(rng);
            ConformalAlgebra::from_fn(&FreeModule::new(["a", "b"]).unwrap(), |i, j, k| {
                if (i, j, k) == (0, 0, 1) {
                    f.clone()
                } else {
                    Poly::zero()
                }
            })
            .unwrap()
        }
        1 => rank1(q(rng.random_range(-4..=4))),
        2 => cur_dual2(),
        _ => hb2(),
    }
}

fn random_bimodule(rng: &mut StdRng) -> Bimodule {
    let a = random_associative(rng);
    let m = a.module().clone();
    let zero = BilinearTable::zero(&m, &m, &m);
    let bm = match rng.random_range(0..3) {
        0 => Bimodule::regular(&a),
        1 => Bimodule::new(&a, a.table().clone(), zero).unwrap(),
        _ => Bimodule::new(&a, zero, a.right_table()).unwrap(),
    };
    if rng.random_bool(0.5) {
        bm.dual()
    } else {
        bm
    }
}

fn criterion_8() -> Outcome {
    let mut cases: Vec<Bimodule> = [hb2(), rank1(q(1)), rank1(q(-3)), cur_dual2()]
        .iter()
        .map(Bimodule::regular)
        .collect();
    let mut rng = StdRng::seed_from_u64(8);
    cases.extend((0..50).map(|_| random_bimodule(&mut rng)));
    for bm in &cases {
        ensure(bm.check().passed(), format!("generated bimodule is invalid:\n{}", bm.check()))?;
        let v = bm.dual().check();
        ensure(v.passed(), format!("dual fails: {v}"))?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let (a, d) = podd(&p("L")).unwrap();
    let (da, dd) = dual_bialgebra(&a, &d);
    let v = check_asi(&da, &dd, AsiMode::Full).unwrap();
    ensure(v.passed(), format!("dual bialgebra: {v}"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn confsym(args: &[&str], stdin: Option<&str>) -> (i32, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_confsym"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.unwrap_or("").as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lossless(what: &str, text: &str) -> Outcome {
    let first: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("{what}: not JSON: {e}"))?;
    let docs = parse_documents(text).map_err(|e| format!("{what}: {e}"))?;
    let again = emit_documents(&docs);
    ensure(again == first, format!("{what}: emit ∘ parse is not the identity"))?;
    let docs2 = parse_documents(&again.to_string()).map_err(|e| format!("{what}: {e}"))?;
    ensure(docs2 == docs, format!("{what}: parse ∘ emit changes the value"))
}

fn write(dir: &Path, name: &str, docs: &[Document]) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, emit_documents(docs).to_string()).unwrap();
    path
}

fn criterion_10() -> Outcome {
    let odd = data("podd-odd.json");
    let even = data("podd-even.json");
    let dend = data("dend1.json");

    let (code, _) = confsym(&["check", "asi", path_str(&odd)], None);
    ensure(code == 0, format!("check asi podd-odd.json exited {code}"))?;

    let (code, out) = confsym(&["check", "asi", path_str(&even), "--json"], None);
    ensure(code == 1, format!("check asi podd-even.json --json exited {code}"))?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let ce = &v["counterexamples"][0];
    ensure(ce["identity"] == "thq2", format!("first counterexample {ce}"))?;
    ensure(ce["indices"] == serde_json::json!(["a", "a"]), format!("first counterexample {ce}"))?;
    ensure(ce["residual"].is_string(), "residual missing")?;

    let (code, out) = confsym(&["build", "canonical-solution", path_str(&dend)], None);
    ensure(code == 0, format!("build canonical-solution exited {code}"))?;
    lossless("canonical-solution", &out)?;
    let (code, _) = confsym(&["classify", "r", "-"], Some(&out));
    ensure(code == 0, format!("classify r on the canonical solution exited {code}"))?;

    // every build kind
    let dir = tempfile::tempdir().unwrap();
    let a = rank1(q(1));
    let m = a.module().clone();
    let left_only = Bimodule::new(&a, a.table().clone(), BilinearTable::zero(&m, &m, &m)).unwrap();
    let hb2_file = write(dir.path(), "hb2.json", &[Document::Algebra(hb2())]);
    let r_file = write(dir.path(), "r.json", &[Document::RMatrix(hb2_r())]);
    let (_, pd) = podd(&p("L")).unwrap();
    let co_file = write(dir.path(), "co.json", &[Document::Coproduct(pd)]);
    let r1_file = write(dir.path(), "r1.json", &[Document::Algebra(a.clone())]);
    let bm_file = write(dir.path(), "bm.json", &[Document::Bimodule(BimoduleDoc::of(&left_only))]);
    let map_file = write(dir.path(), "id.json", &[Document::Map(MapDoc::Module(ModuleMap::identity(&m)))]);
    let builds: [(&str, Vec<&Path>, Vec<&str>); 7] = [
        ("dual-coproduct", vec![&hb2_file], vec![]),
        ("dual-algebra", vec![&co_file], vec![]),
        ("double", vec![&odd], vec![]),
        ("semidirect", vec![&r1_file], vec!["--bimodule", path_str(&bm_file)]),
        ("coboundary", vec![&hb2_file], vec!["--r", path_str(&r_file)]),
        (
            "solution-from-o-operator",
            vec![&r1_file],
            vec!["--bimodule", path_str(&bm_file), "--map", path_str(&map_file)],
        ),
        ("canonical-solution", vec![&dend], vec![]),
    ];
    for (what, files, flags) in builds {
        let mut args = vec!["build", what];
        args.extend(files.iter().map(|f| path_str(f)));
        args.extend(flags);
        let (code, out) = confsym(&args, None);
        ensure(code == 0, format!("build {what} exited {code}"))?;
        lossless(what, &out)?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "HB2 fixture and Frobenius form", 1, criterion_1),
        (2, "PODD family, both modes and matched pair", 2, criterion_2),
        (3, "coproduct duality round trip", 5, criterion_3),
        (4, "HB2 coboundary without CYBE", 1, criterion_4),
        (5, "canonical dendriform solution", 1, criterion_5),
        (6, "double of PODD(L)", 10, criterion_6),
        (7, "operator correspondences", 2, criterion_7),
        (8, "bimodule duality", 5, criterion_8),
        (9, "dual bialgebra", 2, criterion_9),
        (10, "CLI contract", 30, criterion_10),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let result = result.and_then(|()| {
            ensure(
                took < Duration::from_secs(limit),
                format!("took {:.2} s, limit {limit} s", took.as_secs_f64()),
            )
        });
        match result {
            Ok(()) => println!("criterion {n:>2} PASS  {name} ({:.3} s)", took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name} ({:.3} s): {why}", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
