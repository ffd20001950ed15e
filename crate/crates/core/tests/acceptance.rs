//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use dca_core::cli::cache::{Cache, Key};
use dca_core::cli::serial::{field_from, field_json, scalar_from, scalar_json};
use dca_core::fields::{exchange_function, mode_apply, residue, wick_expand, ExpFactor, Field, NOProduct};
use dca_core::fock::{basis_up_to, FockVector};
use dca_core::qseries::{self, Truncation};
use dca_core::relations::{
    fusion_tower, named_field, preset, residue_prefactor, verify_exchange, verify_limits, verify_relation, verify_skao,
    verify_triple_residue, verify_ttilde, FieldName, Params, TestMonomial, TowerDirection, TtildeSign,
    VerificationReport,
};
use dca_core::ring::{Direction, Monomial, ProductForm, QPoly, QRat, Rat, Scalar};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn verified(r: &VerificationReport) -> Result<(), String> {
    ensure(r.verified(), || format!("{r}"))
}

fn mono(c: i64, a2: i32, b: i32) -> Scalar {
    Scalar::monomial(Rat::int(c), a2, b)
}

/// `1 − p^{a2/2} q^b`.
fn one_minus(a2: i32, b: i32) -> Scalar {
    Scalar::one().sub(&mono(1, a2, b))
}

fn quotient(num: &[(i32, i32)], den: &[(i32, i32)], w: i32) -> Scalar {
    let n = num.iter().fold(Scalar::one(), |acc, &(a, b)| acc.mul(&one_minus(a, b)));
    let d = den.iter().fold(Scalar::one(), |acc, &(a, b)| acc.mul(&one_minus(a, b)));
    n.mul(&d.inv_to(w).expect("unit denominator"))
}

fn same(a: &Scalar, b: &Scalar, need: i32) -> bool {
    let (eq, prec) = a.compare(b);
    eq && prec >= need
}

/// `f(x) = (1−x)⁻¹ Π_{k≥0} (1−xqp^{2k})(1−xpq⁻¹p^{2k}) / ((1−xpqp^{2k})(1−xp²q⁻¹p^{2k}))`
/// from its factor list.
fn oracle_f(tr: Truncation) -> ProductForm {
    let cut = tr.cutoff();
    let mut factors = vec![(Monomial::one(), -1)];
    for (a2, b, e) in [(0, 1, 1), (2, -1, 1), (2, 1, -1), (4, -1, -1)] {
        let mut k = a2;
        while k <= cut {
            factors.push((Monomial::pq(k, b), e));
            k += 4;
        }
    }
    ProductForm::from_parts(0, Scalar::one(), factors, Some(cut + 1), None)
}

fn oracle_g_at(x: &Monomial, w: i32) -> Scalar {
    let x = x.to_scalar();
    let lin = |m: Scalar| Scalar::one().sub(&x.mul(&m));
    let num = lin(mono(1, 0, 1)).mul(&lin(mono(1, 2, -1)));
    let den = lin(Scalar::one()).mul(&lin(mono(1, 2, 0)));
    num.mul(&den.inv_to(w).expect("g is finite off its poles"))
}

fn c1() -> Outcome {
    let tr = Truncation::new(8, 2);
    let s = ok(qseries::s_tt(tr))?;
    let f = oracle_f(tr);
    ensure(ok(qseries::f(tr))?.agrees_with(&f), || "library f differs from its factor list".into())?;
    let p = Monomial::p();
    let a = s.mul(&f).compare(&f.reflect());
    ensure(a.equal, || format!("S_TT·f(x) ≠ f(1/x): {:?}", a.detail))?;
    let b = s.mul(&f.reflect().scale_var(&p)).compare(&f.scale_var(&p));
    ensure(b.equal, || format!("S_TT·f(1/(xp)) ≠ f(xp): {:?}", b.detail))?;
    Ok(format!("{} factors in S_TT at p-order 8", s.factor_count()))
}

fn c2() -> Outcome {
    let tr = Truncation::new(8, 2);
    let f = oracle_f(tr);
    let p = Monomial::p();
    let finv = ok(f.inv())?;
    let lp = ExpFactor::lambda(Monomial::one());
    let lm = ExpFactor::lambda_inv(p.inv());
    let expected = [
        ((lp.clone(), lp.clone()), finv.clone()),
        ((lp.clone(), lm.clone()), f.scale_var(&p.inv())),
        ((lm.clone(), lp.clone()), f.scale_var(&p)),
        ((lm.clone(), lm.clone()), finv),
    ];
    let e = ok(wick_expand(&Field::t(), &Field::t(), tr))?;
    ensure(e.terms.len() == 4, || format!("{} terms", e.terms.len()))?;
    for ((x, y), want) in &expected {
        let nx = NOProduct::new(vec![x.clone()]);
        let ny = NOProduct::new(vec![y.clone()]);
        let t = e
            .terms
            .iter()
            .find(|t| t.nops[0] == nx && t.nops[1] == ny)
            .ok_or_else(|| format!("no term :{nx}: :{ny}:"))?;
        ensure(t.coeff.is_one(), || format!("coefficient {} on :{nx}: :{ny}:", t.coeff))?;
        let cmp = t.pair(0, 1).compare(want);
        ensure(cmp.equal, || format!(":{nx}: :{ny}: contraction differs: {:?}", cmp.detail))?;
    }
    Ok("4 terms match".into())
}

fn c3() -> Outcome {
    let r = ok(verify_skao(Params::new(6, 4, 4)))?;
    verified(&r)?;
    ensure(r.checks >= 500, || format!("only {} checks", r.checks))?;
    Ok(format!("{} exact equalities", r.checks))
}

fn c4() -> Outcome {
    let t = Field::t();
    let r = ok(verify_exchange(&t, &t, Params::new(6, 3, 4)))?;
    verified(&r)?;
    Ok(format!("{} matrix-element identities", r.checks))
}

fn c5() -> Outcome {
    let tr = Truncation::new(6, 4);
    let need = tr.window();
    let w = tr.cutoff() + 1;
    let mut problems = Vec::new();

    let (computed, displayed) = ok(residue_prefactor(tr))?;
    if !same(&computed, &displayed, need) {
        let r = computed.mul(&ok(displayed.inv_to(w))?).truncate(need);
        problems.push(format!("prefactor: computed/displayed = {r}"));
    }

    let e = ok(wick_expand(&Field::t(), &Field::t(), tr))?;
    let res = ok(residue(&e, &Monomial::q(), None, 0, tr))?;
    let lam = |g: Monomial| ExpFactor::plus(g);
    let lead = NOProduct::new(vec![lam(Monomial::one()), lam(Monomial::q())]);
    let low = NOProduct::new(vec![ExpFactor::minus(Monomial::q()), ExpFactor::minus(Monomial::one())]);
    let mixed = NOProduct::new(vec![lam(Monomial::q()), ExpFactor::minus(Monomial::one())]);
    ensure(res.len() == 3, || format!("residue has {} terms", res.len()))?;
    let c0 = res.coefficient(&lead);
    let inv0 = ok(c0.inv_to(w))?;
    // (1+q) = (1−q²)/(1−q)
    let want_mixed = quotient(&[(2, 0), (0, 2)], &[(0, 1), (2, 1)], w);
    if !same(&res.coefficient(&mixed).mul(&inv0), &want_mixed, need) {
        problems.push("mixed coefficient differs from (1-p)(1+q)/(1-pq)".into());
    }
    if !same(&res.coefficient(&low).mul(&inv0), &Scalar::one(), need) {
        problems.push("outer coefficients differ".into());
    }

    let tower = ok(fusion_tower(3, TowerDirection::Q, tr))?;
    let mut prev = vec![Scalar::one(), Scalar::one()];
    for (k, step) in tower.steps.iter().enumerate() {
        let n = k as u32 + 1;
        let mut row = vec![Scalar::one()];
        for i in 1..=n {
            let mut c = prev[i as usize].clone();
            for j in 1..=i {
                c = c.mul(&oracle_g_at(&Monomial::q().pow((n - j + 1) as i32), w));
            }
            row.push(c);
        }
        row.push(Scalar::one());
        for (i, want) in row.iter().enumerate() {
            if !same(&step.from_residue[i], want, need) {
                problems.push(format!("c^{i}_{} from the residue differs from the recursion", n + 1));
            }
        }
        prev = row;
    }
    ensure(tower.fields.len() == 3 && tower.fields[2].len() == 4, || "T_3 does not have 4 terms".into())?;
    if problems.is_empty() {
        Ok("prefactor, mixed coefficient and tower to n=3 match".into())
    } else {
        Err(problems.join("; "))
    }
}

fn ttilde_constant_check(tr: Truncation) -> Result<(), String> {
    let w = tr.cutoff() + 1;
    let pq2 = Monomial::pq(2, 2);
    let e = ok(wick_expand(&Field::t(), &Field::t(), tr))?;
    let mult = ok(qseries::f(tr))?.mul(&ProductForm::binomial(pq2.clone(), -1));
    let e = e.with_pair_factor(0, 1, &mult);
    let mut total = Scalar::exact_zero();
    for line in dca_core::fields::pole_lines(&e, tr) {
        if line.gamma == pq2 {
            continue;
        }
        let r = ok(residue(&e, &line.gamma, None, 0, tr))?;
        if r.vanishes() {
            continue;
        }
        total = total.add(&r.as_constant().ok_or_else(|| format!("residue at {} is not constant", line.gamma))?);
    }
    // q²(1−q)(1+p)(1−pq⁻¹)/((1−q²)(1−p²q²)), (1+p) = (1−p²)/(1−p)
    let want = quotient(&[(0, 1), (4, 0), (2, -1)], &[(2, 0), (0, 2), (4, 2)], w).mul(&mono(1, 0, 2));
    ensure(same(&total.neg(), &want, tr.window()), || format!("constant {} ≠ {want}", total.neg()))
}

fn c6() -> Outcome {
    let params = Params::new(5, 3, 3);
    let mut parts = Vec::new();
    for name in ["odin", "alt", "F1", "F2"] {
        let r = ok(verify_relation(params, |tr, w| preset(name, tr, w)))?;
        verified(&r)?;
        parts.push(format!("{name} {}", r.checks));
    }
    ttilde_constant_check(Truncation::new(5, 4))?;
    Ok(format!("checks: {}; Ttilde constant exact", parts.join(", ")))
}

fn c7() -> Outcome {
    let params = Params::new(5, 2, 3);
    let r = ok(verify_ttilde(params, TtildeSign::Contour))?;
    verified(&r)?;
    let tr = Truncation::new(5, 4);
    let w = tr.cutoff() + 1;
    let ap = ok(ok(qseries::alpha_plus(tr))?.expand(0, w))?;
    let am = ok(ok(qseries::alpha_minus(tr))?.expand(1, w))?;
    let a0 = ap.coeff_x(0).ok_or("alpha_0 missing")?;
    let a1 = am.coeff_x(-1).ok_or("alpha_1 missing")?;
    ensure(same(&a0, &Scalar::one(), tr.window()), || format!("alpha_0 = {a0}"))?;
    ensure(same(&a1, &mono(-1, -2, -2), tr.window()), || format!("alpha_1 = {a1}"))?;
    Ok(format!("{} checks; flags: {}", r.checks, r.flags.join(" | ")))
}

fn c8() -> Outcome {
    let params = Params::new(4, 1, 3);
    let q = Monomial::q();
    let r = ok(verify_triple_residue(&q, &q, &TestMonomial::one(), params))?;
    verified(&r)?;
    let mut extra = Vec::new();
    for (a, b) in [(q.pow(2), q.clone()), (Monomial::p(), q.clone())] {
        let x = ok(verify_triple_residue(&a, &b, &TestMonomial::one(), params))?;
        verified(&x)?;
        extra.push(format!("a={a},b={b}: {}", x.checks));
    }
    Ok(format!("{} checks at a=b=q ({}); also {}", r.checks, r.flags.join(" | "), extra.join(", ")))
}

fn c9() -> Outcome {
    let (r, reports) = ok(verify_limits(Params::new(5, 1, 1), 2))?;
    verified(&r)?;
    ensure(reports.len() == 2, || format!("{} limits", reports.len()))?;
    for l in &reports {
        ensure(l.limit.len() == 3 && l.structure_matches, || format!("{}|{}: {}", l.field, l.target, l.limit))?;
        ensure(!l.flags.is_empty(), || format!("{}: no comparison with the displayed t2 was emitted", l.field))?;
    }
    Ok(format!("{} flags emitted", r.flags.len()))
}

fn coefficients_agree(a: &[Scalar], b: &[Scalar], need: i32) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same(&x.truncate(need), &y.truncate(need), need))
}

fn monotonicity() -> Result<String, String> {
    let lo = Truncation::new(4, 4);
    let hi = Truncation::new(6, 4);
    let need = lo.window();
    for k in [4, 6] {
        verified(&ok(verify_skao(Params::new(k, 4, 4)))?)?;
    }
    let ex = |tr: Truncation| -> Result<Vec<Scalar>, String> {
        Ok(ok(ok(qseries::f(tr))?.expand(Direction::InX, 12, tr.cutoff() + 1))?.coeffs)
    };
    ensure(coefficients_agree(&ex(lo)?, &ex(hi)?, need), || "f coefficients moved between K=4 and K=6".into())?;
    let res = |tr: Truncation| -> Result<Field, String> {
        let e = ok(wick_expand(&Field::t(), &Field::t(), tr))?;
        ok(residue(&e, &Monomial::q(), None, 0, tr))
    };
    ensure(res(lo)?.truncate(need).agrees_with(&res(hi)?.truncate(need)), || "residue at wq moved".into())?;
    let (t4, t6) = (ok(fusion_tower(3, TowerDirection::Q, lo))?, ok(fusion_tower(3, TowerDirection::Q, hi))?);
    for (a, b) in t4.coefficients.iter().zip(&t6.coefficients) {
        ensure(coefficients_agree(a, b, need), || "tower coefficients moved".into())?;
    }
    Ok("monotone".into())
}

fn field_pool(tr: Truncation) -> Result<Vec<Field>, String> {
    ["Omega", "T", "T2q", "T2pq", "Ttilde"]
        .iter()
        .map(|n| ok(named_field(ok(n.parse::<FieldName>())?, tr)))
        .collect()
}

fn antisymmetry(runner: &mut TestRunner, pool: &[Field], tr: Truncation) -> Result<(), String> {
    let n = pool.len();
    ok(runner.run(&(0..n, 0..n, -2i32..=2, -2i32..=2), |(i, j, a2, b)| {
        let g = Monomial::pq(a2, b);
        let (x, y) = (&pool[i], pool[j].shifted(&g));
        let s = exchange_function(x, &y, tr).unwrap();
        let t = exchange_function(&y, x, tr).unwrap();
        prop_assert!(s.mul(&t.reflect()).agrees_with(&ProductForm::one()));
        Ok(())
    }))
}

fn grading(runner: &mut TestRunner, pool: &[Field]) -> Result<(), String> {
    let basis = basis_up_to(4);
    let nb = basis.len();
    let n = pool.len();
    ok(runner.run(&(0..n, 0..nb, -4i32..=4), |(i, k, m)| {
        let u = &basis[k];
        let v = mode_apply(&pool[i], m, &FockVector::basis(u.clone()), 10).unwrap();
        let want = u.degree() as i64 - m as i64;
        for (p, c) in v.terms() {
            prop_assert!(c.is_zero() || p.degree() as i64 == want);
        }
        prop_assert!(want >= 0 || v.vanishes());
        Ok(())
    }))
}

fn yang_baxter(runner: &mut TestRunner, pool: &[Field], tr: Truncation) -> Result<(), String> {
    let n = pool.len();
    let w = tr.cutoff() + 1;
    // z₂ = z₁x, z₃ = z₂c with c = p^{1/2}
    let c = Monomial::pq(1, 0);
    ok(runner.run(&(0..n, 0..n, 0..n), |(i, j, k)| {
        let (a, b, d) = (&pool[i], &pool[j], &pool[k]);
        let sab = exchange_function(a, b, tr).unwrap();
        let sad = exchange_function(a, d, tr).unwrap().scale_var(&c);
        let sbd = ProductForm::constant(exchange_function(b, d, tr).unwrap().eval_at(&c, w).unwrap());
        let left = sab.mul(&sad).mul(&sbd);
        let right = sbd.mul(&sad).mul(&sab);
        prop_assert!(left.agrees_with(&right));
        Ok(())
    }))
}

fn small_qrat() -> impl Strategy<Value = QRat> {
    let poly = || (-2i32..=2, proptest::collection::vec(-3i64..=3, 1..4));
    (poly(), poly()).prop_filter_map("zero denominator", |((l1, n), (l2, d))| {
        let den = QPoly::from_parts(l2, d.into_iter().map(Rat::int).collect());
        (!den.is_zero()).then(|| QRat::new(QPoly::from_parts(l1, n.into_iter().map(Rat::int).collect()), den))
    })
}

fn round_trips(runner: &mut TestRunner, pool: &[Field], tr: Truncation) -> Result<(), String> {
    let scalars = (-4i32..4, proptest::collection::vec(small_qrat(), 0..4), prop_oneof![Just(None), (0i32..12).prop_map(Some)]);
    ok(runner.run(&scalars, |(lower, coeffs, prec)| {
        let s = Scalar::from_parts(lower, coeffs, prec.unwrap_or(dca_core::ring::EXACT));
        let v = scalar_json(&s);
        let back = scalar_from(&serde_json::from_str(&v.to_string()).unwrap()).unwrap();
        prop_assert_eq!(scalar_json(&back), v);
        Ok(())
    }))?;
    let dir = ok(tempfile::tempdir())?;
    let cache = Cache::new(dir.path());
    for f in pool {
        let v = field_json(f);
        let back = ok(field_from(&v))?;
        ensure(field_json(&back) == v, || format!("{:?} does not round-trip", f.name))?;
        let key = Key::new(f.name.as_deref().unwrap_or("anon"), tr);
        ok(cache.put(&key, f))?;
        let got = ok(cache.get(&key))?.ok_or("cache miss after put")?;
        ensure(field_json(&got) == v, || "cache changed a field".into())?;
    }
    Ok(())
}

fn c10() -> Outcome {
    let tr = Truncation::new(3, 2);
    let pool = field_pool(tr)?;
    let mut runner = TestRunner::new(Config { cases: 48, failure_persistence: None, ..Config::default() });
    let m = monotonicity()?;
    antisymmetry(&mut runner, &pool, tr)?;
    grading(&mut runner, &pool)?;
    yang_baxter(&mut runner, &pool, tr)?;
    round_trips(&mut runner, &pool, tr)?;
    Ok(format!("{m}; antisymmetry, grading, Yang-Baxter, round-trip green"))
}

fn main() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "S_TT factorizations", 5, c1),
        (2, "Wick expansion of T(z)T(w)", 5, c2),
        (3, "skao sweep K=6 D=4 M=4", 120, c3),
        (4, "exchange relation, degree <= 3, K=6", 120, c4),
        (5, "fusion at z=wq and tower to n=3", 60, c5),
        (6, "presets odin, alt, F1, F2 and Ttilde constant", 600, c6),
        (7, "Ttilde quadratic mode formula", 300, c7),
        (8, "triple residue at a=b=q", 300, c8),
        (9, "classical limits", 60, c9),
        (10, "property suites", 300, c10),
    ];
    let mut failed = Vec::new();
    for (id, title, budget, f) in criteria {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        let r = match r {
            Ok(msg) if t > Duration::from_secs(budget) => Err(format!("{msg}; over the {budget} s budget")),
            r => r,
        };
        let (tag, msg) = match &r {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!("{tag} criterion {id}: {title} [{:.1} s of {budget} s] {msg}", t.as_secs_f64());
        if r.is_err() {
            failed.push(id);
        }
    }
    println!("{} of 10 criteria passed", 10 - failed.len());
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        std::process::exit(1);
    }
}
