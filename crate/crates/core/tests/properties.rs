use proptest::prelude::*;

use dca_core::cli::serial::{
    fock_vector_from, fock_vector_json, product_form_from, product_form_json, scalar_from, scalar_json,
};
use dca_core::fields::{exchange_function, mode_apply, Field};
use dca_core::fock::{basis_up_to, FockVector, Partition};
use dca_core::qseries::{self, Truncation};
use dca_core::relations::{named_field, FieldName};
use dca_core::ring::{Direction, Monomial, ProductForm, QPoly, QRat, Rat, Scalar, EXACT};

fn rat() -> impl Strategy<Value = Rat> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| Rat::new(n, d))
}

fn qpoly() -> impl Strategy<Value = QPoly> {
    (-2i32..=2, proptest::collection::vec(rat(), 0..4)).prop_map(|(l, c)| QPoly::from_parts(l, c))
}

fn poly() -> impl Strategy<Value = QPoly> {
    (0i32..=2, proptest::collection::vec(rat(), 0..4)).prop_map(|(l, c)| QPoly::from_parts(l, c))
}

fn qrat() -> impl Strategy<Value = QRat> {
    (qpoly(), qpoly()).prop_filter_map("zero denominator", |(n, d)| (!d.is_zero()).then(|| QRat::new(n, d)))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-3i32..=3, proptest::collection::vec(qrat(), 0..4), prop_oneof![Just(EXACT), 2i32..10])
        .prop_map(|(l, c, p)| Scalar::from_parts(l, c, p))
}

/// A scalar with invertible leading coefficient at s-order 0.
fn unit() -> impl Strategy<Value = Scalar> {
    (proptest::collection::vec(qpoly().prop_map(QRat::from_poly), 0..3), 1i64..5)
        .prop_map(|(rest, c)| Scalar::from_parts(1, rest, EXACT).add(&Scalar::int(c)))
}

fn agree(a: &Scalar, b: &Scalar) -> bool {
    a.compare(b).0
}

fn fields() -> Vec<Field> {
    let tr = Truncation::new(2, 1);
    ["Omega", "T", "T2q", "T2pq"].iter().map(|n| named_field(n.parse::<FieldName>().unwrap(), tr).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rat_field_axioms(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn qpoly_division(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b);
        prop_assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn qrat_field_axioms(a in qrat(), b in qrat(), c in qrat()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv()).is_one());
        }
    }

    #[test]
    fn scalar_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!(agree(&a.mul(&b), &b.mul(&a)));
        prop_assert!(agree(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
        prop_assert!(agree(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn scalar_inverse(u in unit(), w in 1i32..7) {
        let v = u.inv_to(w).unwrap();
        let (eq, prec) = u.mul(&v).compare(&Scalar::one());
        prop_assert!(eq);
        prop_assert!(prec >= w);
    }

    #[test]
    fn product_expansion_is_a_convolution(
        a in proptest::collection::vec((0i32..6, -2i32..=2, -2i32..=2), 0..4),
        b in proptest::collection::vec((0i32..6, -2i32..=2, -2i32..=2), 0..4),
    ) {
        let mk = |v: &[(i32, i32, i32)]| ProductForm::from_parts(
            0,
            Scalar::one(),
            v.iter().filter(|t| t.2 != 0).map(|&(a2, b, e)| (Monomial::pq(a2, b), e)),
            None,
            None,
        );
        let (fa, fb) = (mk(&a), mk(&b));
        let (order, w) = (5, 10);
        let ea = fa.expand(Direction::InX, order, w).unwrap();
        let eb = fb.expand(Direction::InX, order, w).unwrap();
        let ep = fa.mul(&fb).expand(Direction::InX, order, w).unwrap();
        for n in 0..=order {
            let mut s = Scalar::exact_zero();
            for i in 0..=n {
                s = s.add(&ea.coeff_x(i).unwrap().mul(&eb.coeff_x(n - i).unwrap()));
            }
            prop_assert!(s.compare(&ep.coeff_x(n).unwrap()).0, "x^{}", n);
        }
        prop_assert!(fa.mul(&fb).div(&fb).unwrap().agrees_with(&fa));
    }

    #[test]
    fn scalar_json_round_trip(s in scalar()) {
        let v = scalar_json(&s);
        let back = scalar_from(&serde_json::from_str(&v.to_string()).unwrap()).unwrap();
        prop_assert_eq!(scalar_json(&back), v);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn fock_json_round_trip(terms in proptest::collection::vec((proptest::collection::vec(1u32..4, 0..4), scalar()), 0..4)) {
        let mut u = FockVector::zero();
        for (parts, c) in terms {
            u.add_term(Partition::new(parts), c);
        }
        let v = fock_vector_json(&u);
        prop_assert_eq!(fock_vector_json(&fock_vector_from(&v).unwrap()), v);
    }

    #[test]
    fn exchange_is_antisymmetric(i in 0usize..4, j in 0usize..4, a2 in -2i32..=2, b in -2i32..=2) {
        let tr = Truncation::new(2, 1);
        let fs = fields();
        let y = fs[j].shifted(&Monomial::pq(a2, b));
        let s = exchange_function(&fs[i], &y, tr).unwrap();
        let t = exchange_function(&y, &fs[i], tr).unwrap();
        prop_assert!(s.mul(&t.reflect()).agrees_with(&ProductForm::one()));
    }

    #[test]
    fn modes_shift_degree(i in 0usize..4, k in 0usize..12, n in -3i32..=3) {
        let fs = fields();
        let basis = basis_up_to(3);
        let u = &basis[k % basis.len()];
        let v = mode_apply(&fs[i], n, &FockVector::basis(u.clone()), 8).unwrap();
        for (p, c) in v.terms() {
            prop_assert!(c.is_zero() || p.degree() as i32 == u.degree() as i32 - n);
        }
    }
}

#[test]
fn structure_functions_round_trip() {
    let tr = Truncation::new(4, 2);
    for f in [qseries::f(tr).unwrap(), qseries::f1(tr).unwrap(), qseries::f2(tr).unwrap(), qseries::s_tt(tr).unwrap()] {
        let v = product_form_json(&f);
        let back = product_form_from(&serde_json::from_str(&v.to_string()).unwrap()).unwrap();
        assert_eq!(product_form_json(&back), v);
    }
}
