use proptest::prelude::*;
use ramseyforge::gf::{builtin_fields, conjugate_norm, quadratic_character, FieldTables};
use ramseyforge::FieldSpec;

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    let fields = builtin_fields();
    (0..fields.len()).prop_map(move |i| fields[i])
}

fn triple() -> impl Strategy<Value = (FieldSpec, u32, u32, u32)> {
    field_strategy().prop_flat_map(|f| {
        let q = f.order();
        (Just(f), 0..q, 0..q, 0..q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn ring_axioms((f, a, b, c) in triple()) {
        let (a, b, c) = (f.element(a), f.element(b), f.element(c));
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a + (-a), f.zero());
        prop_assert_eq!(a - b + b, a);
    }

    #[test]
    fn inverses_and_fermat((f, a, _b, _c) in triple()) {
        let x = f.element(a);
        let q = f.order() as u64;
        prop_assert_eq!(x.pow(q), x);
        if !x.is_zero() {
            prop_assert_eq!(x * x.inv().unwrap(), f.one());
            prop_assert_eq!(x.pow(q - 1), f.one());
        } else {
            prop_assert!(x.inv().is_err());
        }
    }

    #[test]
    fn frobenius_is_additive((f, a, b, _c) in triple()) {
        let (x, y) = (f.element(a), f.element(b));
        prop_assert_eq!((x + y).frobenius(), x.frobenius() + y.frobenius());
        prop_assert_eq!((x * y).frobenius(), x.frobenius() * y.frobenius());
    }

    #[test]
    fn index_round_trip((f, a, _b, _c) in triple()) {
        let x = f.element(a);
        prop_assert_eq!(x.index(), a);
        prop_assert_eq!(f.from_coeffs(&x.coeffs()).unwrap(), x);
    }
}

#[test]
fn tables_agree_with_elements() {
    for f in builtin_fields().into_iter().filter(|f| f.order() <= 49) {
        let t = FieldTables::new(f).unwrap();
        let q = f.order();
        for a in 0..q {
            for b in 0..q {
                let (x, y) = (f.element(a), f.element(b));
                assert_eq!(t.add(a as usize, b as usize), (x + y).index() as usize);
                assert_eq!(t.mul(a as usize, b as usize), (x * y).index() as usize);
            }
        }
    }
}

#[test]
fn multiplicative_group_is_cyclic() {
    for f in builtin_fields() {
        let q = f.order() as u64;
        let has_generator = f.elements().skip(1).any(|g| {
            let mut x = g;
            let mut order = 1;
            while !x.is_one() {
                x = x * g;
                order += 1;
            }
            order == q - 1
        });
        assert!(has_generator, "{f}");
    }
}

#[test]
fn quadratic_character_counts() {
    for f in builtin_fields().into_iter().filter(|f| f.characteristic() != 2) {
        let chars: Vec<i8> = f.elements().map(|x| quadratic_character(&x).unwrap()).collect();
        let squares: std::collections::BTreeSet<u32> = f.elements().map(|x| (x * x).index()).collect();
        for (i, &c) in chars.iter().enumerate() {
            let expected = if i == 0 { 0 } else if squares.contains(&(i as u32)) { 1 } else { -1 };
            assert_eq!(c, expected, "{f} element {i}");
        }
        assert_eq!(chars.iter().filter(|&&c| c == 1).count() as u32, (f.order() - 1) / 2);
    }
}

#[test]
fn norm_lands_in_subfield_and_is_onto() {
    for q in [2u32, 3, 4, 5, 7] {
        let f = FieldSpec::from_order(q * q).unwrap();
        let mut image = std::collections::BTreeSet::new();
        for x in f.elements() {
            let n = conjugate_norm(&x).unwrap();
            assert_eq!(n.pow(q as u64), n);
            image.insert(n.index());
        }
        assert_eq!(image.len() as u32, q);
    }
}
