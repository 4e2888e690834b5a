mod common;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use bregular::automata::Dfa;
use bregular::cli::instance;
use bregular::exactnum::ExactReal;
use bregular::numeration::{from_digits, to_word, Word};

use common::{big, Case, Quad};

fn surd(a: (i64, i64), c: (i64, i64), d: i64) -> ExactReal {
    let q = |(n, m): (i64, i64)| BigRational::new(big(n), big(m));
    ExactReal::surd(q(a), q(c), big(d)).unwrap()
}

fn ratio() -> impl Strategy<Value = (i64, i64)> {
    (-500i64..=500, 1i64..=40)
}

fn radicand() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, 11, 15, 1_000_003])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn floor_plus_frac_is_identity(a in ratio(), c in ratio(), d in radicand()) {
        let x = surd(a, c, d);
        let f = x.frac();
        prop_assert_eq!(ExactReal::integer(x.floor()).checked_add(&f).unwrap().compare(&x), Ordering::Equal);
        prop_assert_ne!(f.signum(), Ordering::Less);
        prop_assert_eq!(f.compare(&ExactReal::one()), Ordering::Less);
        prop_assert_eq!(x.ceil() - x.floor(), BigInt::from(u8::from(!x.is_integer())));
    }

    #[test]
    fn compare_is_antisymmetric(a in ratio(), c in ratio(), d in radicand(), a2 in ratio(), c2 in ratio(), d2 in radicand()) {
        let x = surd(a, c, d);
        let y = surd(a2, c2, d2);
        prop_assert_eq!(x.compare(&y), y.compare(&x).reverse());
        prop_assert_eq!(x.compare(&x), Ordering::Equal);
    }

    #[test]
    fn words_round_trip(n in 0u64..u64::MAX, base in 2u32..=36) {
        let n = BigInt::from(n);
        let w = to_word(&n, base).unwrap();
        prop_assert_eq!(w.value(), n.clone());
        prop_assert_eq!(from_digits(w.digits(), base), n.clone());
        prop_assert!(w.digits().first() != Some(&0));
        prop_assert_eq!(Word::parse(base, &w.to_string()).unwrap(), w);
    }

    #[test]
    fn minimization_is_idempotent(words in prop::collection::vec(prop::collection::vec(0u32..3, 0..7), 0..12)) {
        let dfa = Dfa::from_words(3, words.iter().map(Vec::as_slice)).unwrap();
        let again = dfa.minimize();
        prop_assert_eq!(again.state_count(), dfa.state_count());
        prop_assert!(again.equivalent(&dfa).unwrap().equivalent);
        for w in &words {
            prop_assert!(dfa.accepts(w));
        }
    }

    #[test]
    fn normalization_preserves_u(
        an in 1i64..400, ad in 1i64..40, bn in -300i64..300, bd in 1i64..40,
        surd_alpha in any::<bool>(), base in 2u32..=10,
    ) {
        // α = an/ad, or an/ad + √2 when `surd_alpha`
        let (alpha, a, d) = if surd_alpha {
            (format!("{an}/{ad}+sqrt(2)"), Quad::new(an, ad, ad), 2)
        } else {
            (format!("{an}/{ad}"), Quad::rational(an, ad), 0)
        };
        let case = Case {
            alpha: "",
            beta: "",
            base,
            d,
            a,
            b: Quad::rational(bn, bd),
        };
        let norm = instance(&alpha, &format!("{bn}/{bd}"), base).unwrap();
        let n_min = case.n_min();
        prop_assert_eq!(norm.n_min(), &n_min);
        for i in 0..40u32 {
            let n = &n_min + i;
            prop_assert_eq!(norm.u(&n).unwrap(), case.u(&n), "n = {}", n);
        }
        if n_min > BigInt::from(0) {
            prop_assert!(norm.u(&(&n_min - 1u32)).is_err());
        }
    }
}
