use ac_census::abelianization::{invariant_factors, smith_normal_form, IntMatrix};
use ac_census::word::{Letter, Word};
use ac_census::{AcMove, Certificate, Presentation};
use proptest::prelude::*;

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0u8..4, 0..=max_len)
        .prop_map(|codes| Word::from_letters(2, codes.into_iter().map(Letter::from_code)).unwrap())
}

fn nonempty_word(max_len: usize) -> impl Strategy<Value = Word> {
    word_strategy(max_len).prop_filter("nonempty", |w| !w.is_empty())
}

fn move_strategy() -> impl Strategy<Value = AcMove> {
    prop_oneof![
        (0usize..2).prop_map(|i| AcMove::Mul(i, 1 - i)),
        (0usize..2).prop_map(AcMove::Inv),
        (0usize..2, nonempty_word(3)).prop_map(|(i, f)| AcMove::Conj(i, f)),
    ]
}

/// Free reduction by an explicit stack, independent of the library.
fn reduce_codes(codes: &[u8]) -> Vec<u8> {
    let mut stack: Vec<u8> = Vec::new();
    for &c in codes {
        if stack.last() == Some(&(c ^ 1)) {
            stack.pop();
        } else {
            stack.push(c);
        }
    }
    stack
}

fn codes(w: &Word) -> Vec<u8> {
    w.letters().iter().map(|l| l.code()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn multiply_matches_stack_reduction(u in word_strategy(12), v in word_strategy(12)) {
        let mut cat = codes(&u);
        cat.extend(codes(&v));
        prop_assert_eq!(codes(&u.multiply(&v).unwrap()), reduce_codes(&cat));
    }

    #[test]
    fn group_laws(u in word_strategy(10), v in word_strategy(10), w in word_strategy(10)) {
        prop_assert_eq!(u.invert().invert(), u.clone());
        prop_assert!(u.multiply(&u.invert()).unwrap().is_empty());
        let left = u.multiply(&v).unwrap().multiply(&w).unwrap();
        let right = u.multiply(&v.multiply(&w).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn cyclic_reduction_reconstructs(u in word_strategy(14)) {
        let (core, conj) = u.cyclic_reduce();
        prop_assert!(core.len() <= u.len());
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(core.conjugate(&conj).unwrap(), u);
    }

    #[test]
    fn conjugation_preserves_cyclic_core(u in word_strategy(10), f in word_strategy(6)) {
        let moved = u.conjugate(&f).unwrap();
        prop_assert!(moved.cyclic_core().is_rotation_of(&u.cyclic_core()));
    }

    #[test]
    fn exponent_sum_is_a_homomorphism(u in word_strategy(10), v in word_strategy(10), g in 1usize..=2) {
        let uv = u.multiply(&v).unwrap();
        prop_assert_eq!(uv.exponent_sum(g), u.exponent_sum(g) + v.exponent_sum(g));
    }

    #[test]
    fn cyclic_hamming_symmetry(u in word_strategy(8), v in word_strategy(8), k in 0usize..8) {
        let d = u.cyclic_hamming(&v).unwrap();
        prop_assert_eq!(d, v.cyclic_hamming(&u).unwrap());
        if !u.is_empty() && u.is_cyclically_reduced() {
            prop_assert_eq!(u.cyclic_hamming(&u.rotated(k % u.len())).unwrap(), 0);
        }
        if d == 0 {
            prop_assert_eq!(u.len(), v.len());
        }
    }

    #[test]
    fn shortlex_is_a_total_order(u in word_strategy(6), v in word_strategy(6)) {
        let a = u.shortlex_cmp(&v);
        prop_assert_eq!(a.reverse(), v.shortlex_cmp(&u));
        prop_assert_eq!(a == std::cmp::Ordering::Equal, u == v);
    }

    #[test]
    fn parse_display_round_trip(u in word_strategy(12)) {
        prop_assert_eq!(Word::parse(&u.to_string(), 2).unwrap(), u);
    }

    #[test]
    fn moves_are_invertible(r in nonempty_word(8), s in nonempty_word(8), m in move_strategy()) {
        let p = Presentation::pair(r, s).unwrap();
        let q = p.apply_move(&m).unwrap();
        prop_assert_eq!(q.apply_moves(&m.inverse_sequence()).unwrap(), p);
    }

    #[test]
    fn canonical_form_is_symmetric(r in nonempty_word(8), s in nonempty_word(8), k in 0usize..8) {
        let (r, s) = (r.cyclic_core(), s.cyclic_core());
        let p = Presentation::pair(r.clone(), s.clone()).unwrap();
        let swapped = Presentation::pair(s.rotated(k % s.len().max(1)), r).unwrap();
        prop_assert_eq!(p.canonical_form().unwrap(), swapped.canonical_form().unwrap());
    }

    #[test]
    fn certificate_text_round_trip(r in nonempty_word(6), s in nonempty_word(6),
                                   moves in prop::collection::vec(move_strategy(), 0..12)) {
        let base = Presentation::pair(r, s).unwrap();
        let target = base.apply_moves(&moves).unwrap();
        let cert = Certificate::new(base, moves, target);
        prop_assert!(cert.verify().unwrap());
        let back = Certificate::parse(&cert.to_text()).unwrap();
        prop_assert_eq!(back, cert);
    }

    #[test]
    fn smith_form_divisibility(rows in prop::collection::vec(prop::collection::vec(-20i64..=20, 3), 3)) {
        let factors = smith_normal_form(&IntMatrix::from_rows(&rows));
        prop_assert_eq!(factors.len(), 3);
        for w in factors.windows(2) {
            prop_assert!(w[0] >= 0 && w[1] >= 0);
            if w[0] == 0 {
                prop_assert_eq!(w[1], 0);
            } else {
                prop_assert_eq!(w[1] % w[0], 0);
            }
        }
        // product of factors = |det| for square matrices
        let det = det3(&rows);
        prop_assert_eq!(factors.iter().product::<i64>(), det.abs());
    }

    #[test]
    fn invariants_survive_moves(r in nonempty_word(6), s in nonempty_word(6),
                                moves in prop::collection::vec(move_strategy(), 1..20)) {
        let p = Presentation::pair(r, s).unwrap();
        let q = p.apply_moves(&moves).unwrap();
        prop_assert_eq!(invariant_factors(&p), invariant_factors(&q));
    }
}

fn det3(m: &[Vec<i64>]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}
