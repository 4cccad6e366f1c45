//! Whitehead automorphisms of the rank-2 free group and greedy descent to
//! minimal cyclic length, which decides primitivity.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WhiteheadError {
    #[error("Whitehead automorphisms are only generated for rank 2, got rank {0}")]
    UnsupportedRank(usize),
}

/// How a Type II automorphism acts on a generator other than the multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Fix,
    /// g ↦ g·a
    Right,
    /// g ↦ a⁻¹·g
    Left,
    /// g ↦ a⁻¹·g·a
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WhiteheadAut {
    /// Signed permutation: generator `g` (1-based) maps to `images[g - 1]`.
    TypeI { images: Vec<Letter> },
    /// Fixes `multiplier`; `actions[g - 1]` applies to every other
    /// generator `g` (the multiplier's own slot is ignored).
    TypeII {
        multiplier: Letter,
        actions: Vec<Action>,
    },
}

impl WhiteheadAut {
    pub fn rank(&self) -> usize {
        match self {
            WhiteheadAut::TypeI { images } => images.len(),
            WhiteheadAut::TypeII { actions, .. } => actions.len(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            WhiteheadAut::TypeI { images } => images
                .iter()
                .enumerate()
                .all(|(g, l)| l.generator() == g + 1 && l.is_positive()),
            WhiteheadAut::TypeII {
                multiplier,
                actions,
            } => actions
                .iter()
                .enumerate()
                .all(|(g, a)| g + 1 == multiplier.generator() || *a == Action::Fix),
        }
    }

    /// Image of a positive generator.
    fn image_of_generator(&self, g: usize) -> Vec<Letter> {
        match self {
            WhiteheadAut::TypeI { images } => vec![images[g - 1]],
            WhiteheadAut::TypeII {
                multiplier,
                actions,
            } => {
                let gen = Letter::new(g, true);
                if g == multiplier.generator() {
                    return vec![gen];
                }
                let a = *multiplier;
                match actions[g - 1] {
                    Action::Fix => vec![gen],
                    Action::Right => vec![gen, a],
                    Action::Left => vec![a.inverse(), gen],
                    Action::Both => vec![a.inverse(), gen, a],
                }
            }
        }
    }

    /// Image of `w`, freely reduced.
    pub fn apply(&self, w: &Word) -> Word {
        let rank = w.rank();
        let images: Vec<Vec<Letter>> = (1..=rank).map(|g| self.image_of_generator(g)).collect();
        let letters = w.letters().iter().flat_map(|l| {
            let img = &images[l.generator() - 1];
            let it: Box<dyn Iterator<Item = Letter>> = if l.is_positive() {
                Box::new(img.iter().copied())
            } else {
                Box::new(img.iter().rev().map(|x| x.inverse()))
            };
            it
        });
        Word::from_letters(rank, letters.collect::<Vec<_>>()).expect("image stays in rank")
    }
}

impl fmt::Display for WhiteheadAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rank = self.rank();
        let mut first = true;
        f.write_str("{")?;
        for g in 1..=rank {
            let img = Word::from_letters(rank, self.image_of_generator(g)).expect("valid");
            let gen = Word::letter(rank, Letter::new(g, true));
            if img == gen && matches!(self, WhiteheadAut::TypeII { .. }) {
                continue;
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}->{}", gen, img)?;
        }
        f.write_str("}")
    }
}

/// All Type I automorphisms (identity included, first) followed by the
/// non-identity Type II automorphisms.
pub fn generate_whitehead_auts(rank: usize) -> Result<Vec<WhiteheadAut>, WhiteheadError> {
    if rank != 2 {
        return Err(WhiteheadError::UnsupportedRank(rank));
    }
    let mut out = Vec::new();
    for swap in [false, true] {
        for sx in [true, false] {
            for sy in [true, false] {
                let (gx, gy) = if swap { (2, 1) } else { (1, 2) };
                out.push(WhiteheadAut::TypeI {
                    images: vec![Letter::new(gx, sx), Letter::new(gy, sy)],
                });
            }
        }
    }
    for multiplier in Letter::all(2) {
        for action in [Action::Right, Action::Left, Action::Both] {
            let mut actions = vec![Action::Fix; 2];
            let other = 3 - multiplier.generator();
            actions[other - 1] = action;
            out.push(WhiteheadAut::TypeII {
                multiplier,
                actions,
            });
        }
    }
    Ok(out)
}

fn rank2_auts() -> &'static [WhiteheadAut] {
    static AUTS: OnceLock<Vec<WhiteheadAut>> = OnceLock::new();
    AUTS.get_or_init(|| generate_whitehead_auts(2).expect("rank 2 supported"))
}

/// Repeatedly applies the first automorphism (in generation order) that
/// strictly shortens the cyclic core, until none does.
///
/// Only rank-2 words are descended; for other ranks the cyclic core is
/// returned unchanged.
pub fn minimize_cyclic_length(w: &Word) -> (Word, Vec<WhiteheadAut>) {
    let mut current = w.cyclic_core();
    let mut applied = Vec::new();
    if w.rank() != 2 {
        return (current, applied);
    }
    'descent: loop {
        for aut in rank2_auts() {
            let image = aut.apply(&current).cyclic_core();
            if image.len() < current.len() {
                current = image;
                applied.push(aut.clone());
                continue 'descent;
            }
        }
        return (current, applied);
    }
}

pub fn is_primitive(w: &Word) -> bool {
    minimize_cyclic_length(w).0.len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn automorphism_counts() {
        let auts = generate_whitehead_auts(2).unwrap();
        let type1 = auts.iter().filter(|a| matches!(a, WhiteheadAut::TypeI { .. })).count();
        let type2 = auts.iter().filter(|a| matches!(a, WhiteheadAut::TypeII { .. })).count();
        assert_eq!(type1, 8);
        assert_eq!(type2, 12);
        assert_eq!(auts.iter().filter(|a| a.is_identity()).count(), 1);
        assert!(auts[0].is_identity());
        assert_eq!(
            generate_whitehead_auts(3),
            Err(WhiteheadError::UnsupportedRank(3))
        );
    }

    #[test]
    fn apply_examples() {
        let right_x = WhiteheadAut::TypeII {
            multiplier: Letter::new(1, true),
            actions: vec![Action::Fix, Action::Right],
        };
        assert_eq!(right_x.apply(&w("y")), w("yx"));
        assert_eq!(right_x.apply(&w("Y")), w("XY"));
        assert_eq!(right_x.to_string(), "{y->yx}");
        let swap = WhiteheadAut::TypeI {
            images: vec![Letter::new(2, true), Letter::new(1, true)],
        };
        assert_eq!(swap.apply(&w("xY")), w("yX"));
        for aut in generate_whitehead_auts(2).unwrap() {
            assert!(aut.apply(&w("1")).is_empty());
        }
    }

    #[test]
    fn descent_examples() {
        assert_eq!(minimize_cyclic_length(&w("x")), (w("x"), vec![]));
        let (m, path) = minimize_cyclic_length(&w("xxy"));
        assert_eq!(m.len(), 1);
        assert!(!path.is_empty());
        assert_eq!(minimize_cyclic_length(&w("xyXY")).0.len(), 4);
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&w("x")));
        assert!(!is_primitive(&w("xyXY")));
        assert!(is_primitive(&w("xxy")));
        assert!(is_primitive(&w("yxY")));
        assert!(!is_primitive(&w("xx")));
        assert!(!is_primitive(&w("1")));
        assert!(!is_primitive(&w("xxYYY")));
        assert!(!is_primitive(&w("xyxYXY")));
    }
}
