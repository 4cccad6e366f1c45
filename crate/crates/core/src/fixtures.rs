//! Named presentations that recur in tests, reports and the CLI.

use crate::presentation::Presentation;

/// `<x, y | x^2 = y^3, xyx = yxy>`, the n = 2 Akbulut-Kirby presentation.
pub const AK2: &str = "xxYYY xyxYXY";
/// `<x, y | x^3 = y^4, xyx = yxy>`.
pub const AK3: &str = "xxxYYYY xyxYXY";
/// `<x, y | x^-1 y^2 x = y^3, y^-1 x^2 y = x^3>`.
pub const XY_CONJUGATE_POWERS: &str = "XyyxYYY YxxyXXX";
/// `<x, y | yxy = x^2, xyx = y^4>`, a group of order 120.
pub const ORDER_120: &str = "yxyXX xyxYYYY";

/// `<x, y | x^-1 y^2 x = y^3, x^2 = y^e x y^d>` for `(e, d)` in
/// `(1,1), (1,-1), (-1,1), (-1,-1)`.
pub const LENGTH_12_HARD: [&str; 4] = [
    "XyyxYYY xxYXY",
    "XyyxYYY xxyXY",
    "XyyxYYY xxYXy",
    "XyyxYYY xxyXy",
];

pub fn presentation(text: &str) -> Presentation {
    text.parse().expect("fixture presentations are well formed")
}

pub fn ak(n: usize) -> Presentation {
    let pow = |c: char, k: usize| c.to_string().repeat(k);
    presentation(&format!("{}{} xyxYXY", pow('x', n), pow('Y', n + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ak_series() {
        assert_eq!(ak(2), presentation(AK2));
        assert_eq!(ak(3), presentation(AK3));
        assert_eq!(ak(3).total_length(), 13);
    }

    #[test]
    fn hard_family_lengths() {
        for p in LENGTH_12_HARD {
            assert_eq!(presentation(p).total_length(), 12);
        }
    }
}
