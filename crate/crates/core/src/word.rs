//! Free-group words over a finite ranked basis.
//!
//! Letters are packed as `2 * (generator - 1) + negated`, so for rank 2 the
//! codes are `x = 0`, `X = 1`, `y = 2`, `Y = 3` and the natural order on
//! codes is `x < X < y < Y`. Inversion of a letter flips the low bit.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown character {0:?} at position {1}")]
    UnknownChar(char, usize),
    #[error("generator index {index} exceeds rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("rank must be between 1 and 127, got {0}")]
    BadRank(usize),
}

/// A generator or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, positive: bool) -> Letter {
        debug_assert!((1..=127).contains(&generator));
        Letter(((generator - 1) as u8) << 1 | u8::from(!positive))
    }

    pub fn from_code(code: u8) -> Letter {
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    /// 1-based generator index.
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize + 1
    }

    pub fn sign(self) -> i64 {
        if self.0 & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// All `2 * rank` signed letters in code order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..(2 * rank) as u8).map(Letter)
    }

    fn write_to(self, rank: usize, f: &mut impl fmt::Write) -> fmt::Result {
        if rank <= 2 {
            let c = match self.0 {
                0 => 'x',
                1 => 'X',
                2 => 'y',
                _ => 'Y',
            };
            f.write_char(c)
        } else {
            let c = if self.is_positive() { 'x' } else { 'X' };
            write!(f, "{}{}", c, self.generator())
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_to(if self.generator() <= 2 { 2 } else { 3 }, f)
    }
}

/// A freely reduced word. Construction always reduces, so the invariant
/// holds for every value of this type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

impl Word {
    pub fn empty(rank: usize) -> Word {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// Builds a word from letters, freely reducing them.
    pub fn from_letters<I>(rank: usize, letters: I) -> Result<Word, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        if rank == 0 || rank > 127 {
            return Err(WordError::BadRank(rank));
        }
        let mut buf = Vec::new();
        for l in letters {
            if l.generator() > rank {
                return Err(WordError::GeneratorOutOfRange {
                    index: l.generator(),
                    rank,
                });
            }
            push_reduced(&mut buf, l);
        }
        Ok(Word { rank, letters: buf })
    }

    /// Caller guarantees letters are in range and already freely reduced.
    pub(crate) fn from_reduced_unchecked(rank: usize, letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word { rank, letters }
    }

    pub fn letter(rank: usize, l: Letter) -> Word {
        Word {
            rank,
            letters: vec![l],
        }
    }

    /// Parses `1` (the empty word) or a string over `x y X Y` (rank ≤ 2), or
    /// indexed tokens `x1 X1 x2 ...` for any rank.
    pub fn parse(text: &str, rank: usize) -> Result<Word, WordError> {
        if rank == 0 || rank > 127 {
            return Err(WordError::BadRank(rank));
        }
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(Word::empty(rank));
        }
        let chars: Vec<char> = text.chars().collect();
        let mut letters = Vec::with_capacity(chars.len());
        let mut pos = 0;
        while pos < chars.len() {
            let c = chars[pos];
            let positive = c.is_ascii_lowercase();
            let mut generator = match c {
                'x' | 'X' => 1,
                'y' | 'Y' => 2,
                _ => return Err(WordError::UnknownChar(c, pos)),
            };
            pos += 1;
            if matches!(c, 'x' | 'X') && pos < chars.len() && chars[pos].is_ascii_digit() {
                let start = pos;
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                let digits: String = chars[start..pos].iter().collect();
                generator = digits
                    .parse()
                    .map_err(|_| WordError::UnknownChar(chars[start], start))?;
                if generator == 0 {
                    return Err(WordError::UnknownChar('0', start));
                }
            }
            if generator > rank {
                return Err(WordError::GeneratorOutOfRange {
                    index: generator,
                    rank,
                });
            }
            letters.push(Letter::new(generator, positive));
        }
        Word::from_letters(rank, letters)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    fn check_rank(&self, other: &Word) -> Result<(), WordError> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(WordError::RankMismatch(self.rank, other.rank))
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        self.check_rank(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Word) -> Word {
        // cancellation only happens at the seam
        let mut k = 0;
        let (a, b) = (&self.letters, &other.letters);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        Word {
            rank: self.rank,
            letters,
        }
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `f · self · f⁻¹`, freely reduced.
    pub fn conjugate(&self, f: &Word) -> Result<Word, WordError> {
        self.check_rank(f)?;
        Ok(f.mul_unchecked(self).mul_unchecked(&f.invert()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Splits `self` as `conjugator · core · conjugator⁻¹` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        let core = Word::from_reduced_unchecked(self.rank, self.letters[k..n - k].to_vec());
        let conjugator = Word::from_reduced_unchecked(self.rank, self.letters[..k].to_vec());
        (core, conjugator)
    }

    pub fn cyclic_core(&self) -> Word {
        self.cyclic_reduce().0
    }

    /// Signed count of occurrences of the 1-based `generator`.
    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.generator() == generator)
            .map(|l| l.sign())
            .sum()
    }

    /// Rotation starting at position `k`. Only meaningful for cyclically
    /// reduced words, where every rotation is again reduced.
    pub fn rotated(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let mut letters = Vec::with_capacity(self.letters.len());
        letters.extend_from_slice(&self.letters[k..]);
        letters.extend_from_slice(&self.letters[..k]);
        Word::from_letters(self.rank, letters).expect("rank already validated")
    }

    /// Lexicographically least rotation of a cyclically reduced word.
    pub fn least_rotation(&self) -> Word {
        let n = self.letters.len();
        if n <= 1 {
            return self.clone();
        }
        let best = (1..n).fold(0, |best, k| {
            if rotation_cmp(&self.letters, k, best) == Ordering::Less {
                k
            } else {
                best
            }
        });
        self.rotated(best)
    }

    /// Whether `other` is a cyclic rotation of `self` (same length).
    pub fn is_rotation_of(&self, other: &Word) -> bool {
        self.len() == other.len()
            && (self.is_empty() || (0..self.len()).any(|k| rotation_eq(&self.letters, k, &other.letters)))
    }

    /// Cyclic Hamming distance: the length difference, plus the fewest
    /// positionwise mismatches between the shorter word and any rotation of
    /// the longer one, aligned at position 0.
    pub fn cyclic_hamming(&self, other: &Word) -> Result<usize, WordError> {
        self.check_rank(other)?;
        Ok(cyclic_hamming_letters(&self.letters, &other.letters))
    }

    /// Shortlex text form used as an ordering key.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then(self.len().cmp(&other.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

pub(crate) fn cyclic_hamming_letters(u: &[Letter], v: &[Letter]) -> usize {
    let (long, short) = if u.len() >= v.len() { (u, v) } else { (v, u) };
    let penalty = long.len() - short.len();
    if long.is_empty() {
        return 0;
    }
    let n = long.len();
    let best = (0..n)
        .map(|r| {
            short
                .iter()
                .enumerate()
                .filter(|&(i, &l)| long[(r + i) % n] != l)
                .count()
        })
        .min()
        .unwrap_or(0);
    penalty + best
}

fn rotation_cmp(letters: &[Letter], a: usize, b: usize) -> Ordering {
    let n = letters.len();
    (0..n)
        .map(|i| letters[(a + i) % n].cmp(&letters[(b + i) % n]))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

fn rotation_eq(letters: &[Letter], k: usize, other: &[Letter]) -> bool {
    let n = letters.len();
    (0..n).all(|i| letters[(k + i) % n] == other[i])
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            l.write_to(self.rank, f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Parses a rank-2 word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s, 2)
    }
}

/// All cyclically reduced words of exactly `len` letters over `rank`
/// generators, in lexicographic letter-code order.
pub fn cyclically_reduced_words(rank: usize, len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(len);
    fn rec(rank: usize, len: usize, buf: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if buf.len() == len {
            if len == 1 || buf[0] != buf[len - 1].inverse() {
                out.push(Word::from_reduced_unchecked(rank, buf.clone()));
            }
            return;
        }
        for l in Letter::all(rank) {
            if buf.last() == Some(&l.inverse()) {
                continue;
            }
            buf.push(l);
            rec(rank, len, buf, out);
            buf.pop();
        }
    }
    if len > 0 {
        rec(rank, len, &mut buf, &mut out);
    }
    out
}

/// All freely reduced words of exactly `len` letters, lexicographic order.
pub fn reduced_words(rank: usize, len: usize) -> Vec<Word> {
    let mut words = vec![Word::empty(rank)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(words.len() * (2 * rank - 1));
        for w in &words {
            for l in Letter::all(rank) {
                if w.letters.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut letters = w.letters.clone();
                letters.push(l);
                next.push(Word::from_reduced_unchecked(rank, letters));
            }
        }
        words = next;
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn parse_reduces() {
        assert!(w("xX").is_empty());
        assert_eq!(w("xxY").len(), 3);
        assert_eq!(w("xxY").to_string(), "xxY");
        assert!(w("xYyX").is_empty());
        assert_eq!(w("1"), Word::empty(2));
        assert_eq!(Word::empty(2).to_string(), "1");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Word::parse("xz", 2), Err(WordError::UnknownChar('z', 1)));
        assert_eq!(
            Word::parse("xy", 1),
            Err(WordError::GeneratorOutOfRange { index: 2, rank: 1 })
        );
        assert_eq!(
            Word::parse("x1x4", 3),
            Err(WordError::GeneratorOutOfRange { index: 4, rank: 3 })
        );
    }

    #[test]
    fn indexed_generators() {
        let u = Word::parse("x1x3X3x2", 3).unwrap();
        assert_eq!(u.to_string(), "x1x2");
        assert_eq!(Word::parse("x2Y", 2).unwrap(), w("1"));
    }

    #[test]
    fn letter_order() {
        let [x, xi, y, yi] = [w("x"), w("X"), w("y"), w("Y")].map(|u| u.letters()[0]);
        assert!(x < xi && xi < y && y < yi);
        assert_eq!(x.inverse(), xi);
        assert_eq!(yi.generator(), 2);
        assert_eq!(yi.sign(), -1);
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(w("xy").multiply(&w("Yx")).unwrap(), w("xx"));
        assert_eq!(w("1").multiply(&w("xyY")).unwrap(), w("x"));
        assert!(w("xY").multiply(&w("yX")).unwrap().is_empty());
        let r3 = Word::empty(3);
        assert_eq!(w("x").multiply(&r3), Err(WordError::RankMismatch(2, 3)));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("xyX").invert(), w("xYX"));
        assert_eq!(w("1").invert(), w("1"));
        assert_eq!(w("x").invert(), w("X"));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(w("x").conjugate(&w("y")).unwrap(), w("yxY"));
        assert_eq!(w("yxY").conjugate(&w("Y")).unwrap(), w("x"));
        assert!(w("1").conjugate(&w("xyy")).unwrap().is_empty());
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("yxY").cyclic_reduce(), (w("x"), w("y")));
        assert_eq!(w("xy").cyclic_reduce(), (w("xy"), w("1")));
        assert_eq!(w("Xyx").cyclic_reduce(), (w("y"), w("X")));
        assert_eq!(w("1").cyclic_reduce(), (w("1"), w("1")));
        assert!(w("x").is_cyclically_reduced());
        assert!(!w("xyX").is_cyclically_reduced());
    }

    #[test]
    fn exponent_sum_examples() {
        assert_eq!(w("xxYXy").exponent_sum(1), 1);
        assert_eq!(w("xxYYY").exponent_sum(2), -3);
        assert_eq!(w("1").exponent_sum(1), 0);
    }

    #[test]
    fn cyclic_hamming_examples() {
        assert_eq!(w("xy").cyclic_hamming(&w("yx")).unwrap(), 0);
        assert_eq!(w("xy").cyclic_hamming(&w("xx")).unwrap(), 1);
        assert_eq!(w("xyx").cyclic_hamming(&w("xy")).unwrap(), 1);
        assert_eq!(w("xy").cyclic_hamming(&w("xyx")).unwrap(), 1);
        assert_eq!(w("1").cyclic_hamming(&w("xyx")).unwrap(), 3);
        assert_eq!(w("1").cyclic_hamming(&w("1")).unwrap(), 0);
    }

    #[test]
    fn rotations() {
        assert_eq!(w("yxx").least_rotation(), w("xxy"));
        assert_eq!(w("YxY").least_rotation(), w("xYY"));
        assert!(w("xxy").is_rotation_of(&w("xyx")));
        assert!(!w("xxy").is_rotation_of(&w("xyy")));
    }

    #[test]
    fn word_counts() {
        // 3^n + 2 + (-1)^n cyclically reduced words of length n in rank 2
        for n in 1..=8usize {
            let expect = if n % 2 == 0 { 3usize.pow(n as u32) + 3 } else { 3usize.pow(n as u32) + 1 };
            assert_eq!(cyclically_reduced_words(2, n).len(), expect, "n = {n}");
            assert_eq!(reduced_words(2, n).len(), 4 * 3usize.pow(n as u32 - 1));
        }
    }
}
