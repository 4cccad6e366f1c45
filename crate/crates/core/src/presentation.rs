//! Balanced presentations and the elementary Andrews-Curtis moves.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::word::{reduced_words, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("expected {expected} relators, found {found}")]
    Unbalanced { expected: usize, found: usize },
    #[error("relator index {index} out of range for rank {rank}")]
    BadIndex { index: usize, rank: usize },
    #[error("mul move needs distinct indices, got {0} twice")]
    SelfMultiply(usize),
    #[error("relator {0} is not cyclically reduced")]
    NotCyclicallyReduced(usize),
}

/// A balanced presentation: `rank` generators and exactly `rank` relators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    relators: Vec<Word>,
}

/// One elementary transformation. Indices are 0-based; the text format
/// uses 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AcMove {
    /// `w_i <- w_i w_j`, `i != j`
    Mul(usize, usize),
    /// `w_i <- w_i^-1`
    Inv(usize),
    /// `w_i <- f w_i f^-1`
    Conj(usize, Word),
}

impl Presentation {
    pub fn new(relators: Vec<Word>) -> Result<Presentation, PresentationError> {
        let rank = relators.first().map(Word::rank).unwrap_or(0);
        if relators.len() != rank {
            return Err(PresentationError::Unbalanced {
                expected: rank,
                found: relators.len(),
            });
        }
        if let Some(bad) = relators.iter().find(|w| w.rank() != rank) {
            return Err(WordError::RankMismatch(rank, bad.rank()).into());
        }
        Ok(Presentation { relators })
    }

    /// Rank-2 convenience constructor.
    pub fn pair(r: Word, s: Word) -> Result<Presentation, PresentationError> {
        Presentation::new(vec![r, s])
    }

    /// Parses a presentation line: relator words separated by whitespace.
    /// The rank is the number of words.
    pub fn parse(line: &str) -> Result<Presentation, PresentationError> {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let rank = tokens.len();
        if rank == 0 {
            return Err(PresentationError::Unbalanced {
                expected: 1,
                found: 0,
            });
        }
        let relators = tokens
            .iter()
            .map(|t| Word::parse(t, rank))
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::new(relators)
    }

    /// The standard presentation `(x1, ..., xn)`.
    pub fn standard(rank: usize) -> Presentation {
        let relators = (1..=rank)
            .map(|g| Word::letter(rank, crate::word::Letter::new(g, true)))
            .collect();
        Presentation { relators }
    }

    pub fn rank(&self) -> usize {
        self.relators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn relator(&self, i: usize) -> &Word {
        &self.relators[i]
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    pub fn is_standard(&self) -> bool {
        *self == Presentation::standard(self.rank())
    }

    fn check_index(&self, i: usize) -> Result<(), PresentationError> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(PresentationError::BadIndex {
                index: i,
                rank: self.rank(),
            })
        }
    }

    pub fn validate_move(&self, m: &AcMove) -> Result<(), PresentationError> {
        match m {
            AcMove::Mul(i, j) => {
                self.check_index(*i)?;
                self.check_index(*j)?;
                if i == j {
                    return Err(PresentationError::SelfMultiply(*i));
                }
            }
            AcMove::Inv(i) => self.check_index(*i)?,
            AcMove::Conj(i, f) => {
                self.check_index(*i)?;
                if f.rank() != self.rank() {
                    return Err(WordError::RankMismatch(self.rank(), f.rank()).into());
                }
            }
        }
        Ok(())
    }

    /// The relator that `m` would produce at its target index.
    pub fn moved_relator(&self, m: &AcMove) -> Result<Word, PresentationError> {
        self.validate_move(m)?;
        Ok(self.moved_relator_unchecked(m))
    }

    pub(crate) fn moved_relator_unchecked(&self, m: &AcMove) -> Word {
        match m {
            AcMove::Mul(i, j) => self.relators[*i].mul_unchecked(&self.relators[*j]),
            AcMove::Inv(i) => self.relators[*i].invert(),
            AcMove::Conj(i, f) => f.mul_unchecked(&self.relators[*i]).mul_unchecked(&f.invert()),
        }
    }

    pub fn apply_move(&self, m: &AcMove) -> Result<Presentation, PresentationError> {
        let w = self.moved_relator(m)?;
        let mut relators = self.relators.clone();
        relators[m.target()] = w;
        Ok(Presentation { relators })
    }

    pub fn apply_moves<'a, I>(&self, moves: I) -> Result<Presentation, PresentationError>
    where
        I: IntoIterator<Item = &'a AcMove>,
    {
        moves
            .into_iter()
            .try_fold(self.clone(), |p, m| p.apply_move(m))
    }

    /// Every distinct presentation one move away, excluding `self`, with
    /// conjugators of length `1..=conjugator_bound`. The first move reaching
    /// a given tuple is kept.
    pub fn neighbors(&self, conjugator_bound: usize) -> Vec<(AcMove, Presentation)> {
        let n = self.rank();
        let mut moves = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    moves.push(AcMove::Mul(i, j));
                }
            }
        }
        moves.extend((0..n).map(AcMove::Inv));
        let conjugators: Vec<Word> = (1..=conjugator_bound)
            .flat_map(|len| reduced_words(n, len))
            .collect();
        for i in 0..n {
            moves.extend(conjugators.iter().map(|f| AcMove::Conj(i, f.clone())));
        }

        let mut seen = HashSet::new();
        seen.insert(self.clone());
        let mut out = Vec::new();
        for m in moves {
            let p = self.apply_move(&m).expect("generated moves are valid");
            if seen.insert(p.clone()) {
                out.push((m, p));
            }
        }
        out
    }

    /// No single elementary move shortens the presentation. Conjugation can
    /// shorten a relator exactly when it is not cyclically reduced, and
    /// inversion never changes length, so only products need checking.
    pub fn is_local_min(&self) -> bool {
        if !self.relators.iter().all(Word::is_cyclically_reduced) {
            return false;
        }
        let n = self.rank();
        (0..n).all(|i| {
            (0..n).filter(|&j| j != i).all(|j| {
                let prod = self.relators[i].mul_unchecked(&self.relators[j]);
                prod.len() >= self.relators[i].len()
            })
        })
    }

    /// Canonical form under independent rotation of each relator and any
    /// reordering of the relators: each relator is replaced by its least
    /// rotation and the tuple is sorted shortlex.
    pub fn canonical_form(&self) -> Result<Presentation, PresentationError> {
        if let Some(i) = self.relators.iter().position(|w| !w.is_cyclically_reduced()) {
            return Err(PresentationError::NotCyclicallyReduced(i));
        }
        let mut relators: Vec<Word> = self.relators.iter().map(Word::least_rotation).collect();
        relators.sort();
        Ok(Presentation { relators })
    }

    /// Byte-string key of [`Presentation::canonical_form`]: letter codes of
    /// each relator followed by a `0xff` separator.
    pub fn canonical_key(&self) -> Result<Vec<u8>, PresentationError> {
        let canon = self.canonical_form()?;
        let mut key = Vec::with_capacity(canon.total_length() + canon.rank());
        for w in canon.relators() {
            key.extend(w.letters().iter().map(|l| l.code()));
            key.push(0xff);
        }
        Ok(key)
    }

    /// Length-lexicographic: total length first, then the relator tuple
    /// compared relator by relator in shortlex order.
    pub fn order_cmp(&self, other: &Presentation) -> std::cmp::Ordering {
        self.total_length()
            .cmp(&other.total_length())
            .then_with(|| self.relators.cmp(&other.relators))
    }

    /// Each relator replaced by its cyclic core.
    pub fn cyclic_cores(&self) -> Presentation {
        Presentation {
            relators: self.relators.iter().map(Word::cyclic_core).collect(),
        }
    }
}

impl AcMove {
    pub fn target(&self) -> usize {
        match self {
            AcMove::Mul(i, _) | AcMove::Inv(i) | AcMove::Conj(i, _) => *i,
        }
    }

    /// A move sequence undoing `self`.
    pub fn inverse_sequence(&self) -> Vec<AcMove> {
        match self {
            AcMove::Mul(i, j) => vec![AcMove::Inv(*j), AcMove::Mul(*i, *j), AcMove::Inv(*j)],
            AcMove::Inv(i) => vec![AcMove::Inv(*i)],
            AcMove::Conj(i, f) => vec![AcMove::Conj(*i, f.invert())],
        }
    }

    /// Parses `inv <i>`, `mul <i> <j>` or `conj <i> <word>` with 1-based
    /// indices.
    pub fn parse(line: &str, rank: usize) -> Result<AcMove, CertificateError> {
        let bad = || CertificateError::BadMove(line.to_string());
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let index = |t: &str| -> Result<usize, CertificateError> {
            let i: usize = t.parse().map_err(|_| bad())?;
            i.checked_sub(1).ok_or_else(bad)
        };
        match tokens.as_slice() {
            ["inv", i] => Ok(AcMove::Inv(index(i)?)),
            ["mul", i, j] => Ok(AcMove::Mul(index(i)?, index(j)?)),
            ["conj", i, f] => Ok(AcMove::Conj(
                index(i)?,
                Word::parse(f, rank).map_err(|e| CertificateError::Parse(e.into()))?,
            )),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for AcMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcMove::Mul(i, j) => write!(f, "mul {} {}", i + 1, j + 1),
            AcMove::Inv(i) => write!(f, "inv {}", i + 1),
            AcMove::Conj(i, w) => write!(f, "conj {} {}", i + 1, w),
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, w) in self.relators.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", w)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_string().replace(' ', ", "))
    }
}

impl FromStr for Presentation {
    type Err = PresentationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Presentation::parse(s)
    }
}

impl Ord for Presentation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_cmp(other)
    }
}

impl PartialOrd for Presentation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed move line {0:?}")]
    BadMove(String),
    #[error("missing `{0}:` header line")]
    MissingHeader(&'static str),
    #[error(transparent)]
    Parse(#[from] PresentationError),
    #[error("move {step} is malformed: {source}")]
    InvalidMove {
        step: usize,
        source: PresentationError,
    },
    #[error("base rank {0} differs from target rank {1}")]
    RankMismatch(usize, usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A replayable sequence of moves from `base` to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub base: Presentation,
    pub moves: Vec<AcMove>,
    pub target: Presentation,
}

impl Certificate {
    pub fn new(base: Presentation, moves: Vec<AcMove>, target: Presentation) -> Certificate {
        Certificate {
            base,
            moves,
            target,
        }
    }

    /// Replays the moves. `Ok(false)` means a well-formed certificate whose
    /// endpoint differs from the claimed target; malformed moves are errors.
    pub fn verify(&self) -> Result<bool, CertificateError> {
        if self.base.rank() != self.target.rank() {
            return Err(CertificateError::RankMismatch(
                self.base.rank(),
                self.target.rank(),
            ));
        }
        let mut p = self.base.clone();
        for (step, m) in self.moves.iter().enumerate() {
            p = p
                .apply_move(m)
                .map_err(|source| CertificateError::InvalidMove { step: step + 1, source })?;
        }
        Ok(p == self.target)
    }

    /// The reverse path, from `target` back to `base`.
    pub fn inverse(&self) -> Certificate {
        let moves = self.moves.iter().rev().flat_map(AcMove::inverse_sequence).collect();
        Certificate::new(self.target.clone(), moves, self.base.clone())
    }

    /// Concatenates two certificates; `None` unless `self` ends where
    /// `next` starts.
    pub fn then(&self, next: &Certificate) -> Option<Certificate> {
        (self.target == next.base).then(|| {
            let moves = self.moves.iter().chain(&next.moves).cloned().collect();
            Certificate::new(self.base.clone(), moves, next.target.clone())
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("base: {}\ntarget: {}\n", self.base, self.target);
        for m in &self.moves {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Certificate, CertificateError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = |line: Option<&str>, name: &'static str| -> Result<Presentation, CertificateError> {
            let line = line.ok_or(CertificateError::MissingHeader(name))?;
            let rest = line
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(':'))
                .ok_or(CertificateError::MissingHeader(name))?;
            Ok(Presentation::parse(rest)?)
        };
        let base = header(lines.next(), "base")?;
        let target = header(lines.next(), "target")?;
        let moves = lines
            .map(|l| AcMove::parse(l, base.rank()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Certificate {
            base,
            moves,
            target,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Certificate, CertificateError> {
        Certificate::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<(), CertificateError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn apply_move_examples() {
        assert_eq!(p("x y").apply_move(&AcMove::Mul(0, 1)).unwrap(), p("xy y"));
        assert_eq!(p("xy y").apply_move(&AcMove::Inv(0)).unwrap(), p("YX y"));
        assert_eq!(p("x y").apply_move(&AcMove::Conj(1, w("x"))).unwrap(), p("x xyX"));
    }

    #[test]
    fn apply_move_errors() {
        assert_eq!(
            p("x y").apply_move(&AcMove::Mul(1, 1)),
            Err(PresentationError::SelfMultiply(1))
        );
        assert_eq!(
            p("x y").apply_move(&AcMove::Inv(2)),
            Err(PresentationError::BadIndex { index: 2, rank: 2 })
        );
        assert!(p("x y")
            .apply_move(&AcMove::Conj(0, Word::parse("x1", 3).unwrap()))
            .is_err());
    }

    #[test]
    fn parse_rejects_unbalanced() {
        assert!(Presentation::new(vec![w("x")]).is_err());
        assert_eq!(p("x y xy").rank(), 3);
        assert!(Presentation::parse("").is_err());
        assert_eq!(p("xX y"), p("1 y"));
    }

    #[test]
    fn neighbor_counts() {
        let base = p("x y");
        let n0 = base.neighbors(0);
        assert_eq!(n0.len(), 4);
        let tuples: HashSet<_> = n0.iter().map(|(_, q)| q.clone()).collect();
        for t in ["xy y", "x yx", "X y", "x Y"] {
            assert!(tuples.contains(&p(t)), "{t}");
        }
        let n1 = base.neighbors(1);
        // conj by x or X fixes x; likewise y on the second relator
        assert_eq!(n1.len(), 4 + 4);
        assert!(n1.len() <= 12);
        assert!(n1.iter().any(|(_, q)| *q == p("yxY y")));
        assert!(n1.iter().any(|(_, q)| *q == p("x Xyx")));
    }

    #[test]
    fn total_length_examples() {
        assert_eq!(p("x y").total_length(), 2);
        assert_eq!(p("xxxYYYY xyxYXY").total_length(), 13);
        assert_eq!(p("xxYYY xyxYXY").total_length(), 11);
    }

    #[test]
    fn local_min_examples() {
        assert!(p("xxxYYYY xyxYXY").is_local_min());
        assert!(!p("yxY y").is_local_min());
        assert!(p("xxYYY xyxYXY").is_local_min());
    }

    #[test]
    fn canonical_key_examples() {
        let k = |s: &str| p(s).canonical_key().unwrap();
        assert_eq!(k("yx y"), k("xy y"));
        assert_eq!(k("y xy"), k("xy y"));
        assert_ne!(k("x y"), k("xy y"));
        assert_ne!(k("xy y"), k("YX y"));
        assert_eq!(
            p("yxY y").canonical_key(),
            Err(PresentationError::NotCyclicallyReduced(0))
        );
    }

    #[test]
    fn certificate_examples() {
        let cert = Certificate::new(
            p("xy y"),
            vec![AcMove::Inv(1), AcMove::Mul(0, 1), AcMove::Inv(1)],
            p("x y"),
        );
        assert!(cert.verify().unwrap());
        assert!(Certificate::new(p("x y"), vec![], p("x y")).verify().unwrap());
        assert!(!Certificate::new(p("x y"), vec![AcMove::Inv(0)], p("x y"))
            .verify()
            .unwrap());
        let bad = Certificate::new(p("x y"), vec![AcMove::Mul(0, 0)], p("x y"));
        assert!(matches!(
            bad.verify(),
            Err(CertificateError::InvalidMove { step: 1, .. })
        ));
    }

    #[test]
    fn certificate_text() {
        let cert = Certificate::new(
            p("xy y"),
            vec![AcMove::Inv(1), AcMove::Mul(0, 1), AcMove::Conj(0, w("xY"))],
            p("xy y"),
        );
        let text = cert.to_text();
        assert_eq!(text, "base: xy y\ntarget: xy y\ninv 2\nmul 1 2\nconj 1 xY\n");
        assert_eq!(Certificate::parse(&text).unwrap(), cert);
        assert!(matches!(
            Certificate::parse("target: x y\n"),
            Err(CertificateError::MissingHeader("base"))
        ));
        assert!(matches!(
            Certificate::parse("base: x y\ntarget: x y\nmul 0 1\n"),
            Err(CertificateError::BadMove(_))
        ));
        assert!(matches!(
            Certificate::parse("base: x y\ntarget: x y\nswap 1 2\n"),
            Err(CertificateError::BadMove(_))
        ));
    }

    #[test]
    fn inverse_and_composition() {
        let moves = vec![AcMove::Mul(0, 1), AcMove::Conj(1, w("xY")), AcMove::Inv(0)];
        let base = p("xxY yx");
        let cert = Certificate::new(base.clone(), moves.clone(), base.apply_moves(&moves).unwrap());
        let back = cert.inverse();
        assert_eq!(back.base, cert.target);
        assert!(back.verify().unwrap());
        let round = cert.then(&back).unwrap();
        assert_eq!(round.target, base);
        assert!(round.verify().unwrap());
        assert!(cert.then(&cert).is_none());
    }
}
