//! Genetic search for AC-move sequences.
//!
//! Individuals are presentations reached from a seed, together with the
//! move history that reached them. Reproduction is mutation only: an
//! offspring is its tournament-selected parent plus one random move, by
//! default followed by the conjugation that cyclically reduces the moved
//! relator. Keeping relators cyclically reduced collapses conjugates and
//! makes the search markedly stronger on the hard length-11 and length-12
//! presentations. Two
//! fitness functions are supported: total relator length (trivialize) and
//! the summed cyclic Hamming distance to a target (equivalence).

use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::{AcMove, Certificate, Presentation};
use crate::word::{cyclic_hamming_letters, reduced_words, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("presentation ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("relators are not single letters generating the free group: {0}")]
    NotBasis(String),
    #[error("search space exceeded {0} states")]
    MemoryCap(usize),
    #[error("invalid search configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationWeights {
    pub mul: f64,
    pub inv: f64,
    pub conj: f64,
}

impl Default for MutationWeights {
    fn default() -> Self {
        MutationWeights {
            mul: 0.5,
            inv: 0.2,
            conj: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: u64,
    pub tournament_size: usize,
    pub mutation: MutationWeights,
    pub conjugator_bound: usize,
    pub max_relator_length: usize,
    pub elitism: usize,
    pub stagnation_restart_after: u64,
    /// Follow every move that leaves its relator not cyclically reduced
    /// with the conjugation that reduces it (recorded in the history).
    pub cyclic_normalize: bool,
    pub rng_seed: u64,
    /// Wall-clock cap. Outcomes are reproducible only when the generation
    /// cap, not this, ends the search.
    pub wall_clock_budget: Duration,
    pub islands: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 200,
            max_generations: u64::MAX,
            tournament_size: 4,
            mutation: MutationWeights::default(),
            conjugator_bound: 2,
            max_relator_length: 20,
            elitism: 4,
            stagnation_restart_after: 300,
            cyclic_normalize: true,
            rng_seed: 0,
            wall_clock_budget: Duration::from_secs(30),
            islands: 1,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::Config(m.to_string()));
        if self.elitism == 0 || self.population_size < self.elitism {
            return bad("need population_size >= elitism >= 1");
        }
        if self.tournament_size == 0 || self.max_relator_length == 0 || self.islands == 0 {
            return bad("tournament size, relator cap and island count must be positive");
        }
        let w = self.mutation;
        if [w.mul, w.inv, w.conj].iter().any(|&x| x < 0.0 || !x.is_finite()) || w.mul + w.inv + w.conj <= 0.0 {
            return bad("mutation weights must be nonnegative with positive sum");
        }
        if w.conj > 0.0 && self.conjugator_bound == 0 {
            return bad("conjugation mutations need conjugator_bound >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchMode {
    Trivialize,
    Equivalence(Presentation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStatus {
    Success(Certificate),
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub generations_used: u64,
    pub best_fitness_trace: Vec<usize>,
    /// Generations at which the population was restarted.
    pub restarts: Vec<u64>,
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.status {
            SearchStatus::Success(c) => Some(c),
            SearchStatus::BudgetExhausted => None,
        }
    }
}

/// Persistent move list; cloning shares the prefix.
struct HistoryNode {
    mv: AcMove,
    parent: Option<Rc<HistoryNode>>,
    len: usize,
}

#[derive(Clone, Default)]
pub struct History(Option<Rc<HistoryNode>>);

impl History {
    fn push(&self, mv: AcMove) -> History {
        History(Some(Rc::new(HistoryNode {
            mv,
            len: self.len() + 1,
            parent: self.0.clone(),
        })))
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn to_vec(&self) -> Vec<AcMove> {
        let mut out = Vec::with_capacity(self.len());
        let mut node = self.0.as_deref();
        while let Some(n) = node {
            out.push(n.mv.clone());
            node = n.parent.as_deref();
        }
        out.reverse();
        out
    }
}

impl Drop for HistoryNode {
    // unlink iteratively so long chains do not overflow the stack
    fn drop(&mut self) {
        let mut next = self.parent.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut node) => next = node.parent.take(),
                Err(_) => break,
            }
        }
    }
}

#[derive(Clone)]
pub struct Individual {
    pub current: Presentation,
    pub history: History,
    pub fitness: usize,
}

pub fn fitness_length(p: &Presentation) -> usize {
    p.total_length()
}

/// Minimum over relator pairings (identity and, for rank 2, swap) of the
/// summed cyclic Hamming distances.
pub fn fitness_hamming(p: &Presentation, target: &Presentation) -> Result<usize, SearchError> {
    if p.rank() != target.rank() {
        return Err(SearchError::RankMismatch(p.rank(), target.rank()));
    }
    Ok(hamming_by_pairing(p, target).into_iter().min().unwrap_or(0))
}

/// Summed distance under the identity pairing, then (rank 2) the swap.
fn hamming_by_pairing(p: &Presentation, target: &Presentation) -> Vec<usize> {
    let dist = |i: usize, j: usize| cyclic_hamming_letters(p.relator(i).letters(), target.relator(j).letters());
    let n = p.rank();
    let mut out = vec![(0..n).map(|i| dist(i, i)).sum()];
    if n == 2 {
        out.push(dist(0, 1) + dist(1, 0));
    }
    out
}

fn is_single_letter_basis(p: &Presentation) -> bool {
    p.rank() == 2
        && p.relators().iter().all(|w| w.len() == 1)
        && p.relator(0).letters()[0].generator() != p.relator(1).letters()[0].generator()
}

/// Moves taking a presentation whose relators are single letters of
/// distinct generators exactly to `(x, y)`.
pub fn finish_to_standard(p: &Presentation) -> Result<Vec<AcMove>, SearchError> {
    if !is_single_letter_basis(p) {
        return Err(SearchError::NotBasis(p.to_string()));
    }
    let a = p.relator(0).letters()[0];
    let b = p.relator(1).letters()[0];
    let mut moves = Vec::new();
    if a.generator() == 1 {
        if !a.is_positive() {
            moves.push(AcMove::Inv(0));
        }
        if !b.is_positive() {
            moves.push(AcMove::Inv(1));
        }
        return Ok(moves);
    }
    // (y, X) -> (yX, X) -> (xY, X) -> (xY, Y) -> (xY, y) -> (x, y)
    if !a.is_positive() {
        moves.push(AcMove::Inv(0));
    }
    if b.is_positive() {
        moves.push(AcMove::Inv(1));
    }
    moves.extend([
        AcMove::Mul(0, 1),
        AcMove::Inv(0),
        AcMove::Mul(1, 0),
        AcMove::Inv(1),
        AcMove::Mul(0, 1),
    ]);
    Ok(moves)
}

/// Moves taking `p` to `target` when each relator of `p` is a cyclic
/// rotation of the paired target relator (identity or swapped pairing).
pub fn finish_to_target(p: &Presentation, target: &Presentation) -> Option<Vec<AcMove>> {
    if p.rank() != 2 || target.rank() != 2 {
        return None;
    }
    let rotation_moves = |from: &Word, to: &Word, i: usize| -> Option<Vec<AcMove>> {
        if from == to {
            return Some(Vec::new());
        }
        if !from.is_rotation_of(to) || !from.is_cyclically_reduced() {
            return None;
        }
        let k = (1..from.len()).find(|&k| from.rotated(k) == *to)?;
        // rotating ab to ba is conjugation by a^-1
        let a = Word::from_letters(from.rank(), from.letters()[..k].iter().copied()).ok()?;
        Some(vec![AcMove::Conj(i, a.invert())])
    };
    let direct = || -> Option<Vec<AcMove>> {
        let mut m = rotation_moves(p.relator(0), target.relator(0), 0)?;
        m.extend(rotation_moves(p.relator(1), target.relator(1), 1)?);
        Some(m)
    };
    if let Some(m) = direct() {
        return Some(m);
    }
    // swap realized by AC-moves: (u, v) ends at (v, u)
    let mut moves = swap_moves(p);
    let swapped = p.apply_moves(&moves).ok()?;
    debug_assert_eq!(swapped.relator(0), p.relator(1));
    moves.extend(rotation_moves(swapped.relator(0), target.relator(0), 0)?);
    moves.extend(rotation_moves(swapped.relator(1), target.relator(1), 1)?);
    Some(moves)
}

/// A move sequence exchanging the two relators.
pub fn swap_moves(p: &Presentation) -> Vec<AcMove> {
    let u = p.relator(0).clone();
    let v = p.relator(1).clone();
    // (u,v) -> (uv,v) -> (uv,V) -> (uv,Vuv) -> (uv,u) -> (uv,U) -> (uvU,U)
    //       -> (v,U) -> (v,u)
    vec![
        AcMove::Mul(0, 1),
        AcMove::Inv(1),
        AcMove::Mul(1, 0),
        AcMove::Conj(1, v),
        AcMove::Inv(1),
        AcMove::Mul(0, 1),
        AcMove::Conj(0, u.invert()),
        AcMove::Inv(1),
    ]
}

/// Removes loops from a certificate's path: whenever a presentation
/// recurs, the moves between its occurrences are dropped.
pub fn simplify_certificate(cert: &Certificate) -> Certificate {
    let mut states = vec![cert.base.clone()];
    let mut moves: Vec<AcMove> = Vec::new();
    let mut index: HashMap<Presentation, usize> = HashMap::new();
    index.insert(cert.base.clone(), 0);
    for m in &cert.moves {
        let next = match states.last().and_then(|p| p.apply_move(m).ok()) {
            Some(n) => n,
            None => return cert.clone(),
        };
        if let Some(&k) = index.get(&next) {
            for s in states.drain(k + 1..) {
                index.remove(&s);
            }
            moves.truncate(k);
        } else {
            index.insert(next.clone(), states.len());
            states.push(next);
            moves.push(m.clone());
        }
    }
    Certificate::new(cert.base.clone(), moves, cert.target.clone())
}

struct Mutator {
    kinds: WeightedIndex<f64>,
    conjugators: Vec<Word>,
    max_relator_length: usize,
    cyclic_normalize: bool,
    rank: usize,
}

const MUTATION_RETRIES: usize = 8;

impl Mutator {
    fn new(cfg: &GaConfig, rank: usize) -> Mutator {
        let w = cfg.mutation;
        Mutator {
            kinds: WeightedIndex::new([w.mul, w.inv, w.conj]).expect("validated weights"),
            conjugators: (1..=cfg.conjugator_bound)
                .flat_map(|n| reduced_words(rank, n))
                .collect(),
            max_relator_length: cfg.max_relator_length,
            cyclic_normalize: cfg.cyclic_normalize,
            rank,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> AcMove {
        let i = rng.gen_range(0..self.rank);
        match self.kinds.sample(rng) {
            0 => {
                let j = (i + rng.gen_range(1..self.rank)) % self.rank;
                AcMove::Mul(i, j)
            }
            1 => AcMove::Inv(i),
            _ => AcMove::Conj(i, self.conjugators[rng.gen_range(0..self.conjugators.len())].clone()),
        }
    }

    fn mutate(&self, ind: &Individual, rng: &mut ChaCha8Rng, fitness: &impl Fn(&Presentation) -> usize) -> Individual {
        for _ in 0..MUTATION_RETRIES {
            let mv = self.sample(rng);
            let w = ind.current.moved_relator_unchecked(&mv);
            if w.len() > self.max_relator_length {
                continue;
            }
            let i = mv.target();
            let mut history = ind.history.push(mv);
            let mut relators = ind.current.relators().to_vec();
            relators[i] = if self.cyclic_normalize && !w.is_cyclically_reduced() {
                let (core, conjugator) = w.cyclic_reduce();
                history = history.push(AcMove::Conj(i, conjugator.invert()));
                core
            } else {
                w
            };
            let current = Presentation::new(relators).expect("rank preserved");
            return Individual {
                fitness: fitness(&current),
                current,
                history,
            };
        }
        ind.clone()
    }
}

/// One mutation of `ind`, as used by the search. Deterministic in `rng`.
pub fn mutate(ind: &Individual, cfg: &GaConfig, rng: &mut ChaCha8Rng) -> Individual {
    let mutator = Mutator::new(cfg, ind.current.rank());
    mutator.mutate(ind, rng, &fitness_length)
}

impl Individual {
    pub fn seed(p: &Presentation, fitness: usize) -> Individual {
        Individual {
            current: p.clone(),
            history: History::default(),
            fitness,
        }
    }
}

/// Runs the search. Islands run independent populations seeded
/// `rng_seed + island`; the lowest-indexed successful island wins.
pub fn evolve(seed: &Presentation, mode: &SearchMode, cfg: &GaConfig) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    if let SearchMode::Equivalence(t) = mode {
        if t.rank() != seed.rank() {
            return Err(SearchError::RankMismatch(seed.rank(), t.rank()));
        }
        if seed.rank() != 2 {
            return Err(SearchError::Config("equivalence mode supports rank 2".into()));
        }
    }
    if cfg.islands == 1 {
        return Ok(run_island(seed, mode, cfg, 0, &AtomicUsize::new(usize::MAX)));
    }
    let winner = AtomicUsize::new(usize::MAX);
    let outcomes: Vec<SearchOutcome> = (0..cfg.islands)
        .into_par_iter()
        .map(|k| run_island(seed, mode, cfg, k, &winner))
        .collect();
    let best = outcomes
        .iter()
        .position(|o| o.certificate().is_some())
        .unwrap_or(0);
    Ok(outcomes.into_iter().nth(best).expect("at least one island"))
}

fn run_island(
    seed: &Presentation,
    mode: &SearchMode,
    cfg: &GaConfig,
    island: usize,
    winner: &AtomicUsize,
) -> SearchOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(island as u64));
    let mutator = Mutator::new(cfg, seed.rank());
    let fitness = |p: &Presentation| match mode {
        SearchMode::Trivialize => fitness_length(p),
        SearchMode::Equivalence(t) => hamming_by_pairing(p, t).into_iter().min().unwrap_or(0),
    };
    let solved = |ind: &Individual| match mode {
        SearchMode::Trivialize => ind.fitness == 2 && is_single_letter_basis(&ind.current),
        SearchMode::Equivalence(_) => ind.fitness == 0,
    };
    let finish = |ind: &Individual| -> Option<Certificate> {
        let mut moves = ind.history.to_vec();
        let target = match mode {
            SearchMode::Trivialize => {
                moves.extend(finish_to_standard(&ind.current).ok()?);
                Presentation::standard(seed.rank())
            }
            SearchMode::Equivalence(t) => {
                moves.extend(finish_to_target(&ind.current, t)?);
                t.clone()
            }
        };
        let cert = simplify_certificate(&Certificate::new(seed.clone(), moves, target));
        assert!(
            cert.verify().unwrap_or(false),
            "search produced a certificate that does not replay"
        );
        Some(cert)
    };

    let seed_ind = Individual::seed(seed, fitness(seed));
    let mut trace = Vec::new();
    let mut restarts = Vec::new();
    let done = |status, generations, trace, restarts| SearchOutcome {
        status,
        generations_used: generations,
        best_fitness_trace: trace,
        restarts,
    };
    if solved(&seed_ind) {
        if let Some(cert) = finish(&seed_ind) {
            winner.fetch_min(island, AtomicOrdering::SeqCst);
            return done(SearchStatus::Success(cert), 0, trace, restarts);
        }
    }

    let mut population = vec![seed_ind.clone(); cfg.population_size];
    let mut best_ever = seed_ind.fitness;
    let mut stagnant = 0u64;
    let mut generation = 0u64;
    while generation < cfg.max_generations {
        if start.elapsed() >= cfg.wall_clock_budget || winner.load(AtomicOrdering::Relaxed) < island {
            break;
        }
        generation += 1;
        population.sort_by_key(|ind| ind.fitness);
        let mut next: Vec<Individual> = population[..cfg.elitism].to_vec();
        while next.len() < cfg.population_size {
            let parent = (0..cfg.tournament_size)
                .map(|_| &population[rng.gen_range(0..population.len())])
                .min_by_key(|ind| ind.fitness)
                .expect("tournament_size >= 1");
            let child = mutator.mutate(parent, &mut rng, &fitness);
            if solved(&child) {
                if let Some(cert) = finish(&child) {
                    trace.push(child.fitness);
                    winner.fetch_min(island, AtomicOrdering::SeqCst);
                    return done(SearchStatus::Success(cert), generation, trace, restarts);
                }
            }
            next.push(child);
        }
        population = next;
        let best = population.iter().map(|i| i.fitness).min().unwrap_or(usize::MAX);
        trace.push(best);
        if best < best_ever {
            best_ever = best;
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        if stagnant >= cfg.stagnation_restart_after {
            let keep = population
                .iter()
                .min_by_key(|i| i.fitness)
                .cloned()
                .expect("nonempty population");
            population = vec![seed_ind.clone(); cfg.population_size];
            population[0] = keep;
            stagnant = 0;
            restarts.push(generation);
        }
    }
    done(SearchStatus::BudgetExhausted, generation, trace, restarts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfsResult {
    Reachable(usize),
    NotWithinBounds,
}

pub const BFS_STATE_CAP: usize = 20_000_000;

/// Breadth-first search from `p` to `(x, y)` over single moves, never
/// leaving presentations whose relators all have length at most
/// `length_cap`.
pub fn bfs_oracle(
    p: &Presentation,
    move_bound: usize,
    length_cap: usize,
    conjugator_bound: usize,
) -> Result<BfsResult, SearchError> {
    bfs_oracle_capped(p, move_bound, length_cap, conjugator_bound, BFS_STATE_CAP)
}

pub fn bfs_oracle_capped(
    p: &Presentation,
    move_bound: usize,
    length_cap: usize,
    conjugator_bound: usize,
    state_cap: usize,
) -> Result<BfsResult, SearchError> {
    let goal = Presentation::standard(p.rank());
    if *p == goal {
        return Ok(BfsResult::Reachable(0));
    }
    let mut seen: HashSet<Presentation> = HashSet::new();
    seen.insert(p.clone());
    let mut frontier = VecDeque::from([(p.clone(), 0usize)]);
    while let Some((q, depth)) = frontier.pop_front() {
        if depth >= move_bound {
            continue;
        }
        for (_, next) in q.neighbors(conjugator_bound) {
            if next.relators().iter().any(|w| w.len() > length_cap) {
                continue;
            }
            if next == goal {
                return Ok(BfsResult::Reachable(depth + 1));
            }
            if seen.insert(next.clone()) {
                if seen.len() > state_cap {
                    return Err(SearchError::MemoryCap(state_cap));
                }
                frontier.push_back((next, depth + 1));
            }
        }
    }
    Ok(BfsResult::NotWithinBounds)
}

/// Settings for searching the census trivial list; recorded in the run
/// manifest so reports can tell attempted presentations from skipped ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// Presentations longer than this are skipped.
    pub max_total_length: usize,
    pub budget_secs: f64,
    pub max_generations: u64,
    pub rng_seed: u64,
    /// After a failed trivialization, search for equivalence to the
    /// reference presentations, AK(2) first.
    pub try_equivalence: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            max_total_length: 10,
            budget_secs: 60.0,
            max_generations: 20_000,
            rng_seed: 0,
            try_equivalence: true,
        }
    }
}

impl SweepSettings {
    pub fn ga_config(&self) -> GaConfig {
        GaConfig {
            max_generations: self.max_generations,
            rng_seed: self.rng_seed,
            wall_clock_budget: Duration::from_secs_f64(self.budget_secs),
            ..GaConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Presentation {
        s.parse().unwrap()
    }

    fn quick(seed: u64) -> GaConfig {
        GaConfig {
            rng_seed: seed,
            max_generations: 20_000,
            wall_clock_budget: Duration::from_secs(60),
            ..GaConfig::default()
        }
    }

    #[test]
    fn fitness_examples() {
        assert_eq!(fitness_length(&p("x y")), 2);
        assert_eq!(fitness_length(&p("xy y")), 3);
        assert_eq!(fitness_length(&p("xxxYYYY xyxYXY")), 13);
        let q = p("xyxYY xxYXY");
        assert_eq!(fitness_hamming(&q, &q), Ok(0));
        assert_eq!(fitness_hamming(&p("xy y"), &p("yx y")), Ok(0));
        assert_eq!(fitness_hamming(&p("xy xx"), &p("xy xy")), Ok(1));
        assert_eq!(fitness_hamming(&p("y xy"), &p("yx y")), Ok(0));
        assert!(fitness_hamming(&p("x y"), &p("x y x")).is_err());
    }

    #[test]
    fn finish_examples() {
        assert_eq!(finish_to_standard(&p("x y")).unwrap(), vec![]);
        assert_eq!(
            finish_to_standard(&p("y x")).unwrap(),
            vec![
                AcMove::Inv(1),
                AcMove::Mul(0, 1),
                AcMove::Inv(0),
                AcMove::Mul(1, 0),
                AcMove::Inv(1),
                AcMove::Mul(0, 1)
            ]
        );
        assert_eq!(finish_to_standard(&p("x Y")).unwrap(), vec![AcMove::Inv(1)]);
        for s in ["x y", "X y", "x Y", "X Y", "y x", "Y x", "y X", "Y X"] {
            let q = p(s);
            let moves = finish_to_standard(&q).unwrap();
            assert_eq!(q.apply_moves(&moves).unwrap(), p("x y"), "{s}");
        }
        assert!(finish_to_standard(&p("x x")).is_err());
        assert!(finish_to_standard(&p("xy y")).is_err());
    }

    #[test]
    fn swap_and_rotation_finish() {
        let q = p("xyY yyX");
        let q = Presentation::new(q.relators().to_vec()).unwrap();
        let swapped = q.apply_moves(&swap_moves(&q)).unwrap();
        assert_eq!(swapped.relator(0), q.relator(1));
        assert_eq!(swapped.relator(1), q.relator(0));
        let moves = finish_to_target(&p("yxx yyX"), &p("yyX xxy")).unwrap();
        assert_eq!(p("yxx yyX").apply_moves(&moves).unwrap(), p("yyX xxy"));
        assert!(finish_to_target(&p("xx y"), &p("xy y")).is_none());
    }

    #[test]
    fn simplify_removes_loops() {
        let moves = vec![AcMove::Inv(0), AcMove::Inv(0), AcMove::Inv(1), AcMove::Mul(0, 1), AcMove::Inv(1)];
        let cert = Certificate::new(p("xy y"), moves, p("x y"));
        let s = simplify_certificate(&cert);
        assert_eq!(s.moves.len(), 3);
        assert!(s.verify().unwrap());
    }

    #[test]
    fn mutate_is_deterministic_and_capped() {
        let cfg = GaConfig {
            max_relator_length: 6,
            ..GaConfig::default()
        };
        let seed = Individual::seed(&p("xxYYY xyxYXY"), 11);
        let run = |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut ind = seed.clone();
            for _ in 0..200 {
                ind = mutate(&ind, &cfg, &mut rng);
            }
            ind
        };
        let (a, b) = (run(7), run(7));
        assert_eq!(a.current, b.current);
        assert_eq!(a.history.to_vec(), b.history.to_vec());
        assert!(a.current.relators().iter().all(|w| w.len() <= 6));
        let replay = seed.current.apply_moves(&a.history.to_vec()).unwrap();
        assert_eq!(replay, a.current);
        assert_eq!(a.fitness, a.current.total_length());
        assert!(a.current.relators().iter().all(Word::is_cyclically_reduced));

        let raw = GaConfig {
            cyclic_normalize: false,
            ..cfg
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ind = seed.clone();
        for _ in 0..50 {
            ind = mutate(&ind, &raw, &mut rng);
        }
        assert!(ind.history.len() <= 50);
        assert_eq!(seed.current.apply_moves(&ind.history.to_vec()).unwrap(), ind.current);
    }

    #[test]
    fn trivializes_small_presentation() {
        let out = evolve(&p("xy y"), &SearchMode::Trivialize, &quick(1)).unwrap();
        let cert = out.certificate().expect("solved");
        assert!(cert.verify().unwrap());
        assert_eq!(cert.target, p("x y"));
        assert_eq!(out, evolve(&p("xy y"), &SearchMode::Trivialize, &quick(1)).unwrap());
    }

    #[test]
    fn standard_seed_is_immediate() {
        let out = evolve(&p("x y"), &SearchMode::Trivialize, &quick(3)).unwrap();
        assert_eq!(out.generations_used, 0);
        assert!(out.certificate().unwrap().moves.is_empty());
    }

    #[test]
    fn equivalence_mode_reaches_target() {
        let target = p("xxYYY xyxYXY");
        let seed = target
            .apply_moves(&[AcMove::Conj(0, "y".parse().unwrap()), AcMove::Inv(1)])
            .unwrap();
        let out = evolve(&seed, &SearchMode::Equivalence(target.clone()), &quick(5)).unwrap();
        let cert = out.certificate().expect("solved");
        assert_eq!(cert.target, target);
        assert!(cert.verify().unwrap());
    }

    #[test]
    fn islands_pick_lowest_success() {
        let cfg = GaConfig {
            islands: 3,
            ..quick(11)
        };
        let a = evolve(&p("xyy xy"), &SearchMode::Trivialize, &cfg).unwrap();
        let b = evolve(&p("xyy xy"), &SearchMode::Trivialize, &cfg).unwrap();
        assert!(a.certificate().is_some());
        assert_eq!(a, b);
    }

    #[test]
    fn elitism_keeps_trace_monotone() {
        let cfg = GaConfig {
            max_generations: 400,
            stagnation_restart_after: 10_000,
            ..quick(2)
        };
        let out = evolve(&p("xxxYYYY xyxYXY"), &SearchMode::Trivialize, &cfg).unwrap();
        assert!(out.best_fitness_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.best_fitness_trace.iter().all(|&f| f >= 2));
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(bfs_oracle(&p("xy y"), 5, 6, 1), Ok(BfsResult::Reachable(3)));
        assert_eq!(bfs_oracle(&p("x y"), 5, 6, 1), Ok(BfsResult::Reachable(0)));
        assert_eq!(bfs_oracle(&p("xx y"), 3, 4, 1), Ok(BfsResult::NotWithinBounds));
        assert_eq!(
            bfs_oracle_capped(&p("xxYYY xyxYXY"), 10, 13, 1, 50),
            Err(SearchError::MemoryCap(50))
        );
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        let bad = GaConfig {
            elitism: 0,
            ..GaConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = GaConfig {
            population_size: 2,
            ..GaConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
