//! The enumeration-and-filtering census of balanced two-generator
//! presentations.
//!
//! Stages:
//! 1. all ordered pairs of nonempty reduced words with bounded total length;
//! 2. keep trivial abelianization;
//! 3. drop presentations with a primitive relator (AC-standard);
//! 4. one representative per class under rotation of each relator's cyclic
//!    core and relator swap;
//! 5. coset enumeration splits trivial groups from the rest;
//! 6. genetic search on the trivial ones (see [`sweep`]), which updates
//!    the L5 records in place and stores certificates under `certs/`.
//!
//! Every stage writes JSON-lines records, gzip-compressed: `L{k}.jsonl.gz`
//! holds exactly the records whose `stage_reached` is `L{k}`, so the five
//! files partition the candidate list. Stages 1-3 run per shard (sharded on
//! the first relator) and are merged back into the canonical order, so
//! output bytes do not depend on the shard count.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::abelianization::smith_normal_form;
use crate::fixtures;
use crate::gasearch::{evolve, SearchMode, SweepSettings};
use crate::presentation::Presentation;
use crate::toddcoxeter::{enumerate_cosets, Outcome};
use crate::whitehead::is_primitive;
use crate::word::{cyclically_reduced_words, reduced_words, Word};

pub const DEFAULT_COSET_BUDGET: usize = 50_000;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt record in {path} line {line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no census records found in {0}")]
    Empty(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CensusError + '_ {
    move |source| CensusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    L1,
    L2,
    L3,
    L4,
    L5,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::L1, Stage::L2, Stage::L3, Stage::L4, Stage::L5];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn file_name(self) -> String {
        format!("L{}.jsonl.gz", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AcStatus {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "reduced-to-(5)")]
    ReducedToAk2,
    #[serde(rename = "reduced-to-corollary1")]
    ReducedToCorollary1,
    #[serde(rename = "open")]
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExceededTag {
    #[serde(rename = "exceeded")]
    Exceeded,
}

/// Group order as stored in records: a number, or the string `exceeded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupOrder {
    Finite(u64),
    Exceeded(ExceededTag),
}

impl From<Outcome> for GroupOrder {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Finite(n) => GroupOrder::Finite(n as u64),
            Outcome::Exceeded(_) => GroupOrder::Exceeded(ExceededTag::Exceeded),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub id: String,
    pub relators: Vec<String>,
    pub stage_reached: Stage,
    pub invariant_factors: Vec<i64>,
    pub primitive_flags: Option<Vec<bool>>,
    pub canonical_key: Option<String>,
    pub order: Option<GroupOrder>,
    pub ac_status: Option<AcStatus>,
    pub certificate_ref: Option<String>,
}

impl CensusRecord {
    pub fn presentation(&self) -> Result<Presentation, crate::PresentationError> {
        Presentation::parse(&self.relators.join(" "))
    }
}

/// Stable identifier: first 16 hex digits of SHA-256 of the presentation line.
pub fn record_id(presentation_line: &str) -> String {
    let digest = Sha256::digest(presentation_line.as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageConfig {
    pub max_total_length: usize,
    pub relators_cyclically_reduced: bool,
    pub ordered_pairs: bool,
    pub min_relator_length: usize,
    pub coset_budget: usize,
    pub shard_count: usize,
    /// Last stage to run, 1..=5.
    pub last_stage: usize,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

impl Default for StageConfig {
    fn default() -> Self {
        StageConfig {
            max_total_length: 12,
            relators_cyclically_reduced: false,
            ordered_pairs: true,
            min_relator_length: 1,
            coset_budget: DEFAULT_COSET_BUDGET,
            shard_count: 1,
            last_stage: 5,
            output_path: None,
        }
    }
}

impl StageConfig {
    pub fn with_max_total(max_total_length: usize) -> StageConfig {
        StageConfig {
            max_total_length,
            ..StageConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), CensusError> {
        if self.min_relator_length == 0 {
            return Err(CensusError::Config("min_relator_length must be at least 1".into()));
        }
        if self.max_total_length < 2 * self.min_relator_length {
            return Err(CensusError::Config(format!(
                "max_total_length {} is below twice min_relator_length {}",
                self.max_total_length, self.min_relator_length
            )));
        }
        if self.shard_count == 0 {
            return Err(CensusError::Config("shard_count must be positive".into()));
        }
        if !(1..=5).contains(&self.last_stage) {
            return Err(CensusError::Config(format!(
                "stage must be between 1 and 5, got {}",
                self.last_stage
            )));
        }
        if self.coset_budget == 0 {
            return Err(CensusError::Config("coset_budget must be positive".into()));
        }
        Ok(())
    }

    pub fn convention(&self) -> String {
        format!(
            "{} pairs of nonempty {} words, relator length >= {}, total length <= {}",
            if self.ordered_pairs { "ordered" } else { "unordered" },
            if self.relators_cyclically_reduced {
                "cyclically reduced"
            } else {
                "freely reduced"
            },
            self.min_relator_length,
            self.max_total_length
        )
    }

    fn fingerprint(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Precomputed per-word data shared by all shards.
struct WordTable {
    /// Words grouped by length; `by_len[n]` is shortlex sorted.
    by_len: Vec<Vec<WordInfo>>,
}

struct WordInfo {
    word: Word,
    text: String,
    exponents: (i64, i64),
    shard_hash: u64,
    primitive: std::sync::OnceLock<bool>,
}

impl WordInfo {
    fn primitive(&self) -> bool {
        *self.primitive.get_or_init(|| is_primitive(&self.word))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl WordTable {
    fn new(cfg: &StageConfig) -> WordTable {
        let max_len = cfg.max_total_length - cfg.min_relator_length;
        let by_len = (0..=max_len)
            .map(|n| {
                if n < cfg.min_relator_length {
                    return Vec::new();
                }
                let words = if cfg.relators_cyclically_reduced {
                    cyclically_reduced_words(2, n)
                } else {
                    reduced_words(2, n)
                };
                words
                    .into_iter()
                    .map(|word| {
                        let text = word.to_string();
                        WordInfo {
                            exponents: (word.exponent_sum(1), word.exponent_sum(2)),
                            shard_hash: fnv1a(text.as_bytes()),
                            text,
                            word,
                            primitive: std::sync::OnceLock::new(),
                        }
                    })
                    .collect()
            })
            .collect();
        WordTable { by_len }
    }

    /// Visits every candidate pair in canonical order.
    fn for_each_pair(&self, cfg: &StageConfig, mut f: impl FnMut(&WordInfo, &WordInfo)) {
        let min = cfg.min_relator_length;
        for total in 2 * min..=cfg.max_total_length {
            for len_r in min..=total - min {
                let len_s = total - len_r;
                for r in &self.by_len[len_r] {
                    for s in &self.by_len[len_s] {
                        if !cfg.ordered_pairs && (len_r, &r.word) > (len_s, &s.word) {
                            continue;
                        }
                        f(r, s);
                    }
                }
            }
        }
    }
}

/// Invariant factors of a 2x2 integer matrix: the gcd of the entries and
/// |det| divided by it.
pub fn invariant_factors_2x2(a: i64, b: i64, c: i64, d: i64) -> Vec<i64> {
    let g = gcd(gcd(a, b), gcd(c, d));
    if g == 0 {
        return vec![0, 0];
    }
    vec![g, (a * d - b * c).abs() / g]
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All candidate presentations (stage 1) in canonical order.
pub fn generate_candidates(cfg: &StageConfig) -> Vec<Presentation> {
    let table = WordTable::new(cfg);
    let mut out = Vec::new();
    table.for_each_pair(cfg, |r, s| {
        out.push(Presentation::pair(r.word.clone(), s.word.clone()).expect("rank 2"));
    });
    out
}

pub fn filter_stage2<I: IntoIterator<Item = Presentation>>(stream: I) -> impl Iterator<Item = Presentation> {
    stream
        .into_iter()
        .filter(crate::abelianization::has_trivial_abelianization)
}

pub fn filter_stage3<I: IntoIterator<Item = Presentation>>(stream: I) -> impl Iterator<Item = Presentation> {
    stream
        .into_iter()
        .filter(|p| !p.relators().iter().any(is_primitive))
}

/// Stage-4 class key: canonical form of the cyclic cores, as text.
pub fn class_key(p: &Presentation) -> String {
    p.cyclic_cores()
        .canonical_form()
        .expect("cyclic cores are cyclically reduced")
        .to_string()
}

/// One representative per class: the order-least member.
pub fn dedup_stage4<I: IntoIterator<Item = Presentation>>(stream: I) -> Vec<Presentation> {
    let mut classes: BTreeMap<String, Presentation> = BTreeMap::new();
    for p in stream {
        let key = class_key(&p);
        match classes.get_mut(&key) {
            Some(rep) if p.order_cmp(rep) == Ordering::Less => *rep = p,
            Some(_) => {}
            None => {
                classes.insert(key, p);
            }
        }
    }
    let mut reps: Vec<Presentation> = classes.into_values().collect();
    reps.sort_by(Presentation::order_cmp);
    reps
}

#[derive(Debug, Clone, Default)]
pub struct Stage5 {
    pub trivial: Vec<Presentation>,
    pub nontrivial: Vec<(Presentation, usize)>,
    pub exceeded: Vec<Presentation>,
}

pub fn classify_stage5(reps: &[Presentation], coset_budget: usize) -> Stage5 {
    let outcomes: Vec<Outcome> = reps
        .par_iter()
        .map(|p| enumerate_cosets(p, coset_budget).outcome)
        .collect();
    let mut out = Stage5::default();
    for (p, o) in reps.iter().zip(outcomes) {
        match o {
            Outcome::Finite(1) => out.trivial.push(p.clone()),
            Outcome::Finite(n) => out.nontrivial.push((p.clone(), n)),
            Outcome::Exceeded(_) => out.exceeded.push(p.clone()),
        }
    }
    out
}

/// Sort key matching [`Presentation::order_cmp`], computed from relator text.
fn text_order_key(relators: &[String]) -> (usize, Vec<(usize, Vec<u8>)>) {
    let code = |c: u8| match c {
        b'x' => 0u8,
        b'X' => 1,
        b'y' => 2,
        _ => 3,
    };
    let words = relators
        .iter()
        .map(|r| {
            if r == "1" {
                (0, Vec::new())
            } else {
                (r.len(), r.bytes().map(code).collect())
            }
        })
        .collect::<Vec<_>>();
    (words.iter().map(|w| w.0).sum(), words)
}

struct GzLines {
    writer: BufWriter<GzEncoder<File>>,
    path: PathBuf,
    count: u64,
}

impl GzLines {
    fn create(path: &Path) -> Result<GzLines, CensusError> {
        let file = File::create(path).map_err(io_err(path))?;
        Ok(GzLines {
            writer: BufWriter::with_capacity(1 << 20, GzEncoder::new(file, Compression::fast())),
            path: path.to_path_buf(),
            count: 0,
        })
    }

    fn write_record(&mut self, rec: &CensusRecord) -> Result<(), CensusError> {
        serde_json::to_writer(&mut self.writer, rec).map_err(|e| CensusError::Io {
            path: self.path.clone(),
            source: e.into(),
        })?;
        self.write_raw("")
    }

    fn write_raw(&mut self, line: &str) -> Result<(), CensusError> {
        self.writer.write_all(line.as_bytes()).map_err(io_err(&self.path))?;
        self.writer.write_all(b"\n").map_err(io_err(&self.path))?;
        self.count += 1;
        Ok(())
    }

    fn finish(self) -> Result<u64, CensusError> {
        let path = self.path;
        let enc = self
            .writer
            .into_inner()
            .map_err(|e| CensusError::Io {
                path: path.clone(),
                source: e.into_error(),
            })?;
        enc.finish().map_err(io_err(&path))?;
        Ok(self.count)
    }
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = Result<String, CensusError>>, CensusError> {
    let file = File::open(path).map_err(io_err(path))?;
    let reader = BufReader::with_capacity(1 << 20, MultiGzDecoder::new(file));
    let path = path.to_path_buf();
    Ok(reader.lines().map(move |l| l.map_err(io_err(&path))))
}

/// Reads every record of a gzip JSON-lines file.
pub fn read_records(path: &Path) -> Result<Vec<CensusRecord>, CensusError> {
    let mut out = Vec::new();
    for (i, line) in open_lines(path)?.enumerate() {
        out.push(parse_record(path, i + 1, &line?)?);
    }
    Ok(out)
}

fn parse_record(path: &Path, line: usize, text: &str) -> Result<CensusRecord, CensusError> {
    serde_json::from_str(text).map_err(|e| CensusError::Corrupt {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    })
}

/// Writes records, sorted in canonical order, to a gzip JSON-lines file.
pub fn write_records(path: &Path, records: &[CensusRecord]) -> Result<u64, CensusError> {
    let mut out = GzLines::create(path)?;
    for r in records {
        out.write_record(r)?;
    }
    out.finish()
}

fn base_record(line: String, relators: Vec<String>, stage: Stage) -> CensusRecord {
    CensusRecord {
        id: record_id(&line),
        relators,
        stage_reached: stage,
        invariant_factors: Vec::new(),
        primitive_flags: None,
        canonical_key: None,
        order: None,
        ac_status: None,
        certificate_ref: None,
    }
}

/// Per-shard output of stages 1-3.
struct ShardOutput {
    survivors: Vec<CensusRecord>,
}

fn shard_dir(out: &Path, cfg: &StageConfig) -> PathBuf {
    out.join("shards").join(format!("n{}", cfg.shard_count))
}

fn shard_path(dir: &Path, shard: usize, stage: Stage) -> PathBuf {
    dir.join(format!("shard-{:03}.{}", shard, stage.file_name()))
}

fn run_shard(
    table: &WordTable,
    cfg: &StageConfig,
    dir: &Path,
    shard: usize,
) -> Result<ShardOutput, CensusError> {
    let marker = dir.join(format!("shard-{:03}.done", shard));
    let fingerprint = cfg.fingerprint();
    let survivors_path = shard_path(dir, shard, Stage::L3);
    if fs::read_to_string(&marker).ok().as_deref() == Some(fingerprint.as_str()) {
        return Ok(ShardOutput {
            survivors: read_records(&survivors_path)?,
        });
    }

    let mut writers = [
        GzLines::create(&shard_path(dir, shard, Stage::L1))?,
        GzLines::create(&shard_path(dir, shard, Stage::L2))?,
    ];
    let mut survivors = Vec::new();
    let mut failure = None;
    let n = cfg.shard_count as u64;
    table.for_each_pair(cfg, |r, s| {
        if failure.is_some() || r.shard_hash % n != shard as u64 {
            return;
        }
        let line = format!("{} {}", r.text, s.text);
        let relators = vec![r.text.clone(), s.text.clone()];
        if cfg.last_stage == 1 {
            let rec = base_record(line, relators, Stage::L1);
            if let Err(e) = writers[0].write_record(&rec) {
                failure = Some(e);
            }
            return;
        }
        let (a, b) = r.exponents;
        let (c, d) = s.exponents;
        let factors = invariant_factors_2x2(a, b, c, d);
        let trivial = (a * d - b * c).abs() == 1;
        let mut rec = base_record(line, relators, Stage::L1);
        rec.invariant_factors = factors;
        let result = if !trivial {
            writers[0].write_record(&rec)
        } else if cfg.last_stage == 2 {
            rec.stage_reached = Stage::L2;
            writers[1].write_record(&rec)
        } else {
            let flags = vec![r.primitive(), s.primitive()];
            let any_primitive = flags.iter().any(|&f| f);
            rec.primitive_flags = Some(flags);
            if any_primitive {
                rec.stage_reached = Stage::L2;
                rec.ac_status = Some(AcStatus::Standard);
                writers[1].write_record(&rec)
            } else {
                rec.stage_reached = Stage::L3;
                survivors.push(rec);
                Ok(())
            }
        };
        if let Err(e) = result {
            failure = Some(e);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    for w in writers {
        w.finish()?;
    }
    write_records(&survivors_path, &survivors)?;
    fs::write(&marker, fingerprint).map_err(io_err(&marker))?;
    Ok(ShardOutput { survivors })
}

/// Merges sorted shard files into one sorted output file.
fn merge_shards(inputs: &[PathBuf], output: &Path) -> Result<u64, CensusError> {
    let mut out = GzLines::create(output)?;
    if inputs.len() == 1 {
        for line in open_lines(&inputs[0])? {
            out.write_raw(&line?)?;
        }
        return out.finish();
    }

    #[derive(Deserialize)]
    struct Relators {
        relators: Vec<String>,
    }
    type Key = (usize, Vec<(usize, Vec<u8>)>);
    struct Stream {
        path: PathBuf,
        lines: Box<dyn Iterator<Item = Result<String, CensusError>>>,
        line_no: usize,
    }
    impl Stream {
        fn next(&mut self) -> Result<Option<(Key, String)>, CensusError> {
            let Some(line) = self.lines.next() else {
                return Ok(None);
            };
            let line = line?;
            self.line_no += 1;
            let rel: Relators = serde_json::from_str(&line).map_err(|e| CensusError::Corrupt {
                path: self.path.clone(),
                line: self.line_no,
                message: e.to_string(),
            })?;
            Ok(Some((text_order_key(&rel.relators), line)))
        }
    }
    let mut streams = inputs
        .iter()
        .map(|p| {
            open_lines(p).map(|it| Stream {
                path: p.clone(),
                lines: Box::new(it),
                line_no: 0,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let next = |k: usize, streams: &mut Vec<Stream>| streams[k].next();
    let mut heap = BinaryHeap::new();
    for k in 0..streams.len() {
        if let Some((key, line)) = next(k, &mut streams)? {
            heap.push(Reverse((key, k, line)));
        }
    }
    while let Some(Reverse((_, k, line))) = heap.pop() {
        out.write_raw(&line)?;
        if let Some((key, line)) = next(k, &mut streams)? {
            heap.push(Reverse((key, k, line)));
        }
    }
    out.finish()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub l1: u64,
    pub l2: u64,
    pub l3: u64,
    pub l4: u64,
    pub l5: u64,
    pub nontrivial: u64,
    pub exceeded: u64,
}

/// Written next to the records; holds what records alone cannot: the
/// configuration and stage timings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: StageConfig,
    pub convention: String,
    pub timings_ms: BTreeMap<String, u64>,
    #[serde(default)]
    pub sweep: Option<SweepSettings>,
}

pub const MANIFEST_FILE: &str = "run.json";

fn ms(d: Duration) -> u64 {
    d.as_millis() as u64
}

/// Runs stages 1 through `cfg.last_stage`, persisting records and the
/// report under `cfg.output_path`.
pub fn run_pipeline(cfg: &StageConfig) -> Result<crate::report::Report, CensusError> {
    cfg.validate()?;
    let out = cfg
        .output_path
        .clone()
        .ok_or_else(|| CensusError::Config("output path required".into()))?;
    fs::create_dir_all(&out).map_err(io_err(&out))?;
    let dir = shard_dir(&out, cfg);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut timings = BTreeMap::new();

    let start = Instant::now();
    let table = WordTable::new(cfg);
    let shards: Vec<ShardOutput> = (0..cfg.shard_count)
        .into_par_iter()
        .map(|k| run_shard(&table, cfg, &dir, k))
        .collect::<Result<_, _>>()?;
    timings.insert("stages1-3".to_string(), ms(start.elapsed()));

    let start = Instant::now();
    for stage in [Stage::L1, Stage::L2] {
        let inputs: Vec<PathBuf> = (0..cfg.shard_count).map(|k| shard_path(&dir, k, stage)).collect();
        merge_shards(&inputs, &out.join(stage.file_name()))?;
    }
    timings.insert("merge".to_string(), ms(start.elapsed()));

    let mut survivors: Vec<CensusRecord> = shards.into_iter().flat_map(|s| s.survivors).collect();
    survivors.sort_by_cached_key(|r| text_order_key(&r.relators));

    let mut l3_file = Vec::new();
    let mut l4_file = Vec::new();
    let mut l5_file = Vec::new();
    if cfg.last_stage <= 3 {
        l3_file = survivors;
    } else {
        let start = Instant::now();
        let mut reps: BTreeMap<String, usize> = BTreeMap::new();
        for (i, rec) in survivors.iter_mut().enumerate() {
            let p = rec.presentation().map_err(|e| CensusError::Config(e.to_string()))?;
            let key = class_key(&p);
            rec.canonical_key = Some(key.clone());
            // survivors are sorted, so the first member seen is the least
            reps.entry(key).or_insert(i);
        }
        let mut is_rep = vec![false; survivors.len()];
        for &i in reps.values() {
            is_rep[i] = true;
        }
        timings.insert("stage4".to_string(), ms(start.elapsed()));

        let start = Instant::now();
        let orders: Vec<Option<GroupOrder>> = survivors
            .par_iter()
            .zip(is_rep.par_iter())
            .map(|(rec, &rep)| {
                if !rep || cfg.last_stage < 5 {
                    return None;
                }
                let p = rec.presentation().expect("validated above");
                Some(enumerate_cosets(&p, cfg.coset_budget).outcome.into())
            })
            .collect();
        for ((mut rec, rep), order) in survivors.into_iter().zip(is_rep).zip(orders) {
            if !rep {
                l3_file.push(rec);
                continue;
            }
            rec.order = order;
            match order {
                Some(GroupOrder::Finite(1)) => {
                    rec.stage_reached = Stage::L5;
                    rec.ac_status = Some(AcStatus::Open);
                    l5_file.push(rec);
                }
                _ => {
                    rec.stage_reached = Stage::L4;
                    l4_file.push(rec);
                }
            }
        }
        if cfg.last_stage >= 5 {
            timings.insert("stage5".to_string(), ms(start.elapsed()));
        }
    }
    write_records(&out.join(Stage::L3.file_name()), &l3_file)?;
    write_records(&out.join(Stage::L4.file_name()), &l4_file)?;
    write_records(&out.join(Stage::L5.file_name()), &l5_file)?;

    let manifest = RunManifest {
        config: cfg.clone(),
        convention: cfg.convention(),
        timings_ms: timings,
        sweep: None,
    };
    write_manifest(&out, &manifest)?;
    crate::report::write_report(&out)
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CensusError> {
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))
}

pub fn read_manifest(dir: &Path) -> Result<Option<RunManifest>, CensusError> {
    let path = dir.join(MANIFEST_FILE);
    match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CensusError::Corrupt {
                path,
                line: 0,
                message: e.to_string(),
            }),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CensusError::Io { path, source: e }),
    }
}

/// Counts by stage from in-memory filters, without persistence. Useful for
/// cross-checking the persisted pipeline.
pub fn count_stages(cfg: &StageConfig) -> StageCounts {
    let table = WordTable::new(cfg);
    let mut counts = StageCounts::default();
    let mut l3 = Vec::new();
    table.for_each_pair(cfg, |r, s| {
        counts.l1 += 1;
        let (a, b) = r.exponents;
        let (c, d) = s.exponents;
        if (a * d - b * c).abs() != 1 {
            return;
        }
        counts.l2 += 1;
        if r.primitive() || s.primitive() {
            return;
        }
        counts.l3 += 1;
        l3.push(Presentation::pair(r.word.clone(), s.word.clone()).expect("rank 2"));
    });
    let reps = dedup_stage4(l3);
    counts.l4 = reps.len() as u64;
    let s5 = classify_stage5(&reps, cfg.coset_budget);
    counts.l5 = s5.trivial.len() as u64;
    counts.nontrivial = s5.nontrivial.len() as u64;
    counts.exceeded = s5.exceeded.len() as u64;
    counts
}

/// Cross-checks the 2x2 fast path against full Smith normal form for every
/// exponent matrix arising from the candidate list.
pub fn check_invariant_paths(cfg: &StageConfig) -> Result<u64, String> {
    let table = WordTable::new(cfg);
    let mut seen = std::collections::HashSet::new();
    table.for_each_pair(cfg, |r, s| {
        seen.insert((r.exponents, s.exponents));
    });
    for &((a, b), (c, d)) in &seen {
        let fast = invariant_factors_2x2(a, b, c, d);
        let m = crate::abelianization::IntMatrix::from_rows(&[vec![a, b], vec![c, d]]);
        let snf = smith_normal_form(&m);
        if fast != snf {
            return Err(format!("[[{a},{b}],[{c},{d}]]: fast {fast:?} vs snf {snf:?}"));
        }
        let trivial_det = (a * d - b * c).abs() == 1;
        if trivial_det != snf.iter().all(|&x| x == 1) {
            return Err(format!("[[{a},{b}],[{c},{d}]]: det and snf disagree"));
        }
    }
    Ok(seen.len() as u64)
}

/// Records of every stage file in a census directory.
pub fn load_all(dir: &Path) -> Result<BTreeMap<Stage, Vec<CensusRecord>>, CensusError> {
    let mut out = BTreeMap::new();
    for stage in Stage::ALL {
        let path = dir.join(stage.file_name());
        if path.exists() {
            out.insert(stage, read_records(&path)?);
        }
    }
    if out.is_empty() {
        return Err(CensusError::Empty(dir.to_path_buf()));
    }
    Ok(out)
}

/// Streams a file line by line through `parse`, handing each value to `f`.
pub(crate) fn for_each_line<T>(
    path: &Path,
    parse: impl Fn(usize, &str) -> Result<T, CensusError>,
    mut f: impl FnMut(T),
) -> Result<(), CensusError> {
    for (i, line) in open_lines(path)?.enumerate() {
        f(parse(i + 1, &line?)?);
    }
    Ok(())
}

/// Streams a stage file without holding it in memory.
pub fn for_each_record(
    path: &Path,
    f: impl FnMut(CensusRecord),
) -> Result<(), CensusError> {
    for_each_line(path, |line, text| parse_record(path, line, text), f)
}

/// Searches one presentation: trivialization first, then (optionally)
/// equivalence to AK(2) and to the four length-12 reference presentations.
pub fn sweep_one(p: &Presentation, settings: &SweepSettings) -> (AcStatus, Option<crate::presentation::Certificate>) {
    let cfg = settings.ga_config();
    let run = |mode: &SearchMode| evolve(p, mode, &cfg).ok().and_then(|o| o.certificate().cloned());
    if let Some(cert) = run(&SearchMode::Trivialize) {
        return (AcStatus::Standard, Some(cert));
    }
    if !settings.try_equivalence {
        return (AcStatus::Open, None);
    }
    let targets = std::iter::once((fixtures::AK2, AcStatus::ReducedToAk2)).chain(
        fixtures::LENGTH_12_HARD
            .iter()
            .map(|t| (*t, AcStatus::ReducedToCorollary1)),
    );
    for (text, status) in targets {
        let target = fixtures::presentation(text);
        if target == *p {
            continue;
        }
        if let Some(cert) = run(&SearchMode::Equivalence(target)) {
            return (status, Some(cert));
        }
    }
    (AcStatus::Open, None)
}

/// Stage 6: searches the open L5 presentations of total length at most
/// `settings.max_total_length`, rewrites `L5.jsonl.gz` with the new
/// statuses, writes certificates to `certs/{id}.cert` and regenerates the
/// report.
pub fn sweep(dir: &Path, settings: &SweepSettings) -> Result<crate::report::Report, CensusError> {
    let l5_path = dir.join(Stage::L5.file_name());
    let mut records = read_records(&l5_path)?;
    let certs = dir.join("certs");
    fs::create_dir_all(&certs).map_err(io_err(&certs))?;
    let start = Instant::now();
    let pending: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            r.ac_status.unwrap_or(AcStatus::Open) == AcStatus::Open
                && r.relators.iter().map(String::len).sum::<usize>() <= settings.max_total_length
        })
        .map(|(i, _)| i)
        .collect();
    let results: Vec<Result<(AcStatus, Option<crate::presentation::Certificate>), CensusError>> = pending
        .par_iter()
        .map(|&i| {
            let p = records[i]
                .presentation()
                .map_err(|e| CensusError::Config(e.to_string()))?;
            Ok(sweep_one(&p, settings))
        })
        .collect();
    for (&i, result) in pending.iter().zip(results) {
        let (status, cert) = result?;
        let rec = &mut records[i];
        rec.ac_status = Some(status);
        if let Some(cert) = cert {
            let rel = format!("certs/{}.cert", rec.id);
            let path = dir.join(&rel);
            cert.write(&path).map_err(|e| CensusError::Io {
                path: path.clone(),
                source: io::Error::other(e.to_string()),
            })?;
            rec.certificate_ref = Some(rel);
        }
    }
    write_records(&l5_path, &records)?;
    let mut manifest = read_manifest(dir)?.ok_or_else(|| CensusError::Config(format!(
        "{} has no {}; run the census first",
        dir.display(),
        MANIFEST_FILE
    )))?;
    manifest.sweep = Some(settings.clone());
    manifest
        .timings_ms
        .insert("stage6".to_string(), ms(start.elapsed()));
    write_manifest(dir, &manifest)?;
    crate::report::write_report(dir)
}
