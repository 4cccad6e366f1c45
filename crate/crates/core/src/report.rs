//! Census summary, derived from the record files (plus `run.json` for
//! configuration and timings) so it can be regenerated at any time.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::census::{
    for_each_record, read_manifest, AcStatus, CensusError, GroupOrder, Stage, StageCounts,
};

pub const REPORT_TEXT: &str = "report.txt";
pub const REPORT_JSON: &str = "report.json";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusTally {
    pub standard: u64,
    pub reduced_to_ak2: u64,
    pub reduced_to_corollary1: u64,
    pub open: u64,
}

impl StatusTally {
    fn add(&mut self, s: AcStatus) {
        match s {
            AcStatus::Standard => self.standard += 1,
            AcStatus::ReducedToAk2 => self.reduced_to_ak2 += 1,
            AcStatus::ReducedToCorollary1 => self.reduced_to_corollary1 += 1,
            AcStatus::Open => self.open += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.standard + self.reduced_to_ak2 + self.reduced_to_corollary1 + self.open
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListedPresentation {
    pub id: String,
    pub presentation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Survivor counts |L1| ... |L5| plus the stage-5 split of the L4
    /// representatives.
    pub counts: StageCounts,
    /// Records per stage file (those whose last stage is Lk).
    pub file_counts: BTreeMap<Stage, u64>,
    /// Orders of the nontrivial groups found at stage 5.
    pub nontrivial_orders: BTreeMap<u64, u64>,
    pub convention: Option<String>,
    pub config: Option<serde_json::Value>,
    pub timings_ms: BTreeMap<String, u64>,
    /// Status over every record carrying one.
    pub ac_status: StatusTally,
    /// Status of L5 presentations, by total length.
    pub l5_by_length: BTreeMap<usize, StatusTally>,
    pub certificates: u64,
    pub exceeded: Vec<ListedPresentation>,
    /// L5 presentations the sweep attempted but left open.
    pub budget_exhausted: Vec<ListedPresentation>,
    pub sweep: Option<crate::gasearch::SweepSettings>,
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.counts;
        let _ = writeln!(s, "census report");
        if let Some(conv) = &self.convention {
            let _ = writeln!(s, "convention: {conv}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "stage counts");
        for (k, alive) in [c.l1, c.l2, c.l3, c.l4, c.l5].iter().enumerate() {
            let stage = Stage::ALL[k];
            let stopped = self.file_counts.get(&stage).copied().unwrap_or(0);
            let _ = writeln!(s, "  |L{}| = {:>10}  ({} records in {})", k + 1, alive, stopped, stage.file_name());
        }
        let _ = writeln!(s, "  trivial group:     {}", c.l5);
        let _ = writeln!(s, "  nontrivial group:  {}", c.nontrivial);
        for (order, n) in &self.nontrivial_orders {
            let _ = writeln!(s, "    order {order}: {n}");
        }
        let _ = writeln!(s, "  budget exceeded:   {}", c.exceeded);
        let _ = writeln!(s);
        let t = &self.ac_status;
        let _ = writeln!(s, "AC status (all records)");
        let _ = writeln!(
            s,
            "  standard {}  reduced-to-(5) {}  reduced-to-corollary1 {}  open {}",
            t.standard, t.reduced_to_ak2, t.reduced_to_corollary1, t.open
        );
        if !self.l5_by_length.is_empty() {
            let _ = writeln!(s, "L5 by total length");
            for (len, t) in &self.l5_by_length {
                let _ = writeln!(
                    s,
                    "  {len:>2}: {:>5} total, standard {}, reduced-to-(5) {}, reduced-to-corollary1 {}, open {}",
                    t.total(),
                    t.standard,
                    t.reduced_to_ak2,
                    t.reduced_to_corollary1,
                    t.open
                );
            }
        }
        let _ = writeln!(s, "certificates: {}", self.certificates);
        if let Some(sw) = &self.sweep {
            let _ = writeln!(
                s,
                "sweep: lengths <= {}, {} s and {} generations per presentation, seed {} (search parameters are this tool's defaults)",
                sw.max_total_length, sw.budget_secs, sw.max_generations, sw.rng_seed
            );
        }
        let list = |s: &mut String, title: &str, items: &[ListedPresentation]| {
            let _ = writeln!(s, "{title}: {}", items.len());
            for p in items {
                let _ = writeln!(s, "  {} {}", p.id, p.presentation);
            }
        };
        list(&mut s, "coset budget exceeded", &self.exceeded);
        list(&mut s, "search budget exhausted", &self.budget_exhausted);
        if !self.timings_ms.is_empty() {
            let _ = writeln!(s, "timings (ms)");
            for (k, v) in &self.timings_ms {
                let _ = writeln!(s, "  {k}: {v}");
            }
        }
        s
    }
}

/// Rebuilds the report from a census directory and writes `report.txt`
/// and `report.json` into it.
pub fn write_report(dir: &Path) -> Result<Report, CensusError> {
    let report = build_report(dir)?;
    let text_path = dir.join(REPORT_TEXT);
    fs::write(&text_path, report.to_text()).map_err(|source| CensusError::Io {
        path: text_path,
        source,
    })?;
    let json_path = dir.join(REPORT_JSON);
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    fs::write(&json_path, json).map_err(|source| CensusError::Io {
        path: json_path,
        source,
    })?;
    Ok(report)
}

/// Lightweight view of a record; stage-1 files are large.
#[derive(Deserialize)]
struct RecordView {
    id: String,
    relators: Vec<String>,
    stage_reached: Stage,
    order: Option<GroupOrder>,
    ac_status: Option<AcStatus>,
    certificate_ref: Option<String>,
}

pub fn build_report(dir: &Path) -> Result<Report, CensusError> {
    let present: Vec<Stage> = Stage::ALL
        .into_iter()
        .filter(|s| dir.join(s.file_name()).exists())
        .collect();
    if present.is_empty() {
        return Err(CensusError::Empty(dir.to_path_buf()));
    }
    let manifest = read_manifest(dir)?;
    let sweep = manifest.as_ref().and_then(|m| m.sweep.clone());
    let mut report = Report {
        counts: StageCounts::default(),
        file_counts: BTreeMap::new(),
        nontrivial_orders: BTreeMap::new(),
        convention: manifest.as_ref().map(|m| m.convention.clone()),
        config: manifest
            .as_ref()
            .map(|m| serde_json::to_value(&m.config).expect("config serializes")),
        timings_ms: manifest.as_ref().map(|m| m.timings_ms.clone()).unwrap_or_default(),
        ac_status: StatusTally::default(),
        l5_by_length: BTreeMap::new(),
        certificates: 0,
        exceeded: Vec::new(),
        budget_exhausted: Vec::new(),
        sweep: sweep.clone(),
    };
    for stage in present {
        let path = dir.join(stage.file_name());
        let mut mismatch = None;
        let mut line = 0usize;
        for_each_record_view(&path, |rec| {
            line += 1;
            if rec.stage_reached != stage && mismatch.is_none() {
                mismatch = Some(line);
            }
            tally(&mut report, rec, sweep.as_ref());
        })?;
        if let Some(line) = mismatch {
            return Err(CensusError::Corrupt {
                path,
                line,
                message: format!("record does not belong to {}", stage.file_name()),
            });
        }
    }
    let f = |s: Stage| report.file_counts.get(&s).copied().unwrap_or(0);
    let c = &mut report.counts;
    c.l5 = f(Stage::L5);
    c.l4 = c.l5 + f(Stage::L4);
    c.l3 = c.l4 + f(Stage::L3);
    c.l2 = c.l3 + f(Stage::L2);
    c.l1 = c.l2 + f(Stage::L1);
    Ok(report)
}

fn for_each_record_view(path: &Path, f: impl FnMut(RecordView)) -> Result<(), CensusError> {
    crate::census::for_each_line(path, |line_no, text| {
        serde_json::from_str::<RecordView>(text).map_err(|e| CensusError::Corrupt {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })
    }, f)
}

fn tally(report: &mut Report, rec: RecordView, sweep: Option<&crate::gasearch::SweepSettings>) {
    *report.file_counts.entry(rec.stage_reached).or_default() += 1;
    let c = &mut report.counts;
    if let Some(s) = rec.ac_status {
        report.ac_status.add(s);
    }
    if rec.certificate_ref.is_some() {
        report.certificates += 1;
    }
    let listed = || ListedPresentation {
        id: rec.id.clone(),
        presentation: rec.relators.join(" "),
    };
    match (rec.stage_reached, rec.order) {
        (Stage::L4, Some(GroupOrder::Finite(n))) => {
            c.nontrivial += 1;
            *report.nontrivial_orders.entry(n).or_default() += 1;
        }
        (Stage::L4, Some(GroupOrder::Exceeded(_))) => {
            c.exceeded += 1;
            report.exceeded.push(listed());
        }
        (Stage::L5, _) => {
            let len: usize = rec.relators.iter().map(|r| if r == "1" { 0 } else { r.len() }).sum();
            let status = rec.ac_status.unwrap_or(AcStatus::Open);
            report.l5_by_length.entry(len).or_default().add(status);
            let attempted = sweep.is_some_and(|s| len <= s.max_total_length);
            if status == AcStatus::Open && attempted {
                report.budget_exhausted.push(listed());
            }
        }
        _ => {}
    }
}

/// Parses a record file into full records; exposed for tools that need
/// every field.
pub fn stage_records(dir: &Path, stage: Stage) -> Result<Vec<crate::census::CensusRecord>, CensusError> {
    let mut out = Vec::new();
    for_each_record(&dir.join(stage.file_name()), |r| out.push(r))?;
    Ok(out)
}
