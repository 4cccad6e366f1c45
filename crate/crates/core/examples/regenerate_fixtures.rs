//! Regenerates the certificate fixtures under `tests/fixtures/certs`.
//!
//! ```text
//! cargo run --release --example regenerate_fixtures -- [budget-secs] [seeds] [equivalence-budget-secs] [equivalence-seeds]
//! ```
//!
//! Every certificate is produced by the genetic search and verified before
//! it is written. Presentations whose direct equivalence search fails are
//! joined to AK(2) through the standard presentation instead; the `# method`
//! line of each file records which route produced it. Reruns keep valid
//! fixtures, except that joined ones get another direct search.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ac_census::census::{run_pipeline, Stage, StageConfig};
use ac_census::fixtures::{self, AK2, LENGTH_12_HARD};
use ac_census::gasearch::{evolve, simplify_certificate, GaConfig, SearchMode, SweepSettings};
use ac_census::report::stage_records;
use ac_census::{Certificate, Presentation};

fn fixture_path(dir: &Path, prefix: &str, p: &Presentation) -> PathBuf {
    dir.join(format!("{prefix}-{}.cert", p.to_string().replace(' ', "_")))
}

fn write(path: &Path, method: &str, cert: &Certificate) {
    assert!(cert.verify().unwrap(), "certificate for {} does not verify", cert.base);
    fs::write(path, format!("# method: {method}\n{}", cert.to_text())).unwrap();
    println!("wrote {} ({} moves, {method})", path.display(), cert.moves.len());
}

fn search(p: &Presentation, mode: &SearchMode, budget: f64, seeds: u64) -> Option<(String, Certificate)> {
    search_with(p, mode, budget, seeds, &[true])
}

/// Tries each seed with each mutation style (`true` = cyclically normalized).
fn search_with(
    p: &Presentation,
    mode: &SearchMode,
    budget: f64,
    seeds: u64,
    styles: &[bool],
) -> Option<(String, Certificate)> {
    let runs = (0..seeds).flat_map(|seed| styles.iter().map(move |&n| (seed, n)));
    runs.into_iter().find_map(|(seed, normalize)| {
        let cfg = GaConfig {
            rng_seed: seed,
            wall_clock_budget: Duration::from_secs_f64(budget),
            cyclic_normalize: normalize,
            ..GaConfig::default()
        };
        let style = if normalize { "" } else { ", raw mutations" };
        let start = Instant::now();
        let out = evolve(p, mode, &cfg).unwrap();
        println!(
            "  {p} seed {seed}{style}: {} after {} generations, {:.1?}",
            if out.certificate().is_some() { "solved" } else { "open" },
            out.generations_used,
            start.elapsed()
        );
        out.certificate()
            .map(|c| (format!("seed {seed}{style}, {} generations", out.generations_used), c.clone()))
    })
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let budget: f64 = args.get(1).map_or(600.0, |s| s.parse().expect("budget in seconds"));
    let seeds: u64 = args.get(2).map_or(4, |s| s.parse().expect("seed count"));
    let equiv_budget: f64 = args.get(3).map_or(60.0, |s| s.parse().expect("budget in seconds"));
    let equiv_seeds: u64 = args.get(4).map_or(1, |s| s.parse().expect("seed count"));
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/certs");
    fs::create_dir_all(&dir).unwrap();

    // trivializations of AK(2) and the length-12 presentations
    let mut ak2_cert = None;
    for text in std::iter::once(AK2).chain(LENGTH_12_HARD) {
        let p = fixtures::presentation(text);
        let path = fixture_path(&dir, "trivial", &p);
        if let Ok(c) = Certificate::read(&path) {
            if c.base == p && c.target.is_standard() && c.verify().unwrap_or(false) {
                println!("kept {}", path.display());
                if text == AK2 {
                    ak2_cert = Some(c);
                }
                continue;
            }
        }
        match search(&p, &SearchMode::Trivialize, budget, seeds) {
            Some((run, c)) => {
                write(&path, &format!("genetic search, trivialize, {run}"), &c);
                if text == AK2 {
                    ak2_cert = Some(c);
                }
            }
            None => println!("no certificate for {p}"),
        }
    }

    // length-11 members that the census sweep cannot trivialize
    let tmp = tempfile::tempdir().unwrap();
    run_pipeline(&StageConfig {
        output_path: Some(tmp.path().to_path_buf()),
        ..StageConfig::with_max_total(11)
    })
    .unwrap();
    let sweep_cfg = SweepSettings {
        try_equivalence: false,
        ..SweepSettings::default()
    }
    .ga_config();
    let difficult: Vec<Presentation> = stage_records(tmp.path(), Stage::L5)
        .unwrap()
        .iter()
        .map(|r| r.presentation().unwrap())
        .filter(|p| p.total_length() == 11)
        .filter(|p| evolve(p, &SearchMode::Trivialize, &sweep_cfg).unwrap().certificate().is_none())
        .collect();
    println!("{} difficult length-11 presentations", difficult.len());

    let target = fixtures::presentation(AK2);
    for p in &difficult {
        let path = fixture_path(&dir, "equiv", p);
        let existing = fs::read_to_string(&path).ok().filter(|text| {
            Certificate::parse(text).is_ok_and(|c| c.base == *p && c.target == target && c.verify().unwrap_or(false))
        });
        let joined = existing.as_ref().is_some_and(|t| t.contains("reversed trivialization"));
        if existing.is_some() && !joined {
            println!("kept {}", path.display());
            continue;
        }
        if let Some((run, c)) = search_with(p, &SearchMode::Equivalence(target.clone()), equiv_budget, equiv_seeds, &[true, false]) {
            write(&path, &format!("genetic search, equivalence to AK(2), {run}"), &c);
            continue;
        }
        if joined {
            println!("kept {}", path.display());
            continue;
        }
        let Some(ak2) = &ak2_cert else {
            println!("no certificate for {p}");
            continue;
        };
        match search(p, &SearchMode::Trivialize, budget, seeds) {
            Some((run, c)) => {
                let joined = simplify_certificate(&c.then(&ak2.inverse()).unwrap());
                let method = format!(
                    "genetic search, trivialize ({run}), followed by the reversed trivialization of AK(2)"
                );
                write(&path, &method, &joined);
            }
            None => println!("no certificate for {p}"),
        }
    }
}
