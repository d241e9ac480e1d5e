//! End-to-end acceptance sweep. Prints one line per criterion and exits
//! nonzero if any criterion fails.
//!
//! `IFC_EXHAUSTIVE_SIZE` sets the term size bound of the exhaustive
//! comparison with the declarative rules (default 6).

use std::path::PathBuf;
use std::time::Instant;

use ifc_core::cg::{CgCtx, CgType};
use ifc_core::cg2fg::{cg2fg_expr, cg2fg_type, check_cg2fg};
use ifc_core::fg::{FgCtx, FgType};
use ifc_core::fg2cg::{check_fg2cg, fg2cg_expr, fg2cg_unlabeled};
use ifc_core::surface::{parse_cg_expr, parse_fg_expr, parse_source, Printer, Program};
use ifc_core::{Label, Lattice, DEFAULT_FUEL};
use ifc_harness::corpus::{load_dir, CorpusFile};
use ifc_harness::enumerate::{exhaustive_cg, exhaustive_fg};
use ifc_harness::equiv::{dead_hits_cg2fg, equiv_check_cg2fg_with, equiv_check_fg2cg, Equiv};
use ifc_harness::gen::{CgGen, FgGen};
use ifc_harness::ni::{
    cg_ni_to_fg, cg_secret_pairs, cg_secrets_to_fg, declared_secret, fg_ni_to_cg, fg_secret_pairs, fg_secrets_to_cg,
    gen_cg_subject, gen_fg_subject, ni_check_cg_with, ni_check_fg_with, precondition_source, CgSubject, FgSubject,
    NiConfig, NiError, Verdict,
};

const TYPING_SAMPLES: usize = 10_000;
const SEMANTIC_SAMPLES: usize = 5_000;
const NI_SUBJECTS: usize = 2_000;
const NI_PAIRS: usize = 50;
const MAX_SIZE: usize = 40;
const ROUND_TRIP_SAMPLES: usize = 1_000;

fn lattices() -> [Lattice; 2] {
    [Lattice::two_point(), Lattice::powerset(["a", "b"]).expect("two atoms")]
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// A label the lattice's bottom cannot observe.
fn secret_label(l: &Lattice) -> Label {
    l.elements().find(|s| !l.flows(*s, l.bot())).expect("nontrivial lattice")
}

struct Report {
    failed: bool,
}

impl Report {
    fn line(&mut self, n: usize, ok: bool, detail: String, started: Instant) {
        self.line_as(n, ok, if ok { "PASS" } else { "FAIL" }, detail, started);
    }

    fn line_as(&mut self, n: usize, ok: bool, status: &str, detail: String, started: Instant) {
        self.failed |= !ok;
        println!("criterion {n}: {status} {detail} elapsed={:.1}s", started.elapsed().as_secs_f64());
    }
}

/// Generated programs to typecheck-translate, split evenly over both
/// lattices.
fn typing_fg() -> (usize, usize, Vec<String>) {
    let (mut made, mut failures, mut notes) = (0, 0, Vec::new());
    for (li, lat) in lattices().iter().enumerate() {
        let mut seed = li as u64 * 1_000_000;
        let mut here = 0;
        while here < TYPING_SAMPLES / 2 {
            seed += 1;
            let mut g = FgGen::new(lat, seed);
            let goal = g.random_type(2, true);
            let pc = g.src.label();
            let Some(e) = g.program(&FgCtx::new(), pc, &goal, MAX_SIZE) else { continue };
            here += 1;
            let outcome = fg2cg_expr(lat, &FgCtx::new(), pc, &e).and_then(|r| check_fg2cg(lat, &FgCtx::new(), &r));
            if e.size() > MAX_SIZE || outcome.is_err() {
                failures += 1;
                if notes.len() < 3 {
                    notes.push(format!("seed {seed}: {outcome:?}"));
                }
            }
        }
        made += here;
    }
    (made, failures, notes)
}

fn typing_cg() -> (usize, usize, Vec<String>) {
    let (mut made, mut failures, mut notes) = (0, 0, Vec::new());
    for (li, lat) in lattices().iter().enumerate() {
        let mut seed = li as u64 * 1_000_000;
        let mut here = 0;
        while here < TYPING_SAMPLES / 2 {
            seed += 1;
            let mut g = CgGen::new(lat, seed);
            let goal = g.random_type(2, true);
            let Some(e) = g.program(&CgCtx::new(), &goal, MAX_SIZE) else { continue };
            here += 1;
            let outcome = cg2fg_expr(lat, &CgCtx::new(), &e).and_then(|r| check_cg2fg(lat, &CgCtx::new(), &r));
            if e.size() > MAX_SIZE || outcome.is_err() {
                failures += 1;
                if notes.len() < 3 {
                    notes.push(format!("seed {seed}: {outcome:?}"));
                }
            }
        }
        made += here;
    }
    (made, failures, notes)
}

#[derive(Default)]
struct Semantics {
    samples: usize,
    terminated: usize,
    disagreements: usize,
    dead_hits: usize,
    notes: Vec<String>,
}

impl Semantics {
    fn record(&mut self, seed: u64, r: Result<Equiv, impl std::fmt::Debug>) {
        self.samples += 1;
        match r {
            Ok(Equiv::Agree(Some(_))) => self.terminated += 1,
            Ok(Equiv::Agree(None)) => {}
            other => {
                self.disagreements += 1;
                if self.notes.len() < 3 {
                    self.notes.push(format!("seed {seed}: {other:?}"));
                }
            }
        }
    }

    fn summary(&self) -> String {
        format!(
            "samples={} terminated={:.1}% disagreements={}",
            self.samples,
            100.0 * self.terminated as f64 / self.samples.max(1) as f64,
            self.disagreements
        )
    }

    fn ok(&self) -> bool {
        self.disagreements == 0 && self.terminated * 100 >= self.samples * 95
    }
}

fn semantics_fg() -> Semantics {
    let mut s = Semantics::default();
    let mut seed = 5_000_000;
    while s.samples < SEMANTIC_SAMPLES {
        seed += 1;
        let lat = &lattices()[(seed % 2) as usize];
        let mut g = FgGen::new(lat, seed);
        let pc = g.src.label();
        let goal = FgType::bool(g.src.label_above(pc));
        let Some(e) = g.program(&FgCtx::new(), pc, &goal, MAX_SIZE) else { continue };
        s.record(seed, equiv_check_fg2cg(lat, pc, &e, DEFAULT_FUEL));
    }
    s
}

fn semantics_cg() -> Semantics {
    let mut s = Semantics::default();
    let mut seed = 6_000_000;
    while s.samples < SEMANTIC_SAMPLES {
        seed += 1;
        let lat = &lattices()[(seed % 2) as usize];
        let mut g = CgGen::new(lat, seed);
        let goal = CgType::slio(g.src.label(), g.src.label(), CgType::Bool);
        let Some(e) = g.program(&CgCtx::new(), &goal, MAX_SIZE) else { continue };
        let r = equiv_check_cg2fg_with(lat, &e, DEFAULT_FUEL, ifc_core::Mutation::None);
        if let Ok((_, hits)) = &r {
            s.dead_hits += hits;
        }
        s.record(seed, r.map(|(v, _)| v));
    }
    s
}

#[derive(Default)]
struct Ni {
    subjects: usize,
    pairs: usize,
    counterexamples: usize,
    errors: usize,
    transfer_counterexamples: usize,
    transfer_errors: usize,
    notes: Vec<String>,
}

impl Ni {
    fn judge(&mut self, r: Result<Verdict, NiError>, transfer: bool, what: &str) {
        let (cx, err) = match &r {
            Ok(Verdict::Pass { pairs, .. }) => {
                if !transfer {
                    self.pairs += pairs;
                }
                (false, false)
            }
            Ok(Verdict::Inconclusive { .. }) => (false, false),
            Ok(Verdict::Counterexample(_)) => (true, false),
            Err(_) => (false, true),
        };
        if transfer {
            self.transfer_counterexamples += cx as usize;
            self.transfer_errors += err as usize;
        } else {
            self.counterexamples += cx as usize;
            self.errors += err as usize;
        }
        if (cx || err) && self.notes.len() < 3 {
            self.notes.push(format!("{what}: {r:?}"));
        }
    }
}

fn fg_subject(lat: &Lattice, cfg: &NiConfig, seed: u64, ni: &mut Ni) {
    let Some(FgSubject { var, secret, pc, program }) = gen_fg_subject(lat, cfg, 25, seed) else { return };
    ni.subjects += 1;
    let pairs = fg_secret_pairs(lat, &secret, cfg.samples, seed);
    ni.judge(ni_check_fg_with(lat, &program, &var, &secret, pc, cfg, &pairs), false, "fg");
    let transferred = fg_ni_to_cg(lat, &program, &var, &secret, pc).and_then(|cg| {
        let cg_pairs = fg_secrets_to_cg(lat, &pairs)?;
        ni_check_cg_with(lat, &cg, &var, &fg2cg_unlabeled(&secret.body), cfg, &cg_pairs)
    });
    ni.judge(transferred, true, "fg->cg");
}

fn cg_subject(lat: &Lattice, cfg: &NiConfig, seed: u64, ni: &mut Ni) {
    let Some(CgSubject { var, payload, program }) = gen_cg_subject(lat, cfg, 25, seed) else { return };
    ni.subjects += 1;
    let pairs = cg_secret_pairs(lat, cfg.secret_label, &payload, cfg.samples, seed);
    ni.judge(ni_check_cg_with(lat, &program, &var, &payload, cfg, &pairs), false, "cg");
    let transferred = cg_ni_to_fg(lat, &program, &var, &payload, cfg.secret_label).and_then(|fg| {
        let fg_pairs = cg_secrets_to_fg(lat, &pairs)?;
        let t = cg2fg_type(lat, &CgType::labeled(cfg.secret_label, payload.clone()));
        ni_check_fg_with(lat, &fg, &var, &t, lat.bot(), cfg, &fg_pairs)
    });
    ni.judge(transferred, true, "cg->fg");
}

fn noninterference(fg: bool) -> Ni {
    let mut ni = Ni::default();
    let mut seed = if fg { 7_000_000 } else { 8_000_000 };
    while ni.subjects < NI_SUBJECTS {
        seed += 1;
        let lat = &lattices()[(seed % 2) as usize];
        let cfg = NiConfig { samples: NI_PAIRS, seed, ..NiConfig::new(secret_label(lat), lat.bot()) };
        if fg {
            fg_subject(lat, &cfg, seed, &mut ni);
        } else {
            cg_subject(lat, &cfg, seed, &mut ni);
        }
    }
    ni
}

/// Leak fixtures rejected with the rule their header names.
fn leak_fixtures(files: &[CorpusFile]) -> (usize, Vec<String>) {
    let mut wrong = Vec::new();
    for f in files {
        let name = f.path.file_name().unwrap().to_string_lossy().to_string();
        let Some(expect) = &f.expect else {
            wrong.push(format!("{name}: no expect header"));
            continue;
        };
        let outcome = declared_secret(&f.source).and_then(|(_, secret)| {
            let cfg = NiConfig::new(secret, f.source.lattice.bot());
            precondition_source(&f.source, f.source.lattice.bot(), &cfg)
        });
        match outcome {
            Err(NiError::Precondition(e)) if e.rule == expect => {}
            other => wrong.push(format!("{name}: expected {expect}, got {other:?}")),
        }
    }
    (files.len(), wrong)
}

/// Corpus programs with a single free variable, checked for
/// noninterference at their `; observe:` label (default bottom).
fn corpus_subjects(files: &[CorpusFile]) -> (usize, Vec<String>) {
    let (mut checked, mut wrong) = (0, Vec::new());
    for f in files.iter().filter(|f| f.path.parent().is_some_and(|p| p.ends_with("programs"))) {
        let lat = &f.source.lattice;
        let free = match &f.source.program {
            Program::Fg { ctx, .. } => ctx.len(),
            Program::Cg { ctx, .. } => ctx.len(),
        };
        if free != 1 {
            continue;
        }
        let observer = f
            .text
            .lines()
            .find_map(|l| l.strip_prefix("; observe: "))
            .map(|t| ifc_core::surface::parse_label(lat, t.trim()).expect("observer label"))
            .unwrap_or(lat.bot());
        checked += 1;
        let outcome = declared_secret(&f.source).and_then(|(_, secret)| {
            ifc_harness::ni::ni_check_source(&f.source, lat.bot(), &NiConfig::new(secret, observer))
        });
        if !matches!(outcome, Ok(Verdict::Pass { .. })) {
            wrong.push(format!("{}: {outcome:?}", f.path.display()));
        }
    }
    (checked, wrong)
}

/// Parse/print round trips, and twice-translated outputs, for every corpus
/// file.
fn round_trips(files: &[CorpusFile]) -> (usize, usize, Vec<String>) {
    let (mut translated, mut failures, mut notes) = (0, 0, Vec::new());
    let mut fail = |notes: &mut Vec<String>, msg: String| {
        failures += 1;
        if notes.len() < 3 {
            notes.push(msg);
        }
    };
    for f in files {
        let name = f.path.display().to_string();
        let p = Printer::new(&f.source.lattice);
        let printed = p.source_file(&f.source);
        match parse_source(&printed) {
            Ok(again) if again.program == f.source.program && p.source_file(&again) == printed => {}
            other => fail(&mut notes, format!("{name}: round trip failed: {other:?}")),
        }
        let lat = &f.source.lattice;
        let twice = match &f.source.program {
            Program::Fg { ctx, body } => {
                let run = || fg2cg_expr(lat, ctx, lat.bot(), body).map(|r| p.cg_expr(&r.target));
                run().ok().map(|a| (a, run().ok()))
            }
            Program::Cg { ctx, body } => {
                let run = || cg2fg_expr(lat, ctx, body).map(|r| p.fg_expr(&r.target));
                run().ok().map(|a| (a, run().ok()))
            }
        };
        if let Some((a, b)) = twice {
            translated += 1;
            if Some(a) != b {
                fail(&mut notes, format!("{name}: translation is not deterministic"));
            }
        }
    }
    (translated, failures, notes)
}

/// The same checks for generated programs, printed as bare expressions.
fn generated_round_trips() -> (usize, usize, Vec<String>) {
    let (mut made, mut failures, mut notes) = (0, 0, Vec::new());
    let mut fail = |notes: &mut Vec<String>, msg: String| {
        failures += 1;
        if notes.len() < 3 {
            notes.push(msg);
        }
    };
    for seed in 0..ROUND_TRIP_SAMPLES as u64 {
        let lat = &lattices()[(seed % 2) as usize];
        let p = Printer::new(lat);
        let mut g = FgGen::new(lat, seed);
        let goal = g.random_type(2, true);
        let pc = g.src.label();
        if let Some(e) = g.program(&FgCtx::new(), pc, &goal, MAX_SIZE) {
            made += 1;
            let text = p.fg_expr(&e);
            if parse_fg_expr(lat, &text).ok().as_ref() != Some(&e) {
                fail(&mut notes, format!("fg seed {seed}: round trip failed"));
            }
            let run = || fg2cg_expr(lat, &FgCtx::new(), pc, &e).map(|r| p.cg_expr(&r.target)).ok();
            if run() != run() {
                fail(&mut notes, format!("fg seed {seed}: translation is not deterministic"));
            }
        }
        let mut g = CgGen::new(lat, seed);
        let goal = g.random_type(2, true);
        if let Some(e) = g.program(&CgCtx::new(), &goal, MAX_SIZE) {
            made += 1;
            let text = p.cg_expr(&e);
            if parse_cg_expr(lat, &text).ok().as_ref() != Some(&e) {
                fail(&mut notes, format!("cg seed {seed}: round trip failed"));
            }
            let run = || cg2fg_expr(lat, &CgCtx::new(), &e).map(|r| p.fg_expr(&r.target)).ok();
            if run() != run() {
                fail(&mut notes, format!("cg seed {seed}: translation is not deterministic"));
            }
        }
    }
    (made, failures, notes)
}

/// Dead-branch hits when running the translations of the closed, monadic
/// CG corpus programs.
fn corpus_dead_hits(files: &[CorpusFile]) -> (usize, usize) {
    let (mut runs, mut hits) = (0, 0);
    for f in files {
        if let Program::Cg { ctx, body } = &f.source.program {
            let monadic =
                ifc_core::cg::cg_typecheck(&f.source.lattice, ctx, body).is_ok_and(|t| matches!(t, CgType::Slio(..)));
            if ctx.is_empty() && monadic {
                runs += 1;
                hits += dead_hits_cg2fg(&f.source.lattice, body, DEFAULT_FUEL).unwrap_or(usize::MAX / 2);
            }
        }
    }
    (runs, hits)
}

fn main() {
    let mut report = Report { failed: false };

    let t = Instant::now();
    let (made, failures, notes) = typing_fg();
    report.line(1, failures == 0, format!("programs={made} failures={failures} {notes:?}"), t);

    let t = Instant::now();
    let (made, failures, notes) = typing_cg();
    report.line(2, failures == 0, format!("programs={made} failures={failures} {notes:?}"), t);

    let t = Instant::now();
    let fg = semantics_fg();
    let cg = semantics_cg();
    report.line(
        3,
        fg.ok() && cg.ok(),
        format!("fg2cg[{}] cg2fg[{}] {:?}{:?}", fg.summary(), cg.summary(), fg.notes, cg.notes),
        t,
    );

    let corpus = load_dir(&corpus_dir()).expect("corpus parses");
    let leaks: Vec<CorpusFile> =
        corpus.iter().filter(|f| f.path.parent().is_some_and(|p| p.ends_with("leaks"))).cloned().collect();

    let t = Instant::now();
    let fg_ni = noninterference(true);
    let cg_ni = noninterference(false);
    let (fixtures, mut wrong) = leak_fixtures(&leaks);
    let (corpus_checked, corpus_wrong) = corpus_subjects(&corpus);
    wrong.extend(corpus_wrong);
    let ok = fg_ni.counterexamples + fg_ni.errors + cg_ni.counterexamples + cg_ni.errors == 0
        && fixtures >= 20
        && wrong.is_empty();
    report.line(
        4,
        ok,
        format!(
            "fg[subjects={} pairs={} counterexamples={} errors={}] cg[subjects={} pairs={} counterexamples={} errors={}] \
             leak_fixtures={fixtures} corpus_subjects={corpus_checked} misjudged={} {:?}{:?}{wrong:?}",
            fg_ni.subjects,
            fg_ni.pairs,
            fg_ni.counterexamples,
            fg_ni.errors,
            cg_ni.subjects,
            cg_ni.pairs,
            cg_ni.counterexamples,
            cg_ni.errors,
            wrong.len(),
            fg_ni.notes,
            cg_ni.notes,
        ),
        t,
    );

    // The transferred programs were checked alongside criterion 4.
    let t = Instant::now();
    let ok =
        fg_ni.transfer_counterexamples + fg_ni.transfer_errors + cg_ni.transfer_counterexamples + cg_ni.transfer_errors
            == 0;
    report.line(
        5,
        ok,
        format!(
            "fg->cg[programs={} counterexamples={} errors={}] cg->fg[programs={} counterexamples={} errors={}]",
            fg_ni.subjects,
            fg_ni.transfer_counterexamples,
            fg_ni.transfer_errors,
            cg_ni.subjects,
            cg_ni.transfer_counterexamples,
            cg_ni.transfer_errors
        ),
        t,
    );

    let t = Instant::now();
    let size = std::env::var("IFC_EXHAUSTIVE_SIZE").ok().and_then(|s| s.parse().ok()).unwrap_or(6);
    let two = Lattice::two_point();
    let fg_t = exhaustive_fg(&two, size);
    let cg_t = exhaustive_cg(&two, size);
    let agree = fg_t.failures() + cg_t.failures() + fg_t.out_of_bounds + cg_t.out_of_bounds == 0;
    // Full coverage would need size 8; anything less is reported as partial.
    let status = match (agree, size >= 8) {
        (false, _) => "FAIL",
        (true, true) => "PASS",
        (true, false) => "PARTIAL",
    };
    report.line_as(
        6,
        agree,
        status,
        format!(
            "exhaustive size<={size} (target 8) fg[terms={} checks={} typable={} disagreements={}] \
             cg[terms={} typable={} disagreements={}] {:?}{:?}",
            fg_t.terms,
            fg_t.checks,
            fg_t.typable(),
            fg_t.failures(),
            cg_t.terms,
            cg_t.typable(),
            cg_t.failures(),
            fg_t.examples,
            cg_t.examples
        ),
        t,
    );

    let t = Instant::now();
    let (translated, failures, notes) = round_trips(&corpus);
    let (generated, gen_failures, gen_notes) = generated_round_trips();
    report.line(
        7,
        failures + gen_failures == 0,
        format!(
            "corpus_files={} translated={translated} generated={generated} failures={} {notes:?}{gen_notes:?}",
            corpus.len(),
            failures + gen_failures
        ),
        t,
    );

    let t = Instant::now();
    let (runs, hits) = corpus_dead_hits(&corpus);
    report.line(
        8,
        hits + cg.dead_hits == 0,
        format!("runs={} dead_inr_hits={}", runs + cg.samples, hits + cg.dead_hits),
        t,
    );

    if report.failed {
        std::process::exit(1);
    }
}
