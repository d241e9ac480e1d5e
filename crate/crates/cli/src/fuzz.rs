//! The `fuzz` subcommand. Each sample draws fresh programs and runs four
//! oracles on them:
//! - preservation: the translation typechecks at the translated type
//! - equivalence: a closed boolean program and its translation compute the same result
//! - ni: noninterference in the source language
//! - ni-transfer: noninterference for the translated subject
//!
//! Failing programs are written to `<replay-dir>/<unix-time>/<sample>.ifc`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ifc_core::cg::{CgCtx, CgType};
use ifc_core::cg2fg::{cg2fg_type, check_cg2fg, Cg2Fg};
use ifc_core::fg::{FgCtx, FgType};
use ifc_core::fg2cg::{check_fg2cg, fg2cg_unlabeled, Fg2Cg};
use ifc_core::surface::{Printer, Program, SourceFile};
use ifc_core::{Lattice, Mutation, DEFAULT_FUEL};
use ifc_harness::equiv::{equiv_check_cg2fg_with, equiv_check_fg2cg_with, Equiv, EquivError};
use ifc_harness::gen::{CgGen, FgGen};
use ifc_harness::ni::{
    cg_ni_to_fg, cg_secret_pairs, cg_secrets_to_fg, fg_ni_to_cg, fg_secret_pairs, fg_secrets_to_cg, gen_cg_subject,
    gen_fg_subject, ni_check_cg_with, ni_check_fg_with, NiConfig, NiError, Verdict,
};

use crate::{one_line, Direction, Failure, Lang, Outcome};

#[derive(Args)]
pub struct FuzzArgs {
    /// Source language; inferred from `--dir` when omitted, else `fg`.
    #[arg(long, value_enum)]
    lang: Option<Lang>,
    #[arg(long, value_enum)]
    dir: Option<Direction>,
    /// Number of samples.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Node budget of each generated program.
    #[arg(long, default_value_t = 30)]
    size: usize,
    #[arg(long, env = "IFC_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    ni_samples: usize,
    #[arg(long, default_value = "replays")]
    replay_dir: PathBuf,
    /// Inject a translator fault, to check that the oracles catch it.
    #[arg(long, value_enum, default_value_t = MutationArg::None, hide = true)]
    mutation: MutationArg,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MutationArg {
    None,
    SwapCase,
    DropCoerce,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::None => Mutation::None,
            MutationArg::SwapCase => Mutation::SwapCase,
            MutationArg::DropCoerce => Mutation::DropCoerce,
        }
    }
}

const ORACLES: [&str; 4] = ["preservation", "equivalence", "ni", "ni-transfer"];

/// Per-oracle counts: programs checked, failures, and passes that were
/// vacuous (both-timeout equivalence, inconclusive NI).
#[derive(Default, Clone, Copy)]
struct Count {
    checked: usize,
    failures: usize,
    vacuous: usize,
}

/// A program that failed an oracle, ready to be written out.
struct Case {
    sample: usize,
    oracle: &'static str,
    detail: String,
    file: SourceFile,
}

struct Run<'a> {
    lattice: &'a Lattice,
    mutation: Mutation,
    size: usize,
    ni_samples: usize,
    counts: [Count; 4],
    cases: Vec<Case>,
}

enum Check {
    Pass,
    Vacuous,
    Fail(String),
}

impl Run<'_> {
    fn record(&mut self, sample: usize, oracle: usize, check: Check, program: Program) {
        let c = &mut self.counts[oracle];
        c.checked += 1;
        match check {
            Check::Pass => {}
            Check::Vacuous => c.vacuous += 1,
            Check::Fail(detail) => {
                c.failures += 1;
                let file = SourceFile { lattice: self.lattice.clone(), program };
                self.cases.push(Case { sample, oracle: ORACLES[oracle], detail, file });
            }
        }
    }

    fn fg_sample(&mut self, i: usize, seed: u64) {
        let lat = self.lattice;
        let mut g = FgGen::new(lat, seed);
        let goal = g.random_type(2, true);
        let pc = g.src.label();
        if let Some(e) = g.program(&FgCtx::new(), pc, &goal, self.size) {
            let ctx = FgCtx::new();
            let r = Fg2Cg::new(lat, &ctx, &e).with_mutation(self.mutation).run(&ctx, pc, &e);
            let check = match r.and_then(|r| check_fg2cg(lat, &ctx, &r)) {
                Ok(_) => Check::Pass,
                Err(err) => Check::Fail(format!("pc={} {err}", Printer::new(lat).label(pc))),
            };
            self.record(i, 0, check, Program::Fg { ctx: FgCtx::new(), body: e });
        }

        let mut g = FgGen::new(lat, seed ^ 0x5151);
        let pc = g.src.label();
        let goal = FgType::bool(g.src.label_above(pc));
        if let Some(e) = g.program(&FgCtx::new(), pc, &goal, self.size) {
            let check = equivalence(equiv_check_fg2cg_with(lat, pc, &e, DEFAULT_FUEL, self.mutation));
            self.record(i, 1, check, Program::Fg { ctx: FgCtx::new(), body: e });
        }

        let cfg = NiConfig { samples: self.ni_samples, seed, ..NiConfig::new(lat.top(), lat.bot()) };
        if let Some(s) = gen_fg_subject(lat, &cfg, self.size, seed ^ 0xa1a1) {
            let pairs = fg_secret_pairs(lat, &s.secret, cfg.samples, seed);
            let native = ni_check_fg_with(lat, &s.program, &s.var, &s.secret, s.pc, &cfg, &pairs);
            let transferred = fg_ni_to_cg(lat, &s.program, &s.var, &s.secret, s.pc).and_then(|cg| {
                let cg_pairs = fg_secrets_to_cg(lat, &pairs)?;
                ni_check_cg_with(lat, &cg, &s.var, &fg2cg_unlabeled(&s.secret.body), &cfg, &cg_pairs)
            });
            let ctx: FgCtx = [(s.var.as_str(), s.secret.clone())].into_iter().collect();
            let program = Program::Fg { ctx, body: s.program };
            self.record(i, 2, noninterference(native), program.clone());
            self.record(i, 3, noninterference(transferred), program);
        }
    }

    fn cg_sample(&mut self, i: usize, seed: u64) {
        let lat = self.lattice;
        let mut g = CgGen::new(lat, seed);
        let goal = g.random_type(2, true);
        if let Some(e) = g.program(&CgCtx::new(), &goal, self.size) {
            let ctx = CgCtx::new();
            let r = Cg2Fg::new(lat, &ctx, &e).with_mutation(self.mutation).run(&ctx, &e);
            let check = match r.and_then(|r| check_cg2fg(lat, &ctx, &r)) {
                Ok(_) => Check::Pass,
                Err(err) => Check::Fail(err.to_string()),
            };
            self.record(i, 0, check, Program::Cg { ctx: CgCtx::new(), body: e });
        }

        let mut g = CgGen::new(lat, seed ^ 0x5151);
        let goal = CgType::slio(g.src.label(), g.src.label(), CgType::Bool);
        if let Some(e) = g.program(&CgCtx::new(), &goal, self.size) {
            let r = equiv_check_cg2fg_with(lat, &e, DEFAULT_FUEL, self.mutation);
            let check = match r {
                Ok((_, hits)) if hits > 0 => Check::Fail(format!("entered a dead inr branch {hits} times")),
                r => equivalence(r.map(|(v, _)| v)),
            };
            self.record(i, 1, check, Program::Cg { ctx: CgCtx::new(), body: e });
        }

        let secret = lat.top();
        let cfg = NiConfig { samples: self.ni_samples, seed, ..NiConfig::new(secret, lat.bot()) };
        if let Some(s) = gen_cg_subject(lat, &cfg, self.size, seed ^ 0xa1a1) {
            let pairs = cg_secret_pairs(lat, secret, &s.payload, cfg.samples, seed);
            let native = ni_check_cg_with(lat, &s.program, &s.var, &s.payload, &cfg, &pairs);
            let transferred = cg_ni_to_fg(lat, &s.program, &s.var, &s.payload, secret).and_then(|fg| {
                let fg_pairs = cg_secrets_to_fg(lat, &pairs)?;
                let t = cg2fg_type(lat, &CgType::labeled(secret, s.payload.clone()));
                ni_check_fg_with(lat, &fg, &s.var, &t, lat.bot(), &cfg, &fg_pairs)
            });
            let ctx: CgCtx = [(s.var.as_str(), CgType::labeled(secret, s.payload.clone()))].into_iter().collect();
            let program = Program::Cg { ctx, body: s.program };
            self.record(i, 2, noninterference(native), program.clone());
            self.record(i, 3, noninterference(transferred), program);
        }
    }
}

fn equivalence(r: Result<Equiv, EquivError>) -> Check {
    match r {
        Ok(Equiv::Agree(Some(_))) => Check::Pass,
        Ok(Equiv::Agree(None) | Equiv::OneSidedTimeout { .. }) => Check::Vacuous,
        Ok(Equiv::Disagree { source, target }) => Check::Fail(format!("source={source} target={target}")),
        Err(e) => Check::Fail(e.to_string()),
    }
}

fn noninterference(r: Result<Verdict, NiError>) -> Check {
    match r {
        Ok(Verdict::Pass { .. }) => Check::Pass,
        Ok(Verdict::Inconclusive { .. }) => Check::Vacuous,
        Ok(v @ Verdict::Counterexample(_)) => Check::Fail(v.to_string()),
        Err(e) => Check::Fail(e.to_string()),
    }
}

fn write_replays(root: &std::path::Path, lattice: &Lattice, cases: &[Case]) -> std::io::Result<PathBuf> {
    let stamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let dir = root.join(stamp.to_string());
    std::fs::create_dir_all(&dir)?;
    let p = Printer::new(lattice);
    for c in cases {
        let mut text = String::new();
        let _ = writeln!(text, "; oracle: {}", c.oracle);
        let _ = writeln!(text, "; sample: {}", c.sample);
        let _ = writeln!(text, "; detail: {}", one_line(&c.detail));
        text.push_str(&p.source_file(&c.file));
        text.push('\n');
        // Several oracles can fail on one sample.
        let mut path = dir.join(format!("{}.ifc", c.sample));
        let mut k = 1;
        while path.exists() {
            path = dir.join(format!("{}-{k}.ifc", c.sample));
            k += 1;
        }
        std::fs::write(path, text)?;
    }
    Ok(dir)
}

fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

pub fn fuzz(lattice: Lattice, args: &FuzzArgs) -> Outcome {
    let lang = match (args.lang, args.dir) {
        (Some(l), Some(d)) if d.source() != l => {
            return Err(Failure::new(
                2,
                "usage",
                format!("--dir {} translates out of {}", d.name(), d.source().name()),
            ));
        }
        (Some(l), _) => l,
        (None, Some(d)) => d.source(),
        (None, None) => Lang::Fg,
    };
    let mut run = Run {
        lattice: &lattice,
        mutation: args.mutation.into(),
        size: args.size,
        ni_samples: args.ni_samples,
        counts: [Count::default(); 4],
        cases: Vec::new(),
    };
    for i in 0..args.n {
        let seed = sample_seed(args.seed, i);
        match lang {
            Lang::Fg => run.fg_sample(i, seed),
            Lang::Cg => run.cg_sample(i, seed),
        }
    }

    println!("lang={}", lang.name());
    println!("dir={}", Direction::from_source(lang).name());
    println!("lattice={}", lattice.describe());
    println!("seed={}", args.seed);
    println!("n={}", args.n);
    println!("size={}", args.size);
    for (name, c) in ORACLES.iter().zip(run.counts) {
        println!("oracle={name} checked={} failures={} vacuous={}", c.checked, c.failures, c.vacuous);
    }
    let failures: usize = run.counts.iter().map(|c| c.failures).sum();
    println!("failures={failures}");
    if failures == 0 {
        return Ok(());
    }
    let dir = write_replays(&args.replay_dir, &lattice, &run.cases)
        .map_err(|e| Failure::new(5, "io", format!("could not write replays: {e}")))?;
    println!("replays={}", dir.display());
    Err(Failure { code: 5, records: vec!["error=oracle".into(), format!("failures={failures}")] })
}
