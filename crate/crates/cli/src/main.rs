use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use opberg_bench::{bench_one, CountingAlloc};
use opberg_core::corpus::Corpus;
use opberg_core::{
    read_corpus, AlignmentResult, Alphabet, BetaMode, ClassifierParams, Decision, GammaSpec, GapModel, Label,
    LabeledCorpus, Metrics, Mode, Normalization, OpbergParams, Score, ScoringScheme, SegmentStart, Threshold, TokenSeq,
};
use serde_json::json;

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

#[derive(Parser)]
#[command(name = "opberg", version, about = "Multi-segment POS sequence alignment and causal sentence classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align two tag sequences.
    Align(AlignCmd),
    /// Label each input sentence as causal or noncausal.
    Classify(ClassifyCmd),
    /// Time the engines on seeded random sequences; prints CSV.
    Bench(BenchCmd),
    /// Classify a labeled test corpus and report accuracy metrics.
    Eval(EvalCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Tsv,
}

#[derive(Args, Clone)]
struct ScoreArgs {
    /// Score for identical tags.
    #[arg(long = "match", default_value_t = 2, allow_negative_numbers = true)]
    match_score: Score,
    /// Score for differing tags.
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    mismatch: Score,
    /// Substitution matrix file; overrides --match/--mismatch.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Linear gap cost per column [default: -1].
    #[arg(long, allow_negative_numbers = true)]
    gap: Option<Score>,
    /// Affine gap open cost [default: -2].
    #[arg(long, allow_negative_numbers = true)]
    gap_open: Option<Score>,
    /// Affine gap extend cost [default: -1].
    #[arg(long, allow_negative_numbers = true)]
    gap_extend: Option<Score>,
    /// Penalty per additional segment; -inf disables jumps.
    #[arg(long, default_value = "-3", allow_hyphen_values = true)]
    jump_penalty: Threshold,
    /// Break threshold.
    #[arg(long, default_value = "4", allow_hyphen_values = true)]
    alpha: Threshold,
    /// Start threshold.
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    beta: Threshold,
    /// absolute or relative.
    #[arg(long, default_value = "absolute")]
    beta_mode: BetaMode,
    /// zero, identity, shortfall, or linear:C.
    #[arg(long, default_value = "shortfall")]
    gamma: GammaSpec,
    /// Segment budget for --mode naive [default: longer input length].
    #[arg(long)]
    k_max: Option<usize>,
}

impl ScoreArgs {
    fn gaps(&self, mode: Mode) -> GapModel {
        if self.gap_open.is_some() || self.gap_extend.is_some() {
            let d = GapModel::default();
            GapModel::affine(self.gap_open.unwrap_or(d.open), self.gap_extend.unwrap_or(d.extend))
        } else if self.gap.is_some() || mode == Mode::Naive {
            GapModel::linear(self.gap.unwrap_or(GapModel::default().linear))
        } else {
            GapModel::default()
        }
    }

    fn scheme(&self, alphabet: &mut Alphabet) -> anyhow::Result<ScoringScheme> {
        match &self.matrix {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(ScoringScheme::parse_matrix(&text, alphabet)?)
            }
            None => Ok(ScoringScheme::uniform(self.match_score, self.mismatch)),
        }
    }

    fn params(&self) -> anyhow::Result<OpbergParams> {
        let p = OpbergParams {
            jump_penalty: self.jump_penalty,
            alpha: self.alpha,
            beta: self.beta,
            beta_mode: self.beta_mode,
            gamma: self.gamma,
            k_max: self.k_max,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
    /// Seed for generated data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads [default: all cores].
    #[arg(long)]
    threads: Option<usize>,
    /// Fail on the first malformed corpus line instead of skipping it.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct AlignCmd {
    #[arg(long, default_value = "opberg")]
    mode: Mode,
    /// Comma-separated tags.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Corpus to look up --a-id and --b-id in.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    a_id: Option<String>,
    #[arg(long, requires = "input")]
    b_id: Option<String>,
    #[command(flatten)]
    score: ScoreArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct ClassifierArgs {
    /// Similarity threshold; accepts inf and -inf.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    #[arg(long, default_value = "by_shorter")]
    normalize: Normalization,
    /// Report below-threshold wins as noncausal rather than abstain.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    abstain_as_negative: bool,
    #[arg(long)]
    train: PathBuf,
}

#[derive(Args)]
struct ClassifyCmd {
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    score: ScoreArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct EvalCmd {
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[arg(long)]
    test: PathBuf,
    #[command(flatten)]
    score: ScoreArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct BenchCmd {
    #[arg(long, value_delimiter = ',', default_value = "naive,opberg")]
    modes: Vec<Mode>,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    sizes: Vec<usize>,
    /// Timed repetitions per row; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 4)]
    alphabet_size: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let out = io::stdout();
    let mut out = io::BufWriter::new(out.lock());
    let res = match cli.command {
        Command::Align(c) => align(c, &mut out),
        Command::Classify(c) => classify(c, &mut out),
        Command::Bench(c) => bench(c, &mut out),
        Command::Eval(c) => eval(c, &mut out),
    };
    match res.and_then(|_| out.flush().map_err(Into::into)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn split_tags(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn load(path: &PathBuf, strict: bool) -> anyhow::Result<Corpus> {
    read_corpus(path, strict).with_context(|| format!("reading corpus {}", path.display()))
}

fn thread_pool(threads: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n.max(1));
    }
    Ok(b.build()?)
}

fn align(c: AlignCmd, out: &mut impl Write) -> anyhow::Result<()> {
    let mut alphabet = Alphabet::new();
    let scheme = c.score.scheme(&mut alphabet)?;
    let gaps = c.score.gaps(c.mode);
    let params = c.score.params()?;
    let (a, b) = match (&c.input, &c.a, &c.b) {
        (Some(path), _, _) => {
            let (Some(a_id), Some(b_id)) = (&c.a_id, &c.b_id) else {
                bail!("--input needs --a-id and --b-id");
            };
            let corpus = load(path, c.run.strict)?;
            let find = |id: &str| {
                corpus
                    .records
                    .iter()
                    .find(|r| r.id == id)
                    .ok_or_else(|| anyhow!("no record {id:?} in {}", path.display()))
            };
            let (ra, rb) = (find(a_id)?, find(b_id)?);
            (alphabet.intern(&ra.pos).with_source(a_id.clone()), alphabet.intern(&rb.pos).with_source(b_id.clone()))
        }
        (None, Some(a), Some(b)) => (alphabet.intern(&split_tags(a)), alphabet.intern(&split_tags(b))),
        _ => bail!("give --a and --b, or --input with --a-id and --b-id"),
    };
    if matches!(scheme, ScoringScheme::Matrix { .. }) {
        scheme.check_tokens(&a.tokens)?;
        scheme.check_tokens(&b.tokens)?;
    }
    let res = match c.mode {
        Mode::Naive if gaps.open != 0 => bail!("naive mode takes linear gaps only (--gap)"),
        mode => opberg_bench::run_mode(mode, &a, &b, &scheme, &gaps, &params)?,
    };
    match c.run.emit {
        Emit::Json => {
            serde_json::to_writer(&mut *out, &res)?;
            writeln!(out)?;
        }
        Emit::Tsv => write_align_tsv(&res, out)?,
    }
    Ok(())
}

fn write_align_tsv(res: &AlignmentResult, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "mode\t{}", res.mode)?;
    writeln!(out, "total_score\t{}", res.total_score)?;
    writeln!(out, "k\t{}", res.k)?;
    writeln!(out, "#segment\ta_start\ta_end\tb_start\tb_end\tscore\tscore_length\tstart\tgated\tcigar")?;
    for s in &res.segments {
        writeln!(
            out,
            "segment\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.a_start,
            s.a_end,
            s.b_start,
            s.b_end,
            s.segment_score,
            s.score_length,
            if s.start == SegmentStart::Jump { "jump" } else { "fresh" },
            s.gated,
            opberg_core::result::cigar(&s.ops)
        )?;
    }
    for (i, j) in &res.breakpoints {
        writeln!(out, "breakpoint\t{i}\t{j}")?;
    }
    Ok(())
}

struct Setup {
    alphabet: Alphabet,
    train: LabeledCorpus,
    params: ClassifierParams,
}

fn setup(classifier: &ClassifierArgs, score: &ScoreArgs, strict: bool) -> anyhow::Result<Setup> {
    let mut alphabet = Alphabet::new();
    let scheme = score.scheme(&mut alphabet)?;
    let train = load(&classifier.train, strict)?;
    let train = LabeledCorpus::from_records(&train.records, &mut alphabet)?;
    if train.positives.is_empty() || train.negatives.is_empty() {
        bail!("training corpus needs both causal and noncausal records");
    }
    let params = ClassifierParams {
        delta_c: classifier.delta,
        scheme,
        gaps: score.gaps(Mode::Opberg),
        opberg: score.params()?,
        normalization: classifier.normalize,
        abstain_as_negative: classifier.abstain_as_negative,
    };
    Ok(Setup { alphabet, train, params })
}

fn decision_json(id: &str, d: &Decision) -> serde_json::Value {
    json!({
        "id": id,
        "label": d.label.to_string(),
        "best_positive": {"id": d.best_positive.source_id, "similarity": d.best_positive.similarity.value()},
        "best_negative": {"id": d.best_negative.source_id, "similarity": d.best_negative.similarity.value()},
    })
}

fn write_decisions(ids: &[&str], decisions: &[Decision], emit: Emit, out: &mut impl Write) -> io::Result<()> {
    for (id, d) in ids.iter().zip(decisions) {
        match emit {
            Emit::Json => {
                serde_json::to_writer(&mut *out, &decision_json(id, d))?;
                writeln!(out)?;
            }
            Emit::Tsv => writeln!(
                out,
                "{id}\t{}\t{}\t{}\t{}\t{}",
                d.label,
                d.best_positive.source_id,
                d.best_positive.similarity,
                d.best_negative.source_id,
                d.best_negative.similarity
            )?,
        }
    }
    Ok(())
}

fn classify(c: ClassifyCmd, out: &mut impl Write) -> anyhow::Result<()> {
    let Setup { mut alphabet, train, params } = setup(&c.classifier, &c.score, c.run.strict)?;
    let input = load(&c.input, c.run.strict)?;
    let seqs: Vec<TokenSeq> = input.records.iter().map(|r| alphabet.intern(&r.pos).with_source(r.id.clone())).collect();
    let decisions = thread_pool(c.run.threads)?.install(|| opberg_core::classify_all(&seqs, &train, &params))?;
    let ids: Vec<&str> = input.records.iter().map(|r| r.id.as_str()).collect();
    write_decisions(&ids, &decisions, c.run.emit, out)?;
    Ok(())
}

fn eval(c: EvalCmd, out: &mut impl Write) -> anyhow::Result<()> {
    let Setup { mut alphabet, train, params } = setup(&c.classifier, &c.score, c.run.strict)?;
    let test = load(&c.test, c.run.strict)?;
    if test.records.is_empty() {
        bail!("test corpus {} is empty", c.test.display());
    }
    let mut items = Vec::with_capacity(test.records.len());
    for r in &test.records {
        let truth = match r.label {
            Label::Causal => true,
            Label::NonCausal => false,
            Label::Unlabeled => bail!("test record {:?} has no label", r.id),
        };
        items.push((alphabet.intern(&r.pos).with_source(r.id.clone()), truth));
    }
    let (_, m) = thread_pool(c.run.threads)?.install(|| opberg_core::evaluate(&items, &train, &params))?;
    match c.run.emit {
        Emit::Json => {
            serde_json::to_writer(&mut *out, &m)?;
            writeln!(out)?;
        }
        Emit::Tsv => write_metrics_table(&m, out)?,
    }
    Ok(())
}

fn write_metrics_table(m: &Metrics, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "              predicted")?;
    writeln!(out, "              causal  noncausal")?;
    writeln!(out, "causal     {:>9} {:>10}", m.tp, m.fn_)?;
    writeln!(out, "noncausal  {:>9} {:>10}", m.fp, m.tn)?;
    writeln!(out)?;
    writeln!(out, "precision\t{:.4}", m.precision)?;
    writeln!(out, "recall\t{:.4}", m.recall)?;
    writeln!(out, "f1\t{:.4}", m.f1)?;
    writeln!(out, "accuracy\t{:.4}", m.accuracy)?;
    if m.abstained > 0 {
        writeln!(out, "abstained\t{}", m.abstained)?;
    }
    Ok(())
}

fn bench(c: BenchCmd, out: &mut impl Write) -> anyhow::Result<()> {
    writeln!(out, "mode,n,wall_time,peak_bytes")?;
    for &mode in &c.modes {
        for &n in &c.sizes {
            let row = bench_one(mode, n, c.reps, c.seed, c.alphabet_size.max(1))?;
            writeln!(out, "{},{},{:.6},{}", row.mode, row.n, row.wall_time.as_secs_f64(), row.peak_bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}
