//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cocite", version, about = "Map citation data with MDS, factor analysis and network layout")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a co-occurrence matrix from citing-document records.
    Build {
        #[command(flatten)]
        input: InputArgs,
        /// Sum count products instead of counting shared documents.
        #[arg(long)]
        affiliations: bool,
        #[command(flatten)]
        opts: Options,
    },
    /// Derive a proximity matrix.
    Prox {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        measure: Measure,
        #[command(flatten)]
        opts: Options,
    },
    /// Multidimensional scaling of a proximity matrix.
    Mds {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        opts: Options,
    },
    /// Principal-component factor analysis of an occurrence matrix.
    Factor {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        opts: Options,
    },
    /// Spring-embedder layout of a co-occurrence network.
    Layout {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        opts: Options,
    },
    /// Run a chain of steps, e.g. `--steps pearson,shift,mds`.
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        steps: Vec<StepName>,
        #[command(flatten)]
        opts: Options,
    },
    /// Reproduce one of the bundled demonstrations.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input file, or `builtin:cities`, `builtin:figure1`, `builtin:figure2`.
    pub input: String,
    /// Overrides the format guessed from the file name and first step.
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}

#[derive(Debug, Args, Clone)]
pub struct Options {
    #[arg(long, value_enum)]
    pub level: Option<Level>,
    /// Kind of a proximity CSV input; also overrides the kind seen by MDS.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Number of factors, or `auto` for eigenvalues above 1.
    #[arg(long, default_value = "auto", value_parser = parse_factors)]
    pub factors: Factors,
    #[arg(long, value_enum, default_value_t = Rotate::Varimax)]
    pub rotate: Rotate,
    /// Kaiser row normalization during varimax (default).
    #[arg(long, overrides_with = "no_kaiser")]
    pub kaiser: bool,
    #[arg(long, overrides_with = "kaiser")]
    pub no_kaiser: bool,
    /// Minimum co-occurrence count for a network edge.
    #[arg(long, default_value_t = 1)]
    pub threshold: u64,
    #[arg(long, value_enum, default_value_t = Diag::Raw)]
    pub diag: Diag,
    #[arg(long, value_enum, default_value_t = InitArg::Classical)]
    pub init: InitArg,
    /// SMACOF iteration cap.
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
    /// SMACOF stops once stress improves by less than this.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Required with `--init random`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Constant for to-dissimilarity; the largest similarity when omitted.
    #[arg(long)]
    pub constant: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: std::path::PathBuf,
}

impl Options {
    pub fn kaiser_normalize(&self) -> bool {
        !self.no_kaiser
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factors {
    Auto,
    Fixed(usize),
}

fn parse_factors(s: &str) -> Result<Factors, String> {
    if s == "auto" {
        return Ok(Factors::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Factors::Fixed(n)),
        _ => Err(format!("expected a positive integer or `auto`, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Ratio,
    Interval,
    Ordinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Sim,
    Dissim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rotate {
    None,
    Varimax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Diag {
    Raw,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Classical,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// `doc_id<TAB>label[:count];...` lines.
    Records,
    /// Documents × attributes CSV.
    Occurrence,
    /// Symmetric count CSV.
    Cooccurrence,
    /// Symmetric real CSV.
    Proximity,
    /// Pajek `.net` network.
    Pajek,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepName {
    Cooccurrence,
    Affiliations,
    Pearson,
    Shift,
    Cosine,
    Jaccard,
    Euclidean,
    ToDissimilarity,
    Mds,
    Factor,
    Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Pearson,
    Shift,
    Cosine,
    Jaccard,
    Euclidean,
    ToDissimilarity,
}

impl From<Measure> for StepName {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Pearson => StepName::Pearson,
            Measure::Shift => StepName::Shift,
            Measure::Cosine => StepName::Cosine,
            Measure::Jaccard => StepName::Jaccard,
            Measure::Euclidean => StepName::Euclidean,
            Measure::ToDissimilarity => StepName::ToDissimilarity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    CitiesCorrect,
    CitiesDistorted,
    Figure3,
}
