//! Step chaining: static validation, input loading and execution.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cocite::factor::{pca_from_occurrence, varimax, FactorCount};
use cocite::ingest::{
    builtin_source, parse_cooccurrence_csv, parse_occurrence_csv, parse_proximity_csv, parse_records,
    serialize_cooccurrence_csv, serialize_proximity_csv,
};
use cocite::layout::{
    export_pajek, export_svg, graph_from_cooccurrence, import_pajek, kamada_kawai, KamadaKawaiConfig, SvgStyle,
    WeightedGraph,
};
use cocite::mds::{mds, Configuration, Init, MdsConfig};
use cocite::proximity::{
    cosine_columns, euclidean_columns, jaccard_columns, pearson_columns, pearson_of_proximities, shift_pearson,
    to_dissimilarity, DissimilarityConstant,
};
use cocite::{
    affiliations, cooccurrence, CooccurrenceMatrix, DiagonalPolicy, MeasurementLevel, OccurrenceMatrix,
    ProximityKind, ProximityMatrix,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{Diag, Factors, InitArg, InputFormat, Kind, Level, Options, Rotate, StepName};

/// Invocation problems found before any computation; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Static type of the value flowing between steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Occurrence,
    Cooccurrence,
    Proximity(ProximityKind),
    Graph,
    /// Output of mds, factor or layout; nothing may follow.
    Terminal,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Occurrence => f.write_str("an occurrence matrix"),
            Ty::Cooccurrence => f.write_str("a co-occurrence matrix"),
            Ty::Proximity(k) => write!(f, "a {k} matrix"),
            Ty::Graph => f.write_str("a network"),
            Ty::Terminal => f.write_str("a final result"),
        }
    }
}

pub fn step_label(s: StepName) -> &'static str {
    match s {
        StepName::Cooccurrence => "cooccurrence",
        StepName::Affiliations => "affiliations",
        StepName::Pearson => "pearson",
        StepName::Shift => "shift",
        StepName::Cosine => "cosine",
        StepName::Jaccard => "jaccard",
        StepName::Euclidean => "euclidean",
        StepName::ToDissimilarity => "to-dissimilarity",
        StepName::Mds => "mds",
        StepName::Factor => "factor",
        StepName::Layout => "layout",
    }
}

use ProximityKind::{Dissimilarity, Similarity};

fn output_type(step: StepName, input: Ty) -> Option<Ty> {
    use StepName as S;
    use Ty as T;
    match (step, input) {
        (S::Cooccurrence | S::Affiliations, T::Occurrence) => Some(T::Cooccurrence),
        (S::Pearson, T::Occurrence | T::Cooccurrence | T::Proximity(_)) => Some(T::Proximity(Similarity)),
        (S::Shift, T::Proximity(Similarity)) => Some(T::Proximity(Similarity)),
        (S::Cosine | S::Jaccard, T::Occurrence) => Some(T::Proximity(Similarity)),
        (S::Euclidean, T::Occurrence) => Some(T::Proximity(Dissimilarity)),
        (S::ToDissimilarity, T::Cooccurrence | T::Proximity(Similarity)) => Some(T::Proximity(Dissimilarity)),
        (S::Mds, T::Cooccurrence | T::Proximity(_)) => Some(T::Terminal),
        (S::Factor, T::Occurrence) => Some(T::Terminal),
        (S::Layout, T::Cooccurrence | T::Graph) => Some(T::Terminal),
        _ => None,
    }
}

fn accepted(step: StepName) -> &'static str {
    match step {
        StepName::Cooccurrence | StepName::Affiliations => "an occurrence matrix",
        StepName::Pearson => "an occurrence, co-occurrence or proximity matrix",
        StepName::Shift => "a similarity matrix",
        StepName::Cosine | StepName::Jaccard | StepName::Euclidean | StepName::Factor => "an occurrence matrix",
        StepName::ToDissimilarity => "a similarity or co-occurrence matrix",
        StepName::Mds => "a proximity or co-occurrence matrix",
        StepName::Layout => "a co-occurrence matrix or network",
    }
}

/// Checks that every step can consume what the previous one produces.
pub fn validate(input: Ty, steps: &[StepName]) -> Result<(), UsageError> {
    if steps.is_empty() {
        return Err(UsageError("no steps given".into()));
    }
    let mut ty = input;
    for (i, &step) in steps.iter().enumerate() {
        ty = output_type(step, ty).ok_or_else(|| {
            UsageError(format!(
                "step {} ({}) expects {} but receives {}",
                i + 1,
                step_label(step),
                accepted(step),
                ty
            ))
        })?;
    }
    Ok(())
}

/// Where the data comes from and how to read it.
#[derive(Debug, Clone)]
pub struct Source {
    pub name: String,
    pub format: InputFormat,
    pub kind: ProximityKind,
}

impl Source {
    pub fn ty(&self) -> Ty {
        match self.format {
            InputFormat::Records | InputFormat::Occurrence => Ty::Occurrence,
            InputFormat::Cooccurrence => Ty::Cooccurrence,
            InputFormat::Proximity => Ty::Proximity(self.kind),
            InputFormat::Pajek => Ty::Graph,
        }
    }
}

fn preferred_csv(step: StepName) -> InputFormat {
    match step {
        StepName::Shift | StepName::ToDissimilarity | StepName::Mds => InputFormat::Proximity,
        StepName::Layout => InputFormat::Cooccurrence,
        _ => InputFormat::Occurrence,
    }
}

/// Resolves the input format: explicit flag, builtin, file extension, then
/// what the first step consumes.
pub fn resolve_source(
    name: &str,
    explicit: Option<InputFormat>,
    kind: Option<Kind>,
    first: StepName,
) -> Result<Source, UsageError> {
    let builtin = name.strip_prefix("builtin:");
    let (format, default_kind) = match builtin {
        Some("cities") => (InputFormat::Proximity, Dissimilarity),
        Some("figure1") => (InputFormat::Cooccurrence, Similarity),
        Some("figure2") => (InputFormat::Records, Similarity),
        Some(other) => {
            return Err(UsageError(format!("unknown builtin dataset {other:?}; expected cities, figure1 or figure2")))
        }
        None => {
            let ext = Path::new(name).extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
            let guessed = match ext.as_str() {
                "net" => InputFormat::Pajek,
                "tsv" | "txt" | "records" => InputFormat::Records,
                _ => preferred_csv(first),
            };
            (explicit.unwrap_or(guessed), Dissimilarity)
        }
    };
    if builtin.is_some() && explicit.is_some_and(|f| f != format) {
        return Err(UsageError(format!("builtin {name} cannot be read as {:?}", explicit.unwrap())));
    }
    let kind = match kind {
        Some(Kind::Sim) => Similarity,
        Some(Kind::Dissim) => Dissimilarity,
        None => default_kind,
    };
    Ok(Source { name: name.to_string(), format, kind })
}

/// A value between steps.
pub enum Data {
    Occurrence(OccurrenceMatrix),
    Cooccurrence(CooccurrenceMatrix),
    Proximity(ProximityMatrix),
    /// Imported coordinates are discarded; layout recomputes them.
    Graph(WeightedGraph),
    Terminal,
}

fn level_of(l: Option<Level>) -> Option<MeasurementLevel> {
    l.map(|l| match l {
        Level::Ratio => MeasurementLevel::Ratio,
        Level::Interval => MeasurementLevel::Interval,
        Level::Ordinal => MeasurementLevel::Ordinal,
    })
}

fn policy(d: Diag) -> DiagonalPolicy {
    match d {
        Diag::Raw => DiagonalPolicy::Raw,
        Diag::Zero => DiagonalPolicy::Zeroed,
    }
}

/// Reads the input; returns the data and the SHA-256 of its bytes.
pub fn load(source: &Source, opts: &Options) -> Result<(Data, String)> {
    let text = match source.name.strip_prefix("builtin:") {
        Some(b) => builtin_source(b).map_err(cocite::Error::from)?.to_string(),
        None => fs::read_to_string(&source.name).with_context(|| format!("io: reading {}", source.name))?,
    };
    let digest: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    let level = level_of(opts.level).unwrap_or_default();
    let data = match source.format {
        InputFormat::Records => Data::Occurrence(parse_records(&text).map_err(cocite::Error::from)?),
        InputFormat::Occurrence => Data::Occurrence(parse_occurrence_csv(&text).map_err(cocite::Error::from)?),
        InputFormat::Cooccurrence => {
            // the bundled matrix leaves its diagonal empty
            let p = if source.name == "builtin:figure1" { DiagonalPolicy::Zeroed } else { policy(opts.diag) };
            Data::Cooccurrence(parse_cooccurrence_csv(&text, p).map_err(cocite::Error::from)?)
        }
        InputFormat::Proximity => Data::Proximity(parse_proximity_csv(&text, source.kind, level).map_err(cocite::Error::from)?),
        InputFormat::Pajek => {
            let (g, _) = import_pajek(&text).map_err(cocite::Error::from)?;
            Data::Graph(g)
        }
    };
    Ok((data, digest))
}

/// Outcome of one step for the report.
pub struct StepOutcome {
    pub step: &'static str,
    pub results: Value,
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

pub struct Runner<'a> {
    pub opts: &'a Options,
    pub out: PathBuf,
    /// Prefix artifact names with the step number.
    pub numbered: bool,
}

impl Runner<'_> {
    fn path(&self, index: usize, name: &str) -> PathBuf {
        if self.numbered {
            self.out.join(format!("{:02}-{name}", index + 1))
        } else {
            self.out.join(name)
        }
    }

    fn write(&self, index: usize, name: &str, contents: &str, artifacts: &mut Vec<PathBuf>) -> Result<()> {
        let path = self.path(index, name);
        fs::write(&path, contents).with_context(|| format!("io: writing {}", path.display()))?;
        artifacts.push(path);
        Ok(())
    }

    pub fn mds_config(&self) -> MdsConfig {
        let init = match (self.opts.init, self.opts.seed) {
            (InitArg::Random, Some(seed)) => Init::Random { seed },
            _ => Init::Classical,
        };
        MdsConfig {
            dimensions: self.opts.dims,
            level: level_of(self.opts.level),
            kind_override: self.opts.kind.map(|k| if k == Kind::Sim { Similarity } else { Dissimilarity }),
            init,
            max_iterations: self.opts.max_iterations,
            epsilon: self.opts.epsilon,
        }
    }

    /// Runs the steps in order, writing each step's artifacts.
    pub fn run(&self, mut data: Data, steps: &[StepName]) -> Result<Vec<StepOutcome>> {
        fs::create_dir_all(&self.out).with_context(|| format!("io: creating {}", self.out.display()))?;
        let mut outcomes = Vec::new();
        for (i, &step) in steps.iter().enumerate() {
            let (next, outcome) = self.step(i, step, data)?;
            data = next;
            outcomes.push(outcome);
        }
        Ok(outcomes)
    }

    fn step(&self, i: usize, step: StepName, data: Data) -> Result<(Data, StepOutcome)> {
        let label = step_label(step);
        let mut artifacts = Vec::new();
        let (next, results, summary) = match (step, data) {
            (StepName::Cooccurrence | StepName::Affiliations, Data::Occurrence(a)) => {
                let c = if step == StepName::Cooccurrence {
                    cooccurrence(&a, policy(self.opts.diag))
                } else {
                    let c = affiliations(&a).map_err(cocite::Error::from)?;
                    if self.opts.diag == Diag::Zero { c.with_diagonal_policy(DiagonalPolicy::Zeroed) } else { c }
                };
                self.write(i, &format!("{label}.csv"), &serialize_cooccurrence_csv(&c).map_err(cocite::Error::from)?, &mut artifacts)?;
                let summary = format!("{label}: {} x {} from {} documents", c.len(), c.len(), a.n_docs());
                let results = json!({ "documents": a.n_docs(), "attributes": a.n_attrs() });
                (Data::Cooccurrence(c), results, summary)
            }
            (StepName::Mds, Data::Proximity(p)) => self.run_mds(i, &p, &mut artifacts)?,
            (StepName::Mds, Data::Cooccurrence(c)) => {
                self.run_mds(i, &c.to_proximity(level_of(self.opts.level).unwrap_or_default()), &mut artifacts)?
            }
            (StepName::Factor, Data::Occurrence(a)) => self.run_factor(i, &a, &mut artifacts)?,
            (StepName::Layout, Data::Cooccurrence(c)) => {
                let g = graph_from_cooccurrence(&c, self.opts.threshold).map_err(cocite::Error::from)?;
                self.run_layout(i, &g, &mut artifacts)?
            }
            (StepName::Layout, Data::Graph(g)) => self.run_layout(i, &g, &mut artifacts)?,
            (step, data) => {
                let p = self.proximity_step(step, data)?;
                self.write(i, &format!("{label}.csv"), &serialize_proximity_csv(&p).map_err(cocite::Error::from)?, &mut artifacts)?;
                let summary = format!("{label}: {} x {} {} matrix", p.len(), p.len(), p.kind());
                let results = json!({ "size": p.len(), "kind": p.kind().to_string() });
                (Data::Proximity(p), results, summary)
            }
        };
        Ok((next, StepOutcome { step: label, results, artifacts, summary }))
    }

    fn proximity_step(&self, step: StepName, data: Data) -> Result<ProximityMatrix> {
        let level = level_of(self.opts.level).unwrap_or_default();
        let p = match (step, data) {
            (StepName::Pearson, Data::Occurrence(a)) => pearson_columns(&a).map_err(cocite::Error::from)?,
            (StepName::Pearson, Data::Proximity(p)) => {
                log::warn!("correlating a proximity matrix distorts the structure it describes");
                pearson_of_proximities(&p).map_err(cocite::Error::from)?
            }
            (StepName::Pearson, Data::Cooccurrence(c)) => {
                log::warn!("correlating a proximity matrix distorts the structure it describes");
                pearson_of_proximities(&c.to_proximity(level)).map_err(cocite::Error::from)?
            }
            (StepName::Shift, Data::Proximity(p)) => shift_pearson(&p).map_err(cocite::Error::from)?,
            (StepName::Cosine, Data::Occurrence(a)) => cosine_columns(&a).map_err(cocite::Error::from)?,
            (StepName::Jaccard, Data::Occurrence(a)) => jaccard_columns(&a),
            (StepName::Euclidean, Data::Occurrence(a)) => euclidean_columns(&a),
            (StepName::ToDissimilarity, data) => {
                let s = match data {
                    Data::Proximity(p) => p,
                    Data::Cooccurrence(c) => c.to_proximity(level),
                    _ => unreachable!("rejected by validate"),
                };
                let constant = self.opts.constant.map_or(DissimilarityConstant::Auto, DissimilarityConstant::Fixed);
                to_dissimilarity(&s, constant).map_err(cocite::Error::from)?
            }
            _ => unreachable!("rejected by validate"),
        };
        Ok(match self.opts.level {
            Some(_) => p.with_level(level),
            None => p,
        })
    }

    fn run_mds(&self, i: usize, p: &ProximityMatrix, artifacts: &mut Vec<PathBuf>) -> Result<(Data, Value, String)> {
        let cfg = self.mds_config();
        let c = mds(p, &cfg).map_err(cocite::Error::from)?;
        self.write(i, "coordinates.csv", &coordinates_csv(&c), artifacts)?;
        self.write(i, "map.svg", &map_svg(&c)?, artifacts)?;
        let results = json!({
            "stress": c.stress,
            "kruskal_stress_1": c.kruskal_stress(),
            "iterations": c.iterations_used,
            "converged": c.converged,
            "level": c.level.to_string(),
            "dimensions": c.coords.ncols(),
        });
        let summary = format!(
            "mds: normalized raw stress {:.6} (Kruskal stress-1 {:.6}), {} iterations, {}",
            c.stress,
            c.kruskal_stress(),
            c.iterations_used,
            if c.converged { "converged" } else { "iteration limit reached" }
        );
        Ok((Data::Terminal, results, summary))
    }

    fn run_factor(&self, i: usize, a: &OccurrenceMatrix, artifacts: &mut Vec<PathBuf>) -> Result<(Data, Value, String)> {
        let count = match self.opts.factors {
            Factors::Auto => FactorCount::Kaiser,
            Factors::Fixed(n) => FactorCount::Fixed(n),
        };
        let mut l = pca_from_occurrence(a, count).map_err(cocite::Error::from)?;
        let mut note = "";
        if self.opts.rotate == Rotate::Varimax {
            if l.n_factors() >= 2 {
                l = varimax(&l, self.opts.kaiser_normalize(), cocite::factor::VARIMAX_TOLERANCE).map_err(cocite::Error::from)?;
            } else {
                note = " (single factor, rotation skipped)";
            }
        }
        self.write(i, "loadings.csv", &l.to_csv(), artifacts)?;
        self.write(i, "loadings.txt", &l.format_table(cocite::factor::DISPLAY_THRESHOLD), artifacts)?;
        let results = json!({
            "factors": l.n_factors(),
            "eigenvalues": l.eigenvalues,
            "explained_variance_pct": l.explained_variance_pct,
            "rotation_iterations": l.rotation_iterations,
        });
        let total: f64 = l.explained_variance_pct.iter().sum();
        let summary = format!("factor: {} factors explain {:.2}% of variance{note}", l.n_factors(), total);
        Ok((Data::Terminal, results, summary))
    }

    fn run_layout(&self, i: usize, g: &WeightedGraph, artifacts: &mut Vec<PathBuf>) -> Result<(Data, Value, String)> {
        let r = kamada_kawai(g, &KamadaKawaiConfig::default()).map_err(cocite::Error::from)?;
        self.write(i, "network.net", &export_pajek(g, Some(&r.positions)), artifacts)?;
        self.write(i, "network.svg", &export_svg(g, &r.positions, &SvgStyle::default()).map_err(cocite::Error::from)?, artifacts)?;
        let results = json!({
            "nodes": g.node_count(),
            "edges": g.edges().len(),
            "initial_energy": r.initial_energy,
            "final_energy": r.final_energy,
            "iterations": r.iterations,
            "converged": r.converged,
        });
        let summary = format!(
            "layout: {} nodes, {} edges, energy {:.6} -> {:.6} in {} moves",
            g.node_count(),
            g.edges().len(),
            r.initial_energy,
            r.final_energy,
            r.iterations
        );
        Ok((Data::Terminal, results, summary))
    }
}

fn coordinates_csv(c: &Configuration) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend((1..=c.coords.ncols()).map(|d| format!("dim_{d}")));
    w.write_record(&header).expect("in-memory write");
    for (i, label) in c.labels.iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend(c.coords.row(i).iter().map(|v| v.to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Scatter of the first two dimensions as a network without edges.
fn map_svg(c: &Configuration) -> Result<String> {
    let g = WeightedGraph::new(c.labels.clone(), Vec::new()).map_err(cocite::Error::from)?;
    let pos: Vec<[f64; 2]> = c
        .coords
        .row_iter()
        .map(|r| [r[0], if c.coords.ncols() > 1 { r[1] } else { 0.0 }])
        .collect();
    Ok(export_svg(&g, &pos, &SvgStyle::default()).map_err(cocite::Error::from)?)
}

/// Options echoed into the report.
pub fn config_json(opts: &Options, source: &Source, steps: &[StepName]) -> Value {
    json!({
        "steps": steps.iter().map(|s| step_label(*s)).collect::<Vec<_>>(),
        "input_format": format!("{:?}", source.format).to_lowercase(),
        "input_kind": (source.format == InputFormat::Proximity).then(|| source.kind.to_string()),
        "level": opts.level.map(|l| format!("{l:?}").to_lowercase()),
        "kind": opts.kind.map(|k| format!("{k:?}").to_lowercase()),
        "dims": opts.dims,
        "factors": match opts.factors { Factors::Auto => json!("auto"), Factors::Fixed(n) => json!(n) },
        "rotate": format!("{:?}", opts.rotate).to_lowercase(),
        "kaiser": opts.kaiser_normalize(),
        "threshold": opts.threshold,
        "diag": format!("{:?}", opts.diag).to_lowercase(),
        "init": format!("{:?}", opts.init).to_lowercase(),
        "max_iterations": opts.max_iterations,
        "epsilon": opts.epsilon,
        "seed": opts.seed,
        "constant": opts.constant,
    })
}
