//! Command-line entry points. `run` returns the process exit code: 0 on
//! success, 1 for unusable input, 2 for data that parses but cannot support
//! learning.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use wcapos_core::cart::build_cart;
use wcapos_core::causal::{rank_attributes, NodeScope};
use wcapos_core::context::{build_context, Cell, TwoValuedPolicy};
use wcapos_core::eval::{loocv_many, metrics, EvalReport, Learner, Prediction};
use wcapos_core::structure::{build_structure, BuildParams};
use wcapos_core::{BinarizeOptions, Error};

use crate::dataset::{load_dataset, ColumnKind, DatasetError, Loaded, Schema};
use crate::json::{self, JsonError};
use crate::{dot, report};

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wcapos",
    version,
    about = "Causal three-way decision structures over binary attributes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a table to binary attributes and report each rule.
    Binarize {
        #[command(flatten)]
        data: DataArgs,
        /// Write the binary context here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score every binary attribute on the whole table.
    Rank {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Build a structure and print it level by level.
    Build {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Build the comparison tree instead.
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the model document here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Add tool version and creation time to the JSON document.
        #[arg(long)]
        stamp: bool,
    },
    /// Report ACC, REC, FPR, PRE and F1.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Leave-one-out cross-validation; otherwise the training rows are scored.
        #[arg(long)]
        loocv: bool,
        /// Also evaluate the comparison tree.
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Write the full reports, including per-fold traces, as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Label rows with a saved model.
    Predict {
        /// Model document written by `build --json`.
        #[arg(long)]
        model: PathBuf,
        /// Table with the model's source columns.
        #[arg(long)]
        input: PathBuf,
        /// Field delimiter of the input: one character, or `tab`.
        #[arg(long, default_value = ",")]
        delimiter: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Cart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TwoValued {
    Both,
    Single,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Delimited table with a header row.
    pub path: PathBuf,
    /// Column holding the binary decision.
    #[arg(long)]
    pub decision: String,
    /// Decision value counted as positive.
    #[arg(long)]
    pub positive_label: Option<String>,
    /// Field delimiter: one character, or `tab`.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// One attribute per value (comma-separated column names).
    #[arg(long, value_delimiter = ',')]
    pub discrete: Vec<String>,
    /// Single threshold cut (comma-separated column names).
    #[arg(long, value_delimiter = ',')]
    pub continuous: Vec<String>,
    /// Used as is; values 0/1 (comma-separated column names).
    #[arg(long, value_delimiter = ',')]
    pub binary: Vec<String>,
    /// Columns to drop (comma-separated column names).
    #[arg(long, value_delimiter = ',')]
    pub ignore: Vec<String>,
    /// Column holding object labels.
    #[arg(long)]
    pub id: Option<String>,
    /// Attributes for a discrete column with two values.
    #[arg(long, value_enum, default_value = "both")]
    pub two_valued: TwoValued,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Positive threshold [default: 0.9].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Negative threshold [default: 0.15].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Smallest node that may split [default: 4].
    #[arg(long)]
    pub min_split: Option<usize>,
    /// Nodes at this level or deeper become leaves.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Settle only pure nodes (alpha 1, beta 0, min split 2).
    #[arg(long)]
    pub strict_purity: bool,
}

impl ParamArgs {
    pub fn params(&self) -> BuildParams {
        let base = if self.strict_purity {
            BuildParams::strict()
        } else {
            BuildParams::default()
        };
        BuildParams {
            alpha: self.alpha.unwrap_or(base.alpha),
            beta: self.beta.unwrap_or(base.beta),
            min_split: self.min_split.unwrap_or(base.min_split),
            max_depth: self.max_depth.or(base.max_depth),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        if e.is_degenerate() {
            CliError::Degenerate(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DecisionNotBinary(_) | Error::EmptyContext | Error::EmptyEvaluation => {
                CliError::Degenerate(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

fn parse_delimiter(d: &str) -> Result<u8, CliError> {
    match d {
        "tab" | "\\t" => Ok(b'\t'),
        _ if d.len() == 1 => Ok(d.as_bytes()[0]),
        _ => Err(CliError::Input(format!(
            "delimiter must be one character, got '{d}'"
        ))),
    }
}

impl DataArgs {
    fn schema(&self) -> Result<Schema, CliError> {
        let mut schema = Schema::new(&self.decision).delimiter(parse_delimiter(&self.delimiter)?);
        schema.positive_label = self.positive_label.clone();
        schema.id_column = self.id.clone();
        schema.ignore = self.ignore.clone();
        let declared = [
            (&self.discrete, ColumnKind::Discrete),
            (&self.continuous, ColumnKind::Continuous),
            (&self.binary, ColumnKind::Binary),
        ];
        for (names, kind) in declared {
            for n in names {
                if schema.kinds.insert(n.clone(), kind).is_some() {
                    return Err(CliError::Input(format!("column '{n}' declared twice")));
                }
            }
        }
        Ok(schema)
    }

    fn options(&self) -> BinarizeOptions {
        BinarizeOptions {
            two_valued: match self.two_valued {
                TwoValued::Both => TwoValuedPolicy::Both,
                TwoValued::Single => TwoValuedPolicy::Single,
            },
        }
    }

    fn load(&self) -> Result<Loaded, CliError> {
        let loaded = load_dataset(&self.path, &self.schema()?)?;
        if loaded.dropped_rows > 0 {
            eprintln!(
                "note: {} rows with missing values dropped",
                loaded.dropped_rows
            );
        }
        Ok(loaded)
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn binarize(out: &mut dyn Write, data: &DataArgs, dest: Option<&Path>) -> Result<(), CliError> {
    let loaded = data.load()?;
    let (ctx, map) = build_context(&loaded.raw, &data.options())?;
    let mut table = String::new();
    let header: Vec<String> = std::iter::once("object".to_string())
        .chain(ctx.attributes().iter().map(|a| csv_field(a)))
        .chain(std::iter::once(csv_field(loaded.raw.decision_name())))
        .collect();
    table.push_str(&header.join(","));
    table.push('\n');
    for g in 0..ctx.n_objects() {
        let mut row = vec![csv_field(&ctx.object_labels()[g])];
        row.extend(
            ctx.row(g)
                .iter()
                .map(|&b| if b { "1" } else { "0" }.to_string()),
        );
        row.push(if ctx.decision().contains(g) { "1" } else { "0" }.to_string());
        table.push_str(&row.join(","));
        table.push('\n');
    }
    let w = |e: std::io::Error| CliError::Input(e.to_string());
    write!(out, "{}", report::binarization_report(&ctx, &map)).map_err(w)?;
    match dest {
        Some(p) => write_file(p, &table),
        None => write!(out, "\n{table}").map_err(w),
    }
}

fn rank(out: &mut dyn Write, data: &DataArgs) -> Result<(), CliError> {
    let loaded = data.load()?;
    let (ctx, _) = build_context(&loaded.raw, &data.options())?;
    let all: Vec<usize> = (0..ctx.n_attributes()).collect();
    let ranked = rank_attributes(&ctx, &all, &NodeScope::root(&ctx))?;
    write!(out, "{}", report::rank_table(&ctx, &ranked)).map_err(|e| CliError::Input(e.to_string()))
}

struct BuildOut<'a> {
    dot: Option<&'a Path>,
    json: Option<&'a Path>,
    stamp: bool,
}

fn build(
    out: &mut dyn Write,
    data: &DataArgs,
    params: &BuildParams,
    baseline: Option<Baseline>,
    dest: BuildOut<'_>,
) -> Result<(), CliError> {
    let loaded = data.load()?;
    let (ctx, map) = build_context(&loaded.raw, &data.options())?;
    let w = |e: std::io::Error| CliError::Input(e.to_string());
    let (summary, dot_text, mut doc) = match baseline {
        None => {
            let s = build_structure(&ctx, params)?.with_binarization(map)?;
            (
                report::build_summary(&s),
                dot::export_dot(&s),
                json::structure_doc(&s),
            )
        }
        Some(Baseline::Cart) => {
            let t = build_cart(&ctx, params)?;
            (
                report::cart_summary(&t),
                dot::export_cart_dot(&t),
                json::cart_doc(&t, ctx.n_objects(), Some(&map)),
            )
        }
    };
    write!(out, "{summary}").map_err(w)?;
    if let Some(p) = dest.dot {
        write_file(p, &dot_text)?;
    }
    if let Some(p) = dest.json {
        if dest.stamp {
            doc.stamp = Some(json::StampDoc::now());
        }
        write_file(p, &json::render(&doc))?;
    }
    Ok(())
}

fn resubstitution(
    loaded: &Loaded,
    params: &BuildParams,
    learner: Learner,
    options: &BinarizeOptions,
) -> Result<EvalReport, CliError> {
    let (ctx, _) = build_context(&loaded.raw, options)?;
    let model = learner.fit(&ctx, params)?;
    let preds: Vec<Prediction> = (0..ctx.n_objects())
        .map(|g| model.predict(&ctx.row(g)))
        .collect::<Result<_, _>>()?;
    let truth: Vec<bool> = loaded.raw.decision().to_vec();
    Ok(metrics(&preds, &truth)?)
}

fn evaluate(
    out: &mut dyn Write,
    data: &DataArgs,
    params: &BuildParams,
    use_loocv: bool,
    baseline: Option<Baseline>,
    dest: Option<&Path>,
) -> Result<(), CliError> {
    params.validate()?;
    let loaded = data.load()?;
    let options = data.options();
    let mut learners = vec![Learner::Causal];
    if baseline == Some(Baseline::Cart) {
        learners.push(Learner::Cart);
    }
    let reports: Vec<EvalReport> = if use_loocv {
        loocv_many(&loaded.raw, params, &learners, &options)?
    } else {
        learners
            .iter()
            .map(|&l| resubstitution(&loaded, params, l, &options))
            .collect::<Result<_, _>>()?
    };
    if reports.iter().all(|r| r.per_fold.is_empty()) && use_loocv {
        return Err(CliError::Degenerate("every fold was skipped".to_string()));
    }
    let w = |e: std::io::Error| CliError::Input(e.to_string());
    let protocol = if use_loocv { "loocv" } else { "resubstitution" };
    writeln!(
        out,
        "{protocol}, positive class '{}'",
        loaded.positive_label
    )
    .map_err(w)?;
    writeln!(out, "{}", report::metrics_header()).map_err(w)?;
    let name = |l: &Learner| match l {
        Learner::Causal => "3wcapos",
        Learner::Cart => "cart",
    };
    for (l, r) in learners.iter().zip(&reports) {
        writeln!(out, "{}", report::metrics_row(name(l), r)).map_err(w)?;
    }
    if use_loocv {
        for (l, r) in learners.iter().zip(&reports) {
            writeln!(out, "{}: {}", name(l), report::fold_note(r)).map_err(w)?;
        }
    }
    if let Some(p) = dest {
        let docs: BTreeMap<&str, json::EvaluationDoc> = learners
            .iter()
            .zip(&reports)
            .map(|(l, r)| (name(l), json::evaluation_doc(protocol, r)))
            .collect();
        let mut text =
            serde_json::to_string_pretty(&docs).map_err(|e| CliError::Input(e.to_string()))?;
        text.push('\n');
        write_file(p, &text)?;
    }
    Ok(())
}

fn predict(
    out: &mut dyn Write,
    model: &Path,
    input: &Path,
    delimiter: &str,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(model).map_err(io_err(model))?;
    let imported = json::import_json(&text)?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(parse_delimiter(delimiter)?)
        .trim(csv::Trim::All)
        .from_path(input)
        .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Input(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let attributes = &imported.doc.attributes;
    let w = |e: std::io::Error| CliError::Input(e.to_string());
    writeln!(out, "row,predicted,confidence,leaf,path").map_err(w)?;
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        let cell = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .and_then(|j| record.get(j))
                .map(Cell::Text)
        };
        let sample = match &imported.binarization {
            Some(map) => map.encode(cell)?,
            None => attributes
                .iter()
                .map(|a| match cell(a) {
                    Some(Cell::Text(t)) => wcapos_core::context::parse_flag(t)
                        .ok_or_else(|| CliError::Input(format!("row {}: '{a}' is not 0/1", i + 1))),
                    _ => Err(CliError::Input(format!(
                        "row {}: missing column '{a}'",
                        i + 1
                    ))),
                })
                .collect::<Result<Vec<bool>, _>>()?,
        };
        let p = imported.model.predict(&sample)?;
        let path: Vec<String> = p
            .trace
            .iter()
            .map(|c| {
                format!(
                    "{}{}",
                    if c.present { "" } else { "!" },
                    attributes[c.attribute]
                )
            })
            .collect();
        writeln!(
            out,
            "{},{},{:.3},{},{}",
            i + 1,
            u8::from(p.label),
            p.confidence,
            p.leaf_id,
            csv_field(&path.join(" & "))
        )
        .map_err(w)?;
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the chosen command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Binarize { data, out: dest } => binarize(out, data, dest.as_deref()),
        Command::Rank { data } => rank(out, data),
        Command::Build {
            data,
            params,
            baseline,
            dot,
            json,
            stamp,
        } => build(
            out,
            data,
            &params.params(),
            *baseline,
            BuildOut {
                dot: dot.as_deref(),
                json: json.as_deref(),
                stamp: *stamp,
            },
        ),
        Command::Evaluate {
            data,
            params,
            loocv,
            baseline,
            json,
        } => evaluate(
            out,
            data,
            &params.params(),
            *loocv,
            *baseline,
            json.as_deref(),
        ),
        Command::Predict {
            model,
            input,
            delimiter,
        } => predict(out, model, input, delimiter),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
