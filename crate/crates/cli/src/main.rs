use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use depolmark_cli::{figure, run_sweep, write_csv, write_json, Format, Quantity, SweepError, SweepSpec, SweepTable};

#[derive(Parser)]
#[command(
    name = "depolmark",
    version,
    about = "Non-Markovianity diagnostics for perturbed depolarizing channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity on a parameter grid.
    Sweep {
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[command(flatten)]
        params: Params,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Write the dataset(s) behind a figure (fig1 .. fig13).
    Figure {
        id: String,
        #[command(flatten)]
        params: Params,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args, Default)]
struct Params {
    /// Perturbation strength(s), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    alpha: Option<Vec<f64>>,
    /// Start point of the intermediate map.
    #[arg(long)]
    q: Option<f64>,
    /// Lower end of the swept range (defaults to q for intermediate-map quantities, else 0).
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    levels: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    qubits: Option<Vec<usize>>,
    /// Add a row at each singular point inside the range.
    #[arg(long)]
    mark_singular: bool,
}

impl Params {
    fn any_given(&self) -> bool {
        self.alpha.is_some()
            || self.q.is_some()
            || self.p_min.is_some()
            || self.p_max.is_some()
            || self.steps.is_some()
            || self.levels.is_some()
            || self.qubits.is_some()
            || self.mark_singular
    }

    fn into_spec(self, quantity: Quantity) -> SweepSpec {
        let mut spec = SweepSpec::new(quantity);
        if let Some(a) = self.alpha {
            if !quantity.uses_alpha_list() {
                eprintln!("warning: --alpha is ignored; this quantity sweeps alpha over the range");
            }
            spec.alpha = a;
        }
        spec.q = self.q.unwrap_or(spec.q);
        let pins_q = matches!(quantity, Quantity::ChoiEigs | Quantity::ChoiNorm | Quantity::MemoryX);
        spec.p_min = self.p_min.unwrap_or(if pins_q { spec.q } else { 0.0 });
        spec.p_max = self
            .p_max
            .unwrap_or(if quantity == Quantity::GFunction { 0.99 } else { 1.0 });
        spec.steps = self.steps.unwrap_or(spec.steps);
        spec.levels = self.levels.unwrap_or(spec.levels);
        spec.qubits = self.qubits.unwrap_or(spec.qubits);
        spec.mark_singular = self.mark_singular;
        spec
    }
}

fn emit(table: &SweepTable, format: Format, out: impl Write) -> Result<(), SweepError> {
    match format {
        Format::Csv => write_csv(table, out),
        Format::Json => write_json(table, out),
    }
}

fn write_file(table: &SweepTable, format: Format, path: &Path) -> Result<(), SweepError> {
    let mut w = BufWriter::new(File::create(path)?);
    emit(table, format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), SweepError> {
    match cli.command {
        Command::Sweep {
            quantity,
            params,
            out,
            format,
        } => {
            let mut spec = params.into_spec(quantity);
            spec.format = format;
            spec.output = out.clone();
            let table = run_sweep(&spec)?;
            match out {
                Some(path) => write_file(&table, format, &path),
                None => emit(&table, format, io::stdout().lock()),
            }
        }
        Command::Figure {
            id,
            params,
            out,
            format,
        } => {
            if params.any_given() {
                eprintln!("warning: figure presets pin their own parameters; sweep flags are ignored");
            }
            let tables = figure(&id)?;
            std::fs::create_dir_all(&out)?;
            for (stem, table) in tables {
                let path = out.join(format!("{stem}.{}", format.extension()));
                write_file(&table, format, &path)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
