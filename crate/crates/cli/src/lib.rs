//! Parameter sweeps and figure datasets for the `depolmark` command-line
//! tool.
//!
//! A [`SweepSpec`] names a [`Quantity`] and a parameter grid; [`run_sweep`]
//! evaluates it point by point (in parallel, output ordered by grid index)
//! into a [`SweepTable`]. Singular samples are kept as `None`.

pub mod figures;
pub mod output;

use std::path::PathBuf;

use depolmark::channels::{apply_channel, qubit_kraus, DensityMatrix, MAX_QUBITS};
use depolmark::dynmaps::{
    bell_expectations, crossover_or_none, g_function, multiqubit_choi, qubit_choi, qudit_choi, ChoiMatrix, LambdaRatio,
};
use depolmark::geometry::{affine_map_of, f_matrix, trajectory_point};
use depolmark::matcore::real;
use depolmark::measures::{
    blp_measure, decay_rate, decay_rate_normalized, hcla_closed, hcla_measure, memory_witness_x, trace_distance,
};
use depolmark::Error;
use rayon::prelude::*;
use serde::Serialize;

pub use figures::{figure, FIGURE_IDS};
pub use output::{format_number, write_csv, write_json};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "DEPOLMARK_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
}

impl SweepError {
    /// Process exit code: 2 for usage errors, 3 for a singular pinned point.
    pub fn exit_code(&self) -> u8 {
        match self {
            SweepError::Usage(_) => 2,
            SweepError::Singular(_) => 3,
            SweepError::Io(_) | SweepError::Numerical(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    ChoiEigs,
    ChoiNorm,
    DecayRate,
    Hcla,
    Blp,
    TraceDistance,
    MemoryX,
    Volume,
    Trajectory,
    FNorm,
    GFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl Quantity {
    /// Command-line name, e.g. `decay-rate`.
    pub fn name(self) -> String {
        use clap::ValueEnum;
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }

    /// Name of the swept variable.
    pub fn abscissa(self) -> &'static str {
        match self {
            Quantity::Hcla | Quantity::Blp => "alpha",
            Quantity::GFunction => "q",
            _ => "p",
        }
    }

    /// Quantities built on the intermediate map from a pinned `q`.
    fn pins_q(self) -> bool {
        matches!(self, Quantity::ChoiEigs | Quantity::ChoiNorm | Quantity::MemoryX)
    }

    /// False for quantities whose abscissa is `alpha` itself.
    pub fn uses_alpha_list(self) -> bool {
        !matches!(self, Quantity::Hcla | Quantity::Blp)
    }

    fn uses_levels(self) -> bool {
        matches!(
            self,
            Quantity::ChoiEigs | Quantity::ChoiNorm | Quantity::DecayRate | Quantity::Hcla | Quantity::FNorm
        )
    }

    fn uses_qubits(self) -> bool {
        matches!(self, Quantity::ChoiEigs | Quantity::ChoiNorm | Quantity::GFunction)
    }

    fn series_base(self, levels: usize, qubits: usize) -> Vec<&'static str> {
        match self {
            Quantity::ChoiEigs if levels == 2 && qubits == 1 => vec!["Lambda_I", "Lambda_X", "Lambda_Y", "Lambda_Z"],
            Quantity::ChoiEigs => vec!["Lambda_min", "Lambda_max"],
            Quantity::ChoiNorm => vec!["choi_norm"],
            Quantity::DecayRate => vec!["gamma", "gamma_normalized"],
            Quantity::Hcla => vec!["N_HCLA_numeric", "N_HCLA_closed"],
            Quantity::Blp => vec!["N_BLP"],
            Quantity::TraceDistance => vec!["D"],
            Quantity::MemoryX => vec!["X"],
            Quantity::Volume => vec!["volume", "M_norm"],
            Quantity::Trajectory => vec!["lambda", "abs_lambda", "A", "inside_tetrahedron", "cp_divisible"],
            Quantity::FNorm => vec!["F_norm"],
            Quantity::GFunction => vec!["g"],
        }
    }
}

/// A sweep request. The range fields describe the grid of the quantity's
/// abscissa (`p`, or `alpha` for `hcla`/`blp`, or `q` for `g-function`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub alpha: Vec<f64>,
    pub q: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    pub levels: Vec<usize>,
    pub qubits: Vec<usize>,
    /// Also evaluate exactly at each `α₋` inside the range, so the pole shows
    /// up as a marked row.
    pub mark_singular: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

impl SweepSpec {
    pub fn new(quantity: Quantity) -> Self {
        Self {
            quantity,
            alpha: vec![0.7],
            q: 0.0,
            p_min: 0.0,
            p_max: 1.0,
            steps: 101,
            levels: vec![2],
            qubits: vec![1],
            mark_singular: false,
            output: None,
            format: Format::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let usage = |msg: String| Err(SweepError::Usage(msg));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.steps < 2 {
            return usage(format!("steps must be at least 2, got {}", self.steps));
        }
        if self.p_min.partial_cmp(&self.p_max) != Some(std::cmp::Ordering::Less) {
            return usage(format!(
                "range minimum {} must be below maximum {}",
                self.p_min, self.p_max
            ));
        }
        if !unit(self.p_min) || !unit(self.p_max) {
            return usage(format!("range [{}, {}] must lie within [0, 1]", self.p_min, self.p_max));
        }
        if self.alpha.is_empty() || self.levels.is_empty() || self.qubits.is_empty() {
            return usage("alpha, levels and qubits lists must be nonempty".into());
        }
        if let Some(a) = self.alpha.iter().find(|&&a| !unit(a)) {
            return usage(format!("alpha = {a} must lie in [0, 1]"));
        }
        if !unit(self.q) {
            return usage(format!("q = {} must lie in [0, 1]", self.q));
        }
        if let Some(n) = self.levels.iter().find(|&&n| n < 2) {
            return usage(format!("levels = {n} must be at least 2"));
        }
        if let Some(n) = self.qubits.iter().find(|&&n| n == 0 || n > MAX_QUBITS) {
            return usage(format!("qubits = {n} must lie in 1..={MAX_QUBITS}"));
        }
        let q = self.quantity;
        if !q.uses_levels() && self.levels != [2] {
            return usage(format!("{} is defined for a single qubit; levels must be 2", q.name()));
        }
        if !q.uses_qubits() && self.qubits != [1] {
            return usage(format!("{} does not take a qubit count; qubits must be 1", q.name()));
        }
        if q.uses_qubits()
            && q.uses_levels()
            && self.qubits.iter().any(|&n| n > 1)
            && self.levels.iter().any(|&n| n != 2)
        {
            return usage("multiqubit maps require levels = 2".into());
        }
        if q == Quantity::FNorm && self.levels.iter().any(|n| !(3..=4).contains(n)) {
            return usage("f-norm requires levels in {3, 4}".into());
        }
        if q.pins_q() && self.p_min < self.q {
            return usage(format!(
                "intermediate maps need p >= q; range minimum {} is below q = {}",
                self.p_min, self.q
            ));
        }
        if q == Quantity::GFunction && self.p_max > 1.0 - depolmark::dynmaps::G_STEP {
            return usage(format!("g-function needs q <= {}", 1.0 - depolmark::dynmaps::G_STEP));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        let mut g: Vec<f64> = (0..=n)
            .map(|i| self.p_min + (self.p_max - self.p_min) * i as f64 / n as f64)
            .collect();
        if self.mark_singular && self.quantity.abscissa() == "p" {
            for (alpha, levels, _) in self.combos() {
                if let Some(c) = crossover_or_none(alpha, levels) {
                    if c > self.p_min && c < self.p_max && !g.contains(&c) {
                        g.push(c);
                    }
                }
            }
            g.sort_by(f64::total_cmp);
        }
        g
    }

    /// Parameter combinations `(alpha, levels, qubits)`, one block of series
    /// each.
    fn combos(&self) -> Vec<(f64, usize, usize)> {
        let q = self.quantity;
        let alphas = if q.uses_alpha_list() {
            self.alpha.clone()
        } else {
            vec![f64::NAN]
        };
        let levels = if q.uses_levels() { self.levels.clone() } else { vec![2] };
        let qubits = if q.uses_qubits() { self.qubits.clone() } else { vec![1] };
        let mut out = Vec::new();
        for &a in &alphas {
            for &n in &levels {
                for &m in &qubits {
                    out.push((a, n, m));
                }
            }
        }
        out
    }

    fn series_names(&self) -> Vec<String> {
        let q = self.quantity;
        let several = |len: usize, used: bool| used && len > 1;
        let tag_alpha = several(self.alpha.len(), q.uses_alpha_list());
        let tag_levels = several(self.levels.len(), q.uses_levels());
        let tag_qubits = several(self.qubits.len(), q.uses_qubits());
        let mut names = Vec::new();
        for (a, n, m) in self.combos() {
            let mut suffix = String::new();
            if tag_alpha {
                suffix.push_str(&format!("_a{a}"));
            }
            if tag_levels {
                suffix.push_str(&format!("_N{n}"));
            }
            if tag_qubits {
                suffix.push_str(&format!("_n{m}"));
            }
            for base in q.series_base(n, m) {
                names.push(format!("{base}{suffix}"));
            }
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub spec: SweepSpec,
}

/// Sweep result. Each row holds the abscissa value and one entry per series;
/// `None` marks a singular sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub abscissa: String,
    pub series: Vec<String>,
    pub rows: Vec<(f64, Vec<Option<f64>>)>,
    pub metadata: Metadata,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.series.iter().position(|s| s == name)?;
        Some(self.rows.iter().map(|(_, v)| v[idx]).collect())
    }

    pub fn abscissa_values(&self) -> Vec<f64> {
        self.rows.iter().map(|(x, _)| *x).collect()
    }

    /// Appends the series of `other`, which must share the abscissa grid.
    pub fn merge(mut self, other: SweepTable) -> Result<SweepTable, SweepError> {
        if self.abscissa != other.abscissa || self.abscissa_values() != other.abscissa_values() {
            return Err(SweepError::Usage("cannot merge tables on different grids".into()));
        }
        self.series.extend(other.series);
        for (row, (_, extra)) in self.rows.iter_mut().zip(other.rows) {
            row.1.extend(extra);
        }
        Ok(self)
    }

    /// Keeps only the named series, in the given order.
    pub fn select(mut self, names: &[&str]) -> Result<SweepTable, SweepError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.series
                    .iter()
                    .position(|s| s == n)
                    .ok_or_else(|| SweepError::Usage(format!("no series {n}")))
            })
            .collect::<Result<_, _>>()?;
        self.series = names.iter().map(|s| s.to_string()).collect();
        for row in &mut self.rows {
            row.1 = idx.iter().map(|&i| row.1[i]).collect();
        }
        Ok(self)
    }
}

fn is_singular(err: &Error) -> bool {
    matches!(
        err,
        Error::Singular { .. } | Error::SingularMap { .. } | Error::SingularRate { .. }
    )
}

/// Singular evaluations become `None`; anything else is a hard error.
fn soft<const K: usize>(r: depolmark::Result<[f64; K]>) -> Result<[Option<f64>; K], SweepError> {
    match r {
        Ok(v) => Ok(v.map(Some)),
        Err(e) if is_singular(&e) => Ok([None; K]),
        Err(e) => Err(e.into()),
    }
}

fn intermediate_choi(alpha: f64, q: f64, p: f64, levels: usize, qubits: usize) -> depolmark::Result<ChoiMatrix> {
    match (levels, qubits) {
        (2, 1) => qubit_choi(alpha, q, p),
        (_, 1) => qudit_choi(alpha, q, p, levels),
        _ => multiqubit_choi(alpha, q, p, qubits),
    }
}

fn plus_minus() -> (DensityMatrix, DensityMatrix) {
    let plus = DensityMatrix::pure(&[real(1.0), real(1.0)]).expect("valid state");
    let minus = DensityMatrix::pure(&[real(1.0), real(-1.0)]).expect("valid state");
    (plus, minus)
}

fn evaluate(
    spec: &SweepSpec,
    alpha: f64,
    levels: usize,
    qubits: usize,
    x: f64,
) -> Result<Vec<Option<f64>>, SweepError> {
    let q = spec.q;
    let row = match spec.quantity {
        Quantity::ChoiEigs => {
            let choi = intermediate_choi(alpha, q, x, levels, qubits);
            if levels == 2 && qubits == 1 {
                soft(
                    choi.and_then(|c| bell_expectations(&c))
                        .map(|b| [b[0], b[2], b[3], b[1]]),
                )?
                .to_vec()
            } else {
                soft(choi.and_then(|c| c.eigenvalues()).map(|e| [e[0], e[e.len() - 1]]))?.to_vec()
            }
        }
        Quantity::ChoiNorm => soft(intermediate_choi(alpha, q, x, levels, qubits).map(|c| [c.trace_norm()]))?.to_vec(),
        Quantity::DecayRate => {
            let g = soft(decay_rate(alpha, x, levels).map(|v| [v]))?[0];
            let gt = match decay_rate_normalized(alpha, x, levels) {
                Ok(v) => Some(v),
                Err(Error::Domain(_)) => None,
                Err(e) => return Err(e.into()),
            };
            vec![g, gt]
        }
        Quantity::Hcla => {
            let numeric = hcla_measure(x, levels)?.value;
            let closed = match hcla_closed(x, levels) {
                Ok(v) => Some(v.value),
                Err(Error::Domain(_)) => None,
                Err(e) => return Err(e.into()),
            };
            vec![Some(numeric), closed]
        }
        Quantity::Blp => vec![Some(blp_measure(x)?.value)],
        Quantity::TraceDistance => {
            let (plus, minus) = plus_minus();
            let k = qubit_kraus(alpha, x)?;
            vec![Some(trace_distance(
                &apply_channel(&k, &plus)?,
                &apply_channel(&k, &minus)?,
            )?)]
        }
        Quantity::MemoryX => soft(memory_witness_x(alpha, q, x).map(|v| [v]))?.to_vec(),
        Quantity::Volume => {
            let m = affine_map_of(alpha, x)?;
            vec![Some(m.abs_determinant()), Some(m.trace_norm())]
        }
        Quantity::Trajectory => {
            let pt = trajectory_point(alpha, x)?;
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            vec![
                Some(pt.lambdas[0]),
                Some(pt.abs_lambdas[0]),
                pt.a_vector.map(|a| a[0]),
                Some(flag(pt.inside_tetrahedron)),
                pt.a_vector.map(|_| flag(pt.cp_divisible)),
            ]
        }
        Quantity::FNorm => vec![Some(f_matrix(alpha, x, levels)?.1)],
        Quantity::GFunction => soft(g_function(alpha, x, qubits).map(|v| [v]))?.to_vec(),
    };
    Ok(row)
}

fn thread_pool() -> Result<rayon::ThreadPool, SweepError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| SweepError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| SweepError::Usage(format!("cannot start worker threads: {e}")))
}

/// Evaluates `spec` on its grid. Aborts with [`SweepError::Singular`] when
/// the pinned `q` is itself a singular point of the intermediate map.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    spec.validate()?;
    if spec.quantity.pins_q() {
        for (alpha, levels, _) in spec.combos() {
            let ratio = LambdaRatio::levels(alpha, spec.q, spec.q, levels);
            if let Err(e) = ratio.value(spec.q) {
                return Err(SweepError::Singular(format!(
                    "{e} (alpha = {alpha}, levels = {levels})"
                )));
            }
        }
    }
    let combos = spec.combos();
    let grid = spec.grid();
    let rows = thread_pool()?.install(|| {
        grid.par_iter()
            .map(|&x| {
                let mut values = Vec::new();
                for &(a, n, m) in &combos {
                    values.extend(evaluate(spec, a, n, m, x)?);
                }
                if values.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(SweepError::Numerical(Error::Domain(format!("non-finite value at {x}"))));
                }
                Ok((x, values))
            })
            .collect::<Result<Vec<_>, SweepError>>()
    })?;
    Ok(SweepTable {
        abscissa: spec.quantity.abscissa().to_string(),
        series: spec.series_names(),
        rows,
        metadata: Metadata {
            tool: "depolmark",
            version: VERSION,
            spec: spec.clone(),
        },
    })
}
