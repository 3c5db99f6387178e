//! Run reports for the `spinwitness` command line tool.
//!
//! Every command produces a [`RunReport`]: a list of named values, each with
//! an optional target, the provenance of that target, the accepted interval
//! and the pass/fail verdict. Exact targets are kept as [`Surd`]s and only
//! evaluated when compared.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, expectation, kron, ComplexMatrix};
use crate::optimize::{
    find_w3_eigen_phases, noise_threshold, optimize_frames, optimize_mk_settings, partition_bound_mk,
    partition_bound_sweep, ratio_curve, verify_cross_le_dot, OptConfig, ThresholdWitness, Witness, WitnessKind,
    MK_RATIO,
};
use crate::spin::{site_unitary, spin_matrices, total_spin, AxisAngle, SiteList, SpinQuantum};
use crate::state_io::{state_from_str, state_to_string};
use crate::states::{
    dur_state, ghz, partial_transpose, phi4, psi4, random_product, random_pure, w3, PartitionSpec, QuantumState,
};
use crate::surd::Surd;
use crate::witness::{
    build_cross_chain, build_dot_chain, cross_z_spectrum, dot_spectrum, max_violation_cross, max_violation_dot,
    OrderingSpec, DEFAULT_DIM_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Table1,
    Table2,
    Ratios,
    Noise,
    Bound,
    Verify,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Table1, Command::Table2, Command::Ratios, Command::Noise, Command::Bound, Command::Verify];

    pub fn name(self) -> &'static str {
        match self {
            Command::Table1 => "table1",
            Command::Table2 => "table2",
            Command::Ratios => "ratios",
            Command::Noise => "noise",
            Command::Bound => "bound",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "PAPER")]
    Paper,
    #[serde(rename = "DERIVED")]
    Derived,
    #[serde(rename = "TRIVIAL")]
    Trivial,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TargetValue {
    Exact(Surd),
    Decimal(f64),
}

impl TargetValue {
    pub fn value(&self) -> f64 {
        match self {
            TargetValue::Exact(s) => s.value(),
            TargetValue::Decimal(x) => *x,
        }
    }

    pub fn expr(&self) -> String {
        match self {
            TargetValue::Exact(s) => s.to_string(),
            TargetValue::Decimal(x) => format!("~{x}"),
        }
    }
}

/// How a found value is compared with its target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    Abs(f64),
    Rel(f64),
    /// `value >= target - slack`.
    AtLeast(f64),
    /// `value <= target + slack`.
    AtMost(f64),
    Range(f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub value: TargetValue,
    pub provenance: Provenance,
    pub check: Check,
}

impl Target {
    pub fn exact(s: Surd, provenance: Provenance, check: Check) -> Self {
        Self { value: TargetValue::Exact(s), provenance, check }
    }

    pub fn decimal(x: f64, provenance: Provenance, check: Check) -> Self {
        Self { value: TargetValue::Decimal(x), provenance, check }
    }

    /// Accepted interval `[lower, upper]`; `None` means unbounded.
    pub fn interval(&self) -> (Option<f64>, Option<f64>) {
        let t = self.value.value();
        match self.check {
            Check::Abs(tol) => (Some(t - tol), Some(t + tol)),
            Check::Rel(r) => (Some(t - r * t.abs()), Some(t + r * t.abs())),
            Check::AtLeast(s) => (Some(t - s), None),
            Check::AtMost(s) => (None, Some(t + s)),
            Check::Range(lo, hi) => (Some(lo), Some(hi)),
        }
    }
}

/// One reported quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub name: String,
    pub value: f64,
    pub target: Option<f64>,
    pub target_expr: Option<String>,
    pub provenance: Option<Provenance>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub delta: Option<f64>,
    pub pass: Option<bool>,
    pub note: Option<String>,
}

impl ResultEntry {
    pub fn plain(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target: None,
            target_expr: None,
            provenance: None,
            lower: None,
            upper: None,
            delta: None,
            pass: None,
            note: None,
        }
    }

    pub fn checked(name: impl Into<String>, value: f64, target: &Target) -> Self {
        let t = target.value.value();
        let (lower, upper) = target.interval();
        let pass = value.is_finite() && lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Self {
            target: Some(t),
            target_expr: Some(target.value.expr()),
            provenance: Some(target.provenance),
            lower,
            upper,
            delta: Some(value - t),
            pass: Some(pass),
            ..Self::plain(name, value)
        }
    }

    /// A boolean property: value 1 when it holds, 0 otherwise.
    pub fn property(name: impl Into<String>, holds: bool) -> Self {
        let target = Target::exact(Surd::integer(1), Provenance::Trivial, Check::Abs(0.0));
        Self::checked(name, if holds { 1.0 } else { 0.0 }, &target)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Command,
    pub version: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub results: Vec<ResultEntry>,
    pub notes: Vec<String>,
    pub all_targets_met: bool,
    pub runtime_seconds: f64,
}

/// Column order of [`RunReport::to_csv`].
pub const CSV_COLUMNS: [&str; 11] =
    ["command", "name", "value", "target", "target_expr", "provenance", "lower", "upper", "delta", "pass", "note"];

impl RunReport {
    fn new(command: Command, params: &RunParams) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: params.opt.seed,
            parameters: params.describe(),
            results: Vec::new(),
            notes: Vec::new(),
            all_targets_met: true,
            runtime_seconds: 0.0,
        }
    }

    fn push(&mut self, entry: ResultEntry) {
        self.results.push(entry);
    }

    fn finish(mut self, started: Instant) -> Self {
        self.all_targets_met = self.results.iter().all(|r| r.pass != Some(false));
        self.runtime_seconds = started.elapsed().as_secs_f64();
        self
    }

    pub fn get(&self, name: &str) -> Option<&ResultEntry> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResultEntry> {
        self.results.iter().filter(|r| r.pass == Some(false))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.results {
            let provenance = r.provenance.map(|p| match p {
                Provenance::Paper => "PAPER",
                Provenance::Derived => "DERIVED",
                Provenance::Trivial => "TRIVIAL",
            });
            w.write_record([
                self.command.name().to_string(),
                r.name.clone(),
                r.value.to_string(),
                opt(r.target),
                r.target_expr.clone().unwrap_or_default(),
                provenance.unwrap_or_default().to_string(),
                opt(r.lower),
                opt(r.upper),
                opt(r.delta),
                r.pass.map(|p| p.to_string()).unwrap_or_default(),
                r.note.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Inputs shared by all commands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunParams {
    pub spin: SpinQuantum,
    /// Command-specific site count; each command has its own default.
    pub sites: Option<usize>,
    pub ordering: Option<OrderingSpec>,
    /// One-based partition such as `12|34`.
    pub partition: Option<String>,
    pub opt: OptConfig,
    pub dim_cap: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            spin: SpinQuantum::HALF,
            sites: None,
            ordering: None,
            partition: None,
            opt: OptConfig::default(),
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl RunParams {
    fn describe(&self) -> BTreeMap<String, serde_json::Value> {
        use serde_json::json;
        let mut m = BTreeMap::new();
        m.insert("spin_two_j".into(), json!(self.spin.two_j()));
        m.insert("sites".into(), json!(self.sites));
        m.insert("ordering".into(), json!(self.ordering.as_ref().map(|o| o.to_one_based_string())));
        m.insert("partition".into(), json!(self.partition));
        m.insert("restarts".into(), json!(self.opt.restarts));
        m.insert("max_iterations".into(), json!(self.opt.max_iterations));
        m.insert("tolerance".into(), json!(self.opt.tolerance));
        m.insert("dim_cap".into(), json!(self.dim_cap));
        m
    }

    fn ordering_for(&self, n: usize) -> Result<OrderingSpec> {
        match &self.ordering {
            Some(o) if o.len() != n => {
                Err(Error::InvalidOrdering(format!("ordering has {} entries, expected {n}", o.len())))
            }
            Some(o) => Ok(o.clone()),
            None => Ok(OrderingSpec::identity(n)),
        }
    }

    fn require_qubits(&self, command: Command) -> Result<()> {
        if !self.spin.is_qubit() {
            return Err(Error::InvalidParameter(format!("`{command}` is defined for spin-1/2 sites only")));
        }
        Ok(())
    }
}

pub fn run(command: Command, params: &RunParams) -> Result<RunReport> {
    match command {
        Command::Table1 => cmd_table1(params),
        Command::Table2 => cmd_table2(params),
        Command::Ratios => cmd_ratios(params),
        Command::Noise => cmd_noise(params),
        Command::Bound => cmd_bound(params),
        Command::Verify => cmd_verify(params),
    }
}

pub const SURD_TOL: f64 = 1e-6;
pub const DECIMAL_TOL: f64 = 5e-4;
pub const D11_TARGET: f64 = 152.691;
pub const D11_TOL: f64 = 0.01;

fn surd(terms: &[(i64, u64)], den: i64) -> TargetValue {
    TargetValue::Exact(Surd::new(terms.to_vec(), den))
}

/// Published maximal violations `(cross, dot)` for `n` sites of spin `two_j / 2`.
pub fn table1_targets(two_j: u32, n: usize) -> Option<(TargetValue, TargetValue)> {
    let d = TargetValue::Decimal;
    let int = |k: i64| surd(&[(k, 1)], 1);
    let root = |c: i64, r: u64| surd(&[(c, r)], 1);
    Some(match (two_j, n) {
        (1, 2) => (int(2), int(3)),
        (1, 3) => (root(2, 2), root(2, 3)),
        (1, 4) => (root(2, 6), root(4, 3)),
        (1, 5) => (root(2, 14), root(4, 6)),
        (1, 6) => (d(12.144), d(16.971)),
        (2, 2) => (root(1, 2), int(2)),
        (2, 3) => (root(1, 3), root(1, 3)),
        (2, 4) => (surd(&[(1, 2), (1, 10)], 2), root(2, 2)),
        (2, 5) => (d(2.840), int(3)),
        (2, 6) => (d(3.731), d(4.472)),
        _ => return None,
    })
}

fn tolerance_for(t: &TargetValue) -> f64 {
    match t {
        TargetValue::Exact(_) => SURD_TOL,
        TargetValue::Decimal(_) => DECIMAL_TOL,
    }
}

/// Exact maximal violations of both witnesses for `N = 2..=n_max`.
pub fn cmd_table1(params: &RunParams) -> Result<RunReport> {
    let started = Instant::now();
    let mut report = RunReport::new(Command::Table1, params);
    let n_max = params.sites.unwrap_or(6);
    if n_max < 2 {
        return Err(Error::InvalidParameter("table1 needs at least 2 sites".into()));
    }
    let two_j = params.spin.two_j();
    for n in 2..=n_max {
        let sites = SiteList::uniform(n, params.spin);
        if sites.total_dim() > params.dim_cap {
            report.notes.push(format!(
                "truncated at N = {}: dimension {} exceeds cap {}",
                n,
                sites.total_dim(),
                params.dim_cap
            ));
            break;
        }
        let ordering = match &params.ordering {
            Some(o) if o.len() == n => o.clone(),
            _ => OrderingSpec::identity(n),
        };
        let cross = max_violation_cross(&sites, &ordering, params.dim_cap)?;
        let dot = max_violation_dot(&sites, &ordering, params.dim_cap)?;
        let (cname, dname) = (format!("cross N={n}"), format!("dot N={n}"));
        match table1_targets(two_j, n) {
            Some((tc, td)) => {
                let (ec, ed) = (tolerance_for(&tc), tolerance_for(&td));
                report.push(ResultEntry::checked(
                    cname,
                    cross,
                    &Target { value: tc, provenance: Provenance::Paper, check: Check::Abs(ec) },
                ));
                report.push(ResultEntry::checked(
                    dname,
                    dot,
                    &Target { value: td, provenance: Provenance::Paper, check: Check::Abs(ed) },
                ));
            }
            None if two_j == 1 && n == 11 => {
                report.push(ResultEntry::plain(cname, cross));
                report.push(ResultEntry::checked(
                    dname,
                    dot,
                    &Target::decimal(D11_TARGET, Provenance::Paper, Check::Abs(D11_TOL)),
                ));
            }
            None => {
                report.push(ResultEntry::plain(cname, cross));
                report.push(ResultEntry::plain(dname, dot));
            }
        }
    }
    Ok(report.finish(started))
}

/// The partitions of four sites in table order, one-based.
pub const TABLE2_PARTITIONS: [&str; 5] = ["1234", "123|4", "12|34", "1|2|34", "1|2|3|4"];

/// Published partition bounds `(cross, dot, mk)` for four qubits.
pub fn table2_targets(partition: &str) -> Option<[Surd; 3]> {
    let r = Surd::root;
    let i = Surd::integer;
    Some(match partition {
        "1234" => [r(2, 6), r(4, 3), r(2, 2)],
        "123|4" => [r(2, 2), r(2, 2), i(2)],
        "12|34" => [i(4), i(6), r(1, 2)],
        "1|2|34" => [i(2), i(2), r(1, 2)],
        "1|2|3|4" => [i(1), i(1), i(1)],
        _ => return None,
    })
}

pub const TABLE2_REL_TOL: f64 = 0.01;
pub const CAPTION_SET_TOL: f64 = 1e-3;

/// Partition-constrained maxima for all four-qubit partitions (or the one
/// given), swept over orderings.
pub fn cmd_table2(params: &RunParams) -> Result<RunReport> {
    let started = Instant::now();
    params.require_qubits(Command::Table2)?;
    let mut report = RunReport::new(Command::Table2, params);
    let n = params.sites.unwrap_or(4);
    let sites = SiteList::qubits(n);
    let partitions: Vec<PartitionSpec> = match &params.partition {
        Some(p) => vec![PartitionSpec::parse(p, n)?],
        None if n == 4 => TABLE2_PARTITIONS.iter().map(|p| PartitionSpec::parse(p, 4)).collect::<Result<_>>()?,
        None => vec![PartitionSpec::singletons(n), PartitionSpec::whole(n)],
    };
    let orderings = params.ordering.as_ref().map(|o| vec![o.clone()]);
    if let Some(o) = &params.ordering {
        params.ordering_for(n)?;
        report.notes.push(format!("ordering sweep restricted to {}", o.to_one_based_string()));
    }
    for partition in &partitions {
        let label = partition.to_string();
        let targets = if n == 4 { table2_targets(&label) } else { None };
        let cross = partition_bound_sweep(WitnessKind::Cross, &sites, partition, orderings.clone(), &params.opt)?;
        let dot = partition_bound_sweep(WitnessKind::Dot, &sites, partition, orderings.clone(), &params.opt)?;
        let mk = partition_bound_mk(&sites, partition, &params.opt)?;
        let found = [
            ("cross", cross.best.value, Some(&cross)),
            ("dot", dot.best.value, Some(&dot)),
            ("mk", mk.value, None),
        ];
        for (k, (col, value, sweep)) in found.into_iter().enumerate() {
            let name = format!("{col} [{label}]");
            let mut entry = match &targets {
                Some(t) => ResultEntry::checked(
                    name,
                    value,
                    &Target::exact(t[k].clone(), Provenance::Paper, Check::Rel(TABLE2_REL_TOL)),
                ),
                None => ResultEntry::plain(name, value),
            };
            if let Some(s) = sweep {
                entry = entry.with_note(format!("best ordering {}", one_based(&s.best_ordering)));
            }
            report.push(entry);
        }
        for (col, sweep) in [("cross", &cross), ("dot", &dot)] {
            for (perm, r) in &sweep.per_ordering {
                report.push(ResultEntry::plain(format!("{col} [{label}] ordering {}", one_based(perm)), r.value));
            }
        }
        if n == 4 && label == "1|2|34" && orderings.is_none() {
            let values: Vec<f64> = cross.per_ordering.iter().map(|(_, r)| r.value).collect();
            for expected in [Surd::integer(1), Surd::root(1, 2), Surd::integer(2)] {
                let t = expected.value();
                let closest = values
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
                    .unwrap_or(f64::NAN);
                report.push(
                    ResultEntry::checked(
                        format!("cross [{label}] per-ordering value {expected}"),
                        closest,
                        &Target::exact(expected, Provenance::Paper, Check::Abs(CAPTION_SET_TOL)),
                    )
                    .with_note("closest per-ordering value"),
                );
            }
        }
    }
    report.notes.push("partition values are lower bounds found by restarted alternating ascent".into());
    Ok(report.finish(started))
}

fn one_based(perm: &[usize]) -> String {
    perm.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(",")
}

/// Derived targets for qubit cross ratios `N = 3..=6`.
pub fn cross_ratio_target(n: usize) -> Option<TargetValue> {
    Some(match n {
        3 => surd(&[(1, 2)], 1),
        4 => surd(&[(1, 3)], 1),
        5 => surd(&[(1, 21)], 3),
        6 => TargetValue::Decimal(12.144 / (2.0 * 14f64.sqrt())),
        _ => return None,
    })
}

pub const RATIO_TOL: f64 = 5e-4;
pub const RATIO_FLOOR_SLACK: f64 = 1e-9;

/// Successive-violation ratios of both witnesses, with the Mermin-Klyshko
/// reference line.
pub fn cmd_ratios(params: &RunParams) -> Result<RunReport> {
    let started = Instant::now();
    let mut report = RunReport::new(Command::Ratios, params);
    let max_n = params.sites.unwrap_or(6);
    let cross = ratio_curve(max_n, params.spin, WitnessKind::Cross, params.dim_cap)?;
    let dot = ratio_curve(max_n, params.spin, WitnessKind::Dot, params.dim_cap)?;
    let qubits = params.spin.is_qubit();
    for &(n, r) in &cross {
        let name = format!("cross ratio N={n}");
        let entry = match cross_ratio_target(n).filter(|_| qubits) {
            Some(t) => ResultEntry::checked(
                name,
                r,
                &Target { value: t, provenance: Provenance::Derived, check: Check::Abs(RATIO_TOL) },
            ),
            None => ResultEntry::plain(name, r),
        };
        report.push(entry);
    }
    for &(n, r) in &dot {
        report.push(ResultEntry::plain(format!("dot ratio N={n}"), r));
    }
    if qubits {
        for &(n, _) in &cross {
            report.push(ResultEntry::plain(format!("mk ratio N={n}"), MK_RATIO));
        }
        let floor = cross.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
        report.push(ResultEntry::checked(
            "min cross ratio",
            floor,
            &Target::exact(Surd::root(1, 2), Provenance::Paper, Check::AtLeast(RATIO_FLOOR_SLACK)),
        ));
    }
    report.notes.push("ratios at N=2 divide by the single-site maximum 1".into());
    Ok(report.finish(started))
}

pub const NOISE_TOL: f64 = 5e-3;

/// White-noise thresholds for the W eigen-phase state and GHZ.
pub fn cmd_noise(params: &RunParams) -> Result<RunReport> {
    let started = Instant::now();
    params.require_qubits(Command::Noise)?;
    let mut report = RunReport::new(Command::Noise, params);
    let n = params.sites.unwrap_or(3);
    let sites = SiteList::qubits(n);
    let ordering = params.ordering_for(n)?;
    let d = build_dot_chain(&sites, &ordering)?;
    let cfg = &params.opt;

    let mut cases: Vec<(&str, QuantumState, ThresholdWitness, Option<(Surd, Surd, f64)>)> = Vec::new();
    if n == 3 {
        let phases = find_w3_eigen_phases(cfg)?;
        report.push(ResultEntry::plain("w3 alpha", phases.alpha));
        report.push(ResultEntry::plain("w3 beta", phases.beta));
        cases.push((
            "w3 dot",
            w3(phases.alpha, phases.beta),
            ThresholdWitness::Frames(Witness::Scalar(&d)),
            Some((Surd::root(2, 3), Surd::new(vec![(6, 1), (-1, 3)], 6), 1e-4)),
        ));
    }
    let ghz_n = ghz(n)?;
    cases.push((
        "ghz dot",
        ghz_n.clone(),
        ThresholdWitness::Frames(Witness::Scalar(&d)),
        (n == 3).then(|| (Surd::new(vec![(3, 3)], 2), Surd::new(vec![(9, 1), (-2, 3)], 9), 1e-3)),
    ));
    cases.push((
        "ghz mk",
        ghz_n,
        ThresholdWitness::Mk,
        (n == 3).then(|| (Surd::integer(2), Surd::new(vec![(1, 1)], 2), 1e-3)),
    ));

    for (label, state, witness, targets) in cases {
        let t = noise_threshold(&state, witness, cfg)?;
        match targets {
            Some((violation, nu, vtol)) => {
                report.push(ResultEntry::checked(
                    format!("{label} violation"),
                    t.pure_violation,
                    &Target::exact(violation, Provenance::Paper, Check::Abs(vtol)),
                ));
                report.push(ResultEntry::checked(
                    format!("{label} threshold"),
                    t.nu,
                    &Target::exact(nu, Provenance::Derived, Check::Abs(NOISE_TOL)),
                ));
            }
            None => {
                report.push(ResultEntry::plain(format!("{label} violation"), t.pure_violation));
                report.push(ResultEntry::plain(format!("{label} threshold"), t.nu));
            }
        }
        report.push(ResultEntry::plain(format!("{label} analytic threshold"), t.analytic));
        report.push(ResultEntry::property(format!("{label} bisection agrees with 1-1/V"), t.consistent));
        if t.never_violates {
            report.notes.push(format!("{label}: state never violates the separable bound"));
        }
    }
    Ok(report.finish(started))
}

pub const PPT_TOL: f64 = 1e-10;
pub const NPT_MARGIN: f64 = 1e-6;

/// Witness values and partial-transpose spectra of the Dür state.
pub fn cmd_bound(params: &RunParams) -> Result<RunReport> {
    let started = Instant::now();
    params.require_qubits(Command::Bound)?;
    let mut report = RunReport::new(Command::Bound, params);
    let n = params.sites.unwrap_or(4);
    let rho = dur_state(n)?;
    let ordering = params.ordering_for(n)?;
    let (c, d) = verify_cross_le_dot(&rho, &ordering, &params.opt)?;
    if n == 4 {
        report.push(ResultEntry::checked(
            "dur cross",
            c,
            &Target::decimal(1.09, Provenance::Paper, Check::Range(1.07, 1.09 + 0.05)),
        ));
        report.push(ResultEntry::checked(
            "dur dot",
            d,
            &Target::decimal(1.25, Provenance::Paper, Check::Range(1.23, 1.25 + 0.05)),
        ));
    } else {
        report.push(ResultEntry::plain("dur cross", c));
        report.push(ResultEntry::plain("dur dot", d));
    }
    for k in 0..n {
        let min = min_pt_eigenvalue(&rho, &[k])?;
        report.push(ResultEntry::checked(
            format!("pt min eigenvalue {{{}}}", k + 1),
            min,
            &Target::exact(Surd::integer(0), Provenance::Paper, Check::AtLeast(PPT_TOL)),
        ));
    }
    let mut most_negative = f64::INFINITY;
    for block in two_site_blocks(n) {
        let min = min_pt_eigenvalue(&rho, &block)?;
        report.push(ResultEntry::plain(format!("pt min eigenvalue {{{}}}", one_based(&block).replace(',', "")), min));
        most_negative = most_negative.min(min);
    }
    if n >= 4 {
        report.push(ResultEntry::checked(
            "pt min eigenvalue over two-site cuts",
            most_negative,
            &Target::exact(Surd::integer(0), Provenance::Paper, Check::AtMost(-NPT_MARGIN)),
        ));
    }
    Ok(report.finish(started))
}

fn two_site_blocks(n: usize) -> Vec<Vec<usize>> {
    (1..n).map(|k| vec![0, k]).collect()
}

pub fn min_pt_eigenvalue(state: &QuantumState, block: &[usize]) -> Result<f64> {
    let pt = partial_transpose(state, block)?;
    Ok(eigvals_hermitian(&pt)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Runs the property suite: every entry is a pass/fail check.
pub fn cmd_verify(params: &RunParams) -> Result<RunReport> {
    let started = Instant::now();
    let mut report = RunReport::new(Command::Verify, params);
    let cfg = OptConfig { restarts: params.opt.restarts.min(16), ..params.opt.clone() };

    for two_j in 1..=3 {
        let s = SpinQuantum::from_two_j(two_j);
        let m = spin_matrices(s);
        let err = (&m.x.commutator(&m.y) - &m.z.scale(crate::linalg::I)).max_abs();
        report.push(ResultEntry::property(format!("spin {s} commutation"), err < 1e-12));
    }

    for (two_j, n_max) in [(1u32, 6usize), (2, 5)] {
        let spin = SpinQuantum::from_two_j(two_j);
        for n in 2..=n_max {
            let sites = SiteList::uniform(n, spin);
            let id = OrderingSpec::identity(n);
            let dot = dot_spectrum(&sites, &id, params.dim_cap)?;
            let cross = cross_z_spectrum(&sites, &id, params.dim_cap)?;
            if n == 2 {
                report.push(ResultEntry::property(
                    format!("dot spectrum traceless, spin {spin} N=2"),
                    dot.iter().sum::<f64>().abs() <= 1e-8,
                ));
            } else {
                report.push(ResultEntry::property(
                    format!("dot spectrum traceless and paired, spin {spin} N={n}"),
                    traceless_and_paired(&dot, 1e-8),
                ));
            }
            report.push(ResultEntry::property(
                format!("cross z spectrum traceless and paired, spin {spin} N={n}"),
                traceless_and_paired(&cross, 1e-8),
            ));
        }
    }

    for n in 2..=4 {
        let sites = SiteList::qubits(n);
        let id = OrderingSpec::identity(n);
        let c = build_cross_chain(&sites, &id)?;
        let d = build_dot_chain(&sites, &id)?;
        let total = total_spin(&sites);
        let jt = total.components();
        let cc = c.components.components();
        let mut worst: f64 = 0.0;
        for u in 0..3 {
            worst = worst.max(d.matrix.commutator(jt[u]).max_abs());
            for v in 0..3 {
                let mut expected = ComplexMatrix::zeros(sites.total_dim());
                for w in 0..3 {
                    let e = crate::spin::levi_civita(u, v, w);
                    if e != 0.0 {
                        expected.add_scaled(cc[w], crate::linalg::I * e);
                    }
                }
                worst = worst.max((&cc[u].commutator(jt[v]) - &expected).max_abs());
            }
        }
        report.push(ResultEntry::property(format!("covariance commutators N={n}"), worst < 1e-10));
    }

    let d4 = build_dot_chain(&SiteList::qubits(4), &OrderingSpec::new(vec![0, 3, 2, 1])?)?;
    let p = psi4();
    let psi = p.amplitudes().expect("pure");
    let r = residual(&d4.matrix, psi, 4.0 * 3f64.sqrt());
    report.push(ResultEntry::property("psi4 eigenvalue residual", r <= 1e-10));
    let c4 = build_cross_chain(&SiteList::qubits(4), &OrderingSpec::parse_one_based("3,4,2,1")?)?;
    let f = phi4();
    let r = residual(&c4.components.y, f.amplitudes().expect("pure"), 2.0 * 6f64.sqrt());
    report.push(ResultEntry::property("phi4 eigenvalue residual", r <= 1e-10));

    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let spin = if seed % 2 == 0 { SpinQuantum::HALF } else { SpinQuantum::ONE };
        let sites = SiteList::uniform(n, spin);
        let state = random_product(&sites, seed);
        let ordering = OrderingSpec::identity(n);
        let d = build_dot_chain(&sites, &ordering)?;
        let c = build_cross_chain(&sites, &ordering)?;
        worst = worst.max(expectation(&state, &d.matrix)?.abs());
        let norm = c
            .components
            .components()
            .iter()
            .map(|m| expectation(&state, m).map(|x| x * x))
            .sum::<Result<f64>>()?
            .sqrt();
        worst = worst.max(norm);
    }
    report.push(ResultEntry::checked(
        "max witness value over random product states",
        worst,
        &Target::exact(Surd::integer(1), Provenance::Paper, Check::AtMost(1e-10)),
    ));

    let mut worst_gap = f64::NEG_INFINITY;
    for seed in 0..5u64 {
        let state = random_pure(&SiteList::qubits(3), 1000 + seed);
        let (c, d) = verify_cross_le_dot(&state, &OrderingSpec::identity(3), &cfg)?;
        worst_gap = worst_gap.max(c - d);
    }
    report.push(ResultEntry::checked(
        "max (cross - dot) over random states",
        worst_gap,
        &Target::exact(Surd::integer(0), Provenance::Paper, Check::AtMost(1e-3)),
    ));

    report.push(ResultEntry::property("cross z equals y-x combination", cross_z_decomposition_error(7)? < 1e-10));

    for n in 2..=4 {
        let v = optimize_mk_settings(&ghz(n)?, &cfg)?.value;
        report.push(ResultEntry::checked(
            format!("mk ghz N={n}"),
            v,
            &Target::exact(mk_bound(n), Provenance::Paper, Check::Abs(1e-3)),
        ));
    }

    let dur = dur_state(4)?;
    let mut ppt = f64::INFINITY;
    for k in 0..4 {
        ppt = ppt.min(min_pt_eigenvalue(&dur, &[k])?);
    }
    report.push(ResultEntry::property("dur state PPT on one-site cuts", ppt >= -PPT_TOL));

    let state = random_pure(&SiteList::new(vec![SpinQuantum::HALF, SpinQuantum::ONE]), 3);
    let back = state_from_str(&state_to_string(&state))?;
    report.push(ResultEntry::property("state file round trip", back == state));

    let psi = ghz(3)?;
    let a = optimize_frames(&psi, Witness::Scalar(&build_dot_chain(&SiteList::qubits(3), &OrderingSpec::identity(3))?), &cfg)?;
    let b = optimize_frames(&psi, Witness::Scalar(&build_dot_chain(&SiteList::qubits(3), &OrderingSpec::identity(3))?), &cfg)?;
    report.push(ResultEntry::property("optimizer determinism", a == b));

    Ok(report.finish(started))
}

/// `2^((N-1)/2)` as a surd.
pub fn mk_bound(n: usize) -> Surd {
    let e = (n - 1) as u32;
    if e % 2 == 0 {
        Surd::integer(1 << (e / 2))
    } else {
        Surd::root(1 << (e / 2), 2)
    }
}

fn residual(op: &ComplexMatrix, v: &[crate::linalg::C64], lambda: f64) -> f64 {
    op.matvec(v).iter().zip(v).map(|(a, b)| (a - b * lambda).norm_sqr()).sum::<f64>().sqrt()
}

/// Whether a spectrum sums to zero and is symmetric under `x -> -x`.
pub fn traceless_and_paired(spectrum: &[f64], tol: f64) -> bool {
    let mut s = spectrum.to_vec();
    s.sort_by(f64::total_cmp);
    let trace: f64 = s.iter().sum();
    trace.abs() <= tol && s.iter().zip(s.iter().rev()).all(|(a, b)| (a + b).abs() <= tol)
}

/// Largest deviation, over rotated random 3-qubit states, between `<C_z(3)>`
/// and `<C_y(2) ⊗ sigma_x> - <C_x(2) ⊗ sigma_y>` with the third site outermost.
pub fn cross_z_decomposition_error(samples: u64) -> Result<f64> {
    let three = SiteList::qubits(3);
    let c3 = build_cross_chain(&three, &OrderingSpec::identity(3))?;
    let c2 = build_cross_chain(&SiteList::qubits(2), &OrderingSpec::identity(2))?;
    let s = spin_matrices(SpinQuantum::HALF);
    let (sx, sy) = (s.x.scale_real(2.0), s.y.scale_real(2.0));
    let cy_x = kron(&c2.components.y, &sx);
    let cx_y = kron(&c2.components.x, &sy);
    let mut worst: f64 = 0.0;
    for seed in 0..samples {
        let state = random_pure(&three, 500 + seed);
        let frames: Vec<ComplexMatrix> = (0..3)
            .map(|k| {
                let a = 0.37 * (seed as f64 + 1.0) + k as f64;
                site_unitary(AxisAngle([a.sin(), a.cos(), 0.5 * a]), SpinQuantum::HALF)
            })
            .collect();
        let u = kron(&kron(&frames[0], &frames[1]), &frames[2]);
        let rotated = QuantumState::pure(three.clone(), u.matvec(state.amplitudes().expect("pure")))?;
        let lhs = expectation(&rotated, &c3.components.z)?;
        let rhs = expectation(&rotated, &cy_x)? - expectation(&rotated, &cx_y)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("tabel1".parse::<Command>().is_err());
    }

    #[test]
    fn target_intervals() {
        let t = Target::exact(Surd::root(2, 3), Provenance::Paper, Check::Abs(1e-6));
        let e = ResultEntry::checked("x", 2.0 * 3f64.sqrt(), &t);
        assert_eq!(e.pass, Some(true));
        let e = ResultEntry::checked("x", 3.0, &t);
        assert_eq!(e.pass, Some(false));
        let at_least = Target::decimal(1.0, Provenance::Derived, Check::AtLeast(0.0));
        assert_eq!(ResultEntry::checked("y", 5.0, &at_least).pass, Some(true));
        assert_eq!(ResultEntry::checked("y", f64::NAN, &at_least).pass, Some(false));
        let rel = Target::decimal(100.0, Provenance::Paper, Check::Rel(0.01));
        assert_eq!(rel.interval(), (Some(99.0), Some(101.0)));
    }

    #[test]
    fn mk_bound_values() {
        for n in 1..=6 {
            assert!((mk_bound(n).value() - 2f64.powf((n as f64 - 1.0) / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn table1_small_report() {
        let params = RunParams { sites: Some(3), ..RunParams::default() };
        let r = cmd_table1(&params).unwrap();
        assert_eq!(r.results.len(), 4);
        assert!(r.all_targets_met, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.get("dot N=2").unwrap().value.round(), 3.0);
    }

    #[test]
    fn table1_truncates_at_cap() {
        let params = RunParams { sites: Some(5), dim_cap: 8, ..RunParams::default() };
        let r = cmd_table1(&params).unwrap();
        assert_eq!(r.results.len(), 4);
        assert!(r.notes[0].contains("truncated"));
    }

    #[test]
    fn csv_has_fixed_header() {
        let r = cmd_table1(&RunParams { sites: Some(2), ..RunParams::default() }).unwrap();
        let csv = r.to_csv();
        assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn qubit_only_commands_reject_qutrits() {
        let params = RunParams { spin: SpinQuantum::ONE, ..RunParams::default() };
        assert!(matches!(cmd_bound(&params), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn paired_spectrum_check() {
        assert!(traceless_and_paired(&[-1.0, 0.0, 1.0], 1e-12));
        assert!(!traceless_and_paired(&[-1.0, 2.0, -1.0], 1e-12));
    }

    #[test]
    fn decomposition_of_cross_z() {
        assert!(cross_z_decomposition_error(5).unwrap() < 1e-10);
    }
}
