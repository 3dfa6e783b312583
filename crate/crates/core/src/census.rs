//! Parameter sweeps comparing the closed-form classifiers with the
//! brute-force order test, and their CSV/JSON reports.

use std::collections::HashSet;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianGroup, GroupElement};
use crate::aut::EngineConfig;
use crate::cayley::{cayley_graph, ConnectionSet, GridKind, GridParams};
use crate::exec::Execution;
use crate::graph::Graph;
use crate::stability::{
    classify_grid, classify_val4, classify_val6, group_name, stability_verdict,
    ClassificationVerdict, StabilityError, Verdict,
};

pub const CSV_HEADER: [&str; 11] = [
    "kind", "m", "n", "r", "vertices", "aut_order", "baut_order", "oracle", "predicted", "clause",
    "agrees",
];

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{0}")]
    InvalidBounds(String),
    #[error("report i/o: {0}")]
    Io(#[from] io::Error),
    #[error("malformed report: {0}")]
    Malformed(String),
}

/// One instance of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepJob {
    Grid(GridParams),
    /// `Cay(G; ±a, ±b)`.
    Val4 {
        group: AbelianGroup,
        a: GroupElement,
        b: GroupElement,
        label: String,
    },
    /// `Cay(G; ±a, ±b, ±(a + b))`.
    Val6 {
        group: AbelianGroup,
        a: GroupElement,
        b: GroupElement,
        label: String,
    },
}

impl SweepJob {
    fn val4(group: &AbelianGroup, a: GroupElement, b: GroupElement) -> Self {
        let label = group_name(group);
        SweepJob::Val4 { group: group.clone(), a, b, label }
    }

    fn val6(group: &AbelianGroup, a: GroupElement, b: GroupElement) -> Self {
        let label = group_name(group);
        SweepJob::Val6 { group: group.clone(), a, b, label }
    }

    pub fn subject(&self) -> RowSubject {
        match self {
            SweepJob::Grid(p) => RowSubject::Grid(*p),
            SweepJob::Val4 { a, b, label, .. } | SweepJob::Val6 { a, b, label, .. } => {
                RowSubject::Group {
                    group: label.clone(),
                    generators: vec![a.to_string(), b.to_string()],
                }
            }
        }
    }

    pub fn connection_set(&self) -> Option<ConnectionSet> {
        match self {
            SweepJob::Grid(p) => crate::cayley::grid_to_cayley(p).ok(),
            SweepJob::Val4 { group, a, b, .. } => {
                ConnectionSet::symmetric(group.clone(), &[a.clone(), b.clone()]).ok()
            }
            SweepJob::Val6 { group, a, b, .. } => {
                ConnectionSet::symmetric(group.clone(), &[a.clone(), b.clone(), group.add(a, b)]).ok()
            }
        }
    }

    pub fn graph(&self) -> Graph {
        match self {
            SweepJob::Grid(p) => p.graph(),
            _ => cayley_graph(&self.connection_set().expect("sweep jobs are valid")),
        }
    }

    pub fn classify(&self, cfg: &EngineConfig) -> Result<ClassificationVerdict, StabilityError> {
        match self {
            SweepJob::Grid(p) => Ok(classify_grid(p)),
            SweepJob::Val4 { group, a, b, .. } => classify_val4(group, a, b, cfg),
            SweepJob::Val6 { group, a, b, .. } => classify_val6(group, a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RowSubject {
    Grid(GridParams),
    Group { group: String, generators: Vec<String> },
}

impl RowSubject {
    /// Values of the `kind, m, n, r` columns. Group rows put
    /// `group; generators` in `kind` and leave the rest empty.
    fn csv_fields(&self) -> [String; 4] {
        match self {
            RowSubject::Grid(p) => [p.kind.to_string(), p.m.to_string(), p.n.to_string(), p.r.to_string()],
            RowSubject::Group { group, generators } => [
                format!("{group}; {}", generators.join(" ")),
                String::new(),
                String::new(),
                String::new(),
            ],
        }
    }

    fn from_csv_fields(f: &[&str]) -> Result<Self, CensusError> {
        if f[1].is_empty() {
            let (group, gens) = f[0]
                .split_once("; ")
                .ok_or_else(|| CensusError::Malformed(format!("subject {:?}", f[0])))?;
            return Ok(RowSubject::Group {
                group: group.to_string(),
                generators: gens.split(' ').map(str::to_string).collect(),
            });
        }
        let kind = GridKind::from_str(f[0]).map_err(|e| CensusError::Malformed(e.to_string()))?;
        let num = |s: &str| {
            s.parse::<i64>()
                .map_err(|_| CensusError::Malformed(format!("integer {s:?}")))
        };
        let p = GridParams::new(kind, num(f[1])?, num(f[2])?, num(f[3])?)
            .map_err(|e| CensusError::Malformed(e.to_string()))?;
        Ok(RowSubject::Grid(p))
    }
}

impl fmt::Display for RowSubject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowSubject::Grid(p) => write!(f, "{p}"),
            RowSubject::Group { group, generators } => {
                write!(f, "Cay({group}; {})", generators.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub subject: RowSubject,
    pub vertices: usize,
    #[serde(with = "decimal")]
    pub aut_order: Option<BigUint>,
    #[serde(with = "decimal")]
    pub baut_order: Option<BigUint>,
    /// Absent when the engine gave up on this row.
    pub oracle: Option<Verdict>,
    pub predicted: Option<Verdict>,
    pub clause: Option<String>,
    pub agrees: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_engine_error(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub total: usize,
    pub disagreements: usize,
    pub engine_errors: usize,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn from_rows(rows: Vec<SweepRow>, runtime_ms: u64) -> Self {
        let summary = SweepSummary {
            total: rows.len(),
            disagreements: rows.iter().filter(|r| !r.agrees).count(),
            engine_errors: rows.iter().filter(|r| r.is_engine_error()).count(),
            runtime_ms,
        };
        SweepReport { rows, summary }
    }

    /// Rows the oracle found unstable.
    pub fn unstable_rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.oracle.is_some_and(|v| !v.is_stable()))
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&x.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| s.parse::<BigUint>().map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub execution: Execution,
    pub engine: EngineConfig,
    /// Rows evaluated between two flushes.
    pub chunk: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            execution: Execution::default(),
            engine: EngineConfig::from_env(),
            chunk: 64,
        }
    }
}

/// Runs the oracle and the classifier on one job.
pub fn evaluate(job: &SweepJob, cfg: &EngineConfig) -> SweepRow {
    let x = job.graph();
    let mut row = SweepRow {
        subject: job.subject(),
        vertices: x.vertex_count(),
        aut_order: None,
        baut_order: None,
        oracle: None,
        predicted: None,
        clause: None,
        agrees: false,
        error: None,
    };
    match job.classify(cfg) {
        Ok(c) => {
            row.predicted = Some(c.predicted);
            row.clause = c.matched_clause;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    match stability_verdict(&x, cfg) {
        Ok(v) => {
            row.oracle = Some(v.verdict);
            row.aut_order = v.aut_order;
            row.baut_order = v.baut_order;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.agrees = row.error.is_none() && row.oracle == row.predicted;
    row
}

/// Evaluates `jobs` in order, handing each finished row to `sink` in
/// enumeration order, one chunk at a time.
pub fn run_jobs<F>(jobs: &[SweepJob], opts: &SweepOptions, mut sink: F) -> Result<SweepReport, CensusError>
where
    F: FnMut(&SweepRow) -> io::Result<()>,
{
    let start = Instant::now();
    let mut rows = Vec::with_capacity(jobs.len());
    for chunk in jobs.chunks(opts.chunk.max(1)) {
        let done = opts.execution.map(chunk, |job| evaluate(job, &opts.engine));
        for row in done {
            sink(&row)?;
            rows.push(row);
        }
    }
    Ok(SweepReport::from_rows(rows, start.elapsed().as_millis() as u64))
}

/// Every `(m, n, r)` with `2 ≤ m ≤ max_m`, `2 ≤ n ≤ max_n`, `0 ≤ r < n`,
/// `m·n ≤ cap`, in lexicographic order.
pub fn grid_jobs(kind: GridKind, max_m: usize, max_n: usize, cap: usize) -> Result<Vec<SweepJob>, CensusError> {
    if max_m < 2 || max_n < 2 {
        return Err(CensusError::InvalidBounds(format!(
            "max_m and max_n must be at least 2, got {max_m} and {max_n}"
        )));
    }
    let mut jobs = Vec::new();
    for m in 2..=max_m {
        for n in 2..=max_n {
            if m * n > cap {
                continue;
            }
            for r in 0..n {
                let p = GridParams::new(kind, m as i64, n as i64, r as i64)
                    .expect("bounds checked");
                jobs.push(SweepJob::Grid(p));
            }
        }
    }
    Ok(jobs)
}

pub fn sweep_grids(kind: GridKind, max_m: usize, max_n: usize, cap: usize) -> Result<SweepReport, CensusError> {
    sweep_grids_with(kind, max_m, max_n, cap, &SweepOptions::default())
}

pub fn sweep_grids_with(
    kind: GridKind,
    max_m: usize,
    max_n: usize,
    cap: usize,
    opts: &SweepOptions,
) -> Result<SweepReport, CensusError> {
    run_jobs(&grid_jobs(kind, max_m, max_n, cap)?, opts, |_| Ok(()))
}

/// `Cay(Z_n × Z_k; ±(1,0), ±(0,1), ±(1,1))` for `2 ≤ n ≤ 12`, `k ∈ {2, 3}`.
pub fn val6_znxzk_jobs() -> Vec<SweepJob> {
    let mut jobs = Vec::new();
    for k in [2u64, 3] {
        for n in 2u64..=12 {
            let g = AbelianGroup::direct_product(&[n, k]).expect("finite");
            let a = g.generator("a").unwrap().clone();
            let b = g.generator("b").unwrap().clone();
            jobs.push(SweepJob::Val6 {
                label: format!("Z_{n} x Z_{k}"),
                group: g,
                a,
                b,
            });
        }
    }
    jobs.retain(|j| j.classify(&EngineConfig::default()).is_ok());
    jobs
}

pub fn sweep_val6_znxzk() -> Result<SweepReport, CensusError> {
    sweep_val6_znxzk_with(&SweepOptions::default())
}

pub fn sweep_val6_znxzk_with(opts: &SweepOptions) -> Result<SweepReport, CensusError> {
    run_jobs(&val6_znxzk_jobs(), opts, |_| Ok(()))
}

/// `(n, k)` read back from a row of [`sweep_val6_znxzk`].
pub fn znxzk_params(row: &SweepRow) -> Option<(u64, u64)> {
    let RowSubject::Group { group, .. } = &row.subject else {
        return None;
    };
    let (n, k) = group.strip_prefix("Z_")?.split_once(" x Z_")?;
    Some((n.parse().ok()?, k.parse().ok()?))
}

/// Groups `Z_n`, `Z_n × Z_2`, `Z_n × Z_4` of order at most `max_order`,
/// up to isomorphism, in order of `(order, invariant factors)`.
pub fn val4_groups(max_order: u64) -> Vec<AbelianGroup> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for moduli in (1..=max_order).flat_map(|n| [vec![n], vec![n, 2], vec![n, 4]]) {
        let g = AbelianGroup::direct_product(&moduli).expect("finite");
        if g.order() <= max_order && g.order() >= 5 && seen.insert(g.invariant_factors().to_vec()) {
            out.push(g);
        }
    }
    out.sort_by(|x, y| (x.order(), x.invariant_factors()).cmp(&(y.order(), y.invariant_factors())));
    out
}

/// Groups of rank at most 2 with order in `3..=max_order`.
pub fn rank2_groups(max_order: u64) -> Vec<AbelianGroup> {
    let mut out = Vec::new();
    for order in 3..=max_order {
        for d1 in 1..=order {
            if order % (d1 * d1) != 0 {
                continue;
            }
            let d2 = order / d1;
            if d2 % d1 != 0 {
                continue;
            }
            let moduli: Vec<u64> = if d1 == 1 { vec![d2] } else { vec![d1, d2] };
            out.push(AbelianGroup::direct_product(&moduli).expect("finite"));
        }
    }
    out
}

/// Group automorphisms as permutations of element indices.
fn automorphism_maps(g: &AbelianGroup) -> Vec<Vec<usize>> {
    let elements = g.elements();
    g.automorphisms()
        .iter()
        .map(|images| elements.iter().map(|x| g.index_of(&g.apply_hom(images, x))).collect())
        .collect()
}

/// One generating pair per `Aut(G)`-class of connection sets built by
/// `shape`, in order of the first pair reaching each class.
fn pairs_up_to_automorphism<F>(g: &AbelianGroup, shape: F) -> Vec<(GroupElement, GroupElement)>
where
    F: Fn(&GroupElement, &GroupElement) -> Option<Vec<GroupElement>>,
{
    let autos = automorphism_maps(g);
    let elements = g.elements();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i + 1..] {
            let Some(s) = shape(a, b) else { continue };
            let idx: Vec<usize> = s.iter().map(|x| g.index_of(x)).collect();
            let mut key = idx.clone();
            key.sort_unstable();
            if seen.contains(&key) || !g.generates(&[a.clone(), b.clone()]) {
                continue;
            }
            for map in &autos {
                let mut img: Vec<usize> = idx.iter().map(|&x| map[x]).collect();
                img.sort_unstable();
                seen.insert(img);
            }
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

fn symmetric_closure(g: &AbelianGroup, gens: &[&GroupElement]) -> Vec<GroupElement> {
    let mut s: Vec<GroupElement> = gens.iter().flat_map(|x| [(*x).clone(), g.negate(x)]).collect();
    s.sort();
    s.dedup();
    s
}

/// Valency-4 Cayley graphs of the groups of [`val4_groups`].
pub fn val4_jobs(max_order: u64) -> Vec<SweepJob> {
    let mut jobs = Vec::new();
    for g in val4_groups(max_order) {
        let pairs = pairs_up_to_automorphism(&g, |a, b| {
            let s = symmetric_closure(&g, &[a, b]);
            (s.len() == 4 && !s.iter().any(|x| g.is_zero(x))).then_some(s)
        });
        jobs.extend(pairs.into_iter().map(|(a, b)| SweepJob::val4(&g, a, b)));
    }
    jobs
}

/// `Cay(G; ±a, ±b, ±c)` with `a + b + c = 0`, the sets `{±a}`, `{±b}`,
/// `{±c}` distinct and none of them `{0}`, for the groups of
/// [`rank2_groups`].
pub fn val6_jobs(max_order: u64) -> Vec<SweepJob> {
    let mut jobs = Vec::new();
    for g in rank2_groups(max_order) {
        let pairs = pairs_up_to_automorphism(&g, |a, b| {
            let c = g.negate(&g.add(a, b));
            if [a, b, &c].iter().any(|x| g.is_zero(x)) {
                return None;
            }
            let pm = |x: &GroupElement| symmetric_closure(&g, &[x]);
            let (pa, pb, pc) = (pm(a), pm(b), pm(&c));
            if pa == pb || pa == pc || pb == pc {
                return None;
            }
            Some(symmetric_closure(&g, &[a, b, &c]))
        });
        jobs.extend(pairs.into_iter().map(|(a, b)| SweepJob::val6(&g, a, b)));
    }
    jobs
}

pub fn sweep_val4(max_order: u64, opts: &SweepOptions) -> Result<SweepReport, CensusError> {
    run_jobs(&val4_jobs(max_order), opts, |_| Ok(()))
}

pub fn sweep_val6(max_order: u64, opts: &SweepOptions) -> Result<SweepReport, CensusError> {
    run_jobs(&val6_jobs(max_order), opts, |_| Ok(()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format {other:?}, expected csv or json")),
        }
    }
}

fn verdict_field(v: Option<Verdict>, error: bool) -> String {
    match v {
        Some(v) => v.to_string(),
        None if error => "EngineError".into(),
        None => String::new(),
    }
}

fn csv_record(row: &SweepRow) -> Vec<String> {
    let [kind, m, n, r] = row.subject.csv_fields();
    let big = |x: &Option<BigUint>| x.as_ref().map(|v| v.to_string()).unwrap_or_default();
    vec![
        kind,
        m,
        n,
        r,
        row.vertices.to_string(),
        big(&row.aut_order),
        big(&row.baut_order),
        verdict_field(row.oracle, row.is_engine_error()),
        verdict_field(row.predicted, row.is_engine_error()),
        row.clause.clone().unwrap_or_default(),
        row.agrees.to_string(),
    ]
}

fn parse_verdict(s: &str) -> Result<Option<Verdict>, CensusError> {
    Ok(match s {
        "" | "EngineError" => None,
        "Stable" => Some(Verdict::Stable),
        "TriviallyUnstable" => Some(Verdict::TriviallyUnstable),
        "NontriviallyUnstable" => Some(Verdict::NontriviallyUnstable),
        other => return Err(CensusError::Malformed(format!("verdict {other:?}"))),
    })
}

fn row_from_record(rec: &csv::StringRecord) -> Result<SweepRow, CensusError> {
    let f: Vec<&str> = rec.iter().collect();
    if f.len() != CSV_HEADER.len() {
        return Err(CensusError::Malformed(format!("expected 11 fields, got {}", f.len())));
    }
    let big = |s: &str| -> Result<Option<BigUint>, CensusError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| CensusError::Malformed(format!("order {s:?}")))
        }
    };
    let error = (f[7] == "EngineError" || f[8] == "EngineError").then(|| "EngineError".to_string());
    Ok(SweepRow {
        subject: RowSubject::from_csv_fields(&f[..4])?,
        vertices: f[4].parse().map_err(|_| CensusError::Malformed(format!("vertices {:?}", f[4])))?,
        aut_order: big(f[5])?,
        baut_order: big(f[6])?,
        oracle: parse_verdict(f[7])?,
        predicted: parse_verdict(f[8])?,
        clause: (!f[9].is_empty()).then(|| f[9].to_string()),
        agrees: f[10] == "true",
        error,
    })
}

/// Serializes a report. CSV carries the rows only; JSON carries rows and
/// summary.
pub fn emit_report(r: &SweepReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(r).expect("reports serialize");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            for row in &r.rows {
                w.write_record(csv_record(row)).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

pub fn parse_json_report(bytes: &[u8]) -> Result<SweepReport, CensusError> {
    serde_json::from_slice(bytes).map_err(|e| CensusError::Malformed(e.to_string()))
}

/// Rows of a CSV report. The summary's runtime is zero.
pub fn parse_csv_report(bytes: &[u8]) -> Result<SweepReport, CensusError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let rows = rd
        .records()
        .map(|rec| row_from_record(&rec.map_err(|e| CensusError::Malformed(e.to_string()))?))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepReport::from_rows(rows, 0))
}

/// CSV report written and flushed row by row.
pub struct CsvReportWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvReportWriter<W> {
    pub fn new(w: W) -> io::Result<Self> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(CSV_HEADER)?;
        inner.flush()?;
        Ok(CsvReportWriter { inner })
    }

    /// Continues a report whose header is already written.
    pub fn append(w: W) -> Self {
        CsvReportWriter {
            inner: csv::WriterBuilder::new().has_headers(false).from_writer(w),
        }
    }

    pub fn write_row(&mut self, row: &SweepRow) -> io::Result<()> {
        self.inner.write_record(csv_record(row))?;
        self.inner.flush()
    }
}

/// Complete rows already in `path`, after cutting off a trailing partial
/// line. A missing or empty file has none.
fn recover_csv(path: &Path) -> Result<(Vec<SweepRow>, u64), CensusError> {
    let Ok(file) = File::open(path) else {
        return Ok((Vec::new(), 0));
    };
    let mut rd = BufReader::new(file);
    let mut good = 0u64;
    let mut text = Vec::new();
    let mut line = Vec::new();
    loop {
        line.clear();
        let k = rd.read_until(b'\n', &mut line)?;
        if k == 0 || line.last() != Some(&b'\n') {
            break;
        }
        text.extend_from_slice(&line);
        good += k as u64;
    }
    if good == 0 {
        return Ok((Vec::new(), 0));
    }
    let header = text.split(|&c| c == b'\n').next().unwrap_or_default();
    if header != CSV_HEADER.join(",").as_bytes() {
        return Err(CensusError::Malformed(format!("{} has an unexpected header", path.display())));
    }
    Ok((parse_csv_report(&text)?.rows, good))
}

/// Runs `jobs` writing CSV to `path` as rows finish. With `resume`, rows
/// already present are kept and skipped, after checking they match the
/// start of `jobs`.
pub fn sweep_to_csv(
    jobs: &[SweepJob],
    opts: &SweepOptions,
    path: &Path,
    resume: bool,
) -> Result<SweepReport, CensusError> {
    let (done, good_len) = if resume { recover_csv(path)? } else { (Vec::new(), 0) };
    if done.len() > jobs.len() {
        return Err(CensusError::Malformed(format!(
            "{} has {} rows but the sweep has {}",
            path.display(),
            done.len(),
            jobs.len()
        )));
    }
    for (row, job) in done.iter().zip(jobs) {
        if row.subject != job.subject() {
            return Err(CensusError::Malformed(format!(
                "{} does not match this sweep at {}",
                path.display(),
                row.subject
            )));
        }
    }
    let mut writer = if good_len > 0 {
        let mut f = OpenOptions::new().write(true).open(path)?;
        f.set_len(good_len)?;
        f.seek(SeekFrom::End(0))?;
        CsvReportWriter::append(f)
    } else {
        CsvReportWriter::new(File::create(path)?)?
    };
    let fresh = run_jobs(&jobs[done.len()..], opts, |row| writer.write_row(row))?;
    let mut rows = done;
    rows.extend(fresh.rows);
    Ok(SweepReport::from_rows(rows, fresh.summary.runtime_ms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq() -> SweepOptions {
        SweepOptions {
            execution: Execution::Sequential,
            engine: EngineConfig::default(),
            chunk: 4,
        }
    }

    #[test]
    fn smallest_grid_sweep() {
        let r = sweep_grids_with(GridKind::Qd, 2, 2, 8, &seq()).unwrap();
        assert_eq!(r.summary.total, 2);
        assert_eq!(r.summary.disagreements, 0);
    }

    #[test]
    fn bounds() {
        assert!(matches!(grid_jobs(GridKind::Tr, 1, 5, 100), Err(CensusError::InvalidBounds(_))));
        assert!(grid_jobs(GridKind::Tr, 3, 3, 3).unwrap().is_empty());
    }

    #[test]
    fn csv_shapes() {
        let empty = SweepReport::from_rows(Vec::new(), 0);
        let text = String::from_utf8(emit_report(&empty, ReportFormat::Csv)).unwrap();
        assert_eq!(text, "kind,m,n,r,vertices,aut_order,baut_order,oracle,predicted,clause,agrees\n");
        let r = sweep_grids_with(GridKind::Qd, 2, 2, 8, &seq()).unwrap();
        let one = SweepReport::from_rows(r.rows[..1].to_vec(), 0);
        let text = String::from_utf8(emit_report(&one, ReportFormat::Csv)).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(parse_csv_report(text.as_bytes()).unwrap().rows, one.rows);
    }

    #[test]
    fn json_round_trip() {
        let mut r = sweep_grids_with(GridKind::Tr, 3, 4, 12, &seq()).unwrap();
        r.rows.extend(sweep_val6_znxzk_with(&seq()).unwrap().rows.into_iter().take(3));
        let r = SweepReport::from_rows(r.rows, 5);
        let back = parse_json_report(&emit_report(&r, ReportFormat::Json)).unwrap();
        assert_eq!(back, r);
        let csv_back = parse_csv_report(&emit_report(&r, ReportFormat::Csv)).unwrap();
        assert_eq!(csv_back.rows, r.rows);
    }

    #[test]
    fn engine_errors_are_isolated() {
        let opts = SweepOptions {
            engine: EngineConfig { node_budget: 1, ..EngineConfig::default() },
            ..seq()
        };
        let r = sweep_grids_with(GridKind::Qd, 3, 4, 12, &opts).unwrap();
        assert_eq!(r.summary.total, 18);
        assert!(r.summary.engine_errors > 0);
        assert!(r.rows.iter().filter(|x| x.is_engine_error()).all(|x| !x.agrees));
        let text = String::from_utf8(emit_report(&r, ReportFormat::Csv)).unwrap();
        assert!(text.contains("EngineError"));
    }

    #[test]
    fn group_enumeration() {
        let groups: Vec<Vec<u64>> = rank2_groups(16).iter().map(|g| g.invariant_factors().to_vec()).collect();
        assert!(groups.contains(&vec![4, 4]));
        assert!(groups.contains(&vec![2, 8]));
        assert!(!groups.contains(&vec![2, 2, 2]));
        assert_eq!(groups.iter().filter(|f| f.iter().product::<u64>() == 16).count(), 3);
        // Z_7: {±1, ±2}, {±1, ±3}, {±2, ±3} are all equivalent under x -> 2x, 3x
        let z7 = val4_jobs(7)
            .into_iter()
            .filter(|j| matches!(j.subject(), RowSubject::Group { ref group, .. } if group == "Z_7"))
            .count();
        assert_eq!(z7, 1);
    }

    #[test]
    fn resume_continues_a_truncated_file() {
        let dir = std::env::temp_dir().join(format!("gridstab-census-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("qd.csv");
        let jobs = grid_jobs(GridKind::Qd, 3, 4, 12).unwrap();
        let full = sweep_to_csv(&jobs, &seq(), &path, false).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let cut = bytes.len() - 7;
        std::fs::write(&path, &bytes[..cut]).unwrap();
        let resumed = sweep_to_csv(&jobs, &seq(), &path, true).unwrap();
        assert_eq!(resumed.rows, full.rows);
        assert_eq!(std::fs::read(&path).unwrap(), bytes);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
