//! One operator run over table files, with its cost report.

use crate::cluster::{BoundCheck, Cluster, ClusterConfig, CostReport, DatasetStats, DistTable};
use crate::error::{Error, Result};
use crate::io::{Interner, Table};
use crate::record::Record;
use crate::relops::{self, layout, Bound};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// How the public output bound of an operator is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Padding {
    /// Compute `M` from the data (general join only).
    Infer,
    /// Caller-supplied `M ≥ 1`.
    Given(u64),
    /// Primary-key join: the output has the size of the left input.
    Pk,
}

impl FromStr for Padding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "infer" => Ok(Padding::Infer),
            "pk" => Ok(Padding::Pk),
            _ => match s.strip_prefix("given:").map(str::parse::<u64>) {
                Some(Ok(m)) if m >= 1 => Ok(Padding::Given(m)),
                _ => Err(Error::InvalidConfig(format!("padding {s:?}: expected infer, pk or given:M with M ≥ 1"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    Join,
    PkJoin,
    Sort,
    Expand,
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "join" => Ok(Operator::Join),
            "pkjoin" => Ok(Operator::PkJoin),
            "sort" => Ok(Operator::Sort),
            "expand" => Ok(Operator::Expand),
            other => Err(Error::UnknownOperator(other.to_string())),
        }
    }
}

/// Everything one run needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSpec {
    pub operator: Operator,
    /// One table for `sort` and `expand`, two (`R`, `S`) for the joins.
    pub inputs: Vec<PathBuf>,
    /// Key column per input, by name or index. Defaults: `key` if present,
    /// otherwise the last column of `R` and the first column of `S` (and of
    /// a single input).
    pub keys: Vec<Option<String>>,
    /// Repetition-count column of `expand` (default `count`, else last).
    pub count_column: Option<String>,
    pub servers: usize,
    pub sigma: u32,
    pub seed: u64,
    pub padding: Padding,
    pub report: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunSpec {
    pub fn new(operator: Operator, inputs: Vec<PathBuf>) -> Self {
        let padding = match operator {
            Operator::PkJoin => Padding::Pk,
            _ => Padding::Infer,
        };
        RunSpec {
            operator,
            keys: vec![None; inputs.len()],
            inputs,
            count_column: None,
            servers: 4,
            sigma: 40,
            seed: 0,
            padding,
            report: None,
            output: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.servers == 0 {
            return Err(Error::InvalidConfig("need at least one server".into()));
        }
        let want = match self.operator {
            Operator::Join | Operator::PkJoin => 2,
            Operator::Sort | Operator::Expand => 1,
        };
        if self.inputs.len() != want {
            return Err(Error::InvalidConfig(format!("operator needs {want} input table(s)")));
        }
        match (self.operator, self.padding) {
            (Operator::Join, Padding::Pk) => Err(Error::InvalidConfig("use pkjoin for primary-key joins".into())),
            (Operator::PkJoin, Padding::Given(_) | Padding::Infer) => {
                Err(Error::InvalidConfig("pkjoin always uses --padding pk".into()))
            }
            (Operator::Expand, Padding::Infer | Padding::Pk) => Err(Error::InvalidConfig("expand needs --padding given:M".into())),
            _ => Ok(()),
        }
    }
}

/// Report and result table of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub report: CostReport,
    pub output: Table,
}

/// A loaded input: table, key column and interned payloads.
struct Input {
    table: Table,
    key_col: usize,
    keys: Vec<u64>,
    payload_ids: Vec<u64>,
}

fn load(path: &Path, key: Option<&str>, fallback_last: bool, interner: &mut Interner) -> Result<Input> {
    let table = Table::read(path)?;
    if table.header.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "missing header".into(),
        });
    }
    let key_col = match key {
        Some(k) => table.column(k)?,
        None => match table.header.iter().position(|h| h == "key") {
            Some(i) => i,
            None if fallback_last => table.header.len() - 1,
            None => 0,
        },
    };
    let keys = table.keys(key_col)?;
    let payload_ids = table.payloads(key_col).into_iter().map(|p| interner.intern(p)).collect();
    Ok(Input {
        table,
        key_col,
        keys,
        payload_ids,
    })
}

/// Executes `spec` on a fresh simulated cluster; writes the report and the
/// output table when paths are set.
pub fn run(spec: &RunSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let config = ClusterConfig::new(spec.servers, spec.sigma, spec.seed);
    let mut cluster = Cluster::new(config)?;
    let p = spec.servers;
    let key = |i: usize| spec.keys.get(i).and_then(|k| k.as_deref());
    let mut left_ids = Interner::default();
    let mut right_ids = Interner::default();

    let (output, checks, dataset) = match spec.operator {
        Operator::Join | Operator::PkJoin => {
            let l = load(&spec.inputs[0], key(0), true, &mut left_ids)?;
            let r = load(&spec.inputs[1], key(1), false, &mut right_ids)?;
            let lrows: Vec<(u64, u64)> = l.payload_ids.iter().copied().zip(l.keys.iter().copied()).collect();
            let rrows: Vec<(u64, u64)> = r.keys.iter().copied().zip(r.payload_ids.iter().copied()).collect();
            let (n1, n2) = (lrows.len() as u64, rrows.len() as u64);
            let lt = DistTable::left(&lrows, p);
            let rt = DistTable::right(&rrows, p);
            let (rows, checks): (Vec<Record>, Vec<BoundCheck>) = if spec.operator == Operator::Join {
                let bound = match spec.padding {
                    Padding::Given(m) => Bound::Given(m),
                    _ => Bound::Infer,
                };
                let out = relops::join(&mut cluster, lt, rt, bound)?;
                let nominal = cluster.transcript().nominal();
                let checks = vec![join_check(n1 + n2, out.bound, p, nominal)];
                (out.table.real_rows().copied().collect(), checks)
            } else {
                let out = relops::pk_join(&mut cluster, lt, rt)?;
                let nominal = cluster.transcript().nominal();
                let checks = vec![BoundCheck::exactly("pk_join", "2N1 + N2", (2 * n1 + n2) as f64, nominal as f64)];
                (out.real_rows().copied().collect(), checks)
            };
            let mut header = l.table.payload_header(l.key_col);
            header.push(l.table.header[l.key_col].clone());
            header.extend(r.table.payload_header(r.key_col));
            let right_width = r.table.header.len() - 1;
            let table_rows = rows
                .iter()
                .map(|rec| {
                    let mut row = left_ids.get(rec.a).to_vec();
                    row.push(rec.key.to_string());
                    if rec.has_c {
                        row.extend_from_slice(right_ids.get(rec.c));
                    } else {
                        row.extend(std::iter::repeat_n(String::new(), right_width));
                    }
                    row
                })
                .collect();
            let stats = DatasetStats::from_keys(&l.keys, &r.keys);
            (Table { header, rows: table_rows }, checks, Some(stats))
        }
        Operator::Sort => {
            let l = load(&spec.inputs[0], key(0), false, &mut left_ids)?;
            let rows: Vec<(u64, u64)> = l.payload_ids.iter().copied().zip(l.keys.iter().copied()).collect();
            let t = DistTable::left(&rows, p);
            let sizes = t.sizes();
            let n = rows.len() as u64;
            let sorted = relops::sort_distributed(&mut cluster, t, |r| r.key);
            let r = layout::column_rows(&sizes) as u64;
            let checks = vec![
                BoundCheck::exactly("sort", "3N", (3 * n) as f64, cluster.transcript().nominal() as f64),
                BoundCheck::exactly(
                    "sort/padded",
                    "3pr",
                    (3 * p as u64 * r) as f64,
                    cluster.transcript().comm_elements() as f64,
                ),
            ];
            let table_rows = sorted
                .real_rows()
                .map(|rec| {
                    let mut row = left_ids.get(rec.a).to_vec();
                    row.insert(l.key_col.min(row.len()), rec.key.to_string());
                    row
                })
                .collect();
            (
                Table {
                    header: l.table.header.clone(),
                    rows: table_rows,
                },
                checks,
                None,
            )
        }
        Operator::Expand => {
            let Padding::Given(m) = spec.padding else {
                unreachable!("validated");
            };
            let t = Table::read(&spec.inputs[0])?;
            let count_col = match spec.count_column.as_deref() {
                Some(c) => t.column(c)?,
                None => t.header.iter().position(|h| h == "count").unwrap_or(t.header.len().saturating_sub(1)),
            };
            let counts = t.keys(count_col)?;
            let rows: Vec<Record> = t
                .payloads(count_col)
                .into_iter()
                .zip(&counts)
                .map(|(payload, &d)| Record::counted(left_ids.intern(payload), 0, d))
                .collect();
            let n = rows.len() as u64;
            let table = DistTable::from_rows(vec!["X".into(), "D".into()], rows, p);
            let out = relops::expand(&mut cluster, table, m)?;
            let checks = vec![expand_check(n, m, p, cluster.transcript().nominal())];
            let table_rows = out.real_rows().map(|rec| left_ids.get(rec.a).to_vec()).collect();
            (
                Table {
                    header: t.payload_header(count_col),
                    rows: table_rows,
                },
                checks,
                None,
            )
        }
    };

    let mut report = cluster.report(checks);
    report.dataset = dataset;
    if let Some(path) = &spec.report {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    if let Some(path) = &spec.output {
        output.write(path)?;
    }
    Ok(RunOutcome { report, output })
}

/// Nominal volume bound of the general join, plus the rounding of `M` up to `p·m`.
pub fn join_check(n: u64, bound: u64, p: usize, measured: u64) -> BoundCheck {
    let p = p as u64;
    let formula = 7 * n + 2 * bound + (2 * bound).min(n * p) + 4 * (p - 1);
    BoundCheck::at_most("join", "7N + 2M + min(2M, Np) + 4(p-1)", formula as f64, measured as f64)
}

/// Expansion shuffles, plus the rounding of `M` up to `p·m`.
pub fn expand_check(n: u64, bound: u64, p: usize, measured: u64) -> BoundCheck {
    let p = p as u64;
    let formula = n + bound.min(n * p) + (p - 1);
    BoundCheck::at_most("expand", "N + min(M, Np) + (p-1)", formula as f64, measured as f64)
}
