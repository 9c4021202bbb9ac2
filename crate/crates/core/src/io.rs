//! Table files, edge lists and the synthetic Zipf generator.
//!
//! Tables are CSV with a one-line header. The join column holds integer
//! keys; every other column is an opaque string payload.

use crate::cluster::DatasetStats;
use crate::error::{Error, Result};
use crate::record::DUMMY_KEY;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// A plain table: named columns and string cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec?.iter().map(str::to_string).collect());
        }
        Ok(Table { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.to_writer(std::fs::File::create(path)?)
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Index of a column, by name or, failing that, by 0-based position.
    pub fn column(&self, name: &str) -> Result<usize> {
        if let Some(i) = self.header.iter().position(|h| h == name) {
            return Ok(i);
        }
        match name.parse::<usize>() {
            Ok(i) if i < self.header.len() => Ok(i),
            _ => Err(Error::InvalidConfig(format!("no column {name:?} in {:?}", self.header))),
        }
    }

    /// Parses column `col` as join keys. Line numbers count the header.
    pub fn keys(&self, col: usize) -> Result<Vec<u64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| parse_key(&row[col], i + 2))
            .collect()
    }

    /// The cells of every row except column `col`.
    pub fn payloads(&self, col: usize) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, c)| c.clone()).collect())
            .collect()
    }

    /// Header without column `col`.
    pub fn payload_header(&self, col: usize) -> Vec<String> {
        self.header.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, c)| c.clone()).collect()
    }
}

fn parse_key(cell: &str, line: usize) -> Result<u64> {
    match cell.trim().parse::<u64>() {
        Ok(k) if k != DUMMY_KEY => Ok(k),
        Ok(_) => Err(Error::Parse {
            line,
            message: format!("key {DUMMY_KEY} is reserved"),
        }),
        Err(e) => Err(Error::Parse {
            line,
            message: format!("key {cell:?}: {e}"),
        }),
    }
}

/// Maps payload tuples to dense ids and back.
#[derive(Clone, Debug, Default)]
pub struct Interner {
    values: Vec<Vec<String>>,
    ids: HashMap<Vec<String>, u64>,
}

impl Interner {
    pub fn intern(&mut self, v: Vec<String>) -> u64 {
        if let Some(&id) = self.ids.get(&v) {
            return id;
        }
        let id = self.values.len() as u64;
        self.ids.insert(v.clone(), id);
        self.values.push(v);
        id
    }

    pub fn get(&self, id: u64) -> &[String] {
        &self.values[id as usize]
    }
}

/// Reads a whitespace- or comma-separated edge list; `#` starts a comment.
pub fn load_edges(path: &Path) -> Result<Table> {
    parse_edges(BufReader::new(std::fs::File::open(path)?))
}

pub fn parse_edges<R: BufRead>(reader: R) -> Result<Table> {
    let mut table = Table::new(&["src", "dst"]);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected two fields, found {}", fields.len()),
            });
        }
        let src = parse_key(fields[0], i + 1)?;
        let dst = parse_key(fields[1], i + 1)?;
        table.rows.push(vec![src.to_string(), dst.to_string()]);
    }
    Ok(table)
}

/// `rows` rows `(key, value)` with keys drawn from Zipf(`z`) over
/// `1..=domain` and `value` the row index. Returns the table and the
/// self-join statistics of its keys.
pub fn gen_zipf(rows: usize, domain: u64, z: f64, seed: u64) -> Result<(Table, DatasetStats)> {
    if rows == 0 || domain == 0 || z.is_nan() || z < 0.0 {
        return Err(Error::InvalidConfig("need rows ≥ 1, domain ≥ 1, z ≥ 0".into()));
    }
    let dist = Zipf::new(domain as f64, z).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<u64> = (0..rows).map(|_| rng.sample(dist) as u64).collect();
    let mut table = Table::new(&["key", "value"]);
    table.rows = keys.iter().enumerate().map(|(i, k)| vec![k.to_string(), i.to_string()]).collect();
    Ok((table, DatasetStats::from_keys(&keys, &keys)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_with_comments() {
        let t = parse_edges("# graph\n1 2\n\n2,3 # trailing\n".as_bytes()).unwrap();
        assert_eq!(t.rows, vec![vec!["1", "2"], vec!["2", "3"]]);
        assert!(parse_edges("".as_bytes()).unwrap().rows.is_empty());
    }

    #[test]
    fn edge_parse_error_line() {
        let e = parse_edges("1 2\n# c\n3 x\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = parse_edges("1 2 3\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(&["name", "id"]);
        t.rows.push(vec!["a,b".into(), "7".into()]);
        let mut buf = Vec::new();
        t.to_writer(&mut buf).unwrap();
        let back = Table::from_reader(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.keys(back.column("id").unwrap()).unwrap(), vec![7]);
        assert!(matches!(back.keys(0), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn single_key_domain() {
        let (t, stats) = gen_zipf(50, 1, 1.0, 3).unwrap();
        assert_eq!(t.rows.len(), 50);
        assert_eq!(stats.alpha1, 50);
    }

    #[test]
    fn uniform_max_frequency() {
        // Binomial(10⁴, 1/100): mean 100, sd ≈ 9.95; 5 sd ≈ 50.
        let (_, stats) = gen_zipf(10_000, 100, 0.0, 9).unwrap();
        assert!(stats.alpha1 <= 150, "{stats:?}");
    }

    #[test]
    fn skew_raises_alpha() {
        let (_, flat) = gen_zipf(10_000, 1_000, 0.0, 4).unwrap();
        let (_, skew) = gen_zipf(10_000, 1_000, 1.5, 4).unwrap();
        assert!(skew.alpha1 > flat.alpha1, "{} vs {}", skew.alpha1, flat.alpha1);
    }

    #[test]
    fn interner_ids() {
        let mut i = Interner::default();
        let a = i.intern(vec!["x".into()]);
        let b = i.intern(vec!["y".into()]);
        assert_eq!(i.intern(vec!["x".into()]), a);
        assert_eq!(i.get(b), ["y".to_string()]);
    }
}
