//! JSON network files and CSV datasets.
//!
//! A network file holds `variables`, `parents` (node indices) and, for a full
//! network, `cpt` with one row per parent configuration. A structure file is
//! the same object without `cpt`. CSV cells are category codes or `NA`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, MISSING};
use crate::error::{Error, Result};
use crate::model::{validate_variables, BayesNet, Cpt, Dag, Variable, MAX_CARDINALITY};

/// Missing-cell token.
pub const NA: &str = "NA";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NetworkFile {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cpt: Option<Vec<Vec<Vec<f64>>>>,
}

fn node_error(vars: &[Variable], node: usize, reason: impl Into<String>) -> Error {
    Error::InvalidCpt {
        node,
        name: vars.get(node).map_or_else(|| format!("#{node}"), |v| v.name.clone()),
        reason: reason.into(),
    }
}

fn structure_of(file: &NetworkFile) -> Result<Dag> {
    validate_variables(&file.variables)?;
    if file.parents.len() != file.variables.len() {
        return Err(Error::NodeCountMismatch {
            left: file.parents.len(),
            right: file.variables.len(),
        });
    }
    Dag::new(file.parents.clone())
}

/// Parses a full network.
pub fn parse_network(text: &str) -> Result<BayesNet> {
    let file: NetworkFile = serde_json::from_str(text)?;
    let dag = structure_of(&file)?;
    let vars = &file.variables;
    let tables = file
        .cpt
        .ok_or_else(|| Error::Parse("network file has no \"cpt\"".into()))?;
    if tables.len() != vars.len() {
        return Err(Error::NodeCountMismatch {
            left: tables.len(),
            right: vars.len(),
        });
    }
    for (i, rows) in tables.iter().enumerate() {
        let configs: usize = dag.parents(i).iter().map(|&p| vars[p].cardinality).product();
        if rows.len() != configs {
            return Err(node_error(vars, i, format!("expected {configs} rows, found {}", rows.len())));
        }
        if let Some((j, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != vars[i].cardinality) {
            return Err(node_error(
                vars,
                i,
                format!("row {j} has {} entries, expected {}", r.len(), vars[i].cardinality),
            ));
        }
    }
    let cpt = Cpt::new(tables).map_err(|e| match e {
        Error::InvalidCpt { node, reason, .. } => node_error(vars, node, reason),
        other => other,
    })?;
    BayesNet::new(file.variables, dag, cpt)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<BayesNet> {
    parse_network(&std::fs::read_to_string(path)?)
}

pub fn network_to_json<T: crate::num::Real>(net: &BayesNet<T>) -> String {
    let file = NetworkFile {
        variables: net.variables().to_vec(),
        parents: net.dag().parent_sets().to_vec(),
        cpt: Some(net.cpt().map(|p| p.as_f64()).tables().to_vec()),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn save_network<T: crate::num::Real>(net: &BayesNet<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, network_to_json(net) + "\n")?;
    Ok(())
}

/// Parses a structure; a `cpt` member, if present, is ignored.
pub fn parse_structure(text: &str) -> Result<(Vec<Variable>, Dag)> {
    let file: NetworkFile = serde_json::from_str(text)?;
    let dag = structure_of(&file)?;
    Ok((file.variables, dag))
}

pub fn load_structure(path: impl AsRef<Path>) -> Result<(Vec<Variable>, Dag)> {
    parse_structure(&std::fs::read_to_string(path)?)
}

pub fn structure_to_json(vars: &[Variable], dag: &Dag) -> String {
    let file = NetworkFile {
        variables: vars.to_vec(),
        parents: dag.parent_sets().to_vec(),
        cpt: None,
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn save_structure(vars: &[Variable], dag: &Dag, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, structure_to_json(vars, dag) + "\n")?;
    Ok(())
}

fn parse_cell(s: &str, row: usize, col: &str) -> Result<u16> {
    if s == NA {
        return Ok(MISSING);
    }
    s.parse::<u16>()
        .ok()
        .filter(|&v| (v as usize) < MAX_CARDINALITY)
        .ok_or_else(|| Error::Parse(format!("record {row}, column {col}: bad cell {s:?}")))
}

/// Reads CSV. With a schema, header names are matched to schema variables
/// by name; without one, cardinalities are inferred as `max code + 1`
/// (at least 2).
pub fn read_csv<R: Read>(reader: R, schema: Option<&[Variable]>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let mut raw: Vec<Vec<u16>> = vec![Vec::new(); header.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Parse(format!("record {row} has {} cells, expected {}", rec.len(), header.len())));
        }
        for (c, cell) in rec.iter().enumerate() {
            raw[c].push(parse_cell(cell.trim(), row, &header[c])?);
        }
    }
    match schema {
        Some(vars) => {
            if header.len() != vars.len() {
                return Err(Error::SchemaMismatch(format!(
                    "CSV has {} columns, schema has {} variables",
                    header.len(),
                    vars.len()
                )));
            }
            let mut columns: Vec<Option<Vec<u16>>> = vec![None; vars.len()];
            for (name, col) in header.iter().zip(raw) {
                let i = vars
                    .iter()
                    .position(|v| &v.name == name)
                    .ok_or_else(|| Error::SchemaMismatch(format!("unknown column {name:?}")))?;
                if columns[i].replace(col).is_some() {
                    return Err(Error::SchemaMismatch(format!("duplicate column {name:?}")));
                }
            }
            Dataset::from_columns(vars.to_vec(), columns.into_iter().map(Option::unwrap).collect())
        }
        None => {
            let vars = header
                .iter()
                .zip(&raw)
                .map(|(name, col)| {
                    let max = col.iter().filter(|&&v| v != MISSING).max().copied().unwrap_or(0);
                    Variable::new(name.clone(), (max as usize + 1).max(2))
                })
                .collect::<Result<Vec<_>>>()?;
            Dataset::from_columns(vars, raw)
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: Option<&[Variable]>) -> Result<Dataset> {
    read_csv(BufReader::new(File::open(path)?), schema)
}

/// Writes CSV with LF line endings.
pub fn write_csv<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(data.variables().iter().map(|v| v.name.as_str()))?;
    let mut cells: Vec<String> = Vec::with_capacity(data.num_vars());
    for s in 0..data.len() {
        cells.clear();
        for c in 0..data.num_vars() {
            cells.push(data.cell(s, c).map_or_else(|| NA.to_string(), |v| v.to_string()));
        }
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), data)
}
