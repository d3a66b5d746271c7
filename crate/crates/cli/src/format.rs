//! File formats: CSV input, graph and matrix output, atomic writes.
//!
//! Vertices are 1-based in every format written or read here.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use condgraph_core::{DataMatrix, DepMatrix, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// `i,j,name_i,name_j` per edge
    EdgeList,
    /// Graphviz undirected graph
    Dot,
    /// `{"p", "names", "edges"}`
    JsonAdjacency,
    /// Full matrix with a header row and a name column
    CsvMatrix,
}

/// Reads a numeric CSV whose first row holds the column names.
pub fn read_csv(path: &Path) -> Result<DataMatrix> {
    let file =
        std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_csv(file).with_context(|| format!("in {}", path.display()))
}

pub fn parse_csv(reader: impl Read) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let p = names.len();
    let mut values = Vec::new();
    let mut n = 0;
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| anyhow!("data row {}: {e}", row + 1))?;
        for (col, cell) in record.iter().enumerate() {
            let x: f64 = cell.parse().map_err(|_| {
                anyhow!(
                    "data row {}, column {} (`{}`): cannot parse `{cell}` as a number",
                    row + 1,
                    col + 1,
                    names[col]
                )
            })?;
            if !x.is_finite() {
                bail!(
                    "data row {}, column {} (`{}`): non-finite value `{cell}`",
                    row + 1,
                    col + 1,
                    names[col]
                );
            }
            values.push(x);
        }
        n += 1;
    }
    Ok(DataMatrix::from_row_major(n, p, values, Some(names))?)
}

pub fn render_graph(g: &Graph, format: OutputFormat) -> String {
    match format {
        OutputFormat::EdgeList => edge_list(g),
        OutputFormat::Dot => dot(g),
        OutputFormat::JsonAdjacency => graph_to_json(g),
        OutputFormat::CsvMatrix => {
            let p = g.p();
            let names: Vec<String> = (0..p).map(|i| g.label(i)).collect();
            matrix_csv(&names, |i, j| {
                if g.contains(i, j) {
                    "1".into()
                } else {
                    "0".into()
                }
            })
        }
    }
}

pub fn edge_list(g: &Graph) -> String {
    let mut out = String::from("i,j,name_i,name_j\n");
    for &(i, j) in g.edges() {
        writeln!(out, "{},{},{},{}", i + 1, j + 1, g.label(i), g.label(j)).unwrap();
    }
    out
}

fn dot_id(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT graph; isolated vertices are listed too.
pub fn dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for i in 0..g.p() {
        writeln!(out, "  {} [label={}];", i + 1, dot_id(&g.label(i))).unwrap();
    }
    for &(i, j) in g.edges() {
        writeln!(out, "  {} -- {};", i + 1, j + 1).unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonGraph {
    p: usize,
    names: Vec<String>,
    edges: Vec<[usize; 2]>,
}

pub fn graph_to_json(g: &Graph) -> String {
    let doc = JsonGraph {
        p: g.p(),
        names: (0..g.p()).map(|i| g.label(i)).collect(),
        edges: g.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub fn graph_from_json(text: &str) -> Result<Graph> {
    let doc: JsonGraph = serde_json::from_str(text)?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for [i, j] in doc.edges {
        if i == 0 || j == 0 {
            bail!("vertices are 1-based, got [{i}, {j}]");
        }
        edges.push((i - 1, j - 1));
    }
    Ok(Graph::from_edges(doc.p, edges)?.with_names(doc.names)?)
}

fn matrix_csv(names: &[String], cell: impl Fn(usize, usize) -> String) -> String {
    let mut out = String::new();
    for name in names {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    for (i, name) in names.iter().enumerate() {
        out.push_str(name);
        for j in 0..names.len() {
            write!(out, ",{}", cell(i, j)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// 17 significant digits, so the text round-trips to the same `f64`.
pub fn dep_to_csv(m: &DepMatrix) -> String {
    matrix_csv(m.names(), |i, j| format!("{:.16e}", m.get(i, j)))
}

#[derive(Serialize)]
struct JsonDep<'a> {
    p: usize,
    names: &'a [String],
    values: Vec<Vec<f64>>,
    excluded: Vec<[usize; 2]>,
}

pub fn dep_to_json(m: &DepMatrix) -> String {
    let p = m.p();
    let doc = JsonDep {
        p,
        names: m.names(),
        values: (0..p)
            .map(|i| (0..p).map(|j| m.get(i, j)).collect())
            .collect(),
        excluded: excluded_pairs(m),
    };
    let mut s = serde_json::to_string(&doc).expect("finite values");
    s.push('\n');
    s
}

fn excluded_pairs(m: &DepMatrix) -> Vec<[usize; 2]> {
    m.excluded().iter().map(|&(i, j)| [i + 1, j + 1]).collect()
}

/// Ordered pairs whose estimate was undefined.
pub fn excluded_to_csv(m: &DepMatrix) -> String {
    let mut out = String::from("i,j,name_i,name_j\n");
    for &(i, j) in m.excluded() {
        writeln!(out, "{},{},{},{}", i + 1, j + 1, m.names()[i], m.names()[j]).unwrap();
    }
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// `<path>` with `suffix` appended to the file name.
pub fn sidecar(path: &Path, suffix: &str) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_values() {
        let d = parse_csv("a,b,c\n1,2,3\n4,5,6\n".as_bytes()).unwrap();
        assert_eq!((d.n(), d.p()), (2, 3));
        assert_eq!(d.names(), ["a", "b", "c"]);
        assert_eq!(d.get(1, 2), 6.0);
    }

    #[test]
    fn text_cell_is_located() {
        let err = parse_csv("a,b,c\n1,2,3\n4,x,6\n".as_bytes())
            .unwrap_err()
            .to_string();
        assert!(err.contains("data row 2, column 2 (`b`)"), "{err}");
    }

    #[test]
    fn nan_cell_is_located() {
        let err = parse_csv("a,b,c\n1,NaN,3\n4,5,6\n".as_bytes())
            .unwrap_err()
            .to_string();
        assert!(err.contains("data row 1, column 2"), "{err}");
    }

    #[test]
    fn ragged_row_rejected() {
        assert!(parse_csv("a,b,c\n1,2,3\n4,5\n".as_bytes()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::from_edges(5, [(0, 1), (2, 4)]).unwrap();
        let back = graph_from_json(&graph_to_json(&g)).unwrap();
        assert!(condgraph_core::graph_equal(&g, &back).unwrap());
        assert_eq!(back.label(4), "X5");
    }

    #[test]
    fn json_is_one_based() {
        let g = Graph::from_edges(3, [(0, 2)]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&graph_to_json(&g)).unwrap();
        assert_eq!(v["edges"], serde_json::json!([[1, 3]]));
        assert_eq!(v["p"], 3);
    }

    #[test]
    fn dot_lists_isolated_vertices() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let s = dot(&g);
        assert!(s.contains("3 [label=\"X3\"]"));
        assert!(s.contains("1 -- 2;"));
    }

    #[test]
    fn matrix_text_round_trips() {
        let x = 0.1f64 + 0.2;
        let s = format!("{:.16e}", x);
        assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(
            sidecar(Path::new("out/m.csv"), ".excluded.csv"),
            Path::new("out/m.csv.excluded.csv")
        );
    }
}
