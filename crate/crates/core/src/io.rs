//! CSV ingestion, dataset partitioning and the model file format.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{CriterionKind, Dataset, Node, NodeKind, Tree};
use crate::error::{Error, Result};
use crate::sim::rng_from_seed;

/// What to do with columns holding non-numeric cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CategoricalPolicy {
    /// Expand into `{0, 1}` indicator columns named `column=value`.
    #[default]
    OneHot,
    /// Treat any non-numeric cell as a bad row.
    Reject,
}

/// Reads a headered, comma-separated file. `target` names the response
/// column; every other column becomes a feature.
pub fn load_csv(path: impl AsRef<Path>, target: &str, policy: CategoricalPolicy) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_csv(file, target, policy).map_err(|e| match e {
        Error::Csv { source, .. } => Error::Csv { path: path.to_path_buf(), source },
        other => other,
    })
}

/// [`load_csv`] over any reader.
pub fn read_csv<R: Read>(reader: R, target: &str, policy: CategoricalPolicy) -> Result<Dataset> {
    let csv_err = |source| Error::Csv { path: "<input>".into(), source };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let Some(target_idx) = header.iter().position(|h| h == target) else {
        return Err(Error::Unknown { kind: "target column", name: target.to_string() });
    };
    if header.len() < 2 {
        return Err(Error::empty("no feature columns besides the target"));
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for (j, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::BadRow { row: line, message: format!("blank cell in column `{}`", header[j]) });
            }
            cells[j].push(cell.to_string());
        }
        lines.push(line);
    }
    if lines.is_empty() {
        return Err(Error::empty("file has a header but no data rows"));
    }

    let parse_numeric = |j: usize| -> std::result::Result<Vec<f64>, (usize, String)> {
        cells[j]
            .iter()
            .enumerate()
            .map(|(i, c)| match c.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err((i, c.clone())),
            })
            .collect()
    };
    let bad_cell = |j: usize, (i, cell): (usize, String)| Error::BadRow {
        row: lines[i],
        message: format!("cannot parse `{cell}` in column `{}` as a finite number", header[j]),
    };

    let response = parse_numeric(target_idx).map_err(|e| bad_cell(target_idx, e))?;
    let mut columns = Vec::new();
    let mut names = Vec::new();
    for j in (0..header.len()).filter(|&j| j != target_idx) {
        match parse_numeric(j) {
            Ok(col) => {
                columns.push(col);
                names.push(header[j].clone());
            }
            Err(e) if policy == CategoricalPolicy::Reject => return Err(bad_cell(j, e)),
            Err(_) => {
                let levels: BTreeSet<&str> = cells[j].iter().map(String::as_str).collect();
                for level in levels {
                    columns.push(cells[j].iter().map(|c| if c == level { 1.0 } else { 0.0 }).collect());
                    names.push(format!("{}={level}", header[j]));
                }
            }
        }
    }
    Dataset::new(columns, response, names, target)
}

/// Reads the columns named in `names` from a headered CSV, in that order,
/// for prediction. A name `col=value` not present in the header is rebuilt as
/// the indicator of `value` in column `col`. Other columns are ignored.
pub fn read_feature_rows<R: Read>(reader: R, names: &[String]) -> Result<Vec<Vec<f64>>> {
    let csv_err = |source| Error::Csv { path: "<input>".into(), source };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    enum Source {
        Numeric(usize),
        Indicator(usize, String),
    }
    let sources = names
        .iter()
        .map(|name| {
            if let Some(j) = header.iter().position(|h| h == name) {
                return Ok(Source::Numeric(j));
            }
            name.split_once('=')
                .and_then(|(col, level)| header.iter().position(|h| h == col).map(|j| Source::Indicator(j, level.to_string())))
                .ok_or_else(|| Error::Unknown { kind: "feature column", name: name.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = sources
            .iter()
            .map(|source| match source {
                Source::Numeric(j) => match record[*j].parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::BadRow {
                        row: line,
                        message: format!("cannot parse `{}` in column `{}` as a finite number", &record[*j], header[*j]),
                    }),
                },
                Source::Indicator(j, level) => Ok(if record[*j] == *level { 1.0 } else { 0.0 }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Writes features then response, with the dataset's column names as header.
pub fn write_dataset_csv<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.into());
    let mut header: Vec<&str> = data.column_names().iter().map(String::as_str).collect();
    header.push(data.response_name());
    w.write_record(&header).map_err(io)?;
    for i in 0..data.n_rows() {
        let mut row: Vec<String> = (0..data.n_features()).map(|j| data.value(i, j).to_string()).collect();
        row.push(data.response()[i].to_string());
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Shuffles the rows with `seed` and slices them into three contiguous
/// parts in proportion to `ratios`. The first two sizes are rounded down and
/// the remainder goes to the last part.
pub fn split_dataset(data: &Dataset, ratios: [f64; 3], seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
    if ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::invalid("split ratios must be positive"));
    }
    let total: f64 = ratios.iter().sum();
    let n = data.n_rows();
    let n_train = (n as f64 * ratios[0] / total).floor() as usize;
    let n_validation = (n as f64 * ratios[1] / total).floor() as usize;
    if n_train == 0 || n_validation == 0 || n_train + n_validation >= n {
        return Err(Error::empty(format!("{n} rows cannot fill every part of a {ratios:?} split")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let (train, rest) = order.split_at(n_train);
    let (validation, test) = rest.split_at(n_validation);
    Ok((data.subset(train)?, data.subset(validation)?, data.subset(test)?))
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Serialized form of a [`Tree`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub criterion: CriterionKind,
    pub max_depth: usize,
    pub min_node_size: usize,
    pub column_names: Vec<String>,
    pub nodes: Vec<ModelNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelNodeKind {
    Internal,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelNode {
    pub id: usize,
    pub kind: ModelNodeKind,
    pub feature: Option<usize>,
    pub threshold: Option<f64>,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub n: usize,
    pub mean: f64,
    pub risk: f64,
}

impl From<&Tree> for ModelFile {
    fn from(tree: &Tree) -> Self {
        let nodes = tree
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, node)| {
                let (kind, feature, threshold, left, right) = match node.kind {
                    NodeKind::Leaf => (ModelNodeKind::Leaf, None, None, None, None),
                    NodeKind::Internal { feature, threshold, left, right } => {
                        (ModelNodeKind::Internal, Some(feature), Some(threshold), Some(left), Some(right))
                    }
                };
                ModelNode { id, kind, feature, threshold, left, right, n: node.n, mean: node.mean, risk: node.risk }
            })
            .collect();
        ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            criterion: tree.criterion(),
            max_depth: tree.max_depth(),
            min_node_size: tree.min_node_size(),
            column_names: tree.column_names().to_vec(),
            nodes,
        }
    }
}

impl TryFrom<ModelFile> for Tree {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<Tree> {
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFile(format!("unsupported format_version {}", file.format_version)));
        }
        let mut nodes = Vec::with_capacity(file.nodes.len());
        for (index, m) in file.nodes.iter().enumerate() {
            if m.id != index {
                return Err(Error::ModelFile(format!("node at position {index} has id {}", m.id)));
            }
            let kind = match (m.kind, m.feature, m.threshold, m.left, m.right) {
                (ModelNodeKind::Leaf, None, None, None, None) => NodeKind::Leaf,
                (ModelNodeKind::Internal, Some(feature), Some(threshold), Some(left), Some(right)) => {
                    NodeKind::Internal { feature, threshold, left, right }
                }
                _ => return Err(Error::ModelFile(format!("node {index} has fields inconsistent with its kind"))),
            };
            nodes.push(Node { kind, n: m.n, mean: m.mean, risk: m.risk, depth: 0 });
        }
        // Depths are implied by the structure; children always follow parents.
        for id in 0..nodes.len() {
            if let Some((l, r)) = nodes[id].children() {
                let depth = nodes[id].depth + 1;
                for child in [l, r] {
                    if child > id && child < nodes.len() {
                        nodes[child].depth = depth;
                    }
                }
            }
        }
        Tree::from_parts(nodes, file.criterion, file.max_depth, file.min_node_size, file.column_names)
            .map_err(|e| Error::ModelFile(e.to_string()))
    }
}

pub fn write_model<W: Write>(tree: &Tree, out: W) -> Result<()> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &ModelFile::from(tree))?;
    writeln!(out)?;
    Ok(())
}

pub fn read_model<R: Read>(reader: R) -> Result<Tree> {
    let file: ModelFile = serde_json::from_reader(reader).map_err(|e| Error::ModelFile(e.to_string()))?;
    Tree::try_from(file)
}

pub fn save_model(tree: &Tree, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_model(tree, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Tree> {
    read_model(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grow::grow_full;

    #[test]
    fn numeric_csv() {
        let d = read_csv("a,b,y\n1,2,3\n4,5,6\n".as_bytes(), "y", CategoricalPolicy::OneHot).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.column_names(), ["a", "b"]);
        assert_eq!(d.response(), [3.0, 6.0]);
        assert_eq!(d.column(1), [2.0, 5.0]);
    }

    #[test]
    fn categorical_columns_are_one_hot() {
        let text = "sex,len,rings\nM,0.4,7\nF,0.5,9\nI,0.3,5\nM,0.6,10\n";
        let d = read_csv(text.as_bytes(), "rings", CategoricalPolicy::OneHot).unwrap();
        assert_eq!(d.column_names(), ["sex=F", "sex=I", "sex=M", "len"]);
        assert_eq!(d.column(2), [1.0, 0.0, 0.0, 1.0]);
        assert!(read_csv(text.as_bytes(), "rings", CategoricalPolicy::Reject).is_err());
    }

    #[test]
    fn feature_rows_by_name() {
        let text = "y,sex,len\n1,M,0.4\n2,F,0.5\n";
        let names = vec!["len".to_string(), "sex=M".to_string()];
        let rows = read_feature_rows(text.as_bytes(), &names).unwrap();
        assert_eq!(rows, [vec![0.4, 1.0], vec![0.5, 0.0]]);
        assert!(read_feature_rows(text.as_bytes(), &["width".to_string()]).is_err());
    }

    #[test]
    fn bad_files() {
        let blank = read_csv("a,y\n1,2\n,3\n".as_bytes(), "y", CategoricalPolicy::OneHot).unwrap_err();
        assert!(matches!(blank, Error::BadRow { row: 3, .. }), "{blank}");
        assert!(read_csv("a,y\n1,2\n".as_bytes(), "z", CategoricalPolicy::OneHot).is_err());
        assert!(read_csv("a,y\n1,2\n3\n".as_bytes(), "y", CategoricalPolicy::OneHot).is_err());
        assert!(read_csv("a,y\n".as_bytes(), "y", CategoricalPolicy::OneHot).is_err());
        assert!(read_csv("a,y\n1,oops\n".as_bytes(), "y", CategoricalPolicy::OneHot).is_err());
        assert!(read_csv("a,y\n1,NaN\n".as_bytes(), "y", CategoricalPolicy::OneHot).is_err());
    }

    fn numbered(n: usize) -> Dataset {
        Dataset::univariate((0..n).map(|i| i as f64).collect(), (0..n).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn split_sizes_and_determinism() {
        let (a, b, c) = split_dataset(&numbered(8), [2.0, 1.0, 1.0], 3).unwrap();
        assert_eq!((a.n_rows(), b.n_rows(), c.n_rows()), (4, 2, 2));
        let (a, b, c) = split_dataset(&numbered(506), [2.0, 1.0, 1.0], 3).unwrap();
        assert_eq!((a.n_rows(), b.n_rows(), c.n_rows()), (253, 126, 127));
        let mut all: Vec<f64> = [a.response(), b.response(), c.response()].concat();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, numbered(506).response());
        assert_eq!(split_dataset(&numbered(506), [2.0, 1.0, 1.0], 3).unwrap().0, a);
        assert!(split_dataset(&numbered(3), [2.0, 1.0, 1.0], 3).is_err());
        assert!(split_dataset(&numbered(8), [2.0, 0.0, 1.0], 3).is_err());
    }

    #[test]
    fn model_round_trip() {
        let d = Dataset::univariate(vec![0.1, 0.7, 0.3, 0.9, 0.5], vec![1.0 / 3.0, 2.5, -1e-17, 7.0, 0.2]).unwrap();
        let tree = grow_full(&d, CriterionKind::Covrt, 1, 0).unwrap();
        let mut buf = Vec::new();
        write_model(&tree, &mut buf).unwrap();
        assert_eq!(read_model(buf.as_slice()).unwrap(), tree);
    }

    #[test]
    fn corrupted_model_is_rejected() {
        let d = Dataset::univariate(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 5.0]).unwrap();
        let tree = grow_full(&d, CriterionKind::Cart, 1, 0).unwrap();
        let mut file = ModelFile::from(&tree);
        file.nodes[0].left = Some(0);
        assert!(Tree::try_from(file.clone()).is_err());
        file.nodes[0].left = None;
        assert!(Tree::try_from(file).is_err());
        assert!(read_model("{}".as_bytes()).is_err());
    }
}
