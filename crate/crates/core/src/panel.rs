//! Panel, edge-list and community CSV ingestion.
//!
//! Ingestion is label-keyed: rows may arrive in any order and are sorted
//! by their labels, so permuting input rows never changes downstream
//! results. Time labels sort numerically when every label parses as an
//! integer, lexicographically otherwise.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Network};
use crate::scalar::Real;
use crate::sim::Realization;

/// Labelled rectangular panel of nodal time series with missing flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel<T: Real> {
    node_ids: Vec<String>,
    time_labels: Vec<String>,
    values: DMatrix<T>,
    missing: DMatrix<bool>,
}

impl<T: Real> Panel<T> {
    pub fn new(
        node_ids: Vec<String>,
        time_labels: Vec<String>,
        values: DMatrix<T>,
        missing: DMatrix<bool>,
    ) -> Result<Self> {
        if values.nrows() != node_ids.len() || values.ncols() != time_labels.len() {
            return Err(Error::DimensionMismatch {
                context: "panel shape vs labels",
                expected: node_ids.len() * time_labels.len(),
                got: values.nrows() * values.ncols(),
            });
        }
        if missing.nrows() != values.nrows() || missing.ncols() != values.ncols() {
            return Err(Error::DimensionMismatch {
                context: "panel missing flags",
                expected: values.nrows() * values.ncols(),
                got: missing.nrows() * missing.ncols(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for id in &node_ids {
            if !seen.insert(id.clone()) {
                return Err(Error::Invalid(format!("duplicate node id `{id}`")));
            }
        }
        for pair in time_labels.windows(2) {
            if label_cmp(&pair[0], &pair[1]) != std::cmp::Ordering::Less {
                return Err(Error::Invalid(format!(
                    "time labels must increase strictly: `{}` before `{}`",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self {
            node_ids,
            time_labels,
            values,
            missing,
        })
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn time_labels(&self) -> &[String] {
        &self.time_labels
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn len(&self) -> usize {
        self.time_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_labels.is_empty()
    }

    pub fn values(&self) -> &DMatrix<T> {
        &self.values
    }

    pub fn missing(&self) -> &DMatrix<bool> {
        &self.missing
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&b| b)
    }

    /// Drops labels and missing flags into a bare realization.
    pub fn to_realization(&self) -> Result<Realization<T>> {
        if self.has_missing() {
            Realization::with_missing(self.values.clone(), self.missing.clone())
        } else {
            Ok(Realization::new(self.values.clone()))
        }
    }

    /// Keeps the first `len` time steps.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len() {
            return Err(Error::BadWindow {
                t0: len,
                len: self.len(),
            });
        }
        Ok(Self {
            node_ids: self.node_ids.clone(),
            time_labels: self.time_labels[..len].to_vec(),
            values: self.values.columns(0, len).into_owned(),
            missing: self.missing.columns(0, len).into_owned(),
        })
    }

    /// Serializes in long form, `node,t,value`, with empty cells for
    /// missing entries. Deterministic.
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("node,t,value\n");
        for (i, node) in self.node_ids.iter().enumerate() {
            for (t, label) in self.time_labels.iter().enumerate() {
                if self.missing[(i, t)] {
                    out.push_str(&format!("{node},{label},\n"));
                } else {
                    out.push_str(&format!(
                        "{node},{label},{}\n",
                        self.values[(i, t)].to_f64_lossy()
                    ));
                }
            }
        }
        out
    }

    /// Serializes in wide form with nodes as columns: header
    /// `t,<node...>`, one row per time step.
    pub fn to_wide_csv(&self) -> String {
        let mut out = String::from("t");
        for node in &self.node_ids {
            out.push(',');
            out.push_str(node);
        }
        out.push('\n');
        for (t, label) in self.time_labels.iter().enumerate() {
            out.push_str(label);
            for i in 0..self.node_count() {
                out.push(',');
                if !self.missing[(i, t)] {
                    out.push_str(&format!("{}", self.values[(i, t)].to_f64_lossy()));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn label_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

/// Supported panel CSV layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelSchema {
    /// `node,t,value` triples.
    Long,
    /// Header `t,<node...>`; one row per time step.
    WideTimeRows,
    /// First column holds node ids; remaining headers are time labels.
    WideNodeRows,
}

fn parse_cell<T: Real>(raw: &str, line: usize) -> Result<(T, bool)> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Ok((T::zero(), true));
    }
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok((T::from_f64_lossy(v), false)),
        _ => Err(Error::CsvParse {
            line,
            message: format!("unparseable number `{trimmed}`"),
        }),
    }
}

/// Reads a panel CSV in the given schema.
pub fn read_panel_csv<T: Real>(path: &Path, schema: PanelSchema) -> Result<Panel<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_panel_csv(&text, schema)
}

/// Parses panel CSV text; see [`read_panel_csv`].
pub fn parse_panel_csv<T: Real>(text: &str, schema: PanelSchema) -> Result<Panel<T>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::CsvParse {
        line: 1,
        message: "empty file".to_string(),
    })?;
    let head: Vec<&str> = header.split(',').map(str::trim).collect();
    match schema {
        PanelSchema::Long => {
            if head != ["node", "t", "value"] {
                return Err(Error::CsvParse {
                    line: 1,
                    message: "expected header `node,t,value`".to_string(),
                });
            }
            let mut cells: BTreeMap<(String, String), (T, bool)> = BTreeMap::new();
            let mut nodes = Vec::new();
            let mut times = Vec::new();
            for (idx, line) in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::CsvParse {
                        line: idx + 1,
                        message: format!("expected 3 fields, got {}", parts.len()),
                    });
                }
                let node = parts[0].trim().to_string();
                let t = parts[1].trim().to_string();
                let cell = parse_cell::<T>(parts[2], idx + 1)?;
                if cells.insert((node.clone(), t.clone()), cell).is_some() {
                    return Err(Error::CsvParse {
                        line: idx + 1,
                        message: format!("duplicate cell ({node}, {t})"),
                    });
                }
                if !nodes.contains(&node) {
                    nodes.push(node);
                }
                if !times.contains(&t) {
                    times.push(t);
                }
            }
            nodes.sort();
            times.sort_by(|a, b| label_cmp(a, b));
            let mut values = DMatrix::zeros(nodes.len(), times.len());
            let mut missing = DMatrix::from_element(nodes.len(), times.len(), false);
            for (i, node) in nodes.iter().enumerate() {
                for (t, label) in times.iter().enumerate() {
                    match cells.get(&(node.clone(), label.clone())) {
                        Some((v, m)) => {
                            values[(i, t)] = *v;
                            missing[(i, t)] = *m;
                        }
                        None => missing[(i, t)] = true,
                    }
                }
            }
            Panel::new(nodes, times, values, missing)
        }
        PanelSchema::WideTimeRows => {
            if head.first() != Some(&"t") || head.len() < 2 {
                return Err(Error::CsvParse {
                    line: 1,
                    message: "expected header `t,<node>,...`".to_string(),
                });
            }
            let nodes: Vec<String> = head[1..].iter().map(|s| s.to_string()).collect();
            let mut rows: Vec<(String, Vec<(T, bool)>)> = Vec::new();
            for (idx, line) in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() != nodes.len() + 1 {
                    return Err(Error::CsvParse {
                        line: idx + 1,
                        message: format!(
                            "expected {} fields, got {}",
                            nodes.len() + 1,
                            parts.len()
                        ),
                    });
                }
                let label = parts[0].trim().to_string();
                let cells = parts[1..]
                    .iter()
                    .map(|raw| parse_cell::<T>(raw, idx + 1))
                    .collect::<Result<Vec<_>>>()?;
                rows.push((label, cells));
            }
            rows.sort_by(|a, b| label_cmp(&a.0, &b.0));
            let times: Vec<String> = rows.iter().map(|(l, _)| l.clone()).collect();
            let mut values = DMatrix::zeros(nodes.len(), times.len());
            let mut missing = DMatrix::from_element(nodes.len(), times.len(), false);
            for (t, (_, cells)) in rows.iter().enumerate() {
                for (i, (v, m)) in cells.iter().enumerate() {
                    values[(i, t)] = *v;
                    missing[(i, t)] = *m;
                }
            }
            Panel::new(nodes, times, values, missing)
        }
        PanelSchema::WideNodeRows => {
            if head.len() < 2 {
                return Err(Error::CsvParse {
                    line: 1,
                    message: "expected header `<id>,<time>,...`".to_string(),
                });
            }
            let times: Vec<String> = head[1..].iter().map(|s| s.to_string()).collect();
            let mut rows: Vec<(String, Vec<(T, bool)>)> = Vec::new();
            for (idx, line) in lines {
                if line.trim().is_empty() {
                    continue;
                }
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() != times.len() + 1 {
                    return Err(Error::CsvParse {
                        line: idx + 1,
                        message: format!(
                            "expected {} fields, got {}",
                            times.len() + 1,
                            parts.len()
                        ),
                    });
                }
                let node = parts[0].trim().to_string();
                let cells = parts[1..]
                    .iter()
                    .map(|raw| parse_cell::<T>(raw, idx + 1))
                    .collect::<Result<Vec<_>>>()?;
                rows.push((node, cells));
            }
            rows.sort_by(|a, b| a.0.cmp(&b.0));
            let nodes: Vec<String> = rows.iter().map(|(n, _)| n.clone()).collect();
            let mut values = DMatrix::zeros(nodes.len(), times.len());
            let mut missing = DMatrix::from_element(nodes.len(), times.len(), false);
            for (i, (_, cells)) in rows.iter().enumerate() {
                for (t, (v, m)) in cells.iter().enumerate() {
                    values[(i, t)] = *v;
                    missing[(i, t)] = *m;
                }
            }
            Panel::new(nodes, times, values, missing)
        }
    }
}

/// Reads an edge list CSV with header `from,to`. Entries are either
/// 1-based node indices or labels resolved against `roster`.
pub fn read_edges_csv(path: &Path, roster: Option<&[String]>) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    parse_edges_csv(&text, roster)
}

/// Parses edge list CSV text; see [`read_edges_csv`].
pub fn parse_edges_csv(text: &str, roster: Option<&[String]>) -> Result<Network> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::CsvParse {
        line: 1,
        message: "empty file".to_string(),
    })?;
    let head: Vec<&str> = header.split(',').map(str::trim).collect();
    if head != ["from", "to"] {
        return Err(Error::CsvParse {
            line: 1,
            message: "expected header `from,to`".to_string(),
        });
    }
    let index_of = |raw: &str, line: usize| -> Result<usize> {
        let trimmed = raw.trim();
        match roster {
            Some(names) => names
                .iter()
                .position(|n| n == trimmed)
                .map(|i| i + 1)
                .ok_or_else(|| Error::UnknownLabel(trimmed.to_string())),
            None => trimmed.parse::<usize>().map_err(|_| Error::CsvParse {
                line,
                message: format!("unparseable node index `{trimmed}`"),
            }),
        }
    };
    let mut raw_edges = Vec::new();
    let mut max_seen = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::CsvParse {
                line: idx + 1,
                message: format!("expected 2 fields, got {}", parts.len()),
            });
        }
        let a = index_of(parts[0], idx + 1)?;
        let b = index_of(parts[1], idx + 1)?;
        max_seen = max_seen.max(a).max(b);
        raw_edges.push((a, b));
    }
    let d = match roster {
        Some(names) => names.len(),
        None => max_seen,
    };
    let net = Network::from_edge_list(&raw_edges, d)?;
    match roster {
        Some(names) => net.with_labels(names.to_vec()),
        None => Ok(net),
    }
}

/// Reads a community CSV with header `node,community` against a roster.
pub fn read_communities_csv(path: &Path, roster: &[String]) -> Result<CommunityPartition> {
    let text = std::fs::read_to_string(path)?;
    parse_communities_csv(&text, roster)
}

/// Parses community CSV text; see [`read_communities_csv`].
pub fn parse_communities_csv(text: &str, roster: &[String]) -> Result<CommunityPartition> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::CsvParse {
        line: 1,
        message: "empty file".to_string(),
    })?;
    let head: Vec<&str> = header.split(',').map(str::trim).collect();
    if head != ["node", "community"] {
        return Err(Error::CsvParse {
            line: 1,
            message: "expected header `node,community`".to_string(),
        });
    }
    let mut labels = vec![0usize; roster.len()];
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::CsvParse {
                line: idx + 1,
                message: format!("expected 2 fields, got {}", parts.len()),
            });
        }
        let node = parts[0].trim();
        let pos = roster
            .iter()
            .position(|n| n == node)
            .ok_or_else(|| Error::UnknownLabel(node.to_string()))?;
        let community: usize = parts[1].trim().parse().map_err(|_| Error::CsvParse {
            line: idx + 1,
            message: format!("unparseable community `{}`", parts[1].trim()),
        })?;
        labels[pos] = community;
    }
    if let Some(pos) = labels.iter().position(|&c| c == 0) {
        return Err(Error::Invalid(format!(
            "node `{}` has no community assignment",
            roster[pos]
        )));
    }
    let count = labels.iter().copied().max().unwrap_or(0);
    CommunityPartition::new(labels, count)
}

/// Communities used by the election classification.
pub const RED: usize = 1;
pub const BLUE: usize = 2;
pub const SWING: usize = 3;

/// Classifies nodes from per-node win records (`true` = first party won):
/// community 1 when the first party won at least `threshold` of the
/// records, community 2 when the second party did, community 3 otherwise.
/// The threshold comparison is inclusive.
pub fn classify_parties(win_records: &[Vec<bool>], threshold: f64) -> Result<CommunityPartition> {
    if win_records.is_empty() {
        return Err(Error::Invalid("no win records".to_string()));
    }
    let len = win_records[0].len();
    if len == 0 {
        return Err(Error::Invalid("empty win records".to_string()));
    }
    for rec in win_records {
        if rec.len() != len {
            return Err(Error::DimensionMismatch {
                context: "win record lengths",
                expected: len,
                got: rec.len(),
            });
        }
    }
    let labels = win_records
        .iter()
        .map(|rec| {
            let wins = rec.iter().filter(|&&w| w).count() as f64;
            let share = wins / len as f64;
            if share >= threshold {
                RED
            } else if 1.0 - share >= threshold {
                BLUE
            } else {
                SWING
            }
        })
        .collect();
    CommunityPartition::new(labels, 3)
}

/// Long-form CSV for a bare realization with 1-based node numbers.
pub fn realization_to_long_csv<T: Real>(real: &Realization<T>) -> String {
    let mut out = String::from("node,t,value\n");
    for i in 0..real.node_count() {
        for t in 0..real.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                i + 1,
                t + 1,
                real.values()[(i, t)].to_f64_lossy()
            ));
        }
    }
    out
}

/// Wide CSV (nodes as columns) for a bare realization.
pub fn realization_to_wide_csv<T: Real>(real: &Realization<T>) -> String {
    let mut out = String::from("t");
    for i in 0..real.node_count() {
        out.push_str(&format!(",{}", i + 1));
    }
    out.push('\n');
    for t in 0..real.len() {
        out.push_str(&format!("{}", t + 1));
        for i in 0..real.node_count() {
            out.push_str(&format!(",{}", real.values()[(i, t)].to_f64_lossy()));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wide_time_rows_roundtrip() {
        let text = "t,a,b\n1,0.5,1.5\n2,0.25,2.5\n";
        let panel: Panel<f64> = parse_panel_csv(text, PanelSchema::WideTimeRows).unwrap();
        assert_eq!(panel.node_count(), 2);
        assert_eq!(panel.len(), 2);
        assert_eq!(panel.values()[(0, 0)], 0.5);
        assert_eq!(panel.values()[(1, 1)], 2.5);
        assert_eq!(panel.to_wide_csv(), text);
    }

    #[test]
    fn long_missing_cell_flagged() {
        let text = "node,t,value\nx,1,0.5\nx,2,\ny,1,1.0\ny,2,2.0\n";
        let panel: Panel<f64> = parse_panel_csv(text, PanelSchema::Long).unwrap();
        assert!(panel.missing()[(0, 1)]);
        assert!(!panel.missing()[(1, 1)]);
        assert!(panel.has_missing());
    }

    #[test]
    fn long_rows_permutation_invariant() {
        let a = "node,t,value\nx,1,0.5\nx,2,0.7\ny,1,1.0\ny,2,2.0\n";
        let b = "node,t,value\ny,2,2.0\nx,2,0.7\ny,1,1.0\nx,1,0.5\n";
        let pa: Panel<f64> = parse_panel_csv(a, PanelSchema::Long).unwrap();
        let pb: Panel<f64> = parse_panel_csv(b, PanelSchema::Long).unwrap();
        assert_eq!(pa, pb);
    }

    #[test]
    fn duplicate_cell_rejected() {
        let text = "node,t,value\nx,1,0.5\nx,1,0.6\n";
        assert!(parse_panel_csv::<f64>(text, PanelSchema::Long).is_err());
    }

    #[test]
    fn ragged_and_bad_number_rejected() {
        assert!(parse_panel_csv::<f64>("t,a\n1,2,3\n", PanelSchema::WideTimeRows).is_err());
        assert!(parse_panel_csv::<f64>("t,a\n1,abc\n", PanelSchema::WideTimeRows).is_err());
    }

    #[test]
    fn node_rows_schema_sorts_nodes() {
        let text = "state,1976,1980\nzeta,1,2\nalpha,3,4\n";
        let panel: Panel<f64> = parse_panel_csv(text, PanelSchema::WideNodeRows).unwrap();
        assert_eq!(panel.node_ids(), &["alpha".to_string(), "zeta".to_string()]);
        assert_eq!(panel.values()[(0, 0)], 3.0);
    }

    #[test]
    fn edges_by_label_and_unknown_label() {
        let roster = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let net = parse_edges_csv("from,to\na,b\nb,c\n", Some(&roster)).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edge_count(), 2);
        assert!(matches!(
            parse_edges_csv("from,to\na,zz\n", Some(&roster)),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn edges_by_index() {
        let net = parse_edges_csv("from,to\n1,2\n2,3\n", None).unwrap();
        assert_eq!(net.node_count(), 3);
    }

    #[test]
    fn communities_csv_roundtrip() {
        let roster = vec!["a".to_string(), "b".to_string()];
        let part = parse_communities_csv("node,community\nb,2\na,1\n", &roster).unwrap();
        assert_eq!(part.label_of(0), 1);
        assert_eq!(part.label_of(1), 2);
        assert!(parse_communities_csv("node,community\na,1\n", &roster).is_err());
    }

    #[test]
    fn classify_thresholds() {
        // 9 of 12 wins is exactly 75%: inclusive
        let mut nine = vec![true; 9];
        nine.extend([false; 3]);
        let mut three = vec![true; 3];
        three.extend([false; 9]);
        let six: Vec<bool> = (0..12).map(|i| i % 2 == 0).collect();
        let all_false = vec![false; 12];
        let part = classify_parties(&[nine, three, six, all_false], 0.75).unwrap();
        assert_eq!(part.label_of(0), RED);
        assert_eq!(part.label_of(1), BLUE);
        assert_eq!(part.label_of(2), SWING);
        assert_eq!(part.label_of(3), BLUE);
    }

    proptest! {
        // adding a win for the first party never moves a node away from
        // community 1
        #[test]
        fn classification_is_monotone(record in proptest::collection::vec(proptest::bool::ANY, 1..20)) {
            let before = classify_parties(&[record.clone()], 0.75).unwrap().label_of(0);
            for flip in 0..record.len() {
                if !record[flip] {
                    let mut more = record.clone();
                    more[flip] = true;
                    let after = classify_parties(&[more], 0.75).unwrap().label_of(0);
                    // ordering RED < SWING-as-middle: moving toward RED
                    let rank = |c: usize| match c {
                        RED => 2,
                        SWING => 1,
                        _ => 0,
                    };
                    prop_assert!(rank(after) >= rank(before));
                }
            }
        }
    }
}
