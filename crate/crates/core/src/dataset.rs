//! Loading and validating the aligned feature / SHAP matrices.

use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use crate::error::{CleshError, Result};

/// Minimum number of samples any test in the pipeline can run on.
pub const MIN_SAMPLES: usize = 3;

/// Feature matrix, SHAP matrix, and names, aligned column by column.
///
/// Both matrices are stored column-major: `features[j][i]` is sample `i` of
/// feature `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    feature_names: Vec<String>,
    label_name: String,
    features: Vec<Vec<f64>>,
    shap_values: Vec<Vec<f64>>,
}

impl DatasetBundle {
    /// Builds a bundle from column-major matrices, enforcing every invariant.
    pub fn new(
        feature_names: Vec<String>,
        label_name: impl Into<String>,
        features: Vec<Vec<f64>>,
        shap_values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let label_name = label_name.into();
        if label_name.trim().is_empty() {
            return Err(CleshError::EmptyLabel);
        }
        check_names("features", &feature_names)?;
        if features.len() != feature_names.len() || shap_values.len() != feature_names.len() {
            return Err(CleshError::ColumnMismatch {
                features: features.len(),
                shap: shap_values.len(),
            });
        }
        let n = features.first().map_or(0, Vec::len);
        for (j, (fcol, scol)) in features.iter().zip(&shap_values).enumerate() {
            if fcol.len() != n {
                return Err(CleshError::ColumnLength {
                    name: feature_names[j].clone(),
                    found: fcol.len(),
                    expected: n,
                });
            }
            if scol.len() != n {
                return Err(CleshError::RowMismatch {
                    features: n,
                    shap: scol.len(),
                });
            }
            for (i, (&f, &s)) in fcol.iter().zip(scol).enumerate() {
                if !f.is_finite() {
                    return Err(non_finite("features", i, j, &feature_names[j]));
                }
                if !s.is_finite() {
                    return Err(non_finite("shap", i, j, &feature_names[j]));
                }
            }
        }
        if n < MIN_SAMPLES {
            return Err(CleshError::TooFewSamples {
                needed: MIN_SAMPLES,
                found: n,
            });
        }
        Ok(Self {
            feature_names,
            label_name,
            features,
            shap_values,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.features[0].len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_name(&self, j: usize) -> &str {
        &self.feature_names[j]
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn feature_column(&self, j: usize) -> &[f64] {
        &self.features[j]
    }

    pub fn shap_column(&self, j: usize) -> &[f64] {
        &self.shap_values[j]
    }

    /// Writes both matrices as CSV files with a header row.
    pub fn write_csv(&self, features_path: &Path, shap_path: &Path) -> Result<()> {
        write_matrix(features_path, &self.feature_names, &self.features)?;
        write_matrix(shap_path, &self.feature_names, &self.shap_values)
    }
}

/// Loads a features CSV and a SHAP CSV, reconciling SHAP columns to the
/// feature column order by header name.
pub fn load_dataset(features_path: &Path, shap_path: &Path, label_name: &str) -> Result<DatasetBundle> {
    let (feature_names, features) = read_matrix(features_path, "features")?;
    let (shap_names, shap_raw) = read_matrix(shap_path, "shap")?;

    if shap_names.len() != feature_names.len() {
        return Err(CleshError::ColumnMismatch {
            features: feature_names.len(),
            shap: shap_names.len(),
        });
    }
    let n_features = features.first().map_or(0, Vec::len);
    let n_shap = shap_raw.first().map_or(0, Vec::len);
    if n_features != n_shap {
        return Err(CleshError::RowMismatch {
            features: n_features,
            shap: n_shap,
        });
    }

    let shap_index: HashMap<&str, usize> = shap_names
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();
    let mut shap_values = Vec::with_capacity(feature_names.len());
    for name in &feature_names {
        let idx = *shap_index
            .get(name.as_str())
            .ok_or_else(|| CleshError::MissingHeader { name: name.clone() })?;
        shap_values.push(shap_raw[idx].clone());
    }

    DatasetBundle::new(feature_names, label_name, features, shap_values)
}

/// Reads one header-keyed numeric CSV into `(names, columns)`.
fn read_matrix(path: &Path, file: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let handle = File::open(path).map_err(|source| CleshError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(handle);
    let csv_err = |source| CleshError::Csv {
        path: path.to_path_buf(),
        source,
    };

    let names: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_string())
        .collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(CleshError::EmptyHeader { file: file.into() });
    }
    check_names(file, &names)?;

    let mut columns = vec![Vec::new(); names.len()];
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = r + 1;
        if record.len() != names.len() {
            return Err(CleshError::RaggedRow {
                file: file.into(),
                row,
                found: record.len(),
                expected: names.len(),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| CleshError::NonNumeric {
                file: file.into(),
                row,
                column: c + 1,
                name: names[c].clone(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(non_finite(file, r, c, &names[c]));
            }
            columns[c].push(value);
        }
    }
    Ok((names, columns))
}

fn write_matrix(path: &Path, names: &[String], columns: &[Vec<f64>]) -> Result<()> {
    let write_err = |source| CleshError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(|source| CleshError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |source| CleshError::Csv {
        path: path.to_path_buf(),
        source,
    };
    writer.write_record(names).map_err(csv_err)?;
    let n = columns.first().map_or(0, Vec::len);
    for i in 0..n {
        writer
            .write_record(columns.iter().map(|c| format!("{}", c[i])))
            .map_err(csv_err)?;
    }
    writer.flush().map_err(write_err)?;
    Ok(())
}

fn check_names(file: &str, names: &[String]) -> Result<()> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if name.trim().is_empty() {
            return Err(CleshError::EmptyColumnName {
                file: file.into(),
                column: i + 1,
            });
        }
        if let Some(first) = seen.insert(name.as_str(), i) {
            return Err(CleshError::DuplicateHeader {
                file: file.into(),
                name: name.clone(),
                first: first + 1,
                second: i + 1,
            });
        }
    }
    Ok(())
}

fn non_finite(file: &str, row0: usize, col0: usize, name: &str) -> CleshError {
    CleshError::NonFinite {
        file: file.into(),
        row: row0 + 1,
        column: col0 + 1,
        name: name.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use std::io::Write;

    fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        path
    }

    #[test]
    fn loads_well_formed_pair() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "f.csv", "age,sex\n30,0\n40,1\n50,0\n60,1\n");
        let s = write(dir.path(), "s.csv", "age,sex\n0.1,-0.2\n0.2,0.3\n0.3,-0.1\n0.4,0.2\n");
        let b = load_dataset(&f, &s, "Outcome").unwrap();
        assert_eq!(b.n_samples(), 4);
        assert_eq!(b.n_features(), 2);
        assert_eq!(b.feature_column(0), &[30.0, 40.0, 50.0, 60.0]);
        assert_eq!(b.shap_column(1), &[-0.2, 0.3, -0.1, 0.2]);
        assert_eq!(b.label_name(), "Outcome");
    }

    #[test]
    fn shap_columns_realigned_by_header() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "f.csv", "a,b\n1,2\n3,4\n5,6\n7,8\n");
        let s = write(dir.path(), "s.csv", "b,a\n0.2,0.1\n0.4,0.3\n0.6,0.5\n0.8,0.7\n");
        let b = load_dataset(&f, &s, "y").unwrap();
        assert_eq!(b.shap_column(0), &[0.1, 0.3, 0.5, 0.7]);
        assert_eq!(b.shap_column(1), &[0.2, 0.4, 0.6, 0.8]);
    }

    #[test]
    fn row_count_mismatch_names_both_counts() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "f.csv", "a,b\n1,2\n3,4\n5,6\n7,8\n");
        let s = write(dir.path(), "s.csv", "a,b\n1,2\n3,4\n5,6\n");
        let err = load_dataset(&f, &s, "y").unwrap_err();
        assert!(matches!(err, CleshError::RowMismatch { features: 4, shap: 3 }));
        let msg = err.to_string();
        assert!(msg.contains('4') && msg.contains('3'), "{msg}");
    }

    #[test]
    fn rejects_bad_cells_with_coordinates() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "f.csv", "a,b\n1,2\n3,x\n5,6\n");
        let s = write(dir.path(), "s.csv", "a,b\n1,2\n3,4\n5,6\n");
        match load_dataset(&f, &s, "y").unwrap_err() {
            CleshError::NonNumeric { row, column, value, .. } => {
                assert_eq!((row, column, value.as_str()), (2, 2, "x"));
            }
            other => panic!("unexpected {other}"),
        }

        let f = write(dir.path(), "f2.csv", "a,b\n1,2\n3,4\n5,6\n");
        let s = write(dir.path(), "s2.csv", "a,b\n1,2\n3,NaN\n5,6\n");
        assert!(matches!(
            load_dataset(&f, &s, "y").unwrap_err(),
            CleshError::NonFinite { row: 2, column: 2, .. }
        ));

        let f = write(dir.path(), "f3.csv", "a,b\n1,\n3,4\n5,6\n");
        assert!(matches!(
            load_dataset(&f, &s, "y").unwrap_err(),
            CleshError::NonNumeric { row: 1, column: 2, .. }
        ));
    }

    #[test]
    fn rejects_header_problems() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(dir.path(), "s.csv", "a,b\n1,2\n3,4\n5,6\n");
        let f = write(dir.path(), "dup.csv", "a,a\n1,2\n3,4\n5,6\n");
        assert!(matches!(
            load_dataset(&f, &s, "y").unwrap_err(),
            CleshError::DuplicateHeader { first: 1, second: 2, .. }
        ));
        let f = write(dir.path(), "other.csv", "a,c\n1,2\n3,4\n5,6\n");
        assert!(matches!(
            load_dataset(&f, &s, "y").unwrap_err(),
            CleshError::MissingHeader { name } if name == "c"
        ));
        let f = write(dir.path(), "three.csv", "a,b,c\n1,2,3\n3,4,5\n5,6,7\n");
        assert!(matches!(
            load_dataset(&f, &s, "y").unwrap_err(),
            CleshError::ColumnMismatch { features: 3, shap: 2 }
        ));
    }

    #[test]
    fn rejects_too_few_samples_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "f.csv", "a\n1\n2\n");
        assert!(matches!(
            load_dataset(&f, &f, "y").unwrap_err(),
            CleshError::TooFewSamples { needed: 3, found: 2 }
        ));
        let missing = dir.path().join("nope.csv");
        assert!(matches!(
            load_dataset(&f, &missing, "y").unwrap_err(),
            CleshError::Read { .. }
        ));
    }

    #[test]
    fn write_then_reload_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let b = DatasetBundle::new(
            vec!["x".into(), "flag".into()],
            "Label",
            vec![vec![0.1, 1e-17, -3.25, 12345.678901234], vec![0.0, 1.0, 1.0, 0.0]],
            vec![vec![-0.5, 0.333333333333, 2.0 / 3.0, 7e300], vec![1.0, -1.0, 0.5, 0.0]],
        )
        .unwrap();
        let (fp, sp) = (dir.path().join("f.csv"), dir.path().join("s.csv"));
        b.write_csv(&fp, &sp).unwrap();
        let reloaded = load_dataset(&fp, &sp, "Label").unwrap();
        assert_eq!(reloaded, b);
        assert!(fs::read_to_string(&fp).unwrap().starts_with("x,flag\n"));
    }
}
