//! JSON matrix files: `{"blocks": [[[[re, im], …], …], …], "meta": "…"}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use awkit::{Element, Matrix, C64};

use crate::CliError;

/// On-disk form of an algebra element: square row-major blocks of
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub blocks: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
}

impl MatrixFile {
    pub fn from_element(x: &Element) -> Self {
        let blocks = x
            .blocks()
            .iter()
            .map(|b| {
                (0..b.rows())
                    .map(|i| {
                        (0..b.cols())
                            .map(|j| [b[(i, j)].re, b[(i, j)].im])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { blocks, meta: None }
    }

    pub fn to_element(&self) -> Result<Element, CliError> {
        if self.blocks.is_empty() {
            return Err(CliError::Input("matrix file has no blocks".into()));
        }
        let mut out = Vec::with_capacity(self.blocks.len());
        for (k, rows) in self.blocks.iter().enumerate() {
            let n = rows.len();
            if n == 0 {
                return Err(CliError::Input(format!("block {k} is empty")));
            }
            let mut data = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(CliError::Input(format!(
                        "block {k} is not square: row {i} has {} entries, expected {n}",
                        row.len()
                    )));
                }
                for &[re, im] in row {
                    if !(re.is_finite() && im.is_finite()) {
                        return Err(CliError::Input(format!(
                            "block {k} row {i} has a non-finite entry"
                        )));
                    }
                    data.push(C64::new(re, im));
                }
            }
            out.push(Matrix::from_row_major(n, n, data));
        }
        Element::new(out).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn read_element(path: &Path) -> Result<Element, CliError> {
        Self::read(path)?.to_element()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let x = Element::new(vec![
            Matrix::from_row_major(1, 1, vec![C64::new(0.1, -1.0 / 3.0)]),
            Matrix::from_row_major(
                2,
                2,
                vec![
                    C64::new(1e-300, 2.5),
                    C64::new(-7.0, 0.0),
                    C64::new(0.0, 0.0),
                    C64::new(std::f64::consts::PI, 1.0),
                ],
            ),
        ])
        .unwrap();
        let text = serde_json::to_string(&MatrixFile::from_element(&x)).unwrap();
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_element().unwrap(), x);
    }

    #[test]
    fn rejects_bad_shapes() {
        let f: MatrixFile = serde_json::from_str(r#"{"blocks": [[[[1,0],[0,0]]]]}"#).unwrap();
        assert!(f.to_element().is_err());
        let f: MatrixFile = serde_json::from_str(r#"{"blocks": []}"#).unwrap();
        assert!(f.to_element().is_err());
        assert!(serde_json::from_str::<MatrixFile>(r#"{"blocks": [[[[1,0,3]]]]}"#).is_err());
    }
}
