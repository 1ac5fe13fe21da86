use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a variable is treated as a two-level factor or as continuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arity {
    Binary,
    Continuous,
}

impl Arity {
    fn detect(values: &[f64]) -> Arity {
        if distinct_up_to(values, 3) <= 2 {
            Arity::Binary
        } else {
            Arity::Continuous
        }
    }
}

/// `n` observations of `(x, y, z_1..z_d)`. `z` is stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    x_arity: Arity,
    y_arity: Arity,
}

impl Dataset {
    /// Builds a dataset with arities detected from the data: a column with at
    /// most two distinct values is binary.
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>, d: usize) -> Result<Self> {
        Self::with_arity(x, y, z, d, None, None)
    }

    pub fn with_arity(
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
        d: usize,
        x_arity: Option<Arity>,
        y_arity: Option<Arity>,
    ) -> Result<Self> {
        let n = x.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if d == 0 {
            return Err(Error::NoConditioning);
        }
        if y.len() != n {
            return Err(Error::Shape(format!("x has {n} rows, y has {}", y.len())));
        }
        if z.len() != n * d {
            return Err(Error::Shape(format!(
                "z has {} values, expected {n} x {d}",
                z.len()
            )));
        }
        check_finite(&x, 1, |_| "x".to_string())?;
        check_finite(&y, 1, |_| "y".to_string())?;
        check_finite(&z, d, |j| format!("z{}", j + 1))?;

        let x_arity = resolve_arity(&x, x_arity, "x")?;
        let y_arity = resolve_arity(&y, y_arity, "y")?;
        Ok(Dataset {
            n,
            d,
            x,
            y,
            z,
            x_arity,
            y_arity,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of conditioning variables.
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z_row(&self, i: usize) -> &[f64] {
        &self.z[i * self.d..(i + 1) * self.d]
    }

    pub fn z_column(&self, j: usize) -> Vec<f64> {
        self.z.iter().skip(j).step_by(self.d).copied().collect()
    }

    pub fn x_arity(&self) -> Arity {
        self.x_arity
    }

    pub fn y_arity(&self) -> Arity {
        self.y_arity
    }

    /// The rows at `indices`, in that order, with arities carried over.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let x = indices.iter().map(|&i| self.x[i]).collect();
        let y = indices.iter().map(|&i| self.y[i]).collect();
        let z = indices
            .iter()
            .flat_map(|&i| self.z_row(i).iter().copied())
            .collect();
        Dataset::with_arity(x, y, z, self.d, Some(self.x_arity), Some(self.y_arity))
    }
}

fn distinct_up_to(values: &[f64], limit: usize) -> usize {
    let mut seen: Vec<f64> = Vec::with_capacity(limit);
    for &v in values {
        if !seen.contains(&v) {
            seen.push(v);
            if seen.len() >= limit {
                break;
            }
        }
    }
    seen.len()
}

fn resolve_arity(values: &[f64], declared: Option<Arity>, column: &str) -> Result<Arity> {
    match declared {
        None => Ok(Arity::detect(values)),
        Some(Arity::Binary) => {
            let distinct = distinct_up_to(values, 3);
            if distinct > 2 {
                return Err(Error::NotBinary {
                    column: column.to_string(),
                    distinct,
                });
            }
            Ok(Arity::Binary)
        }
        Some(Arity::Continuous) => Ok(Arity::Continuous),
    }
}

fn check_finite(values: &[f64], width: usize, name: impl Fn(usize) -> String) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(k) => Err(Error::NonFinite {
            row: k / width + 1,
            column: name(k % width),
            value: values[k],
        }),
    }
}

/// Which CSV columns play the roles of `x`, `y` and `z`.
#[derive(Debug, Clone, Default)]
pub struct ColumnSpec {
    pub x: String,
    pub y: String,
    pub z: Vec<String>,
    pub x_arity: Option<Arity>,
    pub y_arity: Option<Arity>,
}

/// Reads a comma-separated file with a header row. Row numbers in errors are
/// 1-based and count data rows only.
pub fn ingest_csv<R: Read>(reader: R, spec: &ColumnSpec) -> Result<Dataset> {
    if spec.z.is_empty() {
        return Err(Error::NoConditioning);
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let xi = find(&spec.x)?;
    let yi = find(&spec.y)?;
    let zi = spec
        .z
        .iter()
        .map(|name| find(name))
        .collect::<Result<Vec<_>>>()?;

    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut z = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let cell = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| Error::NonNumeric {
                row,
                column: name.to_string(),
                value: raw.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row,
                    column: name.to_string(),
                    value: v,
                });
            }
            Ok(v)
        };
        x.push(cell(xi, &spec.x)?);
        y.push(cell(yi, &spec.y)?);
        for (&col, name) in zi.iter().zip(&spec.z) {
            z.push(cell(col, name)?);
        }
    }
    Dataset::with_arity(x, y, z, spec.z.len(), spec.x_arity, spec.y_arity)
}

/// 1-based ranks. Ties are broken by original position, so the ranking is a
/// permutation of `1..=n` and is unchanged by strictly increasing transforms.
pub fn rank_transform(values: &[f64]) -> Vec<usize> {
    ranks0(values).into_iter().map(|r| r as usize + 1).collect()
}

/// 0-based ranks with the same tie rule as [`rank_transform`].
pub(crate) fn ranks0(values: &[f64]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    // stable sort keeps equal values in index order
    order.sort_by(|&a, &b| {
        values[a as usize]
            .partial_cmp(&values[b as usize])
            .expect("finite values")
    });
    let mut ranks = vec![0u32; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i as usize] = r as u32;
    }
    ranks
}
