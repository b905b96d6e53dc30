//! JSON state files and number formatting.
//!
//! Complex numbers are explicit `[re, im]` pairs. A density file stores the matrix
//! as nested rows; a pure file stores the amplitudes flat, row-major over `dims`.
//!
//! ```json
//! {"kind": "pure", "dims": [2, 2], "amplitudes": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]]}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{DensityState, GroupTag, PureState, State};
use crate::error::{dim_err, invalid, Result};
use crate::invariants::InvariantFingerprint;
use crate::matrix::Matrix;

/// Hermiticity tolerance applied to density matrices read from files.
pub const FILE_HERMITIAN_TOL: f64 = 1e-8;

type Pair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    Density {
        dims: Vec<usize>,
        matrix: Vec<Vec<Pair>>,
    },
    Pure {
        dims: Vec<usize>,
        amplitudes: Vec<Pair>,
    },
    /// A local operator, as written by `sample --kind unitary|sl`.
    Operator {
        group: GroupTag,
        dims: Vec<usize>,
        matrix: Vec<Vec<Pair>>,
    },
}

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn rows_of(m: &Matrix) -> Vec<Vec<Pair>> {
    (0..m.rows()).map(|i| m.row(i).iter().copied().map(pair).collect()).collect()
}

fn matrix_of(rows: &[Vec<Pair>]) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 {
        return dim_err("empty matrix");
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return dim_err(format!("matrix must be {n} × {n}, found a row of length {}", r.len()));
    }
    let data = rows.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    Matrix::new(n, n, data)
}

fn check_finite(values: impl IntoIterator<Item = Pair>) -> Result<()> {
    if values.into_iter().flatten().any(|x| !x.is_finite()) {
        return invalid("non-finite number in file");
    }
    Ok(())
}

impl StateFile {
    pub fn from_state(state: &State) -> Self {
        match state {
            State::Density(rho) => StateFile::Density { dims: rho.dims().to_vec(), matrix: rows_of(rho.matrix()) },
            State::Pure(phi) => StateFile::Pure {
                dims: phi.dims().to_vec(),
                amplitudes: phi.amplitudes().entries().iter().copied().map(pair).collect(),
            },
        }
    }

    pub fn from_operator(m: &Matrix, group: GroupTag) -> Self {
        StateFile::Operator { group, dims: vec![m.rows()], matrix: rows_of(m) }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Invalid(format!("malformed state file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    /// Validated state; operator files are rejected.
    pub fn into_state(self) -> Result<State> {
        match self {
            StateFile::Density { dims, matrix } => {
                matrix.iter().try_for_each(|r| check_finite(r.iter().copied()))?;
                let m = matrix_of(&matrix)?;
                Ok(State::Density(DensityState::with_tolerance(dims, m, FILE_HERMITIAN_TOL)?))
            }
            StateFile::Pure { dims, amplitudes } => {
                check_finite(amplitudes.iter().copied())?;
                let v = amplitudes.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
                Ok(State::Pure(PureState::new(dims, v)?))
            }
            StateFile::Operator { .. } => invalid("expected a state file, found an operator"),
        }
    }

    pub fn into_operator(self) -> Result<(Matrix, GroupTag)> {
        match self {
            StateFile::Operator { group, dims, matrix } => {
                matrix.iter().try_for_each(|r| check_finite(r.iter().copied()))?;
                let m = matrix_of(&matrix)?;
                if dims.iter().product::<usize>() != m.rows() {
                    return dim_err(format!(
                        "operator dims {dims:?} do not match a {} × {} matrix",
                        m.rows(),
                        m.rows()
                    ));
                }
                Ok((m, group))
            }
            _ => invalid("expected an operator file"),
        }
    }
}

pub fn fingerprint_json(fp: &InvariantFingerprint) -> String {
    serde_json::to_string_pretty(fp).expect("fingerprints always serialize")
}

pub fn parse_fingerprint(text: &str) -> Result<InvariantFingerprint> {
    serde_json::from_str(text).map_err(|e| crate::Error::Invalid(format!("malformed fingerprint file: {e}")))
}

/// `%.17g`: 17 significant digits, trailing zeros dropped, exponent form outside
/// `[1e-5, 1e17)`. Negative zero prints as `0`.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let mant = trim_zeros(mant.to_string());
        format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `re+imi` with both parts in [`fmt_g17`].
pub fn fmt_complex(z: Complex64) -> String {
    let im = fmt_g17(z.im);
    let sep = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sep}{im}i", fmt_g17(z.re))
}
