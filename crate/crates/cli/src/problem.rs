//! The problem file: a JSON object with the configuration columns,
//! optional exponents `p_j`, tolerance overrides and a seed.

use std::path::Path;

use blc_core::configuration::ConfigError;
use blc_core::scalar::{parse_rational, snap_rational};
use blc_core::{Configuration, ExponentVector, Matrix, Rational, RationalMatrix, RealMatrix, TolerancePolicy};
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::CliError;

/// A number, or a string holding `p/q`, a decimal, or `inf`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub rank_rel_tol: Option<f64>,
    pub psd_tol: Option<f64>,
    pub newton_tol: Option<f64>,
    pub quadrature_rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// `N` column vectors of length `M`.
    pub matrix: Vec<Vec<Entry>>,
    /// Exponents `p_j`; reciprocals are taken internally.
    pub exponents: Option<Vec<Entry>>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    pub seed: Option<u64>,
}

/// A parsed and validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub configuration: Configuration,
    pub exponents: Option<ExponentVector>,
    pub tolerances: TolerancePolicy,
    pub seed: Option<u64>,
    /// Every matrix entry was an integer or an exact rational string.
    pub exact_input: bool,
}

enum Value {
    Exact(Rational),
    Real(f64),
}

fn entry_value(e: &Entry) -> Option<Value> {
    match e {
        Entry::Int(i) => Some(Value::Exact(Rational::from_integer((*i).into()))),
        Entry::Float(x) if x.is_finite() => Some(Value::Real(*x)),
        Entry::Float(_) => None,
        Entry::Text(s) => parse_rational(s).map(Value::Exact),
    }
}

/// `1/p` for an exponent entry, exactly when possible.
fn reciprocal_exponent(e: &Entry, index: usize) -> Result<(Rational, bool), CliError> {
    let bad = |why: &str| CliError::Parse(format!("exponent {index}: {why}"));
    let (p, snapped) = match e {
        Entry::Text(s) if matches!(s.trim(), "inf" | "Inf" | "infinity" | "∞") => return Ok((Rational::zero(), false)),
        Entry::Float(x) if x.is_infinite() && *x > 0.0 => return Ok((Rational::zero(), false)),
        Entry::Float(x) => {
            let r = snap_rational(*x, 1_000_000).ok_or_else(|| bad("not a finite number"))?;
            let exact = Rational::from_float(*x).map_or(false, |f| f == r);
            (r, !exact)
        }
        other => match entry_value(other) {
            Some(Value::Exact(r)) => (r, false),
            _ => return Err(bad("expected a number, \"p/q\" or \"inf\"")),
        },
    };
    if p < Rational::one() {
        return Err(bad("exponents must lie in [1, inf]"));
    }
    Ok((p.recip(), snapped))
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn tolerance_policy(&self) -> Result<TolerancePolicy, CliError> {
        let d = TolerancePolicy::default();
        let t = &self.tolerances;
        let policy = TolerancePolicy {
            rank_rel_tol: t.rank_rel_tol.unwrap_or(d.rank_rel_tol),
            psd_tol: t.psd_tol.unwrap_or(d.psd_tol),
            newton_tol: t.newton_tol.unwrap_or(d.newton_tol),
            quadrature_rel_tol: t.quadrature_rel_tol.unwrap_or(d.quadrature_rel_tol),
        };
        policy.validate().map_err(|e| CliError::Parse(e.to_string()))?;
        Ok(policy)
    }

    pub fn into_problem(self) -> Result<Problem, CliError> {
        let tolerances = self.tolerance_policy()?;
        let n = self.matrix.len();
        if n == 0 {
            return Err(CliError::Parse("matrix has no columns".into()));
        }
        let m = self.matrix[0].len();
        if let Some((j, c)) = self.matrix.iter().enumerate().find(|(_, c)| c.len() != m) {
            return Err(CliError::Parse(format!("column {j} has length {}, expected {m}", c.len())));
        }
        let mut values = Vec::with_capacity(n);
        for (j, col) in self.matrix.iter().enumerate() {
            let mut out = Vec::with_capacity(m);
            for (i, e) in col.iter().enumerate() {
                out.push(entry_value(e).ok_or_else(|| CliError::Parse(format!("matrix entry ({i}, {j}) is not a number")))?);
            }
            values.push(out);
        }
        let exact_input = values.iter().flatten().all(|v| matches!(v, Value::Exact(_)));
        let configuration = if exact_input {
            let cols: Vec<Vec<Rational>> = values
                .into_iter()
                .map(|c| c.into_iter().map(|v| if let Value::Exact(r) = v { r } else { unreachable!() }).collect())
                .collect();
            let a: RationalMatrix = Matrix::from_columns(m, &cols).map_err(|e| CliError::Parse(e.to_string()))?;
            Configuration::from_rational(a, tolerances)
        } else {
            let cols: Vec<Vec<f64>> = values
                .into_iter()
                .map(|c| {
                    c.into_iter()
                        .map(|v| match v {
                            Value::Exact(r) => blc_core::scalar::to_f64(&r),
                            Value::Real(x) => x,
                        })
                        .collect()
                })
                .collect();
            let a: RealMatrix = Matrix::from_columns(m, &cols).map_err(|e| CliError::Parse(e.to_string()))?;
            Configuration::new(a, tolerances)
        };
        let configuration = configuration.map_err(|e| match e {
            ConfigError::InvalidShape { .. } => CliError::Parse(e.to_string()),
            other => CliError::Defective(vec![other.to_string()]),
        })?;
        let exponents = match &self.exponents {
            None => None,
            Some(ps) => {
                if ps.len() != n {
                    return Err(CliError::Parse(format!("{} exponents given for {n} vectors", ps.len())));
                }
                let mut z = Vec::with_capacity(n);
                let mut snapped = false;
                for (j, e) in ps.iter().enumerate() {
                    let (r, s) = reciprocal_exponent(e, j)?;
                    if r.is_negative() {
                        return Err(CliError::Parse(format!("exponent {j} is negative")));
                    }
                    z.push(r);
                    snapped |= s;
                }
                let v = ExponentVector::from_rationals(z);
                Some(if snapped { v.mark_snapped() } else { v })
            }
        };
        Ok(Problem { configuration, exponents, tolerances, seed: self.seed, exact_input })
    }
}
