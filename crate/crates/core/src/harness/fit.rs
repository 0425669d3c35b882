use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::Row;
use crate::error::{Error, Result};
use crate::primitives::Horizon;

const VARIABLES: &[&str] = &["n", "s", "c", "T", "tau", "psi", "logn"];

#[derive(Clone, Debug, PartialEq)]
struct Term {
    name: String,
    /// `(variable, exponent)`; empty for the intercept.
    factors: Vec<(String, i32)>,
}

/// A model linear in its coefficients, e.g. `1 + n^2 + n*s`: terms joined
/// by `+`, each a product of variables with optional integer powers. `1` is
/// the intercept. Variables: `n s c T tau psi logn` (`psi = min(T, tau)`,
/// `logn` the natural log of `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    terms: Vec<Term>,
}

fn fit_err(msg: impl Into<String>) -> Error {
    Error::Fit(msg.into())
}

impl Model {
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in text.split('+') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(fit_err(format!("empty term in {text:?}")));
            }
            let mut factors = Vec::new();
            if raw != "1" {
                for f in raw.split('*') {
                    let (var, pow) = match f.trim().split_once('^') {
                        Some((v, p)) => (
                            v.trim(),
                            p.trim()
                                .parse::<i32>()
                                .map_err(|_| fit_err(format!("bad exponent in {f:?}")))?,
                        ),
                        None => (f.trim(), 1),
                    };
                    if !VARIABLES.contains(&var) {
                        return Err(fit_err(format!(
                            "unknown variable {var:?}; valid: {}",
                            VARIABLES.join(" ")
                        )));
                    }
                    factors.push((var.to_string(), pow));
                }
            }
            let name = raw.split_whitespace().collect::<String>();
            if terms.iter().any(|t: &Term| t.name == name) {
                return Err(fit_err(format!("term {name} appears twice")));
            }
            terms.push(Term { name, factors });
        }
        Ok(Model { terms })
    }

    pub fn term_names(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.name.as_str()).collect()
    }

    fn row(&self, cell: &CellKey) -> Result<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .try_fold(1.0, |acc, (v, p)| Ok(acc * cell.value(v)?.powi(*p)))
            })
            .collect()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.term_names().join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CellKey {
    n: usize,
    s: usize,
    c: usize,
    t: Horizon,
    tau: Horizon,
}

impl CellKey {
    fn value(&self, var: &str) -> Result<f64> {
        let finite = |h: Horizon, name: &str| {
            h.finite()
                .map(|x| x as f64)
                .ok_or_else(|| fit_err(format!("{name} is infinite in a fitted cell")))
        };
        Ok(match var {
            "n" => self.n as f64,
            "s" => self.s as f64,
            "c" => self.c as f64,
            "T" => finite(self.t, "T")?,
            "tau" => finite(self.tau, "tau")?,
            "psi" => finite(self.t.min(self.tau), "psi")?,
            "logn" => (self.n as f64).ln(),
            _ => unreachable!("variables are checked at parse time"),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub terms: Vec<String>,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    /// `(n, s, c, T, tau, median, residual)` per fitted cell.
    pub cells: Vec<(usize, usize, usize, Horizon, Horizon, f64, f64)>,
    /// Cells left out because no trial completed.
    pub skipped: usize,
}

impl FitReport {
    pub fn coefficient(&self, term: &str) -> Option<f64> {
        self.terms
            .iter()
            .position(|t| t == term)
            .map(|i| self.coefficients[i])
    }
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, c) in self.terms.iter().zip(&self.coefficients) {
            writeln!(f, "{t:>12} = {c:.6}")?;
        }
        writeln!(f, "{:>12} = {:.6}", "R^2", self.r_squared)?;
        writeln!(f, "n,s,c,T,tau,median,residual")?;
        for (n, s, c, t, tau, m, r) in &self.cells {
            writeln!(f, "{n},{s},{c},{t},{tau},{m},{r:.3}")?;
        }
        if self.skipped > 0 {
            writeln!(f, "skipped {} cells without completed trials", self.skipped)?;
        }
        Ok(())
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    Some(if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    })
}

/// Least-squares fit of the median completion round per cell.
pub fn fit_scaling(rows: &[Row], model: &Model) -> Result<FitReport> {
    let mut groups: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.error.is_none()) {
        let key = CellKey {
            n: r.n,
            s: r.s,
            c: r.c,
            t: r.t,
            tau: r.tau,
        };
        let entry = groups.entry(key).or_default();
        if let (Some(true), Some(rounds)) = (r.completed, r.rounds) {
            entry.push(rounds as f64);
        }
    }
    let mut table = Vec::new();
    let mut skipped = 0;
    for (key, mut v) in groups {
        match median(&mut v) {
            Some(m) => table.push((key, m)),
            None => skipped += 1,
        }
    }
    let mut report = fit_points(model, &table)?;
    report.skipped = skipped;
    Ok(report)
}

/// Fits `model` to explicit `(n, s, c, T, tau, y)` points.
pub fn fit_table(
    model: &Model,
    points: &[(usize, usize, usize, Horizon, Horizon, f64)],
) -> Result<FitReport> {
    let table: Vec<_> = points
        .iter()
        .map(|&(n, s, c, t, tau, y)| (CellKey { n, s, c, t, tau }, y))
        .collect();
    fit_points(model, &table)
}

fn fit_points(model: &Model, table: &[(CellKey, f64)]) -> Result<FitReport> {
    let k = model.terms.len();
    if table.len() < 3 {
        return Err(fit_err(format!(
            "need at least 3 distinct cells, got {}",
            table.len()
        )));
    }
    if table.len() < k {
        return Err(fit_err(format!("{k} terms but only {} cells", table.len())));
    }
    let mut data = Vec::with_capacity(table.len() * k);
    for (key, _) in table {
        data.extend(model.row(key)?);
    }
    let x = DMatrix::from_row_slice(table.len(), k, &data);
    let y = DVector::from_iterator(table.len(), table.iter().map(|(_, m)| *m));

    // Columns that add no rank to the ones before them are collinear.
    let mut collinear = Vec::new();
    let mut rank = 0;
    for j in 0..k {
        let r = column_rank(&x.columns(0, j + 1).into_owned());
        if r == rank {
            collinear.push(model.terms[j].name.clone());
        }
        rank = r;
    }
    if !collinear.is_empty() {
        return Err(fit_err(format!(
            "rank-deficient design: {} collinear with earlier terms of {model}",
            collinear.join(", ")
        )));
    }

    let svd = x.clone().svd(true, true);
    let beta = svd.solve(&y, 1e-12).map_err(fit_err)?;
    let fitted = &x * &beta;
    let resid = &y - &fitted;
    let mean = y.mean();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res = resid.norm_squared();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= 1e-18 {
        1.0
    } else {
        0.0
    };
    Ok(FitReport {
        terms: model.terms.iter().map(|t| t.name.clone()).collect(),
        coefficients: beta.iter().copied().collect(),
        r_squared,
        cells: table
            .iter()
            .zip(resid.iter())
            .map(|((c, m), r)| (c.n, c.s, c.c, c.t, c.tau, *m, *r))
            .collect(),
        skipped: 0,
    })
}

fn column_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let tol = max * 1e-9 * m.nrows().max(m.ncols()) as f64;
    sv.iter().filter(|&&v| v > tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Horizon::Infinite;

    fn grid(f: impl Fn(f64, f64) -> f64) -> Vec<(usize, usize, usize, Horizon, Horizon, f64)> {
        let mut out = Vec::new();
        for n in [8, 16, 32] {
            for s in [4, 16] {
                out.push((n, s, 1, Infinite, Infinite, f(n as f64, s as f64)));
            }
        }
        out
    }

    #[test]
    fn exact_fit() {
        let m = Model::parse("n^2 + n*s").unwrap();
        let r = fit_table(&m, &grid(|n, s| 2.0 * n * n + 3.0 * n * s)).unwrap();
        assert!((r.coefficients[0] - 2.0).abs() < 1e-9);
        assert!((r.coefficients[1] - 3.0).abs() < 1e-9);
        assert!((r.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_data_has_flat_slopes() {
        let m = Model::parse("1 + n^2 + n*s").unwrap();
        let r = fit_table(&m, &grid(|_, _| 42.0)).unwrap();
        assert!((r.coefficient("1").unwrap() - 42.0).abs() < 1e-6);
        assert!(r.coefficient("n^2").unwrap().abs() < 1e-9);
        assert!(r.coefficient("n*s").unwrap().abs() < 1e-9);
    }

    #[test]
    fn collinear_terms_are_named() {
        assert!(Model::parse("1 + n + n")
            .unwrap_err()
            .to_string()
            .contains("twice"));
        let m = Model::parse("1 + c + n").unwrap();
        let e = fit_table(&m, &grid(|n, _| n)).unwrap_err().to_string();
        assert!(e.contains("c"), "{e}");
        assert!(e.contains("collinear"), "{e}");
    }

    #[test]
    fn parse_errors() {
        assert!(Model::parse("1 + q").is_err());
        assert!(Model::parse("1 + + n").is_err());
        assert!(Model::parse("n^x").is_err());
        assert_eq!(
            Model::parse("1 + n ^ 2").unwrap().term_names(),
            vec!["1", "n^2"]
        );
    }

    #[test]
    fn too_few_cells() {
        let m = Model::parse("1 + n").unwrap();
        let pts = vec![
            (8, 1, 1, Infinite, Infinite, 1.0),
            (9, 1, 1, Infinite, Infinite, 2.0),
        ];
        assert!(fit_table(&m, &pts).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }
}
