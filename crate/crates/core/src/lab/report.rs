use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Blow-up rate function `ρ_n(ε)`: `1/√ε` for `n = 2`, `1/(ε|ln ε|)` for
/// `n = 3` and `1/ε` for `n ≥ 4`.
pub fn rho(n: u32, eps: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config(format!("dimension must be at least 2, got {n}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::GapOutOfRange(eps));
    }
    Ok(match n {
        2 => 1.0 / eps.sqrt(),
        3 => 1.0 / (eps * eps.ln().abs()),
        _ => 1.0 / eps,
    })
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::NonPositive(x, y));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("slope fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(SlopeFit {
        slope,
        intercept,
        r2,
    })
}

/// A fitted log-log slope of one report column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedSlope {
    pub quantity: String,
    pub fit: SlopeFit,
}

/// Outcome of one acceptance check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Criterion {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// Slope inside a closed window.
    pub fn window(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Criterion::new(
            name,
            value >= lo && value <= hi,
            format!("{value:.4} in [{lo}, {hi}]"),
        )
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Parameters that determine a run, recorded with every report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stamp {
    pub seed: u64,
    pub coarse_n: usize,
    pub grading_constant: f64,
    pub aspect: f64,
    pub quad_tol: f64,
}

/// Tabular sweep output with fitted slopes and named pass/fail checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub slopes: Vec<NamedSlope>,
    pub criteria: Vec<Criterion>,
    pub stamp: Stamp,
}

impl SweepReport {
    pub fn new(name: impl Into<String>, columns: &[&str], stamp: Stamp) -> Self {
        SweepReport {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            stamp,
            ..SweepReport::default()
        }
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Config(format!("no column {name}")))?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Fits `ln |y|` against `ln x` for two columns and records the slope.
    pub fn fit(&mut self, x: &str, y: &str) -> Result<SlopeFit> {
        let xs = self.column(x)?;
        let ys = self.column(y)?;
        let pts: Vec<(f64, f64)> = xs.into_iter().zip(ys.into_iter().map(f64::abs)).collect();
        let fit = fit_slope(&pts)?;
        self.slopes.push(NamedSlope {
            quantity: y.to_string(),
            fit: fit.clone(),
        });
        Ok(fit)
    }

    pub fn push_criterion(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    /// Sorts rows by the first column, ascending.
    pub fn sort_rows(&mut self) {
        self.rows
            .sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap_or(std::cmp::Ordering::Equal));
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// Canonical CSV artifact with full-precision values.
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.12e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "report: {}", self.name);
        let st = &self.stamp;
        let _ = writeln!(
            s,
            "seed={} coarse_n={} grading_constant={} aspect={} quad_tol={:e}",
            st.seed, st.coarse_n, st.grading_constant, st.aspect, st.quad_tol
        );
        let _ = writeln!(s, "rows: {}", self.rows.len());
        for sl in &self.slopes {
            let _ = writeln!(
                s,
                "slope[{}] = {:.4} (intercept {:.4}, r2 {:.4})",
                sl.quantity, sl.fit.slope, sl.fit.intercept, sl.fit.r2
            );
        }
        for c in &self.criteria {
            let _ = writeln!(s, "{}", c.line());
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rho_values() {
        assert!((rho(2, 0.01).unwrap() - 10.0).abs() < 1e-12);
        assert!((rho(3, 0.01).unwrap() - 1.0 / (0.01 * 100f64.ln())).abs() < 1e-9);
        assert!((rho(3, 0.01).unwrap() - 21.7147).abs() < 1e-4);
        assert!((rho(4, 0.01).unwrap() - 100.0).abs() < 1e-12);
        assert!((rho(7, 0.01).unwrap() - 100.0).abs() < 1e-12);
        assert!(rho(2, 1.0).is_err());
        assert!(rho(2, 0.0).is_err());
        assert!(rho(1, 0.5).is_err());
    }

    #[test]
    fn exact_power_law_and_constant() {
        let f = fit_slope(&[(0.1, 10.0), (0.01, 100.0), (0.001, 1000.0)]).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let f = fit_slope(&[(0.1, 3.0), (0.2, 3.0), (0.5, 3.0)]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert!(matches!(fit_slope(&[(0.1, 1.0), (0.2, 2.0)]), Err(Error::InsufficientPoints(2))));
        assert!(matches!(fit_slope(&[(0.1, 1.0), (0.2, -2.0), (0.3, 1.0)]), Err(Error::NonPositive(..))));
    }

    #[test]
    fn noisy_square_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.02, 0.01, 0.005]
            .iter()
            .map(|&x: &f64| (x, x.sqrt() * (1.0 + 0.01 * rng.gen_range(-1.0..1.0))))
            .collect();
        let f = fit_slope(&pts).unwrap();
        assert!((0.45..=0.55).contains(&f.slope), "{}", f.slope);
    }

    #[test]
    fn report_round_trip() {
        let mut r = SweepReport::new("t", &["epsilon", "y"], Stamp::default());
        r.rows = vec![vec![0.1, 2.0], vec![0.01, 20.0], vec![0.001, 200.0]];
        r.sort_rows();
        assert_eq!(r.rows[0][0], 0.001);
        let f = r.fit("epsilon", "y").unwrap();
        r.push_criterion(Criterion::window("slope", f.slope, -1.1, -0.9));
        assert!(r.passed());
        assert!(r.summary().contains("PASS slope"));
        assert_eq!(r.to_csv().lines().count(), 4);
    }
}
