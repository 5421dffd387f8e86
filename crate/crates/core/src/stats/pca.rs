//! Principal component analysis of five-dimensional loading vectors.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::StatsError;
use crate::lexicon::Foundation;

pub const DIM: usize = 5;

const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaMode {
    #[default]
    Covariance,
    Correlation,
}

impl FromStr for PcaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "covariance" | "cov" => Ok(PcaMode::Covariance),
            "correlation" | "corr" => Ok(PcaMode::Correlation),
            _ => Err(format!("unknown PCA mode `{s}` (expected covariance or correlation)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub mode: PcaMode,
    pub means: [f64; DIM],
    /// Column scale used before projection (1 in covariance mode).
    pub scales: [f64; DIM],
    /// Eigenvalues in non-increasing order.
    pub eigenvalues: [f64; DIM],
    /// `components[k]` is the unit loading vector of component k+1.
    pub components: [[f64; DIM]; DIM],
    pub explained_variance_ratios: [f64; DIM],
    /// Per-sample coordinates on every component.
    pub scores: Vec<[f64; DIM]>,
}

impl PcaResult {
    /// Centered (and in correlation mode standardized) copy of a sample.
    pub fn prepare(&self, sample: &[f64; DIM]) -> [f64; DIM] {
        std::array::from_fn(|d| (sample[d] - self.means[d]) / self.scales[d])
    }

    pub fn scree_csv(&self) -> String {
        let mut out = String::from("component,eigenvalue,ratio,cumulative\n");
        let mut cumulative = 0.0;
        for k in 0..DIM {
            cumulative += self.explained_variance_ratios[k];
            let _ = writeln!(
                out,
                "PC{},{},{},{}",
                k + 1,
                self.eigenvalues[k],
                self.explained_variance_ratios[k],
                cumulative
            );
        }
        out
    }

    /// Absolute loadings per (foundation, component).
    pub fn heatmap_csv(&self) -> String {
        let mut out = String::from("foundation");
        for k in 0..DIM {
            let _ = write!(out, ",PC{}", k + 1);
        }
        out.push('\n');
        for (d, f) in Foundation::BASIC.iter().enumerate() {
            out.push_str(f.name());
            for k in 0..DIM {
                let _ = write!(out, ",{}", self.components[k][d].abs());
            }
            out.push('\n');
        }
        out
    }
}

/// Runs PCA on the sample matrix (one row per sample).
pub fn pca(samples: &[[f64; DIM]], mode: PcaMode) -> Result<PcaResult, StatsError> {
    let n = samples.len();
    if n < 2 {
        return Err(StatsError::TooFewObservations { needed: 2, got: n });
    }
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let nf = n as f64;
    let mut means = [0.0; DIM];
    for s in samples {
        for d in 0..DIM {
            means[d] += s[d];
        }
    }
    means.iter_mut().for_each(|m| *m /= nf);

    let mut cov = [[0.0; DIM]; DIM];
    for s in samples {
        for a in 0..DIM {
            let da = s[a] - means[a];
            for b in a..DIM {
                cov[a][b] += da * (s[b] - means[b]);
            }
        }
    }
    for a in 0..DIM {
        for b in a..DIM {
            cov[a][b] /= nf - 1.0;
            cov[b][a] = cov[a][b];
        }
    }

    let mut scales = [1.0; DIM];
    if mode == PcaMode::Correlation {
        for d in 0..DIM {
            if cov[d][d] <= 0.0 {
                return Err(StatsError::ZeroVariance(Foundation::BASIC[d].name().into()));
            }
            scales[d] = cov[d][d].sqrt();
        }
        for a in 0..DIM {
            for b in 0..DIM {
                cov[a][b] /= scales[a] * scales[b];
            }
        }
    }

    let trace: f64 = (0..DIM).map(|d| cov[d][d]).sum();
    if trace <= 0.0 {
        return Err(StatsError::NoVariance);
    }

    let (values, vectors) = jacobi_eigen(cov);
    let mut order: Vec<usize> = (0..DIM).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut eigenvalues = [0.0; DIM];
    let mut components = [[0.0; DIM]; DIM];
    for (k, &src) in order.iter().enumerate() {
        eigenvalues[k] = values[src];
        let mut v: [f64; DIM] = std::array::from_fn(|d| vectors[d][src]);
        let lead = (0..DIM)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
            .expect("non-empty");
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components[k] = v;
    }
    let explained_variance_ratios = eigenvalues.map(|e| e / trace);

    let mut result = PcaResult {
        mode,
        means,
        scales,
        eigenvalues,
        components,
        explained_variance_ratios,
        scores: Vec::with_capacity(n),
    };
    result.scores = samples
        .iter()
        .map(|s| {
            let x = result.prepare(s);
            std::array::from_fn(|k| dot(&x, &result.components[k]))
        })
        .collect();
    Ok(result)
}

fn dot(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues and a matrix whose columns are the eigenvectors.
fn jacobi_eigen(mut a: [[f64; DIM]; DIM]) -> ([f64; DIM], [[f64; DIM]; DIM]) {
    let mut v = [[0.0; DIM]; DIM];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..DIM)
            .flat_map(|p| (p + 1..DIM).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale || off == 0.0 {
            break;
        }
        for p in 0..DIM {
            for q in p + 1..DIM {
                if a[p][q].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..DIM {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..DIM {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    (std::array::from_fn(|i| a[i][i]), v)
}

/// Rows of a biplot: sample scores plus one arrow per foundation.
#[derive(Debug, Clone, PartialEq)]
pub struct BiplotTable {
    pub axes: (usize, usize),
    /// (kind, name, x, y); kind is `score` or `loading`.
    pub rows: Vec<(&'static str, String, f64, f64)>,
}

impl BiplotTable {
    pub fn header(&self) -> String {
        format!("kind,name,PC{},PC{}", self.axes.0, self.axes.1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (kind, name, x, y) in &self.rows {
            let _ = writeln!(out, "{kind},{name},{x},{y}");
        }
        out
    }
}

/// Biplot data for the two 1-based component indices in `axes`. Score rows
/// are named by sample position unless `names` is given.
pub fn emit_biplot_data(
    pca: &PcaResult,
    axes: (usize, usize),
    names: Option<&[String]>,
) -> Result<BiplotTable, StatsError> {
    for idx in [axes.0, axes.1] {
        if idx == 0 || idx > DIM {
            return Err(StatsError::AxisOutOfRange { index: idx, max: DIM });
        }
    }
    if axes.0 == axes.1 {
        return Err(StatsError::SameAxes(axes.0));
    }
    let (a, b) = (axes.0 - 1, axes.1 - 1);
    let mut rows = Vec::with_capacity(pca.scores.len() + DIM);
    for (i, s) in pca.scores.iter().enumerate() {
        let name = names.and_then(|n| n.get(i).cloned()).unwrap_or_else(|| i.to_string());
        rows.push(("score", name, s[a], s[b]));
    }
    for (d, f) in Foundation::BASIC.iter().enumerate() {
        rows.push((
            "loading",
            f.name().to_string(),
            pca.components[a][d],
            pca.components[b][d],
        ));
    }
    Ok(BiplotTable { axes, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_samples() -> Vec<[f64; DIM]> {
        vec![
            [0.5, 0.0, 0.0, 0.5, 0.0],
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.25, 0.25, 0.25, 0.25],
            [0.0, 0.0, 1.0, 0.0, 0.0],
            [0.2, 0.2, 0.2, 0.2, 0.2],
            [0.0, 0.0, 0.0, 1.0 / 3.0, 2.0 / 3.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
        ]
    }

    #[test]
    fn rank_one_data() {
        let dir = [1.0, 2.0, -1.0, 0.5, 0.0];
        let samples: Vec<[f64; DIM]> = (0..6)
            .map(|t| std::array::from_fn(|d| 0.3 + t as f64 * dir[d]))
            .collect();
        let r = pca(&samples, PcaMode::Covariance).unwrap();
        assert!((r.explained_variance_ratios[0] - 1.0).abs() < 1e-9);
        for k in 1..DIM {
            assert!(r.explained_variance_ratios[k].abs() < 1e-9);
        }
        // sign convention: largest coordinate positive
        assert!(r.components[0][1] > 0.0);
    }

    #[test]
    fn simplex_constraint_leaves_a_null_direction() {
        let r = pca(&simplex_samples(), PcaMode::Covariance).unwrap();
        assert!(r.eigenvalues[DIM - 1].abs() <= 1e-9, "{:?}", r.eigenvalues);
        assert!(r.eigenvalues[DIM - 2] > 1e-6);
    }

    #[test]
    fn full_reconstruction() {
        let samples = simplex_samples();
        let r = pca(&samples, PcaMode::Covariance).unwrap();
        for (s, scores) in samples.iter().zip(&r.scores) {
            let centered = r.prepare(s);
            for d in 0..DIM {
                let rebuilt: f64 = (0..DIM).map(|k| scores[k] * r.components[k][d]).sum();
                assert!((rebuilt - centered[d]).abs() < 1e-9);
            }
        }
        let total: f64 = r.explained_variance_ratios.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        for w in r.explained_variance_ratios.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn correlation_mode_rejects_constant_column() {
        let samples = vec![
            [0.1, 0.0, 0.3, 0.2, 0.4],
            [0.5, 0.0, 0.1, 0.2, 0.2],
            [0.3, 0.0, 0.2, 0.1, 0.4],
        ];
        assert_eq!(
            pca(&samples, PcaMode::Correlation).unwrap_err(),
            StatsError::ZeroVariance("Fairness".into())
        );
        assert!(pca(&samples, PcaMode::Covariance).is_ok());
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            pca(&[[0.0; DIM]], PcaMode::Covariance),
            Err(StatsError::TooFewObservations { .. })
        ));
        assert_eq!(
            pca(&[[0.2; DIM], [0.2; DIM]], PcaMode::Covariance).unwrap_err(),
            StatsError::NoVariance
        );
    }

    #[test]
    fn biplot_shapes() {
        let r = pca(&simplex_samples()[..3], PcaMode::Covariance).unwrap();
        let t = emit_biplot_data(&r, (1, 2), None).unwrap();
        assert_eq!(t.rows.iter().filter(|r| r.0 == "score").count(), 3);
        assert_eq!(t.rows.iter().filter(|r| r.0 == "loading").count(), 5);
        assert_eq!(emit_biplot_data(&r, (1, 1), None).unwrap_err(), StatsError::SameAxes(1));
        assert!(emit_biplot_data(&r, (0, 2), None).is_err());
        assert!(emit_biplot_data(&r, (1, 6), None).is_err());
        let t = emit_biplot_data(&r, (3, 4), None).unwrap();
        assert_eq!(t.header(), "kind,name,PC3,PC4");
        assert!(t.to_csv().starts_with("kind,name,PC3,PC4\nscore,0,"));
    }

    #[test]
    fn csv_tables() {
        let r = pca(&simplex_samples(), PcaMode::Covariance).unwrap();
        let scree = r.scree_csv();
        assert_eq!(scree.lines().count(), 6);
        assert!(scree.lines().last().unwrap().starts_with("PC5,"));
        let heat = r.heatmap_csv();
        assert!(heat.starts_with("foundation,PC1,PC2,PC3,PC4,PC5\nCare,"));
        assert!(!heat.contains(",-"));
    }
}
