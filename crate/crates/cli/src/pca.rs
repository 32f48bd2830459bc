//! Principal component analysis of the component feature matrix:
//! explained-variance ratios, unit-norm loadings, and the strongest feature
//! contributions per principal component.

use nalgebra::DMatrix;
use serde::Serialize;

use tempograph::error::{Error, Result};

/// Relative singular-value cutoff below which a direction counts as null.
const NULL_DIRECTION_TOL: f64 = 1e-12;

/// One feature's contribution to a principal component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopFeature {
    pub index: usize,
    pub name: String,
    pub loading: f64,
}

/// PCA summary in descending variance order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcaReport {
    pub n_samples: usize,
    pub n_features: usize,
    /// Fraction of total variance per retained component; sums to at most 1.
    pub explained_variance_ratio: Vec<f64>,
    /// Unit-norm principal axes, one row per retained component. The
    /// largest-magnitude entry of each axis is made positive.
    pub loadings: Vec<Vec<f64>>,
    /// The strongest contributions per component, ranked by |loading|.
    pub top_features: Vec<Vec<TopFeature>>,
}

/// Mean-centered PCA via singular value decomposition.
///
/// Retains `min(n_components, n_samples, n_features)` components. Null
/// directions (singular values below `1e-12` of the largest) contribute
/// zero variance, so exactly-rank-deficient data yields exact ratios.
pub fn pca(
    rows: &[Vec<f64>],
    n_components: usize,
    top: usize,
    feature_names: Option<&[String]>,
) -> Result<PcaReport> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::EmptyInput("pca needs at least 2 rows"));
    }
    let d = rows[0].len();
    for row in rows {
        if row.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: row.len() });
        }
    }
    if d == 0 {
        return Err(Error::EmptyInput("pca needs at least 1 feature"));
    }
    if n_components == 0 || n_components > d {
        return Err(Error::InvalidParameter(format!(
            "n_components {n_components} must lie in [1, {d}]"
        )));
    }
    if let Some(names) = feature_names {
        if names.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: names.len() });
        }
    }

    let mut means = vec![0.0f64; d];
    for row in rows {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n as f64;
    }
    let centered = DMatrix::from_fn(n, d, |i, j| rows[i][j] - means[j]);

    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let singular = svd.singular_values;

    // order directions by singular value descending (stable by index)
    let mut order: Vec<usize> = (0..singular.len()).collect();
    order.sort_by(|&a, &b| singular[b].total_cmp(&singular[a]).then(a.cmp(&b)));

    let max_sv = order.first().map(|&i| singular[i]).unwrap_or(0.0);
    let variance_of = |sv: f64| -> f64 {
        if max_sv <= 0.0 || sv <= max_sv * NULL_DIRECTION_TOL {
            0.0
        } else {
            sv * sv / (n as f64 - 1.0)
        }
    };
    let total_variance: f64 = order.iter().map(|&i| variance_of(singular[i])).sum();

    let retained = n_components.min(order.len());
    let mut ratios = Vec::with_capacity(retained);
    let mut loadings = Vec::with_capacity(retained);
    let mut top_features = Vec::with_capacity(retained);
    for &direction in order.iter().take(retained) {
        let variance = variance_of(singular[direction]);
        ratios.push(if total_variance > 0.0 { variance / total_variance } else { 0.0 });

        let mut axis: Vec<f64> = (0..d).map(|j| v_t[(direction, j)]).collect();
        // sign convention: largest-magnitude entry positive
        let anchor = axis
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                a.abs().total_cmp(&b.abs()).then(ib.cmp(ia))
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        if axis[anchor] < 0.0 {
            for value in axis.iter_mut() {
                *value = -*value;
            }
        }

        let mut ranked: Vec<usize> = (0..d).collect();
        ranked.sort_by(|&a, &b| axis[b].abs().total_cmp(&axis[a].abs()).then(a.cmp(&b)));
        top_features.push(
            ranked
                .into_iter()
                .take(top)
                .map(|index| TopFeature {
                    index,
                    name: feature_names
                        .map(|names| names[index].clone())
                        .unwrap_or_else(|| format!("f{index}")),
                    loading: axis[index],
                })
                .collect(),
        );
        loadings.push(axis);
    }

    Ok(PcaReport {
        n_samples: n,
        n_features: d,
        explained_variance_ratio: ratios,
        loadings,
        top_features,
    })
}
