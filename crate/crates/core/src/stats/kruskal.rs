use serde::Serialize;

use super::gamma::chi_square_sf;
use crate::error::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KruskalWallisResult {
    /// Tie-corrected H statistic.
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub group_sizes: Vec<usize>,
}

/// Kruskal-Wallis H test with mid-ranks and tie correction.
///
/// When every pooled value is identical the tie-correction factor is zero;
/// the result is then defined as H = 0, p = 1.
pub fn kruskal_wallis<G: AsRef<[f64]>>(groups: &[G]) -> Result<KruskalWallisResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups {
            needed: 2,
            got: groups.len(),
        });
    }
    let mut pooled: Vec<(f64, usize)> = Vec::new();
    for (g, values) in groups.iter().enumerate() {
        let values = values.as_ref();
        if values.is_empty() {
            return Err(StatsError::EmptyGroup(g));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        pooled.extend(values.iter().map(|&v| (v, g)));
    }
    let n = pooled.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, got: n });
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sums = vec![0.0; groups.len()];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        // ranks start+1 ..= end share their mean
        let mid_rank = (start + 1 + end) as f64 / 2.0;
        for &(_, g) in &pooled[start..end] {
            rank_sums[g] += mid_rank;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }

    let group_sizes: Vec<usize> = groups.iter().map(|g| g.as_ref().len()).collect();
    let df = groups.len() - 1;
    let nf = n as f64;
    let correction = 1.0 - tie_term / (nf * nf * nf - nf);
    if correction <= 0.0 {
        return Ok(KruskalWallisResult {
            statistic: 0.0,
            degrees_of_freedom: df,
            p_value: 1.0,
            group_sizes,
        });
    }
    let grand_mean = (nf + 1.0) / 2.0;
    let spread: f64 = rank_sums
        .iter()
        .zip(&group_sizes)
        .map(|(&r, &size)| {
            let d = r / size as f64 - grand_mean;
            size as f64 * d * d
        })
        .sum();
    let statistic = (12.0 / (nf * (nf + 1.0)) * spread / correction).max(0.0);
    Ok(KruskalWallisResult {
        statistic,
        degrees_of_freedom: df,
        p_value: chi_square_sf(statistic, df),
        group_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_groups() {
        let r = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert!((r.statistic - 3.857).abs() < 1e-3);
        assert!((r.statistic - 27.0 / 7.0).abs() < 1e-12);
        assert_eq!(r.degrees_of_freedom, 1);
        assert!((r.p_value - 0.049_534_613_435_626_49).abs() < 1e-12);
    }

    #[test]
    fn equal_rank_sums_give_zero() {
        let r = kruskal_wallis(&[vec![1.0, 4.0, 5.0, 8.0], vec![2.0, 3.0, 6.0, 7.0]]).unwrap();
        assert!(r.statistic.abs() < 1e-15);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        // rank sums 10 vs 11: close to, but not exactly, zero
        let r = kruskal_wallis(&[vec![1.0, 4.0, 5.0], vec![2.0, 3.0, 6.0]]).unwrap();
        assert!((r.statistic - 1.0 / 21.0).abs() < 1e-12);
    }

    #[test]
    fn tied_groups_match_reference() {
        // frozen from an independent statistics package
        let r = kruskal_wallis(&[vec![1.0, 1.0, 2.0], vec![1.0, 2.0, 2.0]]).unwrap();
        assert!((r.statistic - 0.555_555_555_555_553_6).abs() < 1e-9);
        assert!((r.p_value - 0.456_056_540_250_256_9).abs() < 1e-9);
    }

    #[test]
    fn all_identical_is_defined() {
        let r = kruskal_wallis(&[vec![0.5; 3], vec![0.5; 4]]).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        assert_eq!(r.group_sizes, vec![3, 4]);
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            kruskal_wallis(&[vec![1.0, 2.0]]).unwrap_err(),
            StatsError::TooFewGroups { needed: 2, got: 1 }
        );
        assert_eq!(
            kruskal_wallis(&[vec![1.0], vec![]]).unwrap_err(),
            StatsError::EmptyGroup(1)
        );
        assert!(matches!(
            kruskal_wallis(&[vec![1.0], vec![2.0]]).unwrap_err(),
            StatsError::TooFewObservations { .. }
        ));
        assert_eq!(
            kruskal_wallis(&[vec![1.0, f64::NAN], vec![2.0]]).unwrap_err(),
            StatsError::NonFinite
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn groups() -> impl Strategy<Value = Vec<Vec<f64>>> {
            proptest::collection::vec(proptest::collection::vec((0i32..8).prop_map(f64::from), 1..10), 2..5)
                .prop_filter("need 3 observations", |g| g.iter().map(Vec::len).sum::<usize>() >= 3)
        }

        proptest! {
            #[test]
            fn invariant_under_monotone_transform(gs in groups()) {
                let a = kruskal_wallis(&gs).unwrap();
                let t: Vec<Vec<f64>> = gs.iter().map(|g| g.iter().map(|v| (v * 0.3).exp() + 2.0).collect()).collect();
                let b = kruskal_wallis(&t).unwrap();
                prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
            }

            #[test]
            fn symmetric_under_group_reordering(gs in groups()) {
                let a = kruskal_wallis(&gs).unwrap();
                let mut rev = gs.clone();
                rev.reverse();
                let b = kruskal_wallis(&rev).unwrap();
                prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
                prop_assert!((0.0..=1.0).contains(&a.p_value));
                prop_assert!(a.statistic >= 0.0);
            }
        }
    }
}
