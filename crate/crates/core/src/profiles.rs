//! Per-user moral proportion vectors and user labelling.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lexicon::Foundation;
use crate::scoring::MoralScoredTweet;

/// Treatment of tweets carrying more than one moral label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultilabelMode {
    /// The tweet is a member of every labelled dimension.
    #[default]
    Each,
    /// Multi-labelled tweets are ignored.
    Drop,
}

impl FromStr for MultilabelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "each" => Ok(MultilabelMode::Each),
            "drop" => Ok(MultilabelMode::Drop),
            _ => Err(format!("unknown multilabel mode `{s}` (expected each or drop)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserMoralProfile {
    pub user_id: String,
    /// Morally labelled tweets by this user.
    pub tweet_count: u32,
    /// Tweets labelled with each basic foundation.
    pub label_counts: [u32; 5],
    /// Set iff the user has at least two moral tweets and a unique argmax.
    pub label: Option<Foundation>,
}

impl UserMoralProfile {
    pub fn proportion(&self, dim: usize) -> f64 {
        if self.tweet_count == 0 {
            0.0
        } else {
            self.label_counts[dim] as f64 / self.tweet_count as f64
        }
    }

    pub fn proportions(&self) -> [f64; 5] {
        std::array::from_fn(|j| self.proportion(j))
    }

    fn derive_label(&mut self) {
        self.label = if self.tweet_count >= 2 {
            unique_argmax(&self.label_counts).map(|j| Foundation::BASIC[j])
        } else {
            None
        };
    }
}

/// Index of the strict maximum, if exactly one entry attains it.
pub fn unique_argmax(counts: &[u32; 5]) -> Option<usize> {
    let max = *counts.iter().max()?;
    let mut hits = counts.iter().enumerate().filter(|&(_, &c)| c == max);
    let (idx, _) = hits.next()?;
    if hits.next().is_some() || max == 0 {
        None
    } else {
        Some(idx)
    }
}

/// Aggregates scored tweets into one profile per user. Every user with at
/// least one counted tweet is returned, labelled or not.
pub fn build_profiles<'a, I>(scored: I, mode: MultilabelMode) -> BTreeMap<String, UserMoralProfile>
where
    I: IntoIterator<Item = &'a MoralScoredTweet>,
{
    let mut profiles: BTreeMap<String, UserMoralProfile> = BTreeMap::new();
    for tweet in scored {
        if tweet.labels.is_empty() || (mode == MultilabelMode::Drop && tweet.labels.len() > 1) {
            continue;
        }
        let p = profiles
            .entry(tweet.user_id.clone())
            .or_insert_with(|| UserMoralProfile {
                user_id: tweet.user_id.clone(),
                tweet_count: 0,
                label_counts: [0; 5],
                label: None,
            });
        p.tweet_count += 1;
        for (j, c) in p.label_counts.iter_mut().enumerate() {
            if tweet.labels.contains_index(j) {
                *c += 1;
            }
        }
    }
    for p in profiles.values_mut() {
        p.derive_label();
    }
    profiles
}

/// Users kept for the network analysis, with their label.
pub fn assign_labels(profiles: &BTreeMap<String, UserMoralProfile>) -> BTreeMap<String, Foundation> {
    profiles
        .iter()
        .filter_map(|(id, p)| p.label.map(|l| (id.clone(), l)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{LabelSet, MoralLoadingVector};
    use crate::textprep::Lang;
    use Foundation::*;

    fn tweet(user: &str, labels: &[Foundation]) -> MoralScoredTweet {
        let labels: LabelSet = labels.iter().copied().collect();
        let counts = std::array::from_fn(|j| labels.contains_index(j) as u32);
        MoralScoredTweet {
            id: "t".into(),
            user_id: user.into(),
            lang: Lang::En,
            loading: MoralLoadingVector {
                counts,
                matched: labels.len() as u32,
            },
            labels,
        }
    }

    #[test]
    fn four_tweet_user() {
        let ts = [
            tweet("a", &[Care]),
            tweet("a", &[Care]),
            tweet("a", &[Fairness]),
            tweet("a", &[Purity]),
        ];
        let p = &build_profiles(&ts, MultilabelMode::Each)["a"];
        assert_eq!(p.proportions(), [0.5, 0.25, 0.0, 0.0, 0.25]);
        assert_eq!(p.label, Some(Care));
    }

    #[test]
    fn multilabel_tweet_counts_in_each_dimension() {
        let ts = [tweet("a", &[Care, Authority]), tweet("a", &[Care])];
        let p = &build_profiles(&ts, MultilabelMode::Each)["a"];
        assert_eq!(p.tweet_count, 2);
        assert_eq!(p.proportions(), [1.0, 0.0, 0.0, 0.5, 0.0]);
        assert!(p.proportions().iter().sum::<f64>() > 1.0);

        let p = &build_profiles(&ts, MultilabelMode::Drop)["a"];
        assert_eq!(p.tweet_count, 1);
        assert_eq!(p.label, None);
    }

    #[test]
    fn single_tweet_user_kept_but_unlabelled() {
        let ts = [tweet("a", &[Care])];
        let profiles = build_profiles(&ts, MultilabelMode::Each);
        assert_eq!(profiles["a"].tweet_count, 1);
        assert_eq!(profiles["a"].label, None);
        assert!(assign_labels(&profiles).is_empty());
    }

    #[test]
    fn tie_excluded() {
        let ts = [tweet("a", &[Care]), tweet("a", &[Fairness])];
        let profiles = build_profiles(&ts, MultilabelMode::Each);
        assert_eq!(profiles["a"].proportions(), [0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!(assign_labels(&profiles).is_empty());
    }

    #[test]
    fn argmax_helper() {
        assert_eq!(unique_argmax(&[2, 1, 0, 0, 1]), Some(0));
        assert_eq!(unique_argmax(&[2, 2, 0, 0, 1]), None);
        assert_eq!(unique_argmax(&[0; 5]), None);
    }
}
