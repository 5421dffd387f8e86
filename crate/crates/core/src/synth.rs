//! Synthetic corpora with planted moral labels and planted homophily.
//!
//! Every user receives an intended foundation. Their moral tweets are built
//! so that foundation is the strict majority label, and their retweets are
//! wired so that a fixed fraction `p` of each user's incident retweet weight
//! goes to users with the same label:
//!
//! * within each label group, users sit on a random cycle whose edges carry
//!   weight `A = round(p * T)`;
//! * all users are laid out label block by label block and each is linked to
//!   the user half the ring away with weight `B = T - A`, which always lands
//!   in a different block as long as no label holds more than half the users.
//!
//! Each user therefore has same-label weight `2A` and total weight `2T`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SynthError;
use crate::lexicon::Foundation;
use crate::textprep::{Lang, TweetRecord};

const FILLER: [&str; 18] = [
    "lorem", "ipsum", "dolor", "amet", "today", "city", "train", "coffee", "weather", "music", "game", "book", "phone",
    "street", "good", "bad", "not", "very",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_users: usize,
    /// Inclusive range of moral tweets per user; the minimum must be >= 2.
    pub min_tweets_per_user: u32,
    pub max_tweets_per_user: u32,
    /// Tweets per user that contain no basic-foundation term.
    pub unmatched_tweets_per_user: u32,
    /// Dictionary terms generated per foundation.
    pub terms_per_foundation: usize,
    /// Planted same-label share of each user's retweet weight.
    pub planted_p: f64,
    /// Relative frequency of each basic foundation as a user label.
    pub label_weights: [f64; 5],
    /// Retweet weight T per ring position (each user ends up with 2T).
    pub retweets_per_node: u32,
    /// Largest accepted gap between `planted_p` and the realised fraction.
    pub max_rounding: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_users: 1000,
            min_tweets_per_user: 2,
            max_tweets_per_user: 5,
            unmatched_tweets_per_user: 1,
            terms_per_foundation: 24,
            planted_p: 0.7,
            label_weights: [0.25, 0.1, 0.15, 0.3, 0.2],
            retweets_per_node: 10,
            max_rounding: 0.005,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Invalid(m.to_string()));
        if self.n_users < 2 {
            return bad("n_users must be at least 2");
        }
        if self.min_tweets_per_user < 2 || self.max_tweets_per_user < self.min_tweets_per_user {
            return bad("tweets per user must satisfy 2 <= min <= max");
        }
        if !(0.0..=1.0).contains(&self.planted_p) {
            return bad("planted_p must lie in [0, 1]");
        }
        if self.label_weights.iter().any(|w| !w.is_finite() || *w < 0.0)
            || self.label_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("label_weights must be non-negative with a positive sum");
        }
        if self.terms_per_foundation == 0 || self.terms_per_foundation > 1000 {
            return bad("terms_per_foundation must be in 1..=1000");
        }
        if self.retweets_per_node == 0 {
            return bad("retweets_per_node must be positive");
        }
        let (achievable, _) = self.split_weight(self.retweets_per_node);
        if (achievable - self.planted_p).abs() > self.max_rounding {
            let minimum = (1..=100_000)
                .find(|&t| (self.split_weight(t).0 - self.planted_p).abs() <= self.max_rounding)
                .unwrap_or(100_000);
            return Err(SynthError::InfeasibleFraction {
                p: self.planted_p,
                retweets_per_node: self.retweets_per_node,
                achievable,
                minimum,
            });
        }
        Ok(())
    }

    /// Realised fraction and same-label weight A for a given T.
    fn split_weight(&self, t: u32) -> (f64, u32) {
        let a = (self.planted_p * t as f64).round() as u32;
        (a as f64 / t as f64, a)
    }

    /// User counts per label by largest-remainder apportionment.
    fn group_sizes(&self) -> [usize; 5] {
        let total: f64 = self.label_weights.iter().sum();
        let quotas = self.label_weights.map(|w| w / total * self.n_users as f64);
        let mut sizes = quotas.map(|q| q.floor() as usize);
        let mut rest = self.n_users - sizes.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&a, &b| {
            (quotas[b] - quotas[b].floor())
                .total_cmp(&(quotas[a] - quotas[a].floor()))
                .then(a.cmp(&b))
        });
        for j in order {
            if rest == 0 {
                break;
            }
            if self.label_weights[j] > 0.0 {
                sizes[j] += 1;
                rest -= 1;
            }
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTruth {
    pub user_id: String,
    pub label: Foundation,
    pub moral_tweets: u32,
    /// Tweets labelled with each basic foundation.
    pub label_counts: [u32; 5],
    pub same_label_weight: u64,
    pub total_weight: u64,
    pub homophily: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetTruth {
    pub id: String,
    pub counts: [u32; 5],
    pub matched: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    pub planted_p: f64,
    pub realised_p: f64,
    pub users: Vec<UserTruth>,
    pub tweets: Vec<TweetTruth>,
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub records: Vec<TweetRecord>,
    /// LIWC-style dictionary covering the generated terms.
    pub dictionary: String,
    pub truth: SyntheticTruth,
}

fn term(f: Foundation, i: usize) -> String {
    format!("{}{:03}", f.slug(), i)
}

/// Every fourth term is a stem; tweets use it with a suffix.
fn is_stem(i: usize) -> bool {
    i % 4 == 3
}

fn dictionary(terms_per_foundation: usize) -> String {
    let mut out = String::from("%\n");
    let cats = [
        (Foundation::Care, "HarmVirtue"),
        (Foundation::Fairness, "FairnessVirtue"),
        (Foundation::Ingroup, "IngroupVirtue"),
        (Foundation::Authority, "AuthorityVirtue"),
        (Foundation::Purity, "PurityVirtue"),
        (Foundation::GeneralMorality, "MoralityGeneral"),
    ];
    for (i, (_, name)) in cats.iter().enumerate() {
        let _ = writeln!(out, "{:02}\t{name}", i + 1);
    }
    out.push_str("%\n");
    for (c, (f, _)) in cats.iter().enumerate() {
        for i in 0..terms_per_foundation {
            let star = if is_stem(i) { "*" } else { "" };
            let _ = writeln!(out, "{}{star}\t{:02}", term(*f, i), c + 1);
        }
    }
    out
}

struct Writer {
    records: Vec<TweetRecord>,
    tweets: Vec<TweetTruth>,
    next_id: u64,
}

impl Writer {
    fn push(&mut self, user: &str, text: String, retweet: Option<(&str, &str)>) -> String {
        let id = format!("t{:09}", self.next_id);
        self.next_id += 1;
        self.records.push(TweetRecord {
            id: id.clone(),
            user_id: user.to_string(),
            text,
            lang: Lang::En,
            timestamp: 1_456_790_400 + self.next_id as i64 * 60,
            retweet_of_user_id: retweet.map(|(u, _)| u.to_string()),
            retweet_of_tweet_id: retweet.map(|(_, t)| t.to_string()),
        });
        id
    }
}

fn pick_term(rng: &mut ChaCha8Rng, f: Foundation, pool: usize) -> String {
    let i = rng.gen_range(0..pool);
    let mut t = term(f, i);
    if is_stem(i) {
        t.push_str(["s", "ed", "ing", "x"][rng.gen_range(0..4)]);
    }
    t
}

fn filler(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    (0..n)
        .map(|_| FILLER[rng.gen_range(0..FILLER.len())].to_string())
        .collect()
}

fn compose(rng: &mut ChaCha8Rng, mut words: Vec<String>) -> String {
    words.extend(filler(rng, 3));
    words.shuffle(rng);
    if rng.gen_bool(0.2) {
        words.push("https://t.co/synthetic".into());
    }
    if rng.gen_bool(0.2) {
        words.insert(0, "@someone".into());
    }
    words.join(" ")
}

pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<SyntheticCorpus, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = spec.terms_per_foundation;
    let t = spec.retweets_per_node;
    let (realised_p, same_w) = spec.split_weight(t);
    let cross_w = t - same_w;

    let sizes = spec.group_sizes();
    let mut labels: Vec<Foundation> = sizes
        .iter()
        .enumerate()
        .flat_map(|(j, &n)| std::iter::repeat_n(Foundation::BASIC[j], n))
        .collect();
    labels.shuffle(&mut rng);
    let users: Vec<String> = (0..spec.n_users).map(|i| format!("u{i:06}")).collect();

    if same_w > 0 {
        if let Some(j) = (0..5).find(|&j| sizes[j] == 1) {
            return Err(SynthError::Invalid(format!(
                "label {} has a single user, who cannot receive same-label retweets",
                Foundation::BASIC[j]
            )));
        }
    }
    let half = spec.n_users / 2;
    if cross_w > 0 && sizes.iter().any(|&s| s > half) {
        return Err(SynthError::Invalid(
            "a label holds more than half the users; cross-label wiring is impossible".into(),
        ));
    }

    let mut w = Writer {
        records: Vec::new(),
        tweets: Vec::new(),
        next_id: 0,
    };
    let mut first_tweet: Vec<String> = Vec::with_capacity(spec.n_users);
    let mut user_counts: Vec<[u32; 5]> = Vec::with_capacity(spec.n_users);
    let mut user_moral: Vec<u32> = Vec::with_capacity(spec.n_users);

    for (u, user) in users.iter().enumerate() {
        let own = labels[u];
        let n = rng.gen_range(spec.min_tweets_per_user..=spec.max_tweets_per_user);
        let off = rng.gen_range(0..=(n - 1) / 2);
        let mut kinds: Vec<Option<Foundation>> = (0..n)
            .map(|k| {
                (k < off).then(|| {
                    let others: Vec<Foundation> = Foundation::BASIC.into_iter().filter(|&f| f != own).collect();
                    others[rng.gen_range(0..others.len())]
                })
            })
            .collect();
        kinds.shuffle(&mut rng);
        let mut label_counts = [0u32; 5];
        let mut first = None;
        for kind in kinds {
            let main = kind.unwrap_or(own);
            let mut counts = [0u32; 5];
            let mut words = vec![pick_term(&mut rng, main, pool), pick_term(&mut rng, main, pool)];
            counts[main.basic_index().unwrap()] += 2;
            if rng.gen_bool(0.5) {
                let others: Vec<Foundation> = Foundation::BASIC.into_iter().filter(|&f| f != main).collect();
                let extra = others[rng.gen_range(0..others.len())];
                words.push(pick_term(&mut rng, extra, pool));
                counts[extra.basic_index().unwrap()] += 1;
            }
            if rng.gen_bool(0.3) {
                words.push(pick_term(&mut rng, Foundation::GeneralMorality, pool));
            }
            label_counts[main.basic_index().unwrap()] += 1;
            let id = w.push(user, compose(&mut rng, words), None);
            w.tweets.push(TweetTruth {
                id: id.clone(),
                matched: counts.iter().sum(),
                counts,
            });
            first.get_or_insert(id);
        }
        for _ in 0..spec.unmatched_tweets_per_user {
            let mut words = Vec::new();
            if rng.gen_bool(0.5) {
                words.push(pick_term(&mut rng, Foundation::GeneralMorality, pool));
            }
            w.push(user, compose(&mut rng, words), None);
        }
        first_tweet.push(first.expect("at least two moral tweets"));
        user_counts.push(label_counts);
        user_moral.push(n);
    }

    // planted edges, keyed by unordered user index pair
    let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut add = |a: usize, b: usize, weight: u32| {
        if weight > 0 {
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += weight as u64;
        }
    };
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); 5];
    for (u, l) in labels.iter().enumerate() {
        blocks[l.basic_index().unwrap()].push(u);
    }
    for block in &mut blocks {
        block.shuffle(&mut rng);
    }
    for block in blocks.iter().filter(|b| b.len() >= 2) {
        for k in 0..block.len() {
            add(block[k], block[(k + 1) % block.len()], same_w);
        }
    }
    let ring: Vec<usize> = blocks.concat();
    let n = ring.len();
    for k in 0..n {
        add(ring[k], ring[(k + half) % n], cross_w);
    }

    let mut same = vec![0u64; spec.n_users];
    let mut total = vec![0u64; spec.n_users];
    for (&(a, b), &weight) in &edges {
        for (x, y) in [(a, b), (b, a)] {
            total[x] += weight;
            if labels[x] == labels[y] {
                same[x] += weight;
            }
        }
        for r in 0..weight {
            let (from, to) = if r % 2 == 0 { (a, b) } else { (b, a) };
            let mut words = filler(&mut rng, 4);
            words.insert(0, "rt".into());
            w.push(&users[from], words.join(" "), Some((&users[to], &first_tweet[to])));
        }
    }

    let truth_users = users
        .iter()
        .enumerate()
        .map(|(u, id)| UserTruth {
            user_id: id.clone(),
            label: labels[u],
            moral_tweets: user_moral[u],
            label_counts: user_counts[u],
            same_label_weight: same[u],
            total_weight: total[u],
            homophily: if total[u] == 0 {
                0.0
            } else {
                same[u] as f64 / total[u] as f64
            },
        })
        .collect();

    Ok(SyntheticCorpus {
        records: w.records,
        dictionary: dictionary(pool),
        truth: SyntheticTruth {
            planted_p: spec.planted_p,
            realised_p,
            users: truth_users,
            tweets: w.tweets,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: f64, n: usize) -> SyntheticSpec {
        SyntheticSpec {
            n_users: n,
            planted_p: p,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate_synthetic(&spec(0.7, 200), 7).unwrap();
        let b = generate_synthetic(&spec(0.7, 200), 7).unwrap();
        assert_eq!(a.records, b.records);
        let c = generate_synthetic(&spec(0.7, 200), 8).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn every_user_has_planted_fraction() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            let c = generate_synthetic(&spec(p, 300), 1).unwrap();
            for u in &c.truth.users {
                assert_eq!(u.total_weight, 20, "{u:?}");
                assert!((u.homophily - p).abs() < 1e-12, "{u:?}");
                let own = u.label_counts[u.label.basic_index().unwrap()];
                assert!(u
                    .label_counts
                    .iter()
                    .enumerate()
                    .all(|(j, &c)| j == u.label.basic_index().unwrap() || c < own));
            }
        }
    }

    #[test]
    fn infeasible_fraction_suggests_minimum() {
        let s = SyntheticSpec {
            planted_p: 0.33,
            retweets_per_node: 2,
            ..spec(0.33, 100)
        };
        match s.validate().unwrap_err() {
            SynthError::InfeasibleFraction {
                minimum, achievable, ..
            } => {
                assert_eq!(achievable, 0.5);
                assert_eq!(minimum, 3);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(spec(1.5, 100).validate().is_err());
        assert!(spec(0.5, 1).validate().is_err());
        let s = SyntheticSpec {
            min_tweets_per_user: 1,
            ..spec(0.5, 100)
        };
        assert!(s.validate().is_err());
        let s = SyntheticSpec {
            label_weights: [1.0, 0.0, 0.0, 0.0, 0.0],
            ..spec(0.5, 100)
        };
        assert!(generate_synthetic(&s, 0).is_err());
    }

    #[test]
    fn dictionary_parses() {
        use crate::lexicon::{DictFormat, LexiconOptions, MoralLexicon};
        let d = dictionary(8);
        let lex = MoralLexicon::parse(d.as_bytes(), &LexiconOptions::english(DictFormat::Liwc)).unwrap();
        assert_eq!(lex.len(), 48);
    }
}
