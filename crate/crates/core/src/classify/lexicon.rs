//! Heuristic word-list scorers for sentiment and offensive language. They are
//! offline fallbacks, not trained models, and report themselves as heuristic.

use super::baseline::tokenize;
use super::{require_text, AnalysisTask, Classifier, ClassifyError, LabelSpace, Prediction};

const POSITIVE: &[&str] = &[
    "good", "great", "excellent", "notable", "solid", "reliable", "significant", "useful", "well", "clearly",
    "strong", "detailed", "passes", "meets", "improved", "improvements", "thanks", "agree", "fine", "valuable",
    "important", "interesting", "independent", "thorough", "helpful", "best",
];

const NEGATIVE: &[&str] = &[
    "none", "no", "nothing", "not", "fails", "fail", "failed", "lacks", "lack", "lacking", "poor", "poorly", "bad",
    "junk", "worthless", "unreliable", "promotional", "spam", "hoax", "trivial", "routine", "non-notable",
    "unsourced", "advertising", "problematic", "garbage", "useless", "never", "unable", "cannot", "can't",
    "doesn't", "don't", "insufficient", "delete", "deleted", "worse", "worst", "wrong", "misleading",
];

const NEGATORS: &[&str] = &["not", "no", "never", "hardly", "isn't", "doesn't", "don't", "without"];

const OFFENSIVE: &[&str] = &[
    "idiot", "idiots", "idiotic", "stupid", "moron", "morons", "moronic", "dumb", "crap", "crappy", "shit",
    "bullshit", "damn", "pathetic", "loser", "losers", "clown", "clowns", "hate", "shut", "imbecile", "troll",
    "trolls", "fool", "fools", "ridiculous", "disgusting", "scum", "jerk", "retarded", "fuck", "fucking",
];

/// Counts positive and negative cue words; a negator flips the next
/// positive cue. Scores are `(cue count + 0.1)` for each polarity and `1`
/// for neutral, normalized.
#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    space: LabelSpace,
}

impl Default for SentimentLexicon {
    fn default() -> Self {
        SentimentLexicon { space: LabelSpace::default_for(AnalysisTask::Sentiment) }
    }
}

impl SentimentLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn counts(text: &str) -> (usize, usize) {
        let tokens = tokenize(text);
        let (mut pos, mut neg) = (0, 0);
        let mut negated = false;
        for t in &tokens {
            let t = t.as_str();
            if POSITIVE.contains(&t) {
                if negated {
                    neg += 1;
                } else {
                    pos += 1;
                }
                negated = false;
            } else if NEGATIVE.contains(&t) {
                neg += 1;
                negated = NEGATORS.contains(&t);
            } else if NEGATORS.contains(&t) {
                negated = true;
            }
        }
        (pos, neg)
    }
}

impl Classifier for SentimentLexicon {
    fn label_space(&self) -> &LabelSpace {
        &self.space
    }

    fn predict(&self, _title: Option<&str>, text: &str) -> Result<Prediction, ClassifyError> {
        require_text(text)?;
        let (pos, neg) = Self::counts(text);
        let raw = [pos as f64 + 0.1, neg as f64 + 0.1, 1.0];
        let sum: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|r| r / sum).collect();
        Ok(Prediction::from_distribution(&self.space, &probs))
    }

    fn is_heuristic(&self) -> bool {
        true
    }
}

/// Flags text containing insult or profanity cues.
#[derive(Debug, Clone)]
pub struct OffensiveLexicon {
    space: LabelSpace,
}

impl Default for OffensiveLexicon {
    fn default() -> Self {
        OffensiveLexicon { space: LabelSpace::default_for(AnalysisTask::Offensive) }
    }
}

impl OffensiveLexicon {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Classifier for OffensiveLexicon {
    fn label_space(&self) -> &LabelSpace {
        &self.space
    }

    fn predict(&self, _title: Option<&str>, text: &str) -> Result<Prediction, ClassifyError> {
        require_text(text)?;
        let hits = tokenize(text).iter().filter(|t| OFFENSIVE.contains(&t.as_str())).count() as f64;
        let offensive = (hits + 0.05) / (hits + 0.55);
        Ok(Prediction::from_distribution(&self.space, &[offensive, 1.0 - offensive]))
    }

    fn is_heuristic(&self) -> bool {
        true
    }
}
