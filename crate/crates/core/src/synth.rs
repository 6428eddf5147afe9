//! Seeded synthetic corpora for tests, benchmarks and demos.
//!
//! Documents are drawn from a handful of social-science themes. Each theme
//! has its own vocabulary, descriptors, journals (with skewed
//! productivity) and a community of co-authors, with a little cross-theme
//! noise so association scores and centralities are non-trivial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::BibRecord;
use crate::eval::{Assessment, ResearcherType, Service};

struct Theme {
    words: &'static [&'static str],
    descriptors: &'static [&'static str],
    journals: &'static [&'static str],
}

const THEMES: &[Theme] = &[
    Theme {
        words: &["data", "quality", "measurement", "error", "validity", "reliability"],
        descriptors: &["Data Quality", "Measurement", "Validity", "Reliability", "Data Capture"],
        journals: &["Survey Methods Review", "Journal of Official Statistics", "Methoden Daten Analysen"],
    },
    Theme {
        words: &["survey", "nonresponse", "interviewer", "respondent", "design", "mode"],
        descriptors: &["Nonresponse", "Interviewer", "Survey Research", "Questionnaire", "Data Quality"],
        journals: &["Survey Methods Review", "Public Opinion Quarterly", "Field Methods"],
    },
    Theme {
        words: &["urban", "city", "neighbourhood", "segregation", "housing", "space"],
        descriptors: &["Urban Sociology", "City", "Segregation", "Housing", "Urban Development"],
        journals: &["Urban Studies", "Stadt und Raum", "City and Community"],
    },
    Theme {
        words: &["party", "democracy", "election", "voters", "system", "parliament"],
        descriptors: &["Party System", "Democracy", "Election", "Political Sociology", "Parliament"],
        journals: &["Party Politics", "Politische Vierteljahresschrift", "Electoral Studies"],
    },
    Theme {
        words: &["employment", "atypical", "labour", "work", "contract", "industrial"],
        descriptors: &["Atypical Employment", "Labour Market", "Industrial Sociology", "Work", "Employment Contract"],
        journals: &["Work Employment and Society", "Industrielle Beziehungen", "Labour Review"],
    },
    Theme {
        words: &["europe", "europeanization", "east", "transformation", "integration", "states"],
        descriptors: &["Europeanization", "Eastern Europe", "Transformation", "European Integration", "Social Change"],
        journals: &["Europe-Asia Studies", "Journal of European Integration", "Osteuropa"],
    },
];

const COMMON_WORDS: &[&str] = &["social", "analysis", "study", "germany", "change", "theory", "evidence"];

const SURNAMES: &[&str] = &[
    "Schulte", "Vogel", "Frank", "Jung", "Hahn", "Scholz", "Keller", "Berger", "Weber",
    "Becker", "Fischer", "Wagner", "Hoffmann", "Koch", "Richter", "Klein", "Wolf", "Neumann",
    "Schwarz", "Zimmermann", "Braun", "Krueger", "Hartmann", "Lange", "Werner", "Krause",
    "Meier", "Lehmann", "Schmid", "Schulze", "Maier", "Koehler", "Herrmann", "Walter",
];

const GIVEN_NAMES: &[&str] = &[
    "Uwe", "Lena", "Georg", "Tobias", "Peter", "Miriam", "Daniel", "Thomas", "Anna", "Maria",
    "Julia", "Stefan", "Sabine", "Jan", "Katrin", "Michael",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthParams {
    pub docs: usize,
    pub seed: u64,
    pub authors_per_theme: usize,
}

impl SynthParams {
    pub fn new(docs: usize, seed: u64) -> Self {
        SynthParams {
            docs,
            seed,
            authors_per_theme: 10,
        }
    }
}

/// Index drawn with weights proportional to `1 / (i + 1)`.
fn zipf(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let total: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    let mut x = rng.random::<f64>() * total;
    for i in 0..n {
        x -= 1.0 / (i + 1) as f64;
        if x <= 0.0 {
            return i;
        }
    }
    n - 1
}

fn author_name(theme: usize, member: usize) -> String {
    let i = theme * 7 + member * 3;
    format!(
        "{}, {}",
        SURNAMES[(theme * 5 + member) % SURNAMES.len()],
        GIVEN_NAMES[i % GIVEN_NAMES.len()]
    )
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items[rng.random_range(0..items.len())]
}

/// Generates `params.docs` records with ids `doc0000`, `doc0001`, ...
pub fn generate(params: &SynthParams) -> Vec<BibRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let community = params.authors_per_theme.max(2);
    (0..params.docs)
        .map(|n| {
            let t = rng.random_range(0..THEMES.len());
            let theme = &THEMES[t];

            let title_len = rng.random_range(3..7);
            let title: Vec<&str> = (0..title_len)
                .map(|_| {
                    if rng.random_bool(0.75) {
                        theme.words[zipf(&mut rng, theme.words.len())]
                    } else {
                        pick(&mut rng, COMMON_WORDS)
                    }
                })
                .collect();
            let abstract_len = rng.random_range(0..12);
            let abstract_words: Vec<&str> = (0..abstract_len)
                .map(|_| {
                    if rng.random_bool(0.6) {
                        pick(&mut rng, theme.words)
                    } else if rng.random_bool(0.5) {
                        pick(&mut rng, COMMON_WORDS)
                    } else {
                        let other = rng.random_range(0..THEMES.len());
                        pick(&mut rng, THEMES[other].words)
                    }
                })
                .collect();

            let mut descriptors = Vec::new();
            for _ in 0..rng.random_range(1..4) {
                let d = if rng.random_bool(0.85) {
                    theme.descriptors[zipf(&mut rng, theme.descriptors.len())]
                } else {
                    let other = rng.random_range(0..THEMES.len());
                    pick(&mut rng, THEMES[other].descriptors)
                };
                descriptors.push(d.to_owned());
            }

            let journal = if rng.random_bool(0.1) {
                String::new()
            } else if rng.random_bool(0.9) {
                theme.journals[zipf(&mut rng, theme.journals.len())].to_owned()
            } else {
                format!("Miscellany {}", rng.random_range(0..20))
            };

            let mut authors = Vec::new();
            for _ in 0..rng.random_range(1..4) {
                let (at, member) = if rng.random_bool(0.9) {
                    (t, zipf(&mut rng, community))
                } else {
                    (rng.random_range(0..THEMES.len()), rng.random_range(0..community))
                };
                authors.push(author_name(at, member));
            }

            BibRecord {
                id: format!("doc{n:04}"),
                title: title.join(" "),
                abstract_text: abstract_words.join(" "),
                descriptors,
                authors,
                journal,
                year: rng.random_range(1995..2014),
            }
        })
        .collect()
}

/// Size of a simulated assessment study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyShape {
    /// Researchers per type, in [`ResearcherType::ALL`] order.
    pub researchers: [usize; 3],
    pub topics: usize,
    /// Total assessments per service, in [`Service::ALL`] order.
    pub assessments: [usize; 3],
    /// Probability that an assessed item is relevant.
    pub relevance: f64,
}

impl Default for StudyShape {
    fn default() -> Self {
        StudyShape {
            researchers: [8, 8, 3],
            topics: 23,
            assessments: [95, 111, 107],
            relevance: 0.75,
        }
    }
}

/// Generates assessments matching `shape`.
///
/// Topics go round-robin to researchers, so `topics` must be at least the
/// researcher count. Every topic gets a list from every service; list
/// lengths differ by at most one within a service.
///
/// # Panics
/// If there are fewer topics than researchers, or a service has fewer
/// assessments than topics.
pub fn assessment_study(shape: &StudyShape, seed: u64) -> Vec<Assessment> {
    let researchers: Vec<(String, ResearcherType)> = ResearcherType::ALL
        .iter()
        .zip(shape.researchers)
        .flat_map(|(&t, n)| (0..n).map(move |i| (t, i)))
        .enumerate()
        .map(|(r, (t, _))| (format!("r{:02}", r + 1), t))
        .collect();
    assert!(shape.topics >= researchers.len(), "every researcher needs a topic");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (s, &service) in Service::ALL.iter().enumerate() {
        let total = shape.assessments[s];
        assert!(total >= shape.topics, "every topic needs a non-empty list");
        let base = total / shape.topics;
        let extra = total % shape.topics;
        for topic in 0..shape.topics {
            let (researcher, rtype) = &researchers[topic % researchers.len()];
            let len = base + usize::from(topic < extra);
            for rank in 1..=len {
                out.push(Assessment {
                    topic_id: format!("t{:02}", topic + 1),
                    researcher_id: researcher.clone(),
                    researcher_type: *rtype,
                    service,
                    rank,
                    recommendation: format!("{}-{}-{rank}", service.as_str().to_lowercase(), topic + 1),
                    relevant: rng.random_bool(shape.relevance),
                });
            }
        }
    }
    out
}
