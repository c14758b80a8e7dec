//! Keystroke-savings metrics and the ideal-user simulator.
//!
//! Two savings figures are reported side by side:
//!
//! - [`reduction_percent`]: keystrokes reduced divided by the keystrokes
//!   actually used with prediction (the aided count). This is the figure
//!   printed in the classic practice-drill tables.
//! - [`standard_savings_percent`]: keystrokes reduced divided by the
//!   unaided count, the conventional keystroke-savings rate.
//!
//! The simulator types a message through a real [`Session`] with a greedy
//! policy: after each typed character it looks for the target word on the
//! visible page and up to `max_page_flips` further pages, and takes it only
//! if doing so costs fewer keys than typing the rest of the word.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroUsize;

use crate::lexicon::Word;
use crate::predictor::{Engine, EngineConfig};
use crate::session::{Counters, FlipDirection, Separator, Session};

#[derive(Debug, Clone, PartialEq)]
pub enum MetricError {
    /// A count that must be strictly positive was not.
    NonPositive { what: &'static str, value: f64 },
    /// A count that must be non-negative was negative or not a number.
    Negative { what: &'static str, value: f64 },
    /// Improvement is undefined without baseline errors.
    ZeroBaselineErrors,
    ProbabilityOutOfRange(f64),
    EmptyMessage,
    InvalidMessageWord(String),
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::NonPositive { what, value } => write!(f, "{what} must be positive, got {value}"),
            MetricError::Negative { what, value } => write!(f, "{what} must be non-negative, got {value}"),
            MetricError::ZeroBaselineErrors => f.write_str("pre-test error count must be positive"),
            MetricError::ProbabilityOutOfRange(p) => write!(f, "probability {p} outside [0, 1]"),
            MetricError::EmptyMessage => f.write_str("message has no words"),
            MetricError::InvalidMessageWord(w) => write!(f, "invalid word in message: {w:?}"),
        }
    }
}

impl core::error::Error for MetricError {}

fn positive(what: &'static str, value: f64) -> Result<f64, MetricError> {
    // NaN fails this comparison too
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MetricError::NonPositive { what, value })
    }
}

fn non_negative(what: &'static str, value: f64) -> Result<f64, MetricError> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MetricError::Negative { what, value })
    }
}

/// `100 * reduced / used`, where `used` is the aided keystroke count.
pub fn reduction_percent(used: f64, reduced: f64) -> Result<f64, MetricError> {
    let used = positive("keystrokes used", used)?;
    let reduced = non_negative("keystrokes reduced", reduced)?;
    Ok(100.0 * reduced / used)
}

/// `100 * (unaided - aided) / unaided`.
pub fn standard_savings_percent(unaided: f64, aided: f64) -> Result<f64, MetricError> {
    let unaided = positive("unaided keystrokes", unaided)?;
    let aided = non_negative("aided keystrokes", aided)?;
    Ok(100.0 * (unaided - aided) / unaided)
}

/// `100 * (pre - post) / pre`; negative when errors went up.
pub fn improvement_percent(pre_errors: u64, post_errors: u64) -> Result<f64, MetricError> {
    if pre_errors == 0 {
        return Err(MetricError::ZeroBaselineErrors);
    }
    let pre = pre_errors as f64;
    Ok(100.0 * (pre - post_errors as f64) / pre)
}

// Repeated multiplication keeps the result monotone in n (each factor is at
// most 1); squaring takes over only for subject counts no study reaches.
fn pow_unit(base: f64, n: u32) -> f64 {
    const LINEAR_LIMIT: u32 = 1 << 16;
    if n <= LINEAR_LIMIT {
        let mut acc = 1.0;
        for _ in 0..n {
            if acc == 0.0 || base == 1.0 {
                break;
            }
            acc *= base;
        }
        acc
    } else {
        let (mut acc, mut b, mut e) = (1.0, base, n);
        while e > 0 {
            if e & 1 == 1 {
                acc *= b;
            }
            b *= b;
            e >>= 1;
        }
        acc
    }
}

/// Share of usability problems found by `n` evaluators who each find a
/// given problem with probability `p`: `1 - (1 - p)^n`.
pub fn problem_discovery(p: f64, n: u32) -> Result<f64, MetricError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MetricError::ProbabilityOutOfRange(p));
    }
    Ok(1.0 - pow_unit(1.0 - p, n))
}

/// Unaided vs aided keystrokes for one typed message.
#[derive(Debug, Clone, PartialEq)]
pub struct SavingsReport {
    /// One key per character plus one per separator.
    pub unaided_keystrokes: u64,
    /// Typed keys plus selection and paging keys.
    pub aided_keystrokes: u64,
    pub keystrokes_reduced: i64,
    pub reduction_pct_paper: f64,
    pub savings_pct_standard: f64,
    pub counters: Counters,
}

impl SavingsReport {
    pub fn new(unaided_keystrokes: u64, counters: Counters) -> Result<Self, MetricError> {
        let aided = counters.aided_keystrokes();
        let reduced = unaided_keystrokes as i64 - aided as i64;
        let savings_pct_standard = standard_savings_percent(unaided_keystrokes as f64, aided as f64)?;
        // same formula as reduction_percent, but keeps the sign of a loss
        let used = positive("keystrokes used", aided as f64)?;
        Ok(SavingsReport {
            unaided_keystrokes,
            aided_keystrokes: aided,
            keystrokes_reduced: reduced,
            reduction_pct_paper: 100.0 * reduced as f64 / used,
            savings_pct_standard,
            counters,
        })
    }
}

/// Per-message means over a batch; percentages are taken of the means.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSavings {
    pub messages: usize,
    pub unaided_keystrokes: f64,
    pub aided_keystrokes: f64,
    pub keystrokes_reduced: f64,
    pub reduction_pct_paper: f64,
    pub savings_pct_standard: f64,
}

impl MeanSavings {
    pub fn of(reports: &[SavingsReport]) -> Option<Self> {
        if reports.is_empty() {
            return None;
        }
        let n = reports.len() as f64;
        let unaided = reports.iter().map(|r| r.unaided_keystrokes as f64).sum::<f64>() / n;
        let aided = reports.iter().map(|r| r.aided_keystrokes as f64).sum::<f64>() / n;
        let reduced = unaided - aided;
        Some(MeanSavings {
            messages: reports.len(),
            unaided_keystrokes: unaided,
            aided_keystrokes: aided,
            keystrokes_reduced: reduced,
            reduction_pct_paper: 100.0 * reduced / aided,
            savings_pct_standard: 100.0 * reduced / unaided,
        })
    }
}

pub const DEFAULT_MAX_PAGE_FLIPS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub page_size: NonZeroUsize,
    /// Further pages the simulated user is willing to look through.
    pub max_page_flips: usize,
    /// Whether selections reinforce the engine's profile.
    pub adaptive: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            page_size: EngineConfig::default().page_size,
            max_page_flips: DEFAULT_MAX_PAGE_FLIPS,
            adaptive: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub report: SavingsReport,
    pub committed_text: String,
}

/// Unaided cost of a message: every character plus the separators between
/// words.
pub fn unaided_keystrokes(message: &[Word]) -> u64 {
    let chars: usize = message.iter().map(Word::char_len).sum();
    (chars + message.len().saturating_sub(1)) as u64
}

/// Validate and NFC-normalize a message.
pub fn parse_message<S: AsRef<str>>(words: &[S]) -> Result<Vec<Word>, MetricError> {
    if words.is_empty() {
        return Err(MetricError::EmptyMessage);
    }
    words
        .iter()
        .map(|w| Word::new(w.as_ref()).map_err(|_| MetricError::InvalidMessageWord(String::from(w.as_ref()))))
        .collect()
}

/// Type `message` through a fresh session on `engine` with the greedy
/// ideal-user policy.
///
/// The engine's configuration is swapped for the run's page size and
/// adaptivity and restored afterwards. With `adaptive`, selections stay
/// reinforced in the engine's profile.
pub fn simulate_ideal_user<S: AsRef<str>>(
    message: &[S],
    engine: &mut Engine,
    config: SimulationConfig,
) -> Result<SimulationRun, MetricError> {
    let words = parse_message(message)?;
    let saved_config = *engine.config();
    engine.set_config(EngineConfig { page_size: config.page_size, adaptive: config.adaptive, ..saved_config });
    let run = run_greedy(&words, engine, config.max_page_flips);
    engine.set_config(saved_config);
    let (counters, committed_text) = run;
    let report = SavingsReport::new(unaided_keystrokes(&words), counters)?;
    Ok(SimulationRun { report, committed_text })
}

/// Page (within `max_flips` flips) and slot where `word` shows up for the
/// session's current prefix.
fn locate(session: &Session, engine: &Engine, word: &str, max_flips: usize) -> Option<(usize, usize)> {
    let visible = session.current_page();
    if let Some(slot) = visible.position(word) {
        return Some((0, slot));
    }
    (1..=max_flips)
        .map_while(|flips| {
            engine
                .complete(session.pending_prefix(), visible.page_index + flips)
                .ok()
                .map(|page| (flips, page))
        })
        .find_map(|(flips, page)| page.position(word).map(|slot| (flips, slot)))
}

fn run_greedy(words: &[Word], engine: &mut Engine, max_flips: usize) -> (Counters, String) {
    let mut session = Session::new(engine);
    for (i, word) in words.iter().enumerate() {
        if i > 0 {
            session.key_separator(engine, Separator::Space);
        }
        let len = word.char_len();
        for (typed, c) in word.as_str().chars().enumerate() {
            session.key_char(engine, c).expect("words hold no whitespace or control characters");
            let remaining = len - (typed + 1);
            if remaining <= 1 {
                continue;
            }
            if let Some((flips, slot)) = locate(&session, engine, word.as_str(), max_flips) {
                // flips + 1 keys to take it, `remaining` keys to type it
                if remaining > flips + 1 {
                    for _ in 0..flips {
                        session.flip_page(engine, FlipDirection::Next).expect("located page exists");
                    }
                    session.select(engine, slot).expect("located slot exists");
                    break;
                }
            }
        }
    }
    session.finish(engine);
    (session.counters(), session.committed_text().into())
}

/// One practice session over a batch of messages.
#[derive(Debug, Clone, PartialEq)]
pub struct PracticeSession {
    /// 1-based.
    pub session: usize,
    pub reports: Vec<SavingsReport>,
    pub mean: MeanSavings,
}

/// Simulate `sessions` consecutive passes over `messages` on one engine, so
/// that with `adaptive` each pass benefits from the selections of earlier
/// ones.
pub fn simulate_practice<S: AsRef<str>>(
    messages: &[Vec<S>],
    engine: &mut Engine,
    config: SimulationConfig,
    sessions: usize,
) -> Result<Vec<PracticeSession>, MetricError> {
    if messages.is_empty() {
        return Err(MetricError::EmptyMessage);
    }
    let mut out = Vec::with_capacity(sessions);
    for session in 1..=sessions {
        let reports = messages
            .iter()
            .map(|m| simulate_ideal_user(m, engine, config).map(|run| run.report))
            .collect::<Result<Vec<_>, _>>()?;
        let mean = MeanSavings::of(&reports).expect("nonempty batch");
        out.push(PracticeSession { session, reports, mean });
    }
    Ok(out)
}
