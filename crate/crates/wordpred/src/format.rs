//! Text and JSON renderings shared by the CLI.

use std::fmt::Write;

use serde::Serialize;
use wordpred_core::evaluator::{MeanSavings, PracticeSession, SavingsReport};
use wordpred_core::CandidatePage;

/// `value` with `decimals` digits, truncated toward zero (`49.3150` prints
/// as `49.31`). Percentages are printed this way. A tiny nudge keeps binary
/// representation error from dropping a digit (`0.29` stays `0.29`).
pub fn truncated(value: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let scaled = value * scale;
    let nudged = scaled + scaled.signum() * 1e-9 * scaled.abs().max(1.0);
    let cut = nudged.trunc() / scale;
    let cut = if cut == 0.0 { 0.0 } else { cut };
    format!("{cut:.decimals$}")
}

/// `value` rounded half away from zero to `decimals` digits. Probabilities
/// are printed this way.
pub fn rounded(value: f64, decimals: usize) -> String {
    format!("{value:.decimals$}")
}

#[derive(Debug, Serialize)]
pub struct CandidateRow<'a> {
    pub rank: usize,
    pub word: &'a str,
    pub score: u64,
}

#[derive(Debug, Serialize)]
struct PageJson<'a> {
    kind: &'static str,
    page_index: usize,
    total_pages: usize,
    total_candidates: usize,
    candidates: Vec<CandidateRow<'a>>,
}

fn rows(page: &CandidatePage) -> Vec<CandidateRow<'_>> {
    let offset = page.page_index * page.page_size.get();
    page.items
        .iter()
        .enumerate()
        .map(|(i, c)| CandidateRow { rank: offset + i + 1, word: &c.word, score: c.score })
        .collect()
}

pub fn kind_name(kind: wordpred_core::CandidateKind) -> &'static str {
    match kind {
        wordpred_core::CandidateKind::Completion => "completion",
        wordpred_core::CandidateKind::Prediction => "prediction",
    }
}

/// One `rank<TAB>word<TAB>score` line per candidate; ranks are global.
pub fn page_text(page: &CandidatePage) -> String {
    let mut out = String::new();
    for row in rows(page) {
        let _ = writeln!(out, "{}\t{}\t{}", row.rank, row.word, row.score);
    }
    out
}

pub fn page_json(page: &CandidatePage) -> String {
    let json = PageJson {
        kind: kind_name(page.kind),
        page_index: page.page_index,
        total_pages: page.total_pages,
        total_candidates: page.total_candidates,
        candidates: rows(page),
    };
    let mut s = serde_json::to_string(&json).expect("serializable");
    s.push('\n');
    s
}

pub const REPORT_HEADER: &str =
    "session\tmessage\tunaided\taided\treduced\treduction_pct_paper\tsavings_pct_standard";

fn report_line(out: &mut String, session: usize, message: usize, r: &SavingsReport) {
    let _ = writeln!(
        out,
        "{session}\t{message}\t{}\t{}\t{}\t{}\t{}",
        r.unaided_keystrokes,
        r.aided_keystrokes,
        r.keystrokes_reduced,
        truncated(r.reduction_pct_paper, 2),
        truncated(r.savings_pct_standard, 2),
    );
}

fn mean_line(out: &mut String, session: usize, m: &MeanSavings) {
    let _ = writeln!(
        out,
        "{session}\tmean\t{}\t{}\t{}\t{}\t{}",
        truncated(m.unaided_keystrokes, 2),
        truncated(m.aided_keystrokes, 2),
        truncated(m.keystrokes_reduced, 2),
        truncated(m.reduction_pct_paper, 2),
        truncated(m.savings_pct_standard, 2),
    );
}

/// Tab-separated table: a header, one row per message, then a mean row, for
/// each practice session.
pub fn practice_text(sessions: &[PracticeSession]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for s in sessions {
        for (i, r) in s.reports.iter().enumerate() {
            report_line(&mut out, s.session, i + 1, r);
        }
        mean_line(&mut out, s.session, &s.mean);
    }
    out
}

#[derive(Debug, Serialize)]
struct ReportRecord {
    session: usize,
    row: &'static str,
    message: Option<usize>,
    messages: Option<usize>,
    unaided: f64,
    aided: f64,
    reduced: f64,
    reduction_pct_paper: f64,
    savings_pct_standard: f64,
    keys_typed: Option<u64>,
    selection_keys: Option<u64>,
    paging_keys: Option<u64>,
    chars_saved: Option<u64>,
}

/// JSON lines: one record per message and one mean record per session.
pub fn practice_json(sessions: &[PracticeSession]) -> String {
    let mut out = String::new();
    let mut push = |rec: ReportRecord| {
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    };
    for s in sessions {
        for (i, r) in s.reports.iter().enumerate() {
            push(ReportRecord {
                session: s.session,
                row: "message",
                message: Some(i + 1),
                messages: None,
                unaided: r.unaided_keystrokes as f64,
                aided: r.aided_keystrokes as f64,
                reduced: r.keystrokes_reduced as f64,
                reduction_pct_paper: r.reduction_pct_paper,
                savings_pct_standard: r.savings_pct_standard,
                keys_typed: Some(r.counters.keys_typed),
                selection_keys: Some(r.counters.selection_keys),
                paging_keys: Some(r.counters.paging_keys),
                chars_saved: Some(r.counters.chars_saved),
            });
        }
        let m = &s.mean;
        push(ReportRecord {
            session: s.session,
            row: "mean",
            message: None,
            messages: Some(m.messages),
            unaided: m.unaided_keystrokes,
            aided: m.aided_keystrokes,
            reduced: m.keystrokes_reduced,
            reduction_pct_paper: m.reduction_pct_paper,
            savings_pct_standard: m.savings_pct_standard,
            keys_typed: None,
            selection_keys: None,
            paging_keys: None,
            chars_saved: None,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_and_rounding() {
        assert_eq!(truncated(100.0 * 108.0 / 219.0, 2), "49.31");
        assert_eq!(truncated(100.0, 2), "100.00");
        assert_eq!(truncated(0.0, 2), "0.00");
        assert_eq!(truncated(0.29, 2), "0.29");
        assert_eq!(truncated(1.0 - 0.69f64.powi(5), 4), "0.8435");
        assert_eq!(rounded(1.0 - 0.69f64.powi(5), 4), "0.8436");
        assert_eq!(truncated(1000.0 / 11.0, 2), "90.90");
        assert_eq!(truncated(-12.345, 2), "-12.34");
        assert_eq!(truncated(-0.001, 2), "0.00");
        assert_eq!(truncated(450.0, 2), "450.00");
    }
}
