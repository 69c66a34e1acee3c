use std::fmt::Write;

use super::AuditReport;
use crate::heuristics::{Severity, Warning};

pub const CLEAN_LINE: &str = "No logical security issues detected.";

fn tag(severity: Severity, color: bool) -> String {
    let label = format!("[{}]", severity.as_str().to_uppercase());
    if !color {
        return label;
    }
    let code = match severity {
        Severity::High => "1;31",
        Severity::Medium => "33",
        Severity::Info => "36",
    };
    format!("\x1b[{code}m{label}\x1b[0m")
}

fn location(w: &Warning) -> String {
    match &w.function {
        Some(f) => format!("{}.{}:{}", w.contract, f, w.line),
        None => format!("{}:{}", w.contract, w.line),
    }
}

/// One block per warning followed by a per-severity footer.
pub fn render_text(report: &AuditReport, color: bool) -> String {
    if report.warnings.is_empty() {
        return format!("{CLEAN_LINE}\n");
    }
    let mut out = String::new();
    for w in &report.warnings {
        let _ = writeln!(out, "{} {} {} \u{2014} {}", tag(w.severity, color), w.detector, location(w), w.message);
        if !w.related_symbols.is_empty() {
            let _ = writeln!(out, "    related: {}", w.related_symbols.join(", "));
        }
        out.push('\n');
    }
    let n = report.warnings.len();
    let _ = writeln!(
        out,
        "{n} warning{}: {} high, {} medium, {} info",
        if n == 1 { "" } else { "s" },
        report.count(Severity::High),
        report.count(Severity::Medium),
        report.count(Severity::Info)
    );
    out
}
