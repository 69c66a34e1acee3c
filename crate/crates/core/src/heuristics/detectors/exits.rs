use super::unique_callees;
use crate::heuristics::{matches_any, Context, DetectorId, KeywordConfig, Warning};
use crate::model::{FunctionDef, StatementKind};

/// A function validates its inputs when it has a modifier or any
/// require/assert/if/try statement at any depth.
pub(crate) fn has_check(f: &FunctionDef) -> bool {
    !f.modifiers.is_empty()
        || f.flat_statements().iter().any(|s| {
            matches!(
                s.kind,
                StatementKind::Require | StatementKind::Assert | StatementKind::If | StatementKind::TryCatch
            )
        })
}

pub fn detect_missing_exit_validation(cx: &Context<'_>, cfg: &KeywordConfig) -> Vec<Warning> {
    cx.contract
        .functions
        .iter()
        .filter(|f| f.implemented && matches_any(&f.name, &cfg.exit_names) && !has_check(f))
        .map(|f| {
            let msg = format!("High Risk: Missing Validation Logic in function {}", f.name);
            cx.warning(DetectorId::D2, Some(f), f.line_span.start, msg).with_symbols(unique_callees(f))
        })
        .collect()
}
