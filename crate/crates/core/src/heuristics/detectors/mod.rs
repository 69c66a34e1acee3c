mod asymmetry;
mod entry;
mod exits;
mod legacy;
mod naming;
mod operations;
mod ordering;
mod state;

pub use asymmetry::{detect_stake_asymmetry, PairKind};
pub use entry::detect_unprotected_entry;
pub use exits::detect_missing_exit_validation;
pub use legacy::detect_legacy_signature_mismatch;
pub use naming::detect_naming_ambiguity;
pub use operations::{detect_complex_calculation, detect_unchecked_low_level};
pub use ordering::detect_price_lag;
pub use state::{detect_external_dependency, detect_supply_hooks};

use crate::model::FunctionDef;

/// Callee texts in call order, each once.
fn unique_callees(f: &FunctionDef) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in &f.calls {
        if !out.contains(&c.callee) {
            out.push(c.callee.clone());
        }
    }
    out
}
