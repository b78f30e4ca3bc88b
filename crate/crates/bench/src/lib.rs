//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use capelli_core::{instantiate, APresentation, CaseInstance};

pub fn instance(case_id: u32, size: u32) -> CaseInstance {
    instantiate(case_id, size).expect("valid catalog entry")
}

pub fn presentation(case_id: u32, size: u32) -> Arc<APresentation> {
    Arc::new(APresentation::for_instance(&instance(case_id, size)).expect("catalog b-function"))
}
