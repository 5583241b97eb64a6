mod classify;
mod estimates;
mod harness;
mod report;

pub use classify::{classify, root_counts, Reason, RootCounts, Status, TopMatch, Verdict, CONDITIONAL_HYPOTHESIS};
pub use estimates::{
    envelope_entries, estimate_report, quotient_entries, EnvelopeEntry, EstimateReport, PathEstimates, QuotientEntry,
};
pub use harness::{decay_sup, growth_sup, integral_bound_harness, HarnessReport, RatioSup};
pub use report::*;
