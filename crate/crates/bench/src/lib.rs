//! Shared inputs for the criterion benchmarks.

use mye_core::{fixtures, MyeSeries};

/// Income series with the missing multi-year cells imputed.
pub fn income_filled() -> MyeSeries {
    fixtures::imputed(&fixtures::income())
}
