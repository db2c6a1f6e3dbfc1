//! Published series for the three bundled counties (imputed cells absent).

use crate::myeseries::MyeSeries;

/// Median household income, Pima County AZ.
pub const INCOME_CSV: &str = include_str!("../data/income.csv");
/// Number of divorced males, Lake County IL.
pub const DIVORCE_CSV: &str = include_str!("../data/divorce.csv");
/// Median age, Hampden County MA.
pub const AGE_CSV: &str = include_str!("../data/age.csv");

/// Cells the bundled series are missing: 3y 2006 and 5y 2006/2007.
pub const IMPUTATION_TARGETS: [(u32, i32); 3] = [(3, 2006), (5, 2006), (5, 2007)];

fn parse(text: &str) -> MyeSeries {
    MyeSeries::from_csv_reader(text.as_bytes()).expect("bundled fixture parses")
}

pub fn income() -> MyeSeries {
    parse(INCOME_CSV)
}

pub fn divorce() -> MyeSeries {
    parse(DIVORCE_CSV)
}

pub fn age() -> MyeSeries {
    parse(AGE_CSV)
}

/// `(label, series)` for all three bundled variables.
pub fn all() -> [(&'static str, MyeSeries); 3] {
    [("Income", income()), ("Divorce", divorce()), ("Age", age())]
}

/// All three series with the missing cells filled by random-walk imputation.
pub fn imputed(series: &MyeSeries) -> MyeSeries {
    series
        .impute_random_walk(&IMPUTATION_TARGETS)
        .expect("bundled fixtures have anchors for every target")
}
