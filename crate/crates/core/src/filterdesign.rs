//! Minimal-length concurrent filters that pass degree-`d` polynomials and
//! make every period's smoothed trend coincide.
//!
//! For a period set `K` let `Θ(z)` be the product of the SMA polynomials of
//! all periods greater than one. The filters are `Ψ^(k) = Φ · Π_{m≠k} Θ^(m)`,
//! so `Ψ^(k) Θ^(k) = Φ Θ` for every `k`. `Φ` has degree `d`; its coefficients
//! solve `M φ = e₁` where `M[j][i] = ∂^j [z^i Θ(z)] at z = 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratpoly::{Rational, RationalPoly};

/// Degrees above this only produce a warning; lengths grow linearly with `d`.
pub const SOFT_MAX_DEGREE: usize = 10;

/// Period lengths and local polynomial degree of a filter family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DesignSpec {
    periods: Vec<u32>,
    degree: usize,
}

impl DesignSpec {
    /// Periods are sorted; zero, duplicate or empty period lists are rejected.
    pub fn new(periods: impl IntoIterator<Item = u32>, degree: usize) -> Result<Self> {
        let mut periods: Vec<u32> = periods.into_iter().collect();
        if periods.is_empty() {
            return Err(Error::InvalidDesign("period set is empty".into()));
        }
        if periods.contains(&0) {
            return Err(Error::InvalidDesign(
                "period lengths must be at least 1".into(),
            ));
        }
        periods.sort_unstable();
        if periods.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDesign(
                "period lengths must be distinct".into(),
            ));
        }
        Ok(DesignSpec { periods, degree })
    }

    pub fn periods(&self) -> &[u32] {
        &self.periods
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn contains(&self, k: u32) -> bool {
        self.periods.binary_search(&k).is_ok()
    }

    /// Product of the SMA polynomials of every period in the set, excluding `skip`.
    fn sma_product_except(&self, skip: Option<u32>) -> RationalPoly {
        self.periods
            .iter()
            .filter(|&&k| k > 1 && Some(k) != skip)
            .fold(RationalPoly::one(), |acc, &k| {
                acc.mul(&RationalPoly::sma(k).expect("periods are validated nonzero"))
            })
    }

    /// `Θ(z)`, the product of all SMA polynomials in the set.
    pub fn theta(&self) -> RationalPoly {
        self.sma_product_except(None)
    }
}

impl fmt::Display for DesignSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.periods.iter().map(u32::to_string).collect();
        write!(f, "periods {{{}}}, degree {}", ps.join(","), self.degree)
    }
}

/// Square matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidDesign("matrix must be square".into()));
        }
        Ok(RationalMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.dim.max(1)).take(self.dim)
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// `M[j][i] = ∂^j [z^i Θ(z)]|_{z=1}` for `0 ≤ i, j ≤ d`.
pub fn constraint_matrix(spec: &DesignSpec) -> RationalMatrix {
    let theta = spec.theta();
    let n = spec.degree + 1;
    let shifted: Vec<RationalPoly> = (0..n).map(|i| theta.shift_mul(i)).collect();
    let rows = (0..n)
        .map(|j| shifted.iter().map(|p| p.derivative_at_one(j)).collect())
        .collect();
    RationalMatrix::from_rows(rows).expect("constructed square")
}

/// Solves `M x = e₁` exactly; `None` when `M` is singular.
#[allow(clippy::needless_range_loop)] // row operations index two rows at once
fn solve_first_unit(matrix: &RationalMatrix) -> Option<Vec<Rational>> {
    let n = matrix.dim();
    let mut a: Vec<Vec<Rational>> = matrix.rows().map(<[Rational]>::to_vec).collect();
    let mut b: Vec<Rational> = (0..n)
        .map(|i| {
            if i == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &delta;
            }
            let delta = &factor * &b[col];
            b[r] = &b[r] - &delta;
        }
    }

    let mut x = vec![Rational::zero(); n];
    for r in (0..n).rev() {
        let tail: Rational = ((r + 1)..n).map(|c| &a[r][c] * &x[c]).sum();
        x[r] = (&b[r] - &tail) / &a[r][r];
    }
    Some(x)
}

/// `Φ` whose coefficients are the first column of `M⁻¹`.
pub fn solve_phi(matrix: &RationalMatrix) -> Result<RationalPoly> {
    solve_first_unit(matrix)
        .map(RationalPoly::new)
        .ok_or_else(|| Error::DesignInfeasible {
            spec: format!("{n}x{n} constraint matrix", n = matrix.dim()),
        })
}

/// A family of compatible concurrent filters, one per period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterSet {
    spec: DesignSpec,
    phi: RationalPoly,
    psi: BTreeMap<u32, RationalPoly>,
    common: RationalPoly,
}

impl FilterSet {
    /// Assembles a filter set without checking it; see [`verify_filter_set`].
    pub fn from_parts(
        spec: DesignSpec,
        phi: RationalPoly,
        psi: BTreeMap<u32, RationalPoly>,
        common: RationalPoly,
    ) -> Self {
        FilterSet {
            spec,
            phi,
            psi,
            common,
        }
    }

    pub fn spec(&self) -> &DesignSpec {
        &self.spec
    }

    pub fn phi(&self) -> &RationalPoly {
        &self.phi
    }

    /// Filter for period `k`, if `k` is part of the design.
    pub fn psi(&self, k: u32) -> Option<&RationalPoly> {
        self.psi.get(&k)
    }

    pub fn filters(&self) -> &BTreeMap<u32, RationalPoly> {
        &self.psi
    }

    /// `Ψ^(k)(z) Θ^(k)(z)`, identical for every period.
    pub fn common(&self) -> &RationalPoly {
        &self.common
    }

    pub fn to_doc(&self) -> FilterSetDoc {
        let strings = |p: &RationalPoly| {
            p.coefficients()
                .iter()
                .map(Rational::to_fraction_string)
                .collect()
        };
        FilterSetDoc {
            periods: self.spec.periods.clone(),
            degree: self.spec.degree,
            phi: strings(&self.phi),
            filters: self.psi.iter().map(|(k, p)| (*k, strings(p))).collect(),
            common: strings(&self.common),
        }
    }

    pub fn from_doc(doc: &FilterSetDoc) -> Result<Self> {
        let parse = |v: &[String]| -> Result<RationalPoly> {
            v.iter()
                .map(|s| s.parse::<Rational>())
                .collect::<Result<Vec<_>>>()
                .map(RationalPoly::new)
        };
        let spec = DesignSpec::new(doc.periods.iter().copied(), doc.degree)?;
        let psi = doc
            .filters
            .iter()
            .map(|(k, v)| Ok((*k, parse(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(FilterSet::from_parts(
            spec,
            parse(&doc.phi)?,
            psi,
            parse(&doc.common)?,
        ))
    }
}

/// Serialized filter set: every coefficient as an exact `"numerator/denominator"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSetDoc {
    pub periods: Vec<u32>,
    pub degree: usize,
    pub phi: Vec<String>,
    pub filters: BTreeMap<u32, Vec<String>>,
    pub common: Vec<String>,
}

pub fn design_filters(spec: &DesignSpec) -> Result<FilterSet> {
    if spec.degree > SOFT_MAX_DEGREE {
        log::warn!(
            "degree {} exceeds {SOFT_MAX_DEGREE}; filters will be long and noisy",
            spec.degree
        );
    }
    let phi = solve_phi(&constraint_matrix(spec)).map_err(|e| match e {
        Error::DesignInfeasible { .. } => Error::DesignInfeasible {
            spec: spec.to_string(),
        },
        other => other,
    })?;
    let psi: BTreeMap<u32, RationalPoly> = spec
        .periods
        .iter()
        .map(|&k| (k, phi.mul(&spec.sma_product_except(Some(k)))))
        .collect();
    let common = phi.mul(&spec.theta());
    Ok(FilterSet {
        spec: spec.clone(),
        phi,
        psi,
        common,
    })
}

/// One named check with its exact residual rendered as text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: String, passed: bool, residual: String) {
        self.checks.push(Check {
            name,
            passed,
            residual,
        });
    }
}

/// Checks normalization, vanishing derivatives, the compatibility identity
/// and the degree of `Φ`, all in exact arithmetic.
pub fn verify_filter_set(fs: &FilterSet) -> VerificationReport {
    let mut report = VerificationReport::default();
    let spec = &fs.spec;

    let norm = fs.common.eval(&Rational::one()) - Rational::one();
    report.push(
        "normalization common(1) = 1".into(),
        norm.is_zero(),
        norm.to_string(),
    );

    for j in 1..=spec.degree {
        let d = fs.common.derivative_at_one(j);
        report.push(
            format!("derivative {j} at z=1 vanishes"),
            d.is_zero(),
            d.to_string(),
        );
    }

    for &k in &spec.periods {
        let name = format!("compatibility psi({k})*theta({k}) = common");
        match fs.psi.get(&k) {
            Some(psi) => {
                let theta_k = RationalPoly::sma(k).expect("validated period");
                let residual = &psi.mul(&theta_k) - &fs.common;
                report.push(name, residual.is_zero(), residual.render());
            }
            None => report.push(name, false, "filter missing".into()),
        }
    }
    for &k in fs.psi.keys().filter(|k| !spec.contains(**k)) {
        report.push(
            format!("filter for period {k} belongs to the design"),
            false,
            "unexpected filter".into(),
        );
    }

    // Φ has d+1 free coefficients fixed by a nonsingular system; its top
    // coefficient may vanish (Θ = 1, or {3} and {1,3} at d = 5), so minimality
    // means deg Φ ≤ d and Φ solving M·φ = e₁ exactly.
    let d = spec.degree as isize;
    let excess = (fs.phi.degree() - d).max(0);
    report.push(
        format!("degree(phi) <= {d}"),
        excess == 0,
        excess.to_string(),
    );
    let m = constraint_matrix(spec);
    let n = m.dim();
    let residual: Vec<Rational> = (0..n)
        .map(|r| {
            let row: Rational = (0..n).map(|c| m.get(r, c) * &fs.phi.coeff(c)).sum();
            if r == 0 {
                row - Rational::one()
            } else {
                row
            }
        })
        .collect();
    let unique = solve_first_unit(&m).is_some();
    let solved = residual.iter().all(Rational::is_zero);
    report.push(
        "phi is the unique solution of M phi = e1".into(),
        unique && solved,
        if !unique {
            "singular constraint matrix".into()
        } else if solved {
            "0".into()
        } else {
            format!(
                "[{}]",
                residual
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        },
    );
    report
}

/// Sum of squared coefficients: the variance factor under i.i.d. input noise.
pub fn variance_inflation(filter: &RationalPoly) -> Rational {
    filter.sum_of_squares()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(periods: &[u32], d: usize) -> DesignSpec {
        DesignSpec::new(periods.iter().copied(), d).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// Independent oracle for matrix entries: expand `z^i Θ(z)` numerically
    /// from the integer numerators (1,2,3,3,3,2,1)/15 and differentiate term by term.
    fn oracle_entry(j: usize, i: usize) -> Rational {
        let nums = [1i64, 2, 3, 3, 3, 2, 1];
        let mut acc = Rational::zero();
        for (p, &c) in nums.iter().enumerate() {
            let power = p + i;
            if power < j {
                continue;
            }
            let falling: i64 = ((power - j + 1)..=power).map(|x| x as i64).product();
            acc = acc + Rational::new(c * falling, 15);
        }
        acc
    }

    #[test]
    fn constraint_matrix_matches_term_oracle() {
        for d in 0..=4 {
            let m = constraint_matrix(&spec(&[1, 3, 5], d));
            assert_eq!(m.dim(), d + 1);
            for j in 0..=d {
                for i in 0..=d {
                    assert_eq!(m.get(j, i), &oracle_entry(j, i), "entry ({j},{i}) d={d}");
                }
            }
        }
    }

    #[test]
    fn constraint_matrix_small_cases() {
        let m0 = constraint_matrix(&spec(&[1, 3, 5], 0));
        assert_eq!(format!("{m0:?}"), "[[1]]");
        let m1 = constraint_matrix(&spec(&[1, 3, 5], 1));
        assert_eq!(format!("{m1:?}"), "[[1, 1], [3, 4]]");
        let m2 = constraint_matrix(&spec(&[1, 3, 5], 2));
        let first_col: Vec<_> = (0..3).map(|j| m2.get(j, 0).clone()).collect();
        assert_eq!(first_col, vec![r(1, 1), r(3, 1), r(26, 3)]);
    }

    #[test]
    fn solve_phi_low_degrees() {
        let m0 = constraint_matrix(&spec(&[1, 3, 5], 0));
        assert_eq!(solve_phi(&m0).unwrap(), RationalPoly::one());
        let m1 = constraint_matrix(&spec(&[1, 3, 5], 1));
        assert_eq!(
            solve_phi(&m1).unwrap(),
            RationalPoly::from_integers(&[4, -3], 1)
        );
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = RationalMatrix::from_rows(vec![vec![r(1, 1), r(2, 1)], vec![r(2, 1), r(4, 1)]])
            .unwrap();
        assert!(matches!(solve_phi(&m), Err(Error::DesignInfeasible { .. })));
        let zero_first =
            RationalMatrix::from_rows(vec![vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]])
                .unwrap();
        // first-nonzero pivoting must swap rows here
        assert_eq!(
            solve_phi(&zero_first).unwrap(),
            RationalPoly::new(vec![r(-1, 1), r(1, 1)])
        );
    }

    #[test]
    fn linear_filters_exact() {
        let fs = design_filters(&spec(&[1, 3, 5], 1)).unwrap();
        assert_eq!(
            fs.psi(5).unwrap(),
            &RationalPoly::from_integers(&[4, 1, 1, -3], 3)
        );
        assert_eq!(
            fs.psi(3).unwrap(),
            &RationalPoly::from_integers(&[4, 1, 1, 1, 1, -3], 5)
        );
        assert_eq!(
            fs.psi(1).unwrap(),
            &RationalPoly::from_integers(&[4, 5, 6, 3, 3, -1, -2, -3], 15)
        );
        assert_eq!(fs.psi(1), Some(fs.common()));
    }

    #[test]
    fn quadratic_filters_exact() {
        let fs = design_filters(&spec(&[1, 3, 5], 2)).unwrap();
        assert_eq!(
            fs.psi(5).unwrap(),
            &RationalPoly::from_integers(&[26, -11, 3, -23, 14], 9)
        );
        assert_eq!(
            fs.psi(3).unwrap(),
            &RationalPoly::from_integers(&[26, -11, 3, 3, 3, -23, 14], 15)
        );
        assert_eq!(
            fs.psi(1).unwrap(),
            &RationalPoly::from_integers(&[26, 15, 18, -5, 9, -17, -6, -9, 14], 45)
        );
    }

    #[test]
    fn constant_design_is_plain_averaging() {
        let fs = design_filters(&spec(&[1, 3, 5], 0)).unwrap();
        let t3 = RationalPoly::sma(3).unwrap();
        let t5 = RationalPoly::sma(5).unwrap();
        assert_eq!(fs.phi(), &RationalPoly::one());
        assert_eq!(fs.psi(5).unwrap(), &t3);
        assert_eq!(fs.psi(3).unwrap(), &t5);
        assert_eq!(fs.psi(1).unwrap(), &t3.mul(&t5));
    }

    #[test]
    fn verifier_passes_and_catches_corruption() {
        for (periods, d) in [
            (&[1u32, 3, 5][..], 1),
            (&[1, 3][..], 2),
            (&[1, 3, 5][..], 3),
        ] {
            let fs = design_filters(&spec(periods, d)).unwrap();
            let report = verify_filter_set(&fs);
            assert!(report.passed(), "{periods:?} d={d}: {report:?}");
            assert!(report.checks.iter().all(|c| c.residual == "0"));
        }

        let fs = design_filters(&spec(&[1, 3, 5], 1)).unwrap();
        let mut psi = fs.filters().clone();
        let bad = psi.get(&3).unwrap();
        let mut coeffs = bad.coefficients().to_vec();
        coeffs[2] = &coeffs[2] + &r(1, 100);
        psi.insert(3, RationalPoly::new(coeffs));
        let corrupted = FilterSet::from_parts(
            fs.spec().clone(),
            fs.phi().clone(),
            psi,
            fs.common().clone(),
        );
        let report = verify_filter_set(&corrupted);
        let failed: Vec<_> = report.failures().collect();
        assert_eq!(failed.len(), 1);
        assert!(failed[0].name.contains("psi(3)"));
        // (z^2 + z^3 + z^4)/300 is the perturbation smoothed by theta(3)
        assert_eq!(failed[0].residual, "(z^2 + z^3 + z^4)/300");
    }

    #[test]
    fn verifier_rejects_non_minimal_phi() {
        let fs = design_filters(&spec(&[1, 3, 5], 1)).unwrap();
        // Φ + (z-1)^2 still passes lines but is longer than needed
        let bump = RationalPoly::from_integers(&[1, -2, 1], 1);
        let phi = fs.phi() + &bump;
        let s = fs.spec().clone();
        let psi = s
            .periods()
            .iter()
            .map(|&k| (k, phi.mul(&s.sma_product_except(Some(k)))))
            .collect();
        let common = phi.mul(&s.theta());
        let bad = FilterSet::from_parts(s, phi, psi, common);
        let report = verify_filter_set(&bad);
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "degree(phi) <= 1",
                "phi is the unique solution of M phi = e1"
            ]
        );
    }

    #[test]
    fn degenerate_period_sets() {
        let fs = design_filters(&spec(&[1], 0)).unwrap();
        assert_eq!(fs.psi(1).unwrap(), &RationalPoly::one());
        let fs = design_filters(&spec(&[1], 3)).unwrap();
        assert_eq!(fs.psi(1).unwrap(), &RationalPoly::one());
        assert!(verify_filter_set(&fs).passed());

        let fs = design_filters(&spec(&[3], 1)).unwrap();
        assert_eq!(fs.phi(), &RationalPoly::from_integers(&[2, -1], 1));
        assert!(verify_filter_set(&fs).passed());

        // top coefficient of Φ vanishes: the d = 5 solution is the d = 4 one
        let fs = design_filters(&spec(&[3], 5)).unwrap();
        let d4 = design_filters(&spec(&[3], 4)).unwrap();
        assert_eq!(fs.phi().degree(), 4);
        assert_eq!(fs.phi(), d4.phi());
        assert!(verify_filter_set(&fs).passed());

        // shared root at z = -1; verifier is the authority
        let fs = design_filters(&spec(&[2, 4], 2)).unwrap();
        assert!(verify_filter_set(&fs).passed());
    }

    #[test]
    fn spec_validation() {
        assert!(DesignSpec::new([], 1).is_err());
        assert!(DesignSpec::new([0, 3], 1).is_err());
        assert!(DesignSpec::new([3, 3], 1).is_err());
        assert_eq!(spec(&[5, 1, 3], 2).periods(), &[1, 3, 5]);
        assert_eq!(spec(&[5, 1, 3], 2).to_string(), "periods {1,3,5}, degree 2");
    }

    #[test]
    fn variance_factors() {
        let fs = design_filters(&spec(&[1, 3, 5], 1)).unwrap();
        assert_eq!(variance_inflation(fs.psi(3).unwrap()), r(29, 25));
        assert_eq!(variance_inflation(fs.psi(5).unwrap()), r(3, 1));
        assert_eq!(variance_inflation(fs.psi(1).unwrap()), r(109, 225));
    }

    #[test]
    fn doc_roundtrip() {
        let fs = design_filters(&spec(&[1, 3, 5], 2)).unwrap();
        let doc = fs.to_doc();
        assert_eq!(doc.phi, vec!["26/3", "-37/3", "14/3"]);
        let json = serde_json::to_string(&doc).unwrap();
        let back: FilterSetDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(FilterSet::from_doc(&back).unwrap(), fs);
    }
}
