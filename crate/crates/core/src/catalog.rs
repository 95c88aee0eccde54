//! Built-in reference codes: two optimal robust locally repairable
//! constructions plus textbook small codes used as test oracles.
//!
//! Each catalog entry carries the repairability claims the code is known
//! to satisfy; the test suite re-verifies every claim by enumeration.

use crate::code_model::{code_from_generator, code_from_parity_check, LinearCode};
use crate::field_core::FieldMatrix;
use crate::lp_bounds::RlrcParams;
use crate::{Error, Result};

/// A named code with its verified repairability claims.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// Stable identifier, usable as `catalog:<name>` in the CLI.
    pub name: &'static str,
    pub code: LinearCode,
    /// `(r, beta, gamma, zeta)` tuples the code satisfies.
    pub claims: Vec<RlrcParams>,
    /// How the code is constructed.
    pub provenance: &'static str,
}

/// Identifiers for [`standard`] textbook codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardCode {
    /// `[n, 1, n]` repetition code over GF(q).
    Repetition { n: usize, q: u64 },
    /// `[n, n-1, 2]` single-parity code over GF(q).
    SingleParity { n: usize, q: u64 },
    /// The binary `[7, 4, 3]` Hamming code.
    Hamming74,
}

fn binary_rows(n: usize, rows: &[&[usize]]) -> FieldMatrix {
    let data: Vec<Vec<u64>> = rows
        .iter()
        .map(|cols| {
            let mut row = vec![0u64; n];
            for &c in *cols {
                row[c] = 1;
            }
            row
        })
        .collect();
    FieldMatrix::from_rows(2, &data).expect("catalog matrices are well-formed")
}

/// The `[16, 9, 4]` binary product construction: a 3x3 data grid
/// `C1..C9` (row-major) protected by three row parities `P1..P3`, three
/// column parities `P4..P6`, and one overall parity `P7`, stored as
/// coordinates 1..=9 and 10..=16 respectively. Satisfies the robust
/// repairability claims `(r=3, beta=3, gamma=1, zeta=1)` and
/// `(r=3, beta=3, gamma=0, zeta=2)`.
pub fn example1() -> LinearCode {
    // One parity-check row per parity symbol.
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(7);
    for j in 0..3 {
        // Row parity: P_{j+1} covers the grid row C_{3j+1..3j+3}.
        rows.push(vec![9 + j, 3 * j, 3 * j + 1, 3 * j + 2]);
    }
    for m in 0..3 {
        // Column parity: P_{m+4} covers the grid column C_{m+1, m+4, m+7}.
        rows.push(vec![12 + m, m, m + 3, m + 6]);
    }
    // Overall parity over all nine data symbols.
    let mut last = vec![15];
    last.extend(0..9);
    rows.push(last);
    let refs: Vec<&[usize]> = rows.iter().map(|r| r.as_slice()).collect();
    code_from_parity_check(&binary_rows(16, &refs)).expect("construction has full parity rank")
}

/// The `[8, 4, 4]` binary construction with data bits `C1..C4` at
/// coordinates 1..=4 and parities `P1..P4` at 5..=8, where each parity
/// is the sum of a distinct 3-subset of the data bits (equivalently,
/// each data bit feeds exactly three parities). Self-dual; satisfies
/// `(r=3, beta=3)` robust repairability with `(gamma, zeta)` in
/// `{(0,7), (1,4), (2,2)}`.
pub fn example2() -> LinearCode {
    let rows: [&[usize]; 4] = [&[0, 4, 5, 7], &[1, 4, 5, 6], &[2, 4, 6, 7], &[3, 5, 6, 7]];
    code_from_generator(&binary_rows(8, &rows)).expect("construction has full rank")
}

/// Construct a textbook code by name.
pub fn standard(kind: StandardCode) -> Result<LinearCode> {
    match kind {
        StandardCode::Repetition { n, q } => {
            if n == 0 {
                return Err(Error::InvalidParameter("repetition length must be positive".into()));
            }
            code_from_generator(&FieldMatrix::from_rows(q, &[vec![1; n]])?)
        }
        StandardCode::SingleParity { n, q } => {
            if n < 2 {
                return Err(Error::InvalidParameter(
                    "single-parity length must be at least 2".into(),
                ));
            }
            code_from_parity_check(&FieldMatrix::from_rows(q, &[vec![1; n]])?)
        }
        StandardCode::Hamming74 => {
            let rows: [&[usize]; 4] = [&[0, 4, 5], &[1, 4, 6], &[2, 5, 6], &[3, 4, 5, 6]];
            code_from_generator(&binary_rows(7, &rows))
        }
    }
}

fn claims(code: &LinearCode, tuples: &[(usize, usize, usize, u64)]) -> Vec<RlrcParams> {
    tuples
        .iter()
        .map(|&(r, beta, gamma, zeta)| RlrcParams {
            n: code.n(),
            q: code.q(),
            r,
            beta,
            gamma,
            zeta,
        })
        .collect()
}

/// All catalog entries, in a stable order.
pub fn entries() -> Vec<CatalogEntry> {
    let e1 = example1();
    let e2 = example2();
    let rep = standard(StandardCode::Repetition { n: 3, q: 2 }).expect("valid");
    let par = standard(StandardCode::SingleParity { n: 4, q: 2 }).expect("valid");
    let ham = standard(StandardCode::Hamming74).expect("valid");
    vec![
        CatalogEntry {
            name: "example1",
            claims: claims(&e1, &[(3, 3, 1, 1), (3, 3, 0, 2)]),
            code: e1,
            provenance: "two-level product construction: a 3x3 data grid protected by three \
                         row parities, three column parities, and one overall parity",
        },
        CatalogEntry {
            name: "example2",
            claims: claims(&e2, &[(3, 3, 0, 7), (3, 3, 1, 4), (3, 3, 2, 2)]),
            code: e2,
            provenance: "four data bits plus the four 3-subset parities; self-dual with every \
                         coordinate in seven size-3 repair groups",
        },
        CatalogEntry {
            name: "repetition_3_2",
            claims: claims(&rep, &[(1, 2, 0, 2), (1, 2, 1, 1)]),
            code: rep,
            provenance: "binary triple repetition",
        },
        CatalogEntry {
            name: "single_parity_4_2",
            claims: claims(&par, &[(3, 1, 0, 1)]),
            code: par,
            provenance: "four binary symbols under one overall parity",
        },
        CatalogEntry {
            name: "hamming_7_4",
            claims: claims(&ham, &[(3, 2, 0, 4), (3, 2, 1, 2)]),
            code: ham,
            provenance: "binary Hamming code in systematic form",
        },
    ]
}

/// Look up a catalog entry by name.
pub fn find(name: &str) -> Result<CatalogEntry> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalog(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::{dual, min_distance, weight_enumerator};
    use crate::locality_analysis::{repair_supports, zeta_max};
    use crate::Limits;

    #[test]
    fn first_construction_has_the_right_shape() {
        let c = example1();
        assert_eq!((c.n(), c.k(), c.q()), (16, 9, 2));
        assert_eq!(min_distance(&c, &Limits::default()).unwrap(), 4);
    }

    #[test]
    fn first_construction_weight_profile_prefix() {
        let w = weight_enumerator(&example1(), &Limits::default()).unwrap();
        assert_eq!(&w[..7], &[1, 0, 0, 0, 36, 0, 96]);
        assert_eq!(w.iter().sum::<u64>(), 1 << 9);
    }

    #[test]
    fn second_construction_is_self_dual() {
        let c = example2();
        assert_eq!((c.n(), c.k(), c.q()), (8, 4, 2));
        let limits = Limits::default();
        assert_eq!(weight_enumerator(&c, &limits).unwrap(), vec![1, 0, 0, 0, 14, 0, 0, 0, 1]);
        let d = dual(&c).unwrap();
        assert_eq!(
            weight_enumerator(&d, &limits).unwrap(),
            weight_enumerator(&c, &limits).unwrap()
        );
    }

    #[test]
    fn second_construction_repair_structure() {
        let c = example2();
        let limits = Limits::default();
        assert_eq!(zeta_max(&c, 3, 0, &limits).unwrap(), 7);
        let groups = repair_supports(&c, 1, 3, &limits).unwrap();
        assert_eq!(groups.len(), 7);
        // One of the repair groups for node 1 reads exactly {5, 6, 8}.
        assert!(groups
            .iter()
            .any(|s| s.indices() == vec![1, 5, 6, 8]));
    }

    #[test]
    fn standard_codes_have_textbook_parameters() {
        let limits = Limits::default();
        let rep = standard(StandardCode::Repetition { n: 3, q: 2 }).unwrap();
        assert_eq!((rep.n(), rep.k(), min_distance(&rep, &limits).unwrap()), (3, 1, 3));
        let par = standard(StandardCode::SingleParity { n: 4, q: 2 }).unwrap();
        assert_eq!((par.n(), par.k(), min_distance(&par, &limits).unwrap()), (4, 3, 2));
        let ham = standard(StandardCode::Hamming74).unwrap();
        assert_eq!((ham.n(), ham.k(), min_distance(&ham, &limits).unwrap()), (7, 4, 3));
        assert_eq!(
            weight_enumerator(&ham, &limits).unwrap(),
            vec![1, 0, 0, 7, 7, 0, 0, 1]
        );
    }

    #[test]
    fn standard_codes_over_other_primes() {
        let rep = standard(StandardCode::Repetition { n: 2, q: 3 }).unwrap();
        assert_eq!(weight_enumerator(&rep, &Limits::default()).unwrap(), vec![1, 0, 2]);
        assert!(standard(StandardCode::Repetition { n: 0, q: 2 }).is_err());
        assert!(standard(StandardCode::SingleParity { n: 1, q: 2 }).is_err());
    }

    #[test]
    fn lookup_by_name() {
        let names: Vec<&str> = entries().iter().map(|e| e.name).collect();
        assert_eq!(
            names,
            vec!["example1", "example2", "repetition_3_2", "single_parity_4_2", "hamming_7_4"]
        );
        assert_eq!(find("example2").unwrap().code, example2());
        assert!(matches!(find("nonesuch"), Err(Error::UnknownCatalog(n)) if n == "nonesuch"));
    }

    #[test]
    fn every_claim_is_well_formed() {
        for entry in entries() {
            assert!(!entry.claims.is_empty(), "{} has no claims", entry.name);
            for claim in &entry.claims {
                claim.validate().unwrap_or_else(|e| panic!("{}: {e}", entry.name));
                assert_eq!(claim.n, entry.code.n());
                assert_eq!(claim.q, entry.code.q());
            }
        }
    }
}
