//! Cross-module invariants over the catalog codes: every published
//! claim re-verified by enumeration, duality round trips, repair groups
//! actually reconstructing erased symbols, and code sizes respecting the
//! LP bound.

use lrc_core::catalog::{entries, standard, StandardCode};
use lrc_core::code_model::{
    dual, enumerate_codewords, support_enumerator, support_enumerator_serial, support_of,
    LinearCode, Support,
};
use lrc_core::field_core::{fe_add, fe_inv, fe_mul, fe_neg, mat_mul};
use lrc_core::locality_analysis::{repair_groups, verify_gr, verify_rlr, zeta_max, zeta_max_serial};
use lrc_core::lp_bounds::rlrc_bound;
use lrc_core::ratlp::Rational;
use lrc_core::Limits;
use num::BigInt;

#[test]
fn every_catalog_claim_holds_by_enumeration() {
    let limits = Limits::default();
    for entry in entries() {
        for claim in &entry.claims {
            let verdict = verify_rlr(&entry.code, claim.r, claim.gamma, claim.zeta, &limits)
                .unwrap_or_else(|e| panic!("{}: {e}", entry.name));
            assert!(
                verdict.passed(),
                "{}: robust repair claim {claim:?} failed: {verdict:?}",
                entry.name
            );
            assert!(
                verify_gr(&entry.code, claim.beta, &limits).unwrap(),
                "{}: global recovery claim beta = {} failed",
                entry.name,
                claim.beta
            );
        }
    }
}

#[test]
fn duality_is_an_involution_on_the_catalog() {
    for entry in entries() {
        let c = &entry.code;
        let d = dual(c).unwrap();
        assert_eq!(d.n(), c.n(), "{}", entry.name);
        assert_eq!(d.k(), c.n() - c.k(), "{}", entry.name);
        assert_eq!(&dual(&d).unwrap(), c, "{}: dual of dual differs", entry.name);
        // Every dual generator row is orthogonal to every code row.
        let product = mat_mul(c.generator(), &d.generator().transpose()).unwrap();
        for r in 0..product.rows() {
            for col in 0..product.cols() {
                assert_eq!(product.get(r, col), 0, "{}: generators not orthogonal", entry.name);
            }
        }
    }
}

/// Replay the repair semantics behind every reported group: erase
/// coordinate `i`, read only the helpers, and rebuild the symbol through
/// the dual word that defines the group — for every single codeword.
fn assert_groups_reconstruct(c: &LinearCode, r: usize, name: &str) {
    let limits = Limits::default();
    let q = c.q();
    let dual_words: Vec<_> = enumerate_codewords(&dual(c).unwrap(), &limits).unwrap().collect();
    let code_words: Vec<_> = enumerate_codewords(c, &limits).unwrap().collect();
    for i in 1..=c.n() {
        let groups = repair_groups(c, i, r, &limits).unwrap();
        assert!(!groups.is_empty(), "{name}: node {i} has no repair group at r = {r}");
        for g in groups.iter().take(2) {
            assert_eq!(g.failed, i);
            assert!(!g.helpers.contains(i));
            assert!(g.helpers.size() as usize <= r);
            assert_eq!(g.helpers.union(Support::from_indices([i])), g.dual_support);
            let h = dual_words
                .iter()
                .find(|w| support_of(w) == g.dual_support)
                .expect("every reported support belongs to an actual dual word");
            let h_inv = fe_inv(h.get(i - 1), q).unwrap();
            for x in &code_words {
                let mut acc = 0;
                for j in g.helpers.indices() {
                    acc = fe_add(acc, fe_mul(h.get(j - 1), x.get(j - 1), q), q);
                }
                let rebuilt = fe_mul(fe_neg(acc, q), h_inv, q);
                assert_eq!(rebuilt, x.get(i - 1), "{name}: node {i} group {g:?}");
            }
        }
    }
}

#[test]
fn repair_groups_reconstruct_every_codeword() {
    for entry in entries() {
        let r = entry.claims[0].r;
        assert_groups_reconstruct(&entry.code, r, entry.name);
    }
    // Nonbinary coverage: reconstruction must exercise inverses beyond 1.
    let c = standard(StandardCode::SingleParity { n: 4, q: 5 }).unwrap();
    assert_groups_reconstruct(&c, 3, "single_parity_4_5");
}

#[test]
fn catalog_sizes_respect_the_lp_bound() {
    for entry in entries() {
        let size = Rational::from_integer(BigInt::from(entry.code.q()).pow(entry.code.k() as u32));
        for claim in &entry.claims {
            let row = rlrc_bound(claim).unwrap();
            assert!(
                size <= row.lp_optimum,
                "{}: claim {claim:?} bound {} below the actual size {size}",
                entry.name,
                row.lp_optimum
            );
            assert!(row.dim_bound as usize >= entry.code.k());
        }
    }
}

#[test]
fn parallel_and_serial_paths_agree_on_the_catalog() {
    let limits = Limits::default();
    for entry in entries() {
        let par = support_enumerator(&entry.code, &limits).unwrap();
        let ser = support_enumerator_serial(&entry.code, &limits).unwrap();
        let a: Vec<_> = par.iter().collect();
        let b: Vec<_> = ser.iter().collect();
        assert_eq!(a, b, "{}", entry.name);
        let r = entry.claims[0].r;
        for gamma in 0..=1 {
            assert_eq!(
                zeta_max(&entry.code, r, gamma, &limits).unwrap(),
                zeta_max_serial(&entry.code, r, gamma, &limits).unwrap(),
                "{} at gamma = {gamma}",
                entry.name
            );
        }
    }
}
