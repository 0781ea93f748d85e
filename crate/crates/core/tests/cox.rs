use k3cone::coxgen::{candidate_degrees, elimination_witness, Battery};
use k3cone::rrk3::K3Context;
use k3cone::tables::reference_tables;

// The reduced battery leaves 2v, 3v, 4v (v = (1,1,−1,−1), v² = 2) starred on
// V14; the full battery removes each of them.
#[test]
fn v14_residual_multiples_fall_to_full_battery() {
    let f = reference_tables().family("V14").unwrap();
    let ctx = K3Context::from_curves(&f.lattice(), &f.curves).unwrap();
    let expect = [(2, "double_plane"), (3, "koszul_triple"), (4, "koszul_triple")];
    for (k, test) in expect {
        let d = vec![k, k, -k, -k];
        let w = elimination_witness(&ctx, &d, Battery::Full).expect("eliminated");
        assert_eq!(w.test, test, "{d:?}");
        assert!(elimination_witness(&ctx, &d, Battery::PairsAndMinimal).is_none());
    }
}

#[test]
fn v14_candidate_count() {
    let f = reference_tables().family("V14").unwrap();
    let ctx = K3Context::from_curves(&f.lattice(), &f.curves).unwrap();
    assert_eq!(candidate_degrees(&ctx).len(), 68606);
}
