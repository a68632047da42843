#[path = "support/schur_oracle.rs"]
mod schur_oracle;

use ed_slra::chow::Partition;
use schur_oracle::{first_disagreement, schur};

#[test]
fn schur_polynomial_of_shape_21_has_eight_tableaux() {
    let s21 = schur(&Partition::new(vec![2, 1]), 3);
    assert_eq!(s21.values().sum::<i64>(), 8);
}

#[test]
fn pieri_and_giambelli_agree_with_chern_root_oracle() {
    for m in 1..=5 {
        for r in 0..=m {
            if let Some(msg) = first_disagreement(r, m) {
                panic!("{msg}");
            }
        }
    }
}
