//! The committed synthetic datasets and model are reproducible, and the
//! forest trained on them is accurate and well formed.

mod support;

use std::collections::BTreeSet;

use metacc::mlopt::{parse_model, render_model, targets_for_mode, train, ForestParams};
use support::checks::{accuracy, structural_violations, MIN_ACCURACY};
use support::fixtures::*;

fn serial() -> BTreeSet<String> {
    targets_for_mode("serial").unwrap()
}

#[test]
fn committed_datasets_match_their_seeds() {
    let (train_ds, test_ds) = regenerate_synthetic();
    for (name, ds) in [("synthetic_train.csv", train_ds), ("synthetic_test.csv", test_ds)] {
        if let Some(d) = file_mismatch(&fixture(name), &ds.render()) {
            panic!("{name}: {d}");
        }
    }
}

#[test]
fn committed_model_matches_retraining() {
    let ds = synthetic_train();
    let model = train("serial", &ds.schema, &ds.instances(&serial()).unwrap(), &fixture_model_params()).unwrap();
    if let Some(d) = file_mismatch(&fixture("model.mcm"), &render_model(&model)) {
        panic!("model.mcm: {d}");
    }
}

#[test]
fn forest_generalizes_and_respects_limits() {
    let ds = synthetic_train();
    let train_rows = ds.instances(&serial()).unwrap();
    let model = train("serial", &ds.schema, &train_rows, &ForestParams::default()).unwrap();
    assert!(model.oob_accuracy >= MIN_ACCURACY, "oob {}", model.oob_accuracy);
    let acc = accuracy(&model, &synthetic_test().instances(&serial()).unwrap());
    assert!(acc >= MIN_ACCURACY, "held-out {acc}");
    assert_eq!(structural_violations(&model, &train_rows), Vec::<String>::new());
}

#[test]
fn saved_model_predicts_like_the_trained_one() {
    let ds = synthetic_train();
    let model = train("serial", &ds.schema, &ds.instances(&serial()).unwrap(), &fixture_model_params()).unwrap();
    let loaded = parse_model(&render_model(&model)).unwrap();
    assert_eq!(loaded, model);
    for row in &synthetic_test().rows {
        assert_eq!(loaded.vote(&row.features), model.vote(&row.features));
    }
}
