mod common;

use indoamr::classifier::{load_model, save_model, Criterion, ModelFile, ModelParams, TreeParams, FORMAT_VERSION};
use indoamr::features::FeatureCategory;
use indoamr::features::FeatureConfig;
use indoamr::pipeline::{train_model, TrainConfig};
use indoamr::Error;

fn small_model() -> ModelFile {
    let cfg = TrainConfig {
        features: FeatureConfig::new([FeatureCategory::Syntactic]).unwrap(),
        params: ModelParams::Dt(TreeParams::new(4, Criterion::Entropy).unwrap()),
        ..TrainConfig::default()
    };
    train_model(&common::mini_corpus(), None, &cfg).unwrap().model
}

fn json(m: &ModelFile) -> String {
    let mut buf = Vec::new();
    save_model(m, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn round_trip() {
    let m = small_model();
    assert_eq!(load_model(json(&m).as_bytes()).unwrap(), m);
}

#[test]
fn other_versions_are_refused() {
    let text = json(&small_model()).replacen(
        &format!("\"version\": {FORMAT_VERSION}"),
        "\"version\": 99",
        1,
    );
    match load_model(text.as_bytes()) {
        Err(Error::ModelVersion { found: 99, expected }) => assert_eq!(expected, FORMAT_VERSION),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn truncated_files_are_model_errors() {
    let text = json(&small_model());
    for cut in [0, 1, text.len() / 3, text.len() - 3] {
        assert!(matches!(load_model(&text.as_bytes()[..cut]), Err(Error::Model(_))), "cut at {cut}");
    }
}

#[test]
fn foreign_json_is_a_model_error() {
    assert!(matches!(load_model(&b"{\"format\": \"other\", \"version\": 1}"[..]), Err(Error::Model(_))));
    assert!(matches!(load_model(&b"[1, 2, 3]"[..]), Err(Error::Model(_))));
}

#[test]
fn mismatched_dimensions_are_refused() {
    let mut m = small_model();
    let other = {
        let cfg = TrainConfig {
            features: FeatureConfig::new([FeatureCategory::Syntactic, FeatureCategory::Positional]).unwrap(),
            params: m.params.clone(),
            ..TrainConfig::default()
        };
        train_model(&common::mini_corpus(), None, &cfg).unwrap().model
    };
    m.encoder = other.encoder;
    assert!(matches!(load_model(json(&m).as_bytes()), Err(Error::Model(_))));
}
