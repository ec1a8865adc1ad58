use clt_core::metrics::{exact_match_with, f1_with, PunctuationClass};
use clt_core::metrics::{exact_match, f1};
use clt_core::Lang;
use serde::Deserialize;

#[derive(Deserialize)]
struct Item {
    id: String,
    prediction: String,
    golds: Vec<String>,
    f1: f64,
    exact_match: u8,
}

#[derive(Deserialize)]
struct Fixture {
    items: Vec<Item>,
}

fn fixture() -> Vec<Item> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../testdata/oracles/squad_v1.json");
    let raw = std::fs::read_to_string(path).expect("read squad fixture");
    serde_json::from_str::<Fixture>(&raw).expect("parse squad fixture").items
}

fn has_non_ascii_punct(item: &Item) -> bool {
    std::iter::once(&item.prediction)
        .chain(item.golds.iter())
        .flat_map(|s| s.chars())
        .any(|c| !c.is_ascii() && clt_core::text::is_punctuation(c))
}

#[test]
fn ascii_mode_matches_official_script() {
    let en = Lang::new("en");
    for item in fixture() {
        let got: f64 = f1_with(&item.prediction, &item.golds, &en, PunctuationClass::Ascii);
        assert!((got - item.f1).abs() < 1e-6, "{}: f1 {got} vs {}", item.id, item.f1);
        let em = exact_match_with(&item.prediction, &item.golds, &en, PunctuationClass::Ascii);
        assert_eq!(em as u8, item.exact_match, "{}", item.id);
    }
}

#[test]
fn default_mode_matches_on_ascii_punctuation() {
    let en = Lang::new("en");
    let mut divergent = Vec::new();
    for item in fixture() {
        let got: f64 = f1(&item.prediction, &item.golds, &en);
        let em = exact_match(&item.prediction, &item.golds, &en) as u8;
        let agrees = (got - item.f1).abs() < 1e-6 && em == item.exact_match;
        if has_non_ascii_punct(&item) {
            if !agrees {
                divergent.push(item.id.clone());
            }
        } else {
            assert!(agrees, "{}: f1 {got} vs {}, em {em} vs {}", item.id, item.f1, item.exact_match);
        }
    }
    // en-dash answers: the default strips the dash, the official script keeps it
    assert_eq!(divergent.len(), 2, "{divergent:?}");
}
