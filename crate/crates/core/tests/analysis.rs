use std::collections::BTreeSet;
use std::path::PathBuf;

use clt_core::analysis::{
    correlation_report, group_languages, pearson, transfer_gap, Profiles, ScoreTable, TransferGapRecord, XAxis,
};
use clt_core::Lang;
use proptest::prelude::*;

/// The eleven XQuAD targets. Korean is evaluated too but stays out of the
/// seen/unseen grouping.
const TARGETS: [&str; 11] = ["ar", "de", "el", "es", "hi", "ro", "ru", "th", "tr", "vi", "zh"];

fn testdata(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../testdata").join(rel)
}

fn table(k: usize) -> ScoreTable<f64> {
    ScoreTable::load(&testdata(&format!("tables/fewxquad.k{k}.tsv"))).unwrap()
}

fn targets() -> Vec<Lang> {
    TARGETS.iter().map(Lang::new).collect()
}

fn bloom_groups() -> (Vec<Lang>, Vec<Lang>) {
    let (seen, unseen) = group_languages(&Profiles::builtin(), "bloom", &targets()).unwrap();
    (seen.into_iter().collect(), unseen.into_iter().collect())
}

fn assert_cell(g: &TransferGapRecord<f64>, mean: f64, gap: f64) {
    assert!(
        (g.group_mean - mean).abs() <= 0.01 && (g.gap - gap).abs() <= 0.01,
        "{} {}: got {}, want {mean:.2} ({gap:.2})",
        g.method,
        g.group,
        g.display()
    );
}

#[test]
fn bloom_groups_follow_corpus_table() {
    let (seen, unseen) = bloom_groups();
    let codes = |v: &[Lang]| v.iter().map(|l| l.as_str().to_string()).collect::<Vec<_>>().join(",");
    assert_eq!(codes(&seen), "ar,es,hi,vi,zh");
    assert_eq!(codes(&unseen), "de,el,ro,ru,th,tr");
}

#[test]
fn five_shot_bloom_gaps() {
    let t = table(5);
    let (seen, unseen) = bloom_groups();
    let m = "BLOOM 7.1B";
    assert_eq!(t.get(m, "MONO", &Lang::new("en")).unwrap().mean, 68.17);
    assert_cell(&t.group_gap(m, "OUT_CLT", "seen", &seen).unwrap(), 51.52, 16.65);
    assert_cell(&t.group_gap(m, "OUT_CLT", "unseen", &unseen).unwrap(), 20.12, 48.05);
    assert_cell(&t.group_gap(m, "IN_CLT_TGT_A", "seen", &seen).unwrap(), 54.91, 13.26);
    assert_cell(&t.group_gap(m, "IN_CLT_TGT_A", "unseen", &unseen).unwrap(), 22.19, 45.98);
}

/// 10-shot unseen In-CLT scores measured against the 5-shot English MONO
/// score of 68.17.
#[test]
fn ten_shot_unseen_in_clt_against_five_shot_english() {
    let (_, unseen) = bloom_groups();
    let m = "BLOOM 7.1B";
    let en = table(5).get(m, "MONO", &Lang::new("en")).unwrap().mean;
    let ten = table(10);
    let scores: Vec<(Lang, f64)> =
        unseen.iter().map(|l| (l.clone(), ten.get(m, "IN_CLT_TGT_A", l).unwrap().mean)).collect();
    assert_cell(&transfer_gap(m, "IN_CLT_TGT_A", "unseen", en, &scores).unwrap(), 22.75, 45.42);
    // against its own table's English score the gap is wider
    let own = ten.group_gap(m, "IN_CLT_TGT_A", "unseen", &unseen).unwrap();
    assert_cell(&own, 22.75, 69.28 - 22.7533);
}

#[test]
fn gap_is_positive_with_proximity_fixture() {
    let mut profiles = Profiles::builtin();
    profiles.add_file(&testdata("profiles/proximity_fixture.jsonl")).unwrap();
    let t = table(5);
    let outliers: BTreeSet<Lang> = ["vi", "ro"].into_iter().map(Lang::new).collect();
    for (model, family) in [("XGLM 7.5B", "xglm"), ("BLOOM 7.1B", "bloom")] {
        let gaps = t.language_gaps(model, "IN_CLT_TGT_A", &targets()).unwrap();
        let report = correlation_report(&gaps, &profiles, family, XAxis::Proximity, &outliers).unwrap();
        assert_eq!(report.pairs.len(), 9);
        assert_eq!(report.excluded, vec![Lang::new("ro"), Lang::new("vi")]);
        assert!(report.r > 0.0, "{model}: r = {}", report.r);
    }
}

#[test]
fn proportion_needs_no_extra_data() {
    let t = table(5);
    let gaps = t.language_gaps("BLOOM 7.1B", "IN_CLT_TGT_A", &targets()).unwrap();
    let report = correlation_report(&gaps, &Profiles::builtin(), "bloom", XAxis::Proportion, &BTreeSet::new()).unwrap();
    assert!((-1.0..=1.0).contains(&report.r));
    assert!(report.svg().starts_with("<svg"));
}

#[test]
fn pearson_trivial_and_hand_computed() {
    let xs = [1.0f64, 2.0, 3.0, 4.0];
    assert_eq!(pearson(&xs, &[3.0, 5.0, 7.0, 9.0]).unwrap(), 1.0);
    assert_eq!(pearson(&xs, &[8.0, 6.0, 4.0, 2.0]).unwrap(), -1.0);
    // mean x = 2.5, mean y = 5.5; sxy = 8, sxx = 5, syy = 21
    let r = pearson(&xs, &[2.0, 7.0, 5.0, 8.0]).unwrap();
    assert!((r - 8.0 / (5.0f64 * 21.0).sqrt()).abs() < 1e-9);
    assert!((r - 0.780_720_058_4).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pearson_is_affine_invariant(
        pts in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..20),
        a in 0.01f64..50.0,
        b in -100.0f64..100.0,
        c in 0.01f64..50.0,
        d in -100.0f64..100.0,
    ) {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let Ok(r) = pearson(&xs, &ys) else { return Ok(()) };
        let xs2: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let ys2: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
        let r2 = pearson(&xs2, &ys2).unwrap();
        prop_assert!((r - r2).abs() < 1e-9, "{} vs {}", r, r2);
    }
}
