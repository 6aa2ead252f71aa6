mod common;

use std::io::Write;

use approx::assert_abs_diff_eq;
use common::*;
use proptest::prelude::*;
use pufcal::ingest::*;
use pufcal::{Error, SystemConfig, UserId};

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(body.as_bytes())
        .unwrap();
    path
}

const PEOPLE: &str = "age,education,race\n\
                      39,Bachelors,White\n\
                      50,HS-grad,White\n\
                      38,HS-grad,Black\n\
                      53,\"Masters\",White\n\
                      28,Bachelors,\n\
                      37,HS-grad,White\n";

#[test]
fn extracts_from_file_with_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(&dir, "people.csv", PEOPLE);
    let codes = write(
        &dir,
        "codes.json",
        r#"{"column":"education","codes":{"HS-grad":1,"Bachelors":2,"Masters":3}}"#,
    );
    let query = ConditionalQuery::new("education", vec![("race".into(), "White".into())]).unwrap();
    let mut codec = CategoryCodec::from_path(&codes).unwrap();
    let out = extract_conditional(&csv, &query, &mut codec).unwrap();
    assert_eq!(out.distribution.support(), &[1.0, 2.0, 3.0]);
    assert_eq!(out.distribution.mass(), &[0.5, 0.25, 0.25]);
    assert_eq!(out.diagnostics.rows_matched, 4);
    assert_eq!(out.diagnostics.rows_dropped_missing, 1);

    // Same codes file, same supports on a second run.
    let mut again = CategoryCodec::from_path(&codes).unwrap();
    assert_eq!(extract_conditional(&csv, &query, &mut again).unwrap(), out);
}

#[test]
fn missing_file_is_io_error() {
    let query = ConditionalQuery::new("x", vec![]).unwrap();
    let mut codec = CategoryCodec::learning("x");
    let err = extract_conditional("/no/such/file.csv".as_ref(), &query, &mut codec).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}

#[test]
fn build_config_from_inline_and_csv_sources() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(&dir, "people.csv", PEOPLE);
    let mut specs: Vec<UserSource> = table2_users()
        .into_iter()
        .map(|u| UserSource {
            id: u.id.0,
            presence: u.presence,
            source: DistributionSource::Inline(u.distribution),
        })
        .collect();
    specs.push(UserSource {
        id: "u4".into(),
        presence: 1.0,
        source: DistributionSource::Csv {
            csv,
            target: "education".into(),
            filters: vec![("race".into(), "White".into())],
            codes: None,
        },
    });
    let config = build_config(&specs).unwrap();

    let b = config.background_sum(&UserId::from("u4")).unwrap();
    for ((x, m), (wx, wm)) in b.iter().zip(table2_sum_brute_force()) {
        assert_eq!(x, wx);
        assert_abs_diff_eq!(m, wm, epsilon = 1e-12);
    }
    // Learned codes follow first appearance among matched rows.
    let u4 = config.user(&UserId::from("u4")).unwrap();
    assert_eq!(u4.distribution.support(), &[1.0, 2.0, 3.0]);
    assert_eq!(u4.distribution.mass(), &[0.25, 0.5, 0.25]);

    let text = serde_json::to_string(&config).unwrap();
    let back: SystemConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, config);

    let specs_json = serde_json::to_string(&specs).unwrap();
    let parsed: Vec<UserSource> = serde_json::from_str(&specs_json).unwrap();
    assert_eq!(parsed, specs);

    specs.push(specs[0].clone());
    assert!(build_config(&specs).is_err());
}

proptest! {
    #[test]
    fn matched_rows_equal_line_scan(rows in prop::collection::vec((0u8..4, 0u8..3), 1..200)) {
        let mut body = String::from("target,group\n");
        for (t, g) in &rows {
            body.push_str(&format!("t{t},g{g}\n"));
        }
        let scan = body.lines().skip(1).filter(|l| l.ends_with(",g1")).count() as u64;
        let query = ConditionalQuery::new("target", vec![("group".into(), "g1".into())]).unwrap();
        let mut codec = CategoryCodec::learning("target");
        match extract_conditional_from_reader(body.as_bytes(), &query, &mut codec) {
            Ok(out) => {
                prop_assert_eq!(out.diagnostics.rows_matched, scan);
                prop_assert!((out.distribution.total_mass() - 1.0).abs() <= 1e-12);
            }
            Err(Error::EmptyMatch) => prop_assert_eq!(scan, 0),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}
