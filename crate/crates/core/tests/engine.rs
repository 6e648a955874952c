use kkw_core::geometry::SubbundleInstance;
use kkw_core::pipelines::{compute_theorem_cases, Theorem};
use kkw_core::verify::{run_verify, InstanceSource, Selector};
use kkw_core::{Error, VerificationReport};

#[test]
fn instance_json_round_trip() {
    let inst = SubbundleInstance::random(6, 2, 11).unwrap();
    let back = SubbundleInstance::from_json(&inst.to_json()).unwrap();
    assert_eq!(back.s, inst.s);
    assert_eq!(back.f, inst.f);
    assert_eq!(back.digest(), inst.digest());
}

#[test]
fn instance_with_s_along_f_is_rejected() {
    let text =
        r#"{"n": 4, "k": 1, "S": [[["0","0","0","1"]],[["0","0","0","0"]],[["0","0","0","0"]],[["0","0","0","0"]]]}"#;
    assert!(matches!(SubbundleInstance::from_json(text), Err(Error::Invariant(_))));
    let short = r#"{"n": 4, "k": 1, "S": [[["1","0","0","0"]]]}"#;
    assert!(matches!(SubbundleInstance::from_json(short), Err(Error::Malformed(_))));
    assert!(SubbundleInstance::from_json("{").is_err());
}

#[test]
fn default_frame_is_last_coordinates() {
    let text = r#"{"n": 4, "k": 1, "S": [[["1/2","0","0","0"]],[["0","-3","0","0"]],[["0","0","0","0"]],[["0","0","7/5","0"]]]}"#;
    let inst = SubbundleInstance::from_json(text).unwrap();
    assert_eq!(inst.f[0].iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["0", "0", "0", "1"]);
}

#[test]
fn four_dimensional_boundary_is_instance_independent() {
    let a = compute_theorem_cases(Theorem::Phi, &SubbundleInstance::random(4, 1, 1).unwrap()).unwrap();
    let b = compute_theorem_cases(Theorem::Phi, &SubbundleInstance::random(4, 3, 2).unwrap()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.coefficient, y.coefficient, "{}", x.spec.key());
        assert!(x.diagnostics.iter().all(|d| !d.contains("DISAGREES")), "{:?}", x.diagnostics);
    }
}

#[test]
fn report_json_survives_round_trip() {
    let r = run_verify(Selector::Boundary(Theorem::PhiBar), None, &InstanceSource::seeded(3)).unwrap();
    let back = VerificationReport::from_json(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert!(r.all_match(), "{}", r.to_text());
}

#[test]
fn flat_selector_matches() {
    let r = run_verify(Selector::Thm21Flat, Some(4), &InstanceSource::seeded(5)).unwrap();
    assert_eq!(r.entries.len(), 8);
    assert!(r.all_match(), "{}", r.to_text());
}

#[test]
fn curvature_coefficient_of_trace_e() {
    let r = run_verify(Selector::Thm22, Some(4), &InstanceSource::seeded(7)).unwrap();
    for e in r.entries.iter().filter(|e| e.key.ends_with("/K") || e.key.ends_with("/S")) {
        assert_eq!(e.matches(), Some(true), "{}", e.key);
    }
}

#[test]
fn odd_dimension_is_refused() {
    assert!(run_verify(Selector::Thm22, Some(5), &InstanceSource::seeded(7)).is_err());
}

#[test]
fn report_fields_follow_documented_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/report-schema.json")).expect("schema parses");
    let r = run_verify(Selector::Boundary(Theorem::Phi), None, &InstanceSource::seeded(7)).unwrap();
    let report: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    let keys = |v: &serde_json::Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    let required = |v: &serde_json::Value| {
        let mut k: Vec<String> = v["required"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().into()).collect();
        k.sort();
        k
    };
    assert_eq!(keys(&report), required(&schema));
    assert_eq!(keys(&report["meta"]), required(&schema["properties"]["meta"]));
    assert_eq!(keys(&report["entries"][0]), required(&schema["properties"]["entries"]["items"]));
    let term_schema = &schema["$defs"]["expr"]["properties"]["terms"]["items"];
    for e in report["entries"].as_array().unwrap() {
        for t in e["computed"]["terms"].as_array().unwrap() {
            assert_eq!(keys(t), required(term_schema));
        }
    }
}
