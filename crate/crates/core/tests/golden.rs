use mye_core::report::filter_set_json;
use mye_core::{design_filters, verify_filter_set, DesignSpec};

#[test]
fn linear_filter_set_json() {
    let fs = design_filters(&DesignSpec::new([1, 3, 5], 1).unwrap()).unwrap();
    let json = filter_set_json(&fs, &verify_filter_set(&fs)).unwrap();
    let fset = &json["filter_set"];
    assert_eq!(fset["periods"], serde_json::json!([1, 3, 5]));
    assert_eq!(fset["degree"], 1);
    assert_eq!(fset["phi"], serde_json::json!(["4/1", "-3/1"]));
    assert_eq!(
        fset["filters"]["5"],
        serde_json::json!(["4/3", "1/3", "1/3", "-1/1"])
    );
    assert_eq!(
        fset["filters"]["3"],
        serde_json::json!(["4/5", "1/5", "1/5", "1/5", "1/5", "-3/5"])
    );
    assert_eq!(
        json["rendered"]["1"],
        "(4 + 5z + 6z^2 + 3z^3 + 3z^4 - z^5 - 2z^6 - 3z^7)/15"
    );
    assert_eq!(json["verification"]["passed"], true);
    let text = serde_json::to_string(&json).unwrap();
    let again =
        serde_json::to_string(&filter_set_json(&fs, &verify_filter_set(&fs)).unwrap()).unwrap();
    assert_eq!(text, again);
}
