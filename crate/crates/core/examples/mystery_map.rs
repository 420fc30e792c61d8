//! Recovery of a map handed over as an explicit `n² x n²` operator through
//! the JSON wire format, as a third party would submit it.

use preserver_lab::json::{to_stable_string, MapSpec, MatrixJson, RecoveryReport};
use preserver_lab::preservers::random_canonical;
use preserver_lab::recovery::{build_linear_rep, recover};
use preserver_lab::{MatrixClass, PreserverForm};

pub fn main() {
    let n = 2;
    let secret = random_canonical(PreserverForm::MnTwoSided, n, 31, false);
    let rep = build_linear_rep(&secret, MatrixClass::Full, n, 1e-8).expect("linear");
    let wire = format!(
        r#"{{"kind": "linear-rep", "rep": {}}}"#,
        serde_json::to_string(&MatrixJson::from(&rep.rep)).unwrap()
    );

    let map = MapSpec::from_json(&wire).and_then(|s| s.build()).expect("valid spec");
    let found = recover(&map, MatrixClass::Full, n, 1e-8).expect("two-sided map");
    print!("{}", to_stable_string(&RecoveryReport::from(&found)).unwrap());
}
