use mmono::gallery::{case_by_id, run_case, CASES};

#[test]
fn every_case_reproduces_its_verdicts() {
    for (id, _, _) in CASES {
        let case = case_by_id(id).unwrap();
        for o in run_case(&case).unwrap() {
            assert!(o.matches(), "{id}: {} expected {:?}, got {:?}", o.check, o.expected, o.report);
        }
    }
}
