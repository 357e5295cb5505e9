use posinf::acceptance::CRITERIA;
use std::io::Write;

#[test]
fn acceptance() {
    // Written to the process stdout directly so the lines survive output capture.
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let r = c.run();
        writeln!(out, "{}", r.line()).unwrap();
        out.flush().unwrap();
        if !r.passed {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
