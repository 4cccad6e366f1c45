use std::fs;
use std::path::Path;

use ac_census::cli::run_command;
use ac_census::fixtures::{self, AK2};
use ac_census::Certificate;

#[test]
fn cached_certificates_replay() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/certs");
    let ak2 = fixtures::presentation(AK2);
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# method: "), "{}", path.display());
        let cert = Certificate::parse(&text).unwrap();
        assert!(cert.verify().unwrap(), "{}", path.display());
        let name = path.file_name().unwrap().to_str().unwrap();
        let expected = format!("{}.cert", cert.base.to_string().replace(' ', "_"));
        if let Some(rest) = name.strip_prefix("trivial-") {
            assert!(cert.target.is_standard());
            assert_eq!(rest, expected);
        } else {
            assert_eq!(cert.target, ak2);
            assert_eq!(name.strip_prefix("equiv-"), Some(expected.as_str()));
        }
        let mut out = Vec::new();
        let code = run_command(["ac-census".as_ref(), "verify".as_ref(), path.as_os_str()], &mut out, &mut Vec::new());
        assert_eq!(code, 0);
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn fixture_search_is_reproducible_from_its_method_line() {
    // the recorded seed and generation count replay to the same certificate
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/certs");
    let text = fs::read_to_string(dir.join("trivial-XyyxYYY_xxyXY.cert")).unwrap();
    let cached = Certificate::parse(&text).unwrap();
    let mut out = Vec::new();
    let code = run_command(
        ["ac-census", "search", "XyyxYYY xxyXY", "--seed", "0", "--generations", "19", "--budget", "600"],
        &mut out,
        &mut Vec::new(),
    );
    assert_eq!(code, 0);
    let printed = String::from_utf8(out).unwrap();
    let body = printed.split_once('\n').unwrap().1;
    assert_eq!(Certificate::parse(body).unwrap(), cached);
}
