//! Fixture-driven sessions: certificates loaded from typed-line files
//! drive the general weighted-matching protocol instead of the built-in
//! prover search.

use graphsip::certfile;
use graphsip::gstream::parse_stream_file;
use graphsip::matching::mwm_general_with_cert;
use graphsip::session::SessionConfig;

fn load(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn fixture_certificates_verify() {
    for (stream_file, cert_file, want) in [
        ("triangle.stream", "triangle.cert", 1),
        ("five_cycle.stream", "five_cycle.cert", 2),
    ] {
        let (n, updates) = parse_stream_file(&load(stream_file)).unwrap();
        let cert = certfile::parse(&load(cert_file)).unwrap();
        let duals = cert.duals.expect("fixture carries duals");
        let tr = mwm_general_with_cert(
            n,
            &updates,
            1,
            &cert.matching,
            &duals,
            &SessionConfig::honest(42),
        )
        .unwrap();
        assert_eq!(tr.verdict.accepted_count(), Some(want), "{cert_file}");
    }
}

#[test]
fn tampered_fixture_certificate_is_rejected() {
    let (n, updates) = parse_stream_file(&load("five_cycle.stream")).unwrap();
    let cert = certfile::parse(&load("five_cycle.cert")).unwrap();
    let mut duals = cert.duals.unwrap();
    // shrink the claw: edge (3, 4) loses its covering set
    duals.claws[0].sets[0].0 = vec![0, 1, 2];
    let tr = mwm_general_with_cert(
        n,
        &updates,
        1,
        &cert.matching,
        &duals,
        &SessionConfig::honest(43),
    )
    .unwrap();
    assert!(!tr.verdict.is_accept());
}
