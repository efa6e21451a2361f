//! Loading certificates from typed-line fixture files and replaying them
//! through the general weighted-matching verifier.
//!
//! ```text
//! cargo run --example certificate_files
//! ```

use graphsip::certfile;
use graphsip::gstream::parse_stream_file;
use graphsip::matching::mwm_general_with_cert;
use graphsip::session::SessionConfig;

fn main() {
    let base = format!("{}/fixtures", env!("CARGO_MANIFEST_DIR"));
    for name in ["triangle", "five_cycle"] {
        let stream = std::fs::read_to_string(format!("{base}/{name}.stream")).unwrap();
        let cert_text = std::fs::read_to_string(format!("{base}/{name}.cert")).unwrap();
        let (n, updates) = parse_stream_file(&stream).unwrap();
        let cert = certfile::parse(&cert_text).unwrap();
        let duals = cert.duals.clone().expect("fixture carries duals");
        println!(
            "{name}: matching {:?}, dual value {}",
            cert.matching.edges,
            duals.value()
        );
        let tr = mwm_general_with_cert(
            n,
            &updates,
            1,
            &cert.matching,
            &duals,
            &SessionConfig::honest(7),
        )
        .unwrap();
        println!("  -> {:?}", tr.verdict);
    }
}
