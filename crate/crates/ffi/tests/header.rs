//! The hand-written header must track the exported surface.

use std::path::Path;
use std::process::Command;

fn read(rel: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)).unwrap()
}

#[test]
fn header_declares_every_export() {
    let src = read("src/lib.rs");
    let header = read("include/hadamard_prox.h");
    let mut fns = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            fns += 1;
        }
        if let Some(rest) = line.strip_prefix("pub const ") {
            let name = rest.split(':').next().unwrap();
            let value = rest.rsplit("= ").next().unwrap().trim_end_matches(';');
            assert!(header.contains(&format!("#define {name} {value}")), "{name} = {value} missing from header");
        }
    }
    assert!(fns >= 14, "found only {fns} exports");
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hadamard_prox.h");
    match Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).status() {
        Ok(status) => assert!(status.success()),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
