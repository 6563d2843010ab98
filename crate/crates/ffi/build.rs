use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("khessian.h");
    let bindings = cbindgen::generate(&crate_dir).expect("cbindgen failed");
    // write_to_file only touches the file when the contents changed, so the
    // committed header stays stable across clean builds.
    bindings.write_to_file(&header);
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
