fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR set by cargo");
    let header = std::path::Path::new(&crate_dir).join("include/qpmut.h");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(header);
        }
        Err(e) => {
            // Keep the committed header if generation fails; don't break
            // the build for consumers without the generator's toolchain.
            println!("cargo:warning=cbindgen failed, keeping committed header: {e}");
        }
    }
}
