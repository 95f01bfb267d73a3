fn main() {
    let dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    let config = cbindgen::Config::from_file(format!("{dir}/cbindgen.toml")).expect("cbindgen.toml");
    std::fs::create_dir_all(format!("{dir}/include")).unwrap();
    cbindgen::Builder::new()
        .with_config(config)
        .with_crate(".")
        .generate()
        .expect("cbindgen failed to generate the C header")
        .write_to_file(format!("{dir}/include/rlw.h"));
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
