fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("manifest dir");
    let out = std::path::Path::new(&crate_dir).join("include").join("qubitizer.h");
    std::fs::create_dir_all(out.parent().unwrap()).expect("include dir");
    let mut config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("QUBITIZER_H".to_string()),
        cpp_compat: true,
        documentation: true,
        ..Default::default()
    };
    config.enumeration.prefix_with_name = true;
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("cbindgen")
        .write_to_file(out);
    println!("cargo:rerun-if-changed=src/lib.rs");
}
