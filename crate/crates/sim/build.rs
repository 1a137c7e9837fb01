use std::env;
use std::path::PathBuf;

fn main() {
    let design = "design/robot.scc";
    println!("cargo:rerun-if-changed={design}");
    let out = PathBuf::from(env::var("OUT_DIR").unwrap());
    let source = std::fs::read_to_string(design).unwrap();
    let spec = match scc_core::parse(&source, design) {
        Ok(spec) => spec,
        Err(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            panic!("{design} does not parse");
        }
    };
    let checked = match scc_core::check(&spec) {
        Ok(c) => c,
        Err(violations) => {
            for v in violations {
                eprintln!("{v}");
            }
            panic!("{design} does not check");
        }
    };
    scc_core::generate(&checked, &out).unwrap();
    println!("cargo:rustc-env=SCC_GENERATED_DIR={}", out.display());
}
