//! The bent trefoil family r + εz for ε = 0, 0.3, 0.6 as OBJ files, through
//! the same entry point as `knotbend mesh`.

fn main() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/trefoil.knot");
    let out = std::env::temp_dir().join("knotbend_family");
    std::fs::create_dir_all(&out).unwrap();
    let args = ["knotbend", "mesh", file, "--eps-list", "0,0.3,0.6", "--out", out.to_str().unwrap()];
    let code = knotbend::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
