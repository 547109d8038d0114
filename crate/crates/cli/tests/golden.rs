//! Golden outputs of fixed commands. Set `UPDATE_GOLDEN=1` to rewrite them.

mod common;

use common::{golden_path, run, GOLDEN_CASES};

#[test]
fn golden_outputs_are_stable() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, args) in GOLDEN_CASES {
        let out = run(args);
        assert_eq!(out.code, 0, "{name}: {}", out.stderr);
        let path = golden_path(name);
        if update {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(out.stdout, expected, "{name} drifted from its golden file");
    }
}
