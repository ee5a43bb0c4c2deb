//! The `excursion` tool driven in-process: each command writes its outputs
//! and a manifest into a directory.

use std::ffi::OsString;

fn main() {
    let out = std::env::temp_dir().join("excursion-example");
    let runs: [&[&str]; 3] = [
        &["expand", "--model", "bessel", "--p", "0.5", "--branch", "plus", "--depth", "3"],
        &["invert", "--model", "bessel", "--p", "0.5", "--atoms", "6"],
        &["--seed", "5", "hitting", "--paths", "2000"],
    ];
    for args in runs {
        let dir = out.join(args.iter().find(|a| !a.starts_with('-') && a.parse::<f64>().is_err()).unwrap());
        let argv = std::iter::once(OsString::from("excursion"))
            .chain(args.iter().map(OsString::from))
            .chain(["--out".into(), dir.clone().into_os_string()]);
        let code = excursions::cli::main_with_args(argv);
        println!("exit code {code}; files in {}:", dir.display());
        let mut names: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for n in names {
            println!("  {}", n.to_string_lossy());
        }
    }
}
