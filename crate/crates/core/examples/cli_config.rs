//! Drives the command-line interface in-process with a JSON run
//! configuration describing an inline chart.

use isomin::cli::run;

fn main() -> std::io::Result<()> {
    let config = r#"{
        "surface": {"chart": {
            "kind": "conformal", "c": -1, "domain": [-1.2, 1.2, -1, 1],
            "profile": {"basis": "cos", "coeffs": [0, 1], "power": -1},
            "angle": {"basis": "sin", "coeffs": [0, 1]}
        }},
        "grid": {"nu": 41, "nv": 41},
        "tolerances": {"m1": 1e-10}
    }"#;
    let path = std::env::temp_dir().join("isomin_inline.json");
    std::fs::write(&path, config)?;
    let path = path.to_string_lossy().into_owned();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(["isomin", "verify", "--config", &path], &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    println!("exit code {code}");
    Ok(())
}
