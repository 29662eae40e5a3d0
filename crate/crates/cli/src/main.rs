use qchaos_cli::config::{parse_config, EXPERIMENTS};
use qchaos_cli::experiments::{run_experiment, summary_path};

const USAGE: &str = "\
usage:
  qchaos run --experiment <name> [--config <file>] [--<key> <value>...] [--out <dir>] [--seed <u64>]
  qchaos list
";

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") => run(&args[1..]),
        Some("list") => {
            list();
            0
        }
        _ => {
            eprint!("{USAGE}");
            2
        }
    }
}

fn run(args: &[String]) -> i32 {
    let cfg = match parse_config(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    match run_experiment(&cfg) {
        Ok(summary) => {
            for est in &summary.estimates {
                let verdict = match est.band {
                    Some([lo, hi]) => format!(
                        "{} (band [{lo:.3e}, {hi:.3e}])",
                        if est.pass { "pass" } else { "FAIL" }
                    ),
                    None => "info".to_string(),
                };
                println!("{:28} {:>24.16e}  {verdict}", est.name, est.value);
            }
            println!(
                "{}: {} in {:.2}s -> {}",
                summary.experiment,
                if summary.pass { "PASS" } else { "FAIL" },
                summary.duration_seconds,
                summary_path(&cfg).display()
            );
            if summary.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn list() {
    use std::fmt::Write as _;
    let mut out = String::new();
    for spec in EXPERIMENTS {
        let _ = writeln!(out, "{}\n    {}", spec.name, spec.summary);
        for p in spec.params {
            let kind = if p.integer { "int" } else { "float" };
            let _ = writeln!(out, "    --{} <{kind}> (default {})  {}", p.key, p.default, p.doc);
        }
        out.push('\n');
    }
    // Tolerate a closed pipe (e.g. `qchaos list | head`).
    use std::io::Write as _;
    let _ = std::io::stdout().write_all(out.as_bytes());
}
