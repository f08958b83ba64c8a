use std::process::ExitCode;

use clap::Parser;
use vrjp_lab::cli::Cli;
use vrjp_lab::commands;
use vrjp_lab::report::Status;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version are not failures; usage errors are
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let run = || -> anyhow::Result<Status> {
        let cfg = cli.merged_config()?;
        let report = commands::execute(cli.command_name(), &cfg)?;
        for c in &report.checks {
            println!("{}", c.line());
        }
        for r in &report.decay {
            println!(
                "{:<12} decay   N={} y=({},{}) estimate={:.6} stderr={} bound={:.6}",
                r.pass.word(),
                r.n,
                r.y_x,
                r.y_y,
                r.estimate,
                r.stderr.map_or("none".into(), |s| format!("{s:.2e}")),
                r.bound
            );
        }
        if let Some(fit) = &report.slope {
            println!(
                "slope of ln E against ln|y|_inf: {:.4} (95% CI {:.4}..{:.4}); -eta = {:.3e}",
                fit.slope, fit.ci95[0], fit.ci95[1], fit.minus_eta_asymptotic
            );
        }
        println!("{} -> {}", report.status.word(), cfg.run.out_dir.join("report.json").display());
        Ok(report.status)
    };
    match run() {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
