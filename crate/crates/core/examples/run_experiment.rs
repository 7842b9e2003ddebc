//! Runs one experiment through the library API and writes its files.
//!
//! `cargo run --release --example run_experiment -- mm_hit_rate out/`

use std::time::Instant;

use orbit_opt::experiments::{run, write_outputs, ConfigOverrides, ExperimentConfig, ExperimentKind};

fn main() -> orbit_opt::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "tv_curves".into());
    let kind = ExperimentKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| orbit_opt::Error::Config(format!("unknown experiment {name}")))?;
    let mut cfg = ExperimentConfig::defaults(kind);
    cfg.apply(ConfigOverrides {
        output_dir: args.next().map(Into::into),
        ..Default::default()
    });
    let start = Instant::now();
    let files = run(&cfg)?;
    for path in write_outputs(&cfg, &files, start.elapsed())? {
        println!("{}", path.display());
    }
    Ok(())
}
