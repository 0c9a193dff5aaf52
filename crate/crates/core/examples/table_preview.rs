//! Quick operating-characteristics preview: runs both experiments at a
//! reduced replicate count and prints the summary rows.
//!
//!     cargo run --release -p propsim-core --example table_preview -- [reps]

use propsim_core::datagen::CALIBRATED_SCHEDULE;
use propsim_core::harness::{run_cross_experiment, run_long_experiment, CrossConfig, LongConfig};
use propsim_core::parallel::Workers;

fn main() {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);

    let t0 = std::time::Instant::now();
    let long = run_long_experiment(&LongConfig {
        schedule: CALIBRATED_SCHEDULE.to_vec(),
        reps,
        workers: Workers::Auto,
        ..LongConfig::default()
    })
    .unwrap();
    println!("long experiment: {reps} reps in {:.1?}", t0.elapsed());
    println!("scenario model power% type1% favor% conv_alt% conv_null%");
    for r in &long.summary {
        println!(
            "{:>8} {:>10} {:6.1} {:6.1} {:6.1} {:6.1} {:6.1}",
            r.scenario.as_str(),
            r.model.as_str(),
            r.power_pct,
            r.type1_pct,
            r.favor_active_under_null_pct,
            r.convergence_alt_pct,
            r.convergence_null_pct
        );
    }

    let t1 = std::time::Instant::now();
    let cross = run_cross_experiment(&CrossConfig {
        reps,
        workers: Workers::Auto,
        ..CrossConfig::default()
    })
    .unwrap();
    println!("\ncross experiment: {reps} reps in {:.1?}", t1.elapsed());
    println!("beta_c delta model reject% favor% conv%");
    for r in &cross.summary {
        println!(
            "{:>7} {:>5} {:>9} {:6.2} {:6.1} {:6.1}",
            r.beta_c,
            r.delta,
            r.model.as_str(),
            r.rejection_pct,
            r.favor_active_given_rejection_pct,
            r.convergence_pct
        );
    }
}
