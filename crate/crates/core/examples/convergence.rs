//! Reconstruction error against grid spacing for fields of different
//! smoothness, with fitted log-log slopes.
//!
//! ```bash
//! cargo run --release --example convergence
//! ```

use gridenc::convergence::{run_convergence, ConvergenceConfig, SmoothnessCase};

fn main() -> gridenc::Result<()> {
    let cfg = ConvergenceConfig::default();
    let cases = [
        SmoothnessCase::smooth(),
        SmoothnessCase::holder_derivative(0.5)?,
        SmoothnessCase::kink(),
        SmoothnessCase::holder(0.5)?,
    ];
    for case in &cases {
        let rep = run_convergence(case, &cfg)?;
        println!("{:?} {:?}", case.label, case.field);
        print!("{}", rep.to_csv());
        println!(
            "slopes: max-abs {:.3}, rms {:.3}\n",
            rep.max_slope().unwrap_or(f64::NAN),
            rep.rms_slope().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
