//! Trace-based against analytic mean-free path on the four closed validation
//! shapes, printed as CSV.
//!
//! ```text
//! cargo run --release --example validate_table1 [seed]
//! ```

use preverb::pipeline::{validate_table1, ValidationConfig};

fn main() -> preverb::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let start = std::time::Instant::now();
    let report = validate_table1(&ValidationConfig::with_seed(seed))?;
    print!("{}", report.to_csv());
    eprintln!("max error {:.2}% in {:.2} s", report.max_error_pct(), start.elapsed().as_secs_f64());
    Ok(())
}
