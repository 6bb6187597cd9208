//! Drives the whole pipeline from configuration text and verifies the
//! manifest it writes.

use std::path::Path;

use ctstreak::pipeline::{run_pipeline, verify_manifest, PipelineConfig};

const CONFIG: &str = "
[phantom]
library = quarter-disk

[grid]
n_phi = 180
n_s = 256
n = 128

[physics]
mode = polychromatic
delta = 0.02

[mar]
method = linear

[output]
dir = quarter_disk_run
";

fn main() -> ctstreak::Result<()> {
    let base = std::env::temp_dir().join("ctstreak_pipeline_example");
    let cfg = PipelineConfig::parse(CONFIG, &base)?;
    print!("{}", cfg.dump());
    let summary = run_pipeline(&cfg)?;
    print!("{}", summary.report.summary());
    for (name, sum) in &summary.files {
        println!("{}  {name}", &sum[..12]);
    }
    let bad = verify_manifest(Path::new(&summary.out_dir))?;
    println!("manifest check: {}", if bad.is_empty() { "ok".to_string() } else { bad.join(", ") });
    Ok(())
}
