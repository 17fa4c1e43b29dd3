//! Detects and localizes the drifts in the default SINE1 stream.

use pht_core::{detect_stream, generate_sine1, localize, DetectorConfig, LocalizeConfig, Monitor, Sine1Config};

fn main() {
    let data = generate_sine1(&Sine1Config::default()).expect("default config is valid");
    let config = DetectorConfig {
        monitor: Monitor::PerClass,
        ..DetectorConfig::default()
    };
    let report = detect_stream(&data.samples, &data.schema, config).expect("stream is nonempty");
    println!("detected drift at {:?}", report.drift_points);

    let found = localize(&data.samples, &data.schema, &LocalizeConfig::default()).expect("stream is long enough");
    for a in &found.alignments {
        println!(
            "boundary {} with windows of {} (sharpness {:.1})",
            a.boundary_index, a.window_size, a.sharpness
        );
    }
}
