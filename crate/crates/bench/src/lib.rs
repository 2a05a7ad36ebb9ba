//! Shared fixtures for the detector benchmarks.

use cpdetect_core::{preset, ExceedanceData, MeasurementSeries};

/// Setting-1 series (T = 1096, one change-point) at a fixed seed.
pub fn setting1_series() -> MeasurementSeries {
    preset("1cp").expect("bundled setting").generate_with_seed(7).expect("generation")
}

pub fn setting1_data(series: &MeasurementSeries) -> ExceedanceData {
    series
        .extract_exceedances(series.mean())
        .expect("threshold extraction")
}
