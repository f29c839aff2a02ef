use crate::model::{Choreography, TimelinePosition};

use super::{AnalysisError, AnalysisResult};

/// Linearizes a timeline position into a continuous beat index: dances are
/// concatenated and every beat counts 1.
pub fn beat_index(choreography: &Choreography, pos: TimelinePosition) -> AnalysisResult<f64> {
    if !choreography.timeline_contains(pos) {
        return Err(AnalysisError::PositionOutOfBounds(pos));
    }
    let before: u64 = choreography.dances[..pos.dance as usize]
        .iter()
        .map(|d| d.total_beats())
        .sum();
    let dance = &choreography.dances[pos.dance as usize];
    let within = u64::from(pos.bar) * u64::from(dance.beats_per_bar) + u64::from(pos.beat);
    Ok((before + within) as f64)
}
