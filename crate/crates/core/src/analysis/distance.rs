use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Choreography, EntityId, FormationId};

use super::{path_length, transition_paths, AnalysisResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDistances {
    pub from_formation_id: FormationId,
    pub to_formation_id: FormationId,
    /// Path length in metres for every entity; 0 when absent.
    pub distances: BTreeMap<EntityId, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub per_transition: Vec<TransitionDistances>,
    pub accumulated: BTreeMap<EntityId, f64>,
}

/// Path lengths per transition and summed over the whole choreography.
pub fn distance_report(choreography: &Choreography) -> AnalysisResult<DistanceReport> {
    let zeroed: BTreeMap<EntityId, f64> = choreography
        .entities
        .iter()
        .map(|e| (e.id.clone(), 0.0))
        .collect();
    let mut accumulated = zeroed.clone();
    let mut per_transition = Vec::with_capacity(choreography.transitions.len());

    for transition in &choreography.transitions {
        let mut distances = zeroed.clone();
        for (entity, path) in transition_paths(choreography, transition)? {
            let len = path_length(&path);
            distances.insert(entity.clone(), len);
            *accumulated.entry(entity).or_insert(0.0) += len;
        }
        per_transition.push(TransitionDistances {
            from_formation_id: transition.from_formation_id.clone(),
            to_formation_id: transition.to_formation_id.clone(),
            distances,
        });
    }
    Ok(DistanceReport {
        per_transition,
        accumulated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{place, two_formations};
    use crate::model::{Formation, TimelinePosition};

    #[test]
    fn single_transition() {
        let report = distance_report(&two_formations()).unwrap();
        assert_eq!(report.per_transition.len(), 1);
        assert_eq!(report.per_transition[0].distances[&"A".into()], 5.0);
        assert_eq!(report.accumulated[&"A".into()], 5.0);
        assert_eq!(report.accumulated[&"B".into()], 2.0);
    }

    #[test]
    fn accumulates_and_absent_contributes_zero() {
        let mut c = two_formations();
        let mut f3 = Formation::new("F3", "Third", TimelinePosition::new(0, 8, 0));
        // A: (3,4) -> (-4,4) is another 7 m
        place(&mut f3, "A", -4.0, 4.0);
        c.formations.push(f3);
        c.sync_transitions();

        let report = distance_report(&c).unwrap();
        assert_eq!(report.accumulated[&"A".into()], 12.0);
        // B and C leave after F2: held in place, 0 m
        assert_eq!(report.per_transition[1].distances[&"B".into()], 0.0);
        assert_eq!(report.per_transition[1].distances[&"C".into()], 0.0);
        for (e, total) in &report.accumulated {
            let sum: f64 = report.per_transition.iter().map(|t| t.distances[e]).sum();
            assert_eq!(*total, sum);
        }
    }
}
