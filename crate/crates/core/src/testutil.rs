//! Shared proptest strategies.

use proptest::prelude::*;

use crate::model::ReleaseConfig;
use crate::planning::ArpInstance;

/// Small instances (N <= 8, K <= 2) with arbitrary values, efforts and
/// valid discount vectors.
pub fn random_instance() -> impl Strategy<Value = ArpInstance> {
    (1usize..=8, 1usize..=2).prop_flat_map(|(n, k)| {
        (
            proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), n),
            proptest::collection::vec(0.0f64..5.0, n),
            proptest::collection::vec(0.0f64..12.0, k),
            0.05f64..0.95,
            0.05f64..0.95,
        )
            .prop_map(move |(values, efforts, caps, w2, z2)| {
                let cfg = if k == 1 {
                    ReleaseConfig::new(caps, vec![1.0, 0.0], vec![0.0, 1.0]).unwrap()
                } else {
                    ReleaseConfig::new(caps, vec![1.0, w2, 0.0], vec![0.0, z2, 1.0]).unwrap()
                };
                ArpInstance::from_values(&values, &efforts, cfg).unwrap()
            })
    })
}

