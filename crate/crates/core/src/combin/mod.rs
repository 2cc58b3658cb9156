//! Circle sets, non-crossing pair partitions, and configurations of chords
//! with their chord cycles and counting bounds.

mod circle;
mod configuration;
mod ncp;

pub use circle::{circle_interval, CircleSet};
pub use configuration::{
    chord_cycle, compatible, enumerate_configurations, for_each_configuration,
    remark_configuration, verify_bounds, BoundsReport, Chord, ChordCycle, ConfigJson,
    Configuration, MAX_CONFIG_N,
};
pub use ncp::{catalan, enumerate_ncp, is_noncrossing, PairPartition, MAX_NCP_POINTS};
