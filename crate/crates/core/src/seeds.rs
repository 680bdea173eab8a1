//! Deterministic child-seed derivation for parallel Monte-Carlo work.
//!
//! Every replication (threshold simulation, bootstrap draw, scenario run)
//! seeds its own RNG from `derive(master, stream, index)`, so aggregate
//! results do not depend on thread scheduling.

/// Stream tag for Monte-Carlo threshold replications.
pub const STREAM_THRESHOLD: u64 = 0x5448_5253;
/// Stream tag for bootstrap replications.
pub const STREAM_BOOTSTRAP: u64 = 0x424f_4f54;
/// Stream tag for scenario noise (offset by series index).
pub const STREAM_SCENARIO: u64 = 0x5343_454e;
/// Stream tag for the discrete-to-continuous transform.
pub const STREAM_TRANSFORM: u64 = 0x5452_4647;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed, a stream tag, and a replication
/// index. Distinct (stream, index) pairs map to distinct, well-mixed seeds.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(master ^ splitmix(stream)) ^ index)
}
