#ifndef AE2LSTM_SYNTHETIC_HPP
#define AE2LSTM_SYNTHETIC_HPP

#include <cstdint>

#include "ae2lstm/volume.hpp"

namespace ae2lstm {

// Synthetic multimodal cohort used in place of clinical data.
//
// Labels: round(n * poor_fraction) poor patients, clamped so both classes
// have at least one member; assignment order shuffled per seed. mRS is
// drawn uniformly from {0,1,2} for good and {3,..,6} for poor patients.
//
// Each volume is smooth low-resolution background noise plus one spherical
// lesion per patient (same center across the five modalities, jittered
// around the volume center). Radius is (0.05 + 0.20*mrs/6) * min dimension
// and additive intensity is contrast_m * (0.15 + 0.85*mrs/6), both strictly
// increasing in mRS, so the binary classes are separable by construction:
// the mean normalized intensity inside the lesion sphere differs between
// classes by at least ~0.08 (checked in the test suite). Volumes are
// min-max normalized to [0,1].
//
// Deterministic: every draw comes from streams derived from `seed`.
Cohort generate_synthetic_cohort(int n, int nx, int ny, int nz,
                                 std::uint64_t seed,
                                 double poor_fraction = 0.34);

}  // namespace ae2lstm

#endif
