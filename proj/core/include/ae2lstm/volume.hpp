#ifndef AE2LSTM_VOLUME_HPP
#define AE2LSTM_VOLUME_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ae2lstm/error.hpp"

namespace ae2lstm {

// The five MRI-derived maps, in the fixed concatenation order used
// everywhere downstream.
enum class Modality : int { ADC = 0, CBF = 1, CBV = 2, DWI = 3, Tmax = 4 };

inline constexpr int kNumModalities = 5;
inline constexpr std::array<Modality, kNumModalities> kAllModalities = {
    Modality::ADC, Modality::CBF, Modality::CBV, Modality::DWI, Modality::Tmax};

const char* to_string(Modality m);
Modality modality_from_string(const std::string& s);

// A single 3-D scalar map. Voxel order follows the on-disk convention:
// x fastest, then y, then z, so one axial slice is a contiguous block.
struct Volume {
  int nx = 0, ny = 0, nz = 0;
  std::vector<float> voxels;  // size nx*ny*nz
  Modality modality = Modality::ADC;

  Volume() = default;
  Volume(int nx_, int ny_, int nz_)
      : nx(nx_), ny(ny_), nz(nz_),
        voxels(std::size_t(nx_) * std::size_t(ny_) * std::size_t(nz_), 0.0f) {}

  std::size_t size() const { return voxels.size(); }
  std::size_t slice_size() const { return std::size_t(nx) * std::size_t(ny); }

  float& at(int x, int y, int z) {
    return voxels[std::size_t(x) +
                  std::size_t(nx) * (std::size_t(y) + std::size_t(ny) * std::size_t(z))];
  }
  float at(int x, int y, int z) const {
    return voxels[std::size_t(x) +
                  std::size_t(nx) * (std::size_t(y) + std::size_t(ny) * std::size_t(z))];
  }

  // Pointer to the start of axial slice z.
  const float* slice(int z) const { return voxels.data() + slice_size() * std::size_t(z); }
};

// Per-volume min-max normalization to [0,1]; a constant volume maps to all
// zeros. Throws a data error on non-finite voxels.
Volume normalize_volume(const Volume& v);

// mRS 0..2 -> good (0), 3..6 -> poor (1).
int binarize_mrs(int mrs);

struct PatientRecord {
  std::string id;
  std::array<Volume, kNumModalities> volumes;  // indexed by Modality ordinal
  int mrs = 0;
  int binary_label = 0;

  const Volume& volume(Modality m) const { return volumes[std::size_t(int(m))]; }
  Volume& volume(Modality m) { return volumes[std::size_t(int(m))]; }

  // All five volumes must share dimensions; throws a data error otherwise.
  void check_consistent() const;
};

enum class Provenance { synthetic, ingested };

struct Cohort {
  std::vector<PatientRecord> patients;
  Provenance provenance = Provenance::synthetic;

  std::size_t size() const { return patients.size(); }
  void check_unique_ids() const;
  int count_label(int label) const;
};

}  // namespace ae2lstm

#endif
