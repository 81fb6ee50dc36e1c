#include "ae2lstm/volume.hpp"

#include <cmath>
#include <set>

namespace ae2lstm {

const char* to_string(Modality m) {
  switch (m) {
    case Modality::ADC: return "ADC";
    case Modality::CBF: return "CBF";
    case Modality::CBV: return "CBV";
    case Modality::DWI: return "DWI";
    case Modality::Tmax: return "Tmax";
  }
  return "?";
}

Modality modality_from_string(const std::string& s) {
  for (Modality m : kAllModalities)
    if (s == to_string(m)) return m;
  throw_data("unknown modality '" + s + "'");
}

Volume normalize_volume(const Volume& v) {
  float lo = std::numeric_limits<float>::infinity();
  float hi = -std::numeric_limits<float>::infinity();
  for (float x : v.voxels) {
    if (!std::isfinite(x)) throw_data("non-finite voxel in volume");
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  Volume out = v;
  if (hi > lo) {
    const float scale = 1.0f / (hi - lo);
    for (float& x : out.voxels) x = (x - lo) * scale;
  } else {
    for (float& x : out.voxels) x = 0.0f;
  }
  return out;
}

int binarize_mrs(int mrs) {
  if (mrs < 0 || mrs > 6)
    throw_usage("mRS score " + std::to_string(mrs) + " outside 0..6");
  return mrs <= 2 ? 0 : 1;
}

void PatientRecord::check_consistent() const {
  const Volume& first = volumes[0];
  for (Modality m : kAllModalities) {
    const Volume& v = volume(m);
    if (v.nx != first.nx || v.ny != first.ny || v.nz != first.nz)
      throw_data("patient " + id + ": " + to_string(m) + " volume is " +
                 std::to_string(v.nx) + "x" + std::to_string(v.ny) + "x" +
                 std::to_string(v.nz) + " but " + to_string(Modality::ADC) +
                 " is " + std::to_string(first.nx) + "x" +
                 std::to_string(first.ny) + "x" + std::to_string(first.nz));
  }
}

void Cohort::check_unique_ids() const {
  std::set<std::string> seen;
  for (const auto& p : patients)
    if (!seen.insert(p.id).second)
      throw_data("duplicate patient id '" + p.id + "' in cohort");
}

int Cohort::count_label(int label) const {
  int n = 0;
  for (const auto& p : patients)
    if (p.binary_label == label) ++n;
  return n;
}

}  // namespace ae2lstm
