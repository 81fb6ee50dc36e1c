#ifndef AE2LSTM_COHORT_IO_HPP
#define AE2LSTM_COHORT_IO_HPP

#include <array>
#include <string>
#include <vector>

#include "ae2lstm/volume.hpp"

namespace ae2lstm {

// Cohort manifest: tab-separated text, one patient per line,
//
//   id <TAB> adc <TAB> cbf <TAB> cbv <TAB> dwi <TAB> tmax <TAB> mrs
//
// with volume paths in Modality order, relative to the manifest's own
// directory. '#' starts a comment, blank lines are skipped. All manifest
// errors cite the offending line number.
struct ManifestEntry {
  std::string id;
  std::array<std::string, kNumModalities> paths;
  int mrs = 0;
};

std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::string& origin);
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Reads every referenced NIfTI volume, min-max normalizes it, attaches
// modalities in manifest column order, and binarizes mRS into the label.
// A missing or unreadable volume is a data error naming the modality.
Cohort load_cohort(const std::string& manifest_path);

// Writes one .nii per patient per modality plus manifest.tsv into dir
// (created if absent); file names are "<id>_<MODALITY>.nii". Deterministic:
// rewriting the same cohort yields byte-identical files.
// Returns the manifest path.
std::string write_cohort(const Cohort& cohort, const std::string& dir);

}  // namespace ae2lstm

#endif
