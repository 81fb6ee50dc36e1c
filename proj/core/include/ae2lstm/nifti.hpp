#ifndef AE2LSTM_NIFTI_HPP
#define AE2LSTM_NIFTI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ae2lstm/volume.hpp"

namespace ae2lstm {
namespace nifti {

// Supported NIfTI-1 datatype codes.
inline constexpr std::int16_t kUint8 = 2;
inline constexpr std::int16_t kInt16 = 4;
inline constexpr std::int16_t kFloat32 = 16;
inline constexpr std::int16_t kFloat64 = 64;

// Parses a single-file NIfTI-1 image ("n+1\0" magic) from an in-memory byte
// stream. Validates the 348-byte header, probes endianness from dim[0],
// reads dim[1..3], and applies scl_slope/scl_inter (slope 0 acts as 1).
// Datatypes: uint8, int16, float32, float64. The two-file form ("ni1\0")
// and anything else are rejected with parse errors naming the field.
// The returned volume carries no modality; the caller assigns it.
Volume parse(const std::vector<std::uint8_t>& bytes);

// Convenience: read the whole file then parse.
Volume parse_file(const std::string& path);

struct WriteOptions {
  std::int16_t datatype = kFloat32;
  bool big_endian = false;
  float scl_slope = 1.0f;  // stored voxel = slope*raw + inter on read-back
  float scl_inter = 0.0f;
};

// Serializes raw sample values (pre-scaling, cast to the chosen datatype)
// into a single-file NIfTI-1 byte stream. Integer datatypes round the raw
// values to nearest.
std::vector<std::uint8_t> write(int nx, int ny, int nz,
                                const std::vector<double>& raw,
                                const WriteOptions& opts = {});

// Production writer: float32 little-endian, slope 1 / inter 0.
void write_volume_file(const Volume& v, const std::string& path);

}  // namespace nifti
}  // namespace ae2lstm

#endif
