#include "ae2lstm/nifti.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "ae2lstm/error.hpp"

namespace ae2lstm {
namespace nifti {

namespace {

constexpr std::size_t kHeaderSize = 348;
// Field offsets within the 348-byte header.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;        // short dim[8]
constexpr std::size_t kOffDatatype = 70;   // short
constexpr std::size_t kOffBitpix = 72;     // short
constexpr std::size_t kOffVoxOffset = 108; // float
constexpr std::size_t kOffSclSlope = 112;  // float
constexpr std::size_t kOffSclInter = 116;  // float
constexpr std::size_t kOffMagic = 344;     // char[4]

std::uint16_t load_u16(const std::uint8_t* p, bool swap) {
  return swap ? std::uint16_t((p[0] << 8) | p[1])
              : std::uint16_t((p[1] << 8) | p[0]);
}

std::int16_t load_i16(const std::uint8_t* p, bool swap) {
  return std::int16_t(load_u16(p, swap));
}

std::uint32_t load_u32(const std::uint8_t* p, bool swap) {
  if (swap)
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
  return (std::uint32_t(p[3]) << 24) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[1]) << 8) | std::uint32_t(p[0]);
}

std::uint64_t load_u64(const std::uint8_t* p, bool swap) {
  std::uint64_t v = 0;
  if (swap)
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  else
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::int32_t load_i32(const std::uint8_t* p, bool swap) {
  return std::int32_t(load_u32(p, swap));
}

float load_f32(const std::uint8_t* p, bool swap) {
  const std::uint32_t bits = load_u32(p, swap);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

double load_f64(const std::uint8_t* p, bool swap) {
  const std::uint64_t bits = load_u64(p, swap);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void store_u16(std::vector<std::uint8_t>& out, std::size_t off, std::uint16_t v,
               bool big) {
  if (big) {
    out[off] = std::uint8_t(v >> 8);
    out[off + 1] = std::uint8_t(v);
  } else {
    out[off] = std::uint8_t(v);
    out[off + 1] = std::uint8_t(v >> 8);
  }
}

void store_u32(std::vector<std::uint8_t>& out, std::size_t off, std::uint32_t v,
               bool big) {
  for (int i = 0; i < 4; ++i)
    out[off + std::size_t(i)] = std::uint8_t(v >> (big ? 8 * (3 - i) : 8 * i));
}

void store_u64(std::vector<std::uint8_t>& out, std::size_t off, std::uint64_t v,
               bool big) {
  for (int i = 0; i < 8; ++i)
    out[off + std::size_t(i)] = std::uint8_t(v >> (big ? 8 * (7 - i) : 8 * i));
}

void store_f32(std::vector<std::uint8_t>& out, std::size_t off, float f,
               bool big) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  store_u32(out, off, bits, big);
}

int bytes_per_voxel(std::int16_t datatype) {
  switch (datatype) {
    case kUint8: return 1;
    case kInt16: return 2;
    case kFloat32: return 4;
    case kFloat64: return 8;
  }
  return 0;
}

}  // namespace

Volume parse(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize)
    throw_parse("file too small for a NIfTI-1 header (" +
                std::to_string(bytes.size()) + " bytes, need 348)");
  const std::uint8_t* p = bytes.data();

  // magic is plain chars, so it can be checked before the byte-order probe
  const char* magic = reinterpret_cast<const char*>(p + kOffMagic);
  if (std::memcmp(magic, "ni1\0", 4) == 0)
    throw_parse("field magic: two-file NIfTI-1 (\"ni1\") is not supported; "
                "expected single-file \"n+1\"");
  if (std::memcmp(magic, "n+1\0", 4) != 0)
    throw_parse("field magic: not a NIfTI-1 file");

  // Endianness probe: dim[0] must land in 1..7 under exactly one byte order.
  bool swap = false;
  {
    const std::int16_t dim0_le = load_i16(p + kOffDim, false);
    const std::int16_t dim0_be = load_i16(p + kOffDim, true);
    if (dim0_le >= 1 && dim0_le <= 7) {
      swap = false;
    } else if (dim0_be >= 1 && dim0_be <= 7) {
      swap = true;
    } else {
      throw_parse("field dim[0]: no byte order yields a value in 1..7");
    }
  }

  if (load_i32(p + kOffSizeofHdr, swap) != 348)
    throw_parse("field sizeof_hdr: expected 348, got " +
                std::to_string(load_i32(p + kOffSizeofHdr, swap)));

  const std::int16_t ndim = load_i16(p + kOffDim, swap);
  std::int16_t dims[8] = {0};
  for (int i = 0; i < 8; ++i)
    dims[i] = load_i16(p + kOffDim + 2 * std::size_t(i), swap);
  for (int i = 1; i <= 3; ++i)
    if (i <= ndim && dims[i] < 1)
      throw_parse("field dim[" + std::to_string(i) + "]: must be >= 1, got " +
                  std::to_string(dims[i]));
  // Trailing dimensions beyond 3 must be degenerate; this parser is 3-D.
  for (int i = 4; i <= ndim; ++i)
    if (dims[i] > 1)
      throw_parse("field dim[" + std::to_string(i) +
                  "]: 4-D and higher images are not supported");

  const int nx = std::max<int>(dims[1], 1);
  const int ny = ndim >= 2 ? std::max<int>(dims[2], 1) : 1;
  const int nz = ndim >= 3 ? std::max<int>(dims[3], 1) : 1;

  const std::int16_t datatype = load_i16(p + kOffDatatype, swap);
  const int bpv = bytes_per_voxel(datatype);
  if (bpv == 0)
    throw_parse("field datatype: code " + std::to_string(datatype) +
                " not supported (uint8=2, int16=4, float32=16, float64=64)");
  const std::int16_t bitpix = load_i16(p + kOffBitpix, swap);
  if (bitpix != 8 * bpv)
    throw_parse("field bitpix: " + std::to_string(bitpix) +
                " does not match datatype code " + std::to_string(datatype));

  float slope = load_f32(p + kOffSclSlope, swap);
  const float inter = load_f32(p + kOffSclInter, swap);
  if (slope == 0.0f) slope = 1.0f;

  const float vox_offset_f = load_f32(p + kOffVoxOffset, swap);
  if (!(vox_offset_f >= float(kHeaderSize)))
    throw_parse("field vox_offset: " + std::to_string(vox_offset_f) +
                " is before the end of the header");
  const std::size_t vox_offset = std::size_t(vox_offset_f);

  const std::size_t count = std::size_t(nx) * std::size_t(ny) * std::size_t(nz);
  const std::size_t need = vox_offset + count * std::size_t(bpv);
  if (bytes.size() < need)
    throw_parse("voxel data truncated: need " + std::to_string(need) +
                " bytes, file has " + std::to_string(bytes.size()));

  Volume v(nx, ny, nz);
  const std::uint8_t* d = p + vox_offset;
  for (std::size_t i = 0; i < count; ++i) {
    double raw;
    switch (datatype) {
      case kUint8: raw = double(d[i]); break;
      case kInt16: raw = double(load_i16(d + 2 * i, swap)); break;
      case kFloat32: raw = double(load_f32(d + 4 * i, swap)); break;
      default: raw = load_f64(d + 8 * i, swap); break;
    }
    v.voxels[i] = float(double(slope) * raw + double(inter));
  }
  return v;
}

Volume parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse(bytes);
}

std::vector<std::uint8_t> write(int nx, int ny, int nz,
                                const std::vector<double>& raw,
                                const WriteOptions& opts) {
  const std::size_t count = std::size_t(nx) * std::size_t(ny) * std::size_t(nz);
  if (nx < 1 || ny < 1 || nz < 1 || raw.size() != count)
    throw_usage("nifti write: raw sample count does not match dims");
  const int bpv = bytes_per_voxel(opts.datatype);
  if (bpv == 0)
    throw_usage("nifti write: unsupported datatype code " +
                std::to_string(opts.datatype));

  const bool big = opts.big_endian;
  const std::size_t vox_offset = 352;  // header + 4-byte extension flag
  std::vector<std::uint8_t> out(vox_offset + count * std::size_t(bpv), 0);

  store_u32(out, kOffSizeofHdr, 348, big);
  store_u16(out, kOffDim + 0, 3, big);  // dim[0]
  store_u16(out, kOffDim + 2, std::uint16_t(nx), big);
  store_u16(out, kOffDim + 4, std::uint16_t(ny), big);
  store_u16(out, kOffDim + 6, std::uint16_t(nz), big);
  for (int i = 4; i < 8; ++i) store_u16(out, kOffDim + 2 * std::size_t(i), 1, big);
  store_u16(out, kOffDatatype, std::uint16_t(opts.datatype), big);
  store_u16(out, kOffBitpix, std::uint16_t(8 * bpv), big);
  store_f32(out, kOffVoxOffset, float(vox_offset), big);
  store_f32(out, kOffSclSlope, opts.scl_slope, big);
  store_f32(out, kOffSclInter, opts.scl_inter, big);
  // pixdim[0..3] = 1.0 keeps readers that look at grid spacing happy
  for (int i = 0; i < 4; ++i)
    store_f32(out, 76 + 4 * std::size_t(i), 1.0f, big);
  out[kOffMagic + 0] = 'n';
  out[kOffMagic + 1] = '+';
  out[kOffMagic + 2] = '1';
  out[kOffMagic + 3] = '\0';

  std::uint8_t* d = out.data() + vox_offset;
  for (std::size_t i = 0; i < count; ++i) {
    switch (opts.datatype) {
      case kUint8:
        d[i] = std::uint8_t(std::lround(raw[i]));
        break;
      case kInt16:
        store_u16(out, vox_offset + 2 * i,
                  std::uint16_t(std::int16_t(std::lround(raw[i]))), big);
        break;
      case kFloat32:
        store_f32(out, vox_offset + 4 * i, float(raw[i]), big);
        break;
      default: {
        std::uint64_t bits;
        double val = raw[i];
        std::memcpy(&bits, &val, 8);
        store_u64(out, vox_offset + 8 * i, bits, big);
        break;
      }
    }
  }
  return out;
}

void write_volume_file(const Volume& v, const std::string& path) {
  std::vector<double> raw(v.voxels.begin(), v.voxels.end());
  const std::vector<std::uint8_t> bytes = write(v.nx, v.ny, v.nz, raw);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw_io("short write to '" + path + "'");
}

}  // namespace nifti
}  // namespace ae2lstm
