#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ae2lstm/error.hpp"
#include "ae2lstm/nifti.hpp"
#include "ae2lstm/synthetic.hpp"
#include "ae2lstm/volume.hpp"
#include "test_support.hpp"

using ae2lstm::binarize_mrs;
using ae2lstm::Cohort;
using ae2lstm::Error;
using ae2lstm::ErrKind;
using ae2lstm::generate_synthetic_cohort;
using ae2lstm::kAllModalities;
using ae2lstm::Modality;
using ae2lstm::modality_from_string;
using ae2lstm::normalize_volume;
using ae2lstm::PatientRecord;
using ae2lstm::Provenance;
using ae2lstm::to_string;
using ae2lstm::Volume;

namespace {

// Handcrafted header builder, written from the NIfTI-1 field table rather
// than the production writer: sizeof_hdr@0, dim[8]@40, datatype@70,
// bitpix@72, vox_offset@108, scl_slope@112, scl_inter@116, magic@344.
struct FileBuilder {
  std::vector<std::uint8_t> bytes;
  bool big = false;

  explicit FileBuilder(bool big_endian = false)
      : bytes(352, 0), big(big_endian) {
    put_i32(0, 348);
    put_i16(40, 3);  // dim[0]
    for (std::size_t i = 4; i < 8; ++i) put_i16(40 + 2 * i, 1);
    put_f32(108, 352.0f);  // vox_offset
    set_magic("n+1");
  }

  void put_i16(std::size_t off, std::int16_t v) {
    const auto u = std::uint16_t(v);
    if (big) {
      bytes[off] = std::uint8_t(u >> 8);
      bytes[off + 1] = std::uint8_t(u);
    } else {
      bytes[off] = std::uint8_t(u);
      bytes[off + 1] = std::uint8_t(u >> 8);
    }
  }
  void put_i32(std::size_t off, std::int32_t v) {
    const auto u = std::uint32_t(v);
    for (int i = 0; i < 4; ++i)
      bytes[off + std::size_t(i)] = std::uint8_t(u >> (big ? 8 * (3 - i) : 8 * i));
  }
  void put_f32(std::size_t off, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int i = 0; i < 4; ++i)
      bytes[off + std::size_t(i)] = std::uint8_t(u >> (big ? 8 * (3 - i) : 8 * i));
  }
  void set_magic(const char* m) {
    std::memset(bytes.data() + 344, 0, 4);
    std::memcpy(bytes.data() + 344, m, std::strlen(m));
  }
  void dims(int nx, int ny, int nz) {
    put_i16(42, std::int16_t(nx));
    put_i16(44, std::int16_t(ny));
    put_i16(46, std::int16_t(nz));
  }
  void datatype(std::int16_t code, std::int16_t bitpix) {
    put_i16(70, code);
    put_i16(72, bitpix);
  }
  void scaling(float slope, float inter) {
    put_f32(112, slope);
    put_f32(116, inter);
  }

  void append_f32(const std::vector<float>& vals) {
    for (float f : vals) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      for (int i = 0; i < 4; ++i)
        bytes.push_back(std::uint8_t(u >> (big ? 8 * (3 - i) : 8 * i)));
    }
  }
  void append_f64(const std::vector<double>& vals) {
    for (double d : vals) {
      std::uint64_t u;
      std::memcpy(&u, &d, 8);
      for (int i = 0; i < 8; ++i)
        bytes.push_back(std::uint8_t(u >> (big ? 8 * (7 - i) : 8 * i)));
    }
  }
  void append_i16(const std::vector<std::int16_t>& vals) {
    for (std::int16_t v : vals) {
      const auto u = std::uint16_t(v);
      if (big) {
        bytes.push_back(std::uint8_t(u >> 8));
        bytes.push_back(std::uint8_t(u));
      } else {
        bytes.push_back(std::uint8_t(u));
        bytes.push_back(std::uint8_t(u >> 8));
      }
    }
  }
  void append_u8(const std::vector<std::uint8_t>& vals) {
    bytes.insert(bytes.end(), vals.begin(), vals.end());
  }
};

ErrKind kind_of(const std::function<void()>& f, std::string* msg = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrKind::usage;
}

}  // namespace

TEST_CASE("a handcrafted float32 file parses to exactly its raw values") {
  FileBuilder fb;
  fb.dims(4, 4, 2);
  fb.datatype(16, 32);
  fb.scaling(0.0f, 0.0f);  // slope 0 must act as slope 1
  std::vector<float> vals;
  for (int i = 0; i < 32; ++i) vals.push_back(0.25f * float(i) - 1.5f);
  fb.append_f32(vals);

  Volume v = ae2lstm::nifti::parse(fb.bytes);
  CHECK(v.nx == 4);
  CHECK(v.ny == 4);
  CHECK(v.nz == 2);
  REQUIRE(v.voxels.size() == 32);
  for (std::size_t i = 0; i < 32; ++i) CHECK(v.voxels[i] == vals[i]);
}

TEST_CASE("int16 data honors scl_slope and scl_inter") {
  FileBuilder fb;
  fb.dims(3, 2, 1);
  fb.datatype(4, 16);
  fb.scaling(2.0f, 1.0f);
  fb.append_i16({0, 5, -3, 100, -200, 7});
  Volume v = ae2lstm::nifti::parse(fb.bytes);
  const float want[] = {1.0f, 11.0f, -5.0f, 201.0f, -399.0f, 15.0f};
  for (std::size_t i = 0; i < 6; ++i) CHECK(v.voxels[i] == want[i]);
}

TEST_CASE("uint8 and float64 datatypes parse correctly") {
  FileBuilder u8;
  u8.dims(2, 2, 1);
  u8.datatype(2, 8);
  u8.append_u8({0, 7, 255, 128});
  Volume a = ae2lstm::nifti::parse(u8.bytes);
  CHECK(a.voxels == std::vector<float>{0.0f, 7.0f, 255.0f, 128.0f});

  FileBuilder f64;
  f64.dims(2, 1, 1);
  f64.datatype(64, 64);
  f64.append_f64({0.125, -3.75});
  Volume b = ae2lstm::nifti::parse(f64.bytes);
  CHECK(b.voxels == std::vector<float>{0.125f, -3.75f});
}

TEST_CASE("a big-endian file is detected through the dim[0] probe") {
  FileBuilder fb(true);
  fb.dims(2, 2, 2);
  fb.datatype(16, 32);
  std::vector<float> vals{1, 2, 3, 4, 5, 6, 7, 8};
  fb.append_f32(vals);
  Volume v = ae2lstm::nifti::parse(fb.bytes);
  CHECK(v.nx == 2);
  for (std::size_t i = 0; i < 8; ++i) CHECK(v.voxels[i] == vals[i]);
}

TEST_CASE("the two-file form is rejected up front") {
  FileBuilder fb;
  fb.dims(2, 2, 1);
  fb.datatype(16, 32);
  fb.set_magic("ni1");
  fb.append_f32({1, 2, 3, 4});
  std::string msg;
  CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
  CHECK(msg.find("magic") != std::string::npos);
  CHECK(msg.find("two-file") != std::string::npos);
}

TEST_CASE("garbage magic fails before any other field is consulted") {
  FileBuilder fb;
  fb.set_magic("xyz");
  fb.put_i16(40, 999);  // also-nonsense dim[0] must not mask the magic error
  std::string msg;
  CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
  CHECK(msg.find("magic") != std::string::npos);
}

TEST_CASE("structural problems are parse errors naming the field") {
  SUBCASE("file shorter than one header") {
    std::vector<std::uint8_t> tiny(100, 0);
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(tiny); }, &msg) == ErrKind::parse);
    CHECK(msg.find("348") != std::string::npos);
  }
  SUBCASE("no byte order makes dim[0] plausible") {
    FileBuilder fb;
    fb.put_i16(40, 0);
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("dim[0]") != std::string::npos);
  }
  SUBCASE("wrong sizeof_hdr") {
    FileBuilder fb;
    fb.dims(2, 2, 1);
    fb.datatype(16, 32);
    fb.put_i32(0, 340);
    fb.append_f32({1, 2, 3, 4});
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("sizeof_hdr") != std::string::npos);
  }
  SUBCASE("non-positive spatial dimension") {
    FileBuilder fb;
    fb.dims(0, 2, 1);
    fb.datatype(16, 32);
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("dim[1]") != std::string::npos);
  }
  SUBCASE("4-D images are not supported") {
    FileBuilder fb;
    fb.put_i16(40, 4);  // dim[0] = 4
    fb.dims(2, 2, 1);
    fb.put_i16(48, 5);  // dim[4] = 5 time points
    fb.datatype(16, 32);
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("dim[4]") != std::string::npos);
  }
  SUBCASE("unsupported datatype code") {
    FileBuilder fb;
    fb.dims(2, 2, 1);
    fb.datatype(8, 32);  // int32 is deliberately out of scope
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("datatype") != std::string::npos);
    CHECK(msg.find("8") != std::string::npos);
  }
  SUBCASE("bitpix disagreeing with the datatype") {
    FileBuilder fb;
    fb.dims(2, 2, 1);
    fb.datatype(16, 16);
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("bitpix") != std::string::npos);
  }
  SUBCASE("vox_offset inside the header") {
    FileBuilder fb;
    fb.dims(2, 2, 1);
    fb.datatype(16, 32);
    fb.put_f32(108, 100.0f);
    fb.append_f32({1, 2, 3, 4});
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("vox_offset") != std::string::npos);
  }
  SUBCASE("voxel stream shorter than the dims promise") {
    FileBuilder fb;
    fb.dims(4, 4, 4);
    fb.datatype(16, 32);
    fb.append_f32({1, 2, 3});  // 64 voxels promised
    std::string msg;
    CHECK(kind_of([&] { ae2lstm::nifti::parse(fb.bytes); }, &msg) == ErrKind::parse);
    CHECK(msg.find("truncated") != std::string::npos);
  }
}

TEST_CASE("write then parse is the identity for every datatype and endianness") {
  std::vector<double> raw{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  for (std::int16_t dt : {ae2lstm::nifti::kUint8, ae2lstm::nifti::kInt16,
                          ae2lstm::nifti::kFloat32, ae2lstm::nifti::kFloat64}) {
    for (bool big : {false, true}) {
      ae2lstm::nifti::WriteOptions opts;
      opts.datatype = dt;
      opts.big_endian = big;
      Volume v = ae2lstm::nifti::parse(ae2lstm::nifti::write(3, 2, 2, raw, opts));
      CHECK(v.nx == 3);
      CHECK(v.ny == 2);
      CHECK(v.nz == 2);
      for (std::size_t i = 0; i < raw.size(); ++i)
        CHECK(double(v.voxels[i]) == raw[i]);
    }
  }
}

TEST_CASE("the writer stores pre-scaling values that read back scaled") {
  ae2lstm::nifti::WriteOptions opts;
  opts.datatype = ae2lstm::nifti::kInt16;
  opts.scl_slope = 0.5f;
  opts.scl_inter = 2.0f;
  Volume v = ae2lstm::nifti::parse(ae2lstm::nifti::write(2, 1, 1, {10, -4}, opts));
  CHECK(v.voxels[0] == 7.0f);   // 0.5*10 + 2
  CHECK(v.voxels[1] == 0.0f);   // 0.5*-4 + 2
}

TEST_CASE("volume files round-trip through disk") {
  test_support::TempDir tmp("data_io");
  Volume v(3, 3, 2);
  for (std::size_t i = 0; i < v.voxels.size(); ++i)
    v.voxels[i] = float(i) / 17.0f;
  const std::string path = tmp.path("vol.nii");
  ae2lstm::nifti::write_volume_file(v, path);
  Volume back = ae2lstm::nifti::parse_file(path);
  CHECK(back.nx == v.nx);
  CHECK(back.ny == v.ny);
  CHECK(back.nz == v.nz);
  CHECK(back.voxels == v.voxels);
  CHECK(back.modality == Modality::ADC);  // parser never assigns a modality

  CHECK(kind_of([&] { ae2lstm::nifti::parse_file(tmp.path("absent.nii")); }) ==
        ErrKind::io);
}

TEST_CASE("min-max normalization maps {0,5,10} to {0,0.5,1}") {
  Volume v(3, 1, 1);
  v.voxels = {0.0f, 5.0f, 10.0f};
  Volume n = normalize_volume(v);
  CHECK(n.voxels == std::vector<float>{0.0f, 0.5f, 1.0f});
}

TEST_CASE("constant volumes normalize to all zeros") {
  Volume v(2, 2, 1);
  v.voxels = {3.5f, 3.5f, 3.5f, 3.5f};
  Volume n = normalize_volume(v);
  for (float x : n.voxels) CHECK(x == 0.0f);
}

TEST_CASE("an already-normalized volume is unchanged") {
  Volume v(4, 1, 1);
  v.voxels = {0.0f, 0.25f, 0.75f, 1.0f};
  CHECK(normalize_volume(v).voxels == v.voxels);
}

TEST_CASE("normalization attains 0 and 1 and rejects non-finite voxels") {
  Volume v(2, 2, 2);
  v.voxels = {4.0f, -1.0f, 2.0f, 0.5f, 3.0f, 1.0f, -0.5f, 2.5f};
  Volume n = normalize_volume(v);
  float lo = 1e9f, hi = -1e9f;
  for (float x : n.voxels) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    CHECK(x >= 0.0f);
    CHECK(x <= 1.0f);
  }
  CHECK(lo == 0.0f);
  CHECK(hi == 1.0f);

  v.voxels[3] = std::numeric_limits<float>::quiet_NaN();
  CHECK(kind_of([&] { normalize_volume(v); }) == ErrKind::data);
}

TEST_CASE("mrs binarization splits at the 2/3 boundary") {
  CHECK(binarize_mrs(2) == 0);
  CHECK(binarize_mrs(3) == 1);
  CHECK(binarize_mrs(0) == 0);
  CHECK(binarize_mrs(6) == 1);
  int prev = 0;
  for (int m = 0; m <= 6; ++m) {
    CHECK(binarize_mrs(m) >= prev);  // monotone non-decreasing
    prev = binarize_mrs(m);
  }
  CHECK(kind_of([&] { binarize_mrs(7); }) == ErrKind::usage);
  CHECK(kind_of([&] { binarize_mrs(-1); }) == ErrKind::usage);
}

TEST_CASE("modality names round-trip and a bad name is a data error") {
  for (Modality m : kAllModalities)
    CHECK(modality_from_string(to_string(m)) == m);
  CHECK(std::string(to_string(Modality::Tmax)) == "Tmax");
  CHECK(kind_of([&] { modality_from_string("FLAIR"); }) == ErrKind::data);
}

TEST_CASE("patient consistency checking names the offending modality") {
  PatientRecord rec;
  rec.id = "px";
  for (Modality m : kAllModalities) rec.volumes[std::size_t(m)] = Volume(4, 4, 2);
  rec.check_consistent();  // fine
  rec.volumes[std::size_t(Modality::CBV)] = Volume(4, 4, 3);
  std::string msg;
  CHECK(kind_of([&] { rec.check_consistent(); }, &msg) == ErrKind::data);
  CHECK(msg.find("px") != std::string::npos);
  CHECK(msg.find("CBV") != std::string::npos);
}

TEST_CASE("cohorts reject duplicate ids and count labels") {
  Cohort c;
  PatientRecord a, b;
  a.id = "p1";
  a.binary_label = 0;
  b.id = "p2";
  b.binary_label = 1;
  c.patients = {a, b};
  c.check_unique_ids();
  CHECK(c.count_label(0) == 1);
  CHECK(c.count_label(1) == 1);
  c.patients.push_back(a);
  std::string msg;
  CHECK(kind_of([&] { c.check_unique_ids(); }, &msg) == ErrKind::data);
  CHECK(msg.find("p1") != std::string::npos);
}

TEST_CASE("the default class split of 119 patients is 79 good and 40 poor") {
  Cohort c = generate_synthetic_cohort(119, 4, 4, 4, 5);
  CHECK(c.size() == 119);
  CHECK(c.count_label(1) == 40);  // round(119*0.34)
  CHECK(c.count_label(0) == 79);
  CHECK(c.provenance == Provenance::synthetic);
  c.check_unique_ids();
}

TEST_CASE("a cohort of two always holds one of each class") {
  Cohort c = generate_synthetic_cohort(2, 4, 4, 4, 123, 0.01);
  CHECK(c.count_label(0) == 1);
  CHECK(c.count_label(1) == 1);
}

TEST_CASE("labels, mrs and volumes are mutually consistent") {
  Cohort c = generate_synthetic_cohort(10, 8, 8, 6, 31);
  for (const auto& rec : c.patients) {
    CHECK(rec.binary_label == binarize_mrs(rec.mrs));
    if (rec.binary_label == 0) CHECK(rec.mrs <= 2);
    else CHECK(rec.mrs >= 3);
    for (const auto& v : rec.volumes) {
      CHECK(v.nx == 8);
      CHECK(v.ny == 8);
      CHECK(v.nz == 6);
      for (float x : v.voxels) {
        CHECK(x >= 0.0f);
        CHECK(x <= 1.0f);
      }
    }
  }
}

TEST_CASE("generation is deterministic per seed") {
  Cohort a = generate_synthetic_cohort(4, 6, 6, 4, 99);
  Cohort b = generate_synthetic_cohort(4, 6, 6, 4, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.patients[i].id == b.patients[i].id);
    CHECK(a.patients[i].mrs == b.patients[i].mrs);
    for (std::size_t m = 0; m < 5; ++m)
      CHECK(a.patients[i].volumes[m].voxels == b.patients[i].volumes[m].voxels);
  }
  Cohort other = generate_synthetic_cohort(4, 6, 6, 4, 100);
  bool differs = false;
  for (std::size_t i = 0; i < a.size() && !differs; ++i)
    differs = a.patients[i].volumes[0].voxels != other.patients[i].volumes[0].voxels;
  CHECK(differs);
}

TEST_CASE("degenerate generation parameters are usage errors") {
  CHECK(kind_of([&] { generate_synthetic_cohort(1, 8, 8, 8, 0); }) == ErrKind::usage);
  CHECK(kind_of([&] { generate_synthetic_cohort(4, 3, 8, 8, 0); }) == ErrKind::usage);
  CHECK(kind_of([&] { generate_synthetic_cohort(4, 8, 8, 3, 0); }) == ErrKind::usage);
  CHECK(kind_of([&] { generate_synthetic_cohort(4, 8, 8, 8, 0, 0.0); }) == ErrKind::usage);
  CHECK(kind_of([&] { generate_synthetic_cohort(4, 8, 8, 8, 0, 1.0); }) == ErrKind::usage);
}

TEST_CASE("the two classes separate by a clear intensity margin") {
  // Statistic: mean normalized intensity within the central ball that
  // contains every jittered lesion core, averaged over modalities. The
  // generator promises a between-class margin of at least 0.08.
  Cohort c = generate_synthetic_cohort(24, 32, 32, 12, 7);
  double class_sum[2] = {0.0, 0.0};
  int class_n[2] = {0, 0};
  const double r = 0.35 * 12;
  for (const auto& rec : c.patients) {
    double stat = 0.0;
    for (const auto& v : rec.volumes) {
      double acc = 0.0;
      int n = 0;
      for (int z = 0; z < v.nz; ++z)
        for (int y = 0; y < v.ny; ++y)
          for (int x = 0; x < v.nx; ++x) {
            const double dx = x - v.nx / 2.0;
            const double dy = y - v.ny / 2.0;
            const double dz = z - v.nz / 2.0;
            if (dx * dx + dy * dy + dz * dz < r * r) {
              acc += v.at(x, y, z);
              ++n;
            }
          }
      stat += acc / n;
    }
    class_sum[rec.binary_label] += stat / 5.0;
    ++class_n[rec.binary_label];
  }
  REQUIRE(class_n[0] > 0);
  REQUIRE(class_n[1] > 0);
  const double margin =
      class_sum[0] / class_n[0] - class_sum[1] / class_n[1];
  CHECK(std::abs(margin) >= 0.08);
}
