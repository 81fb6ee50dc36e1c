#include "ae2lstm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "ae2lstm/error.hpp"
#include "ae2lstm/rng.hpp"

namespace ae2lstm {

namespace {

// Per-modality lesion contrast. Perfusion maps (CBF/CBV/Tmax) get slightly
// different weights than the diffusion maps so the five volumes are not
// copies of each other.
constexpr double kContrast[kNumModalities] = {1.00, 0.85, 0.80, 1.10, 0.95};

// Smooth background: a coarse lattice of uniform noise, trilinearly
// interpolated up to the volume grid.
class SmoothNoise {
 public:
  SmoothNoise(Rng& rng, int lx, int ly, int lz) : lx_(lx), ly_(ly), lz_(lz) {
    lattice_.resize(static_cast<std::size_t>(lx) * ly * lz);
    for (double& v : lattice_) v = 2.0 * rng.real01() - 1.0;
  }

  // u,v,w in [0,1]
  double sample(double u, double v, double w) const {
    const double x = u * (lx_ - 1);
    const double y = v * (ly_ - 1);
    const double z = w * (lz_ - 1);
    const int x0 = std::min(static_cast<int>(x), lx_ - 2);
    const int y0 = std::min(static_cast<int>(y), ly_ - 2);
    const int z0 = std::min(static_cast<int>(z), lz_ - 2);
    const double fx = x - x0;
    const double fy = y - y0;
    const double fz = z - z0;
    double acc = 0.0;
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) *
                             (dz ? fz : 1.0 - fz);
          acc += wgt * at(x0 + dx, y0 + dy, z0 + dz);
        }
    return acc;
  }

 private:
  double at(int x, int y, int z) const {
    return lattice_[(static_cast<std::size_t>(z) * ly_ + y) * lx_ + x];
  }
  int lx_, ly_, lz_;
  std::vector<double> lattice_;
};

Volume make_volume(int nx, int ny, int nz, Modality m, int mrs,
                   double cx, double cy, double cz, Rng& rng) {
  Volume vol;
  vol.nx = nx;
  vol.ny = ny;
  vol.nz = nz;
  vol.modality = m;
  vol.voxels.resize(static_cast<std::size_t>(nx) * ny * nz);

  SmoothNoise background(rng, 5, 5, 3);

  const int min_dim = std::min(nx, std::min(ny, nz));
  const double severity = static_cast<double>(mrs) / 6.0;
  const double radius = (0.05 + 0.20 * severity) * min_dim;
  const double amp =
      kContrast[static_cast<int>(m)] * (0.15 + 0.85 * severity);

  std::size_t idx = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x, ++idx) {
        const double u = nx > 1 ? static_cast<double>(x) / (nx - 1) : 0.0;
        const double v = ny > 1 ? static_cast<double>(y) / (ny - 1) : 0.0;
        const double w = nz > 1 ? static_cast<double>(z) / (nz - 1) : 0.0;
        double val = 0.35 + 0.12 * background.sample(u, v, w) +
                     0.02 * (2.0 * rng.real01() - 1.0);
        const double dx = x - cx;
        const double dy = y - cy;
        const double dz = z - cz;
        const double d2 = dx * dx + dy * dy + dz * dz;
        const double r2 = radius * radius;
        if (d2 < r2) val += amp * (1.0 - d2 / r2);  // smooth radial bump
        vol.voxels[idx] = static_cast<float>(val);
      }

  return normalize_volume(vol);
}

}  // namespace

Cohort generate_synthetic_cohort(int n, int nx, int ny, int nz,
                                 std::uint64_t seed, double poor_fraction) {
  if (n < 2) throw_usage("synthetic cohort needs n >= 2, got " + std::to_string(n));
  if (nx < 4 || ny < 4 || nz < 4)
    throw_usage("synthetic volume dims must each be >= 4, got " +
                std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                std::to_string(nz));
  if (!(poor_fraction > 0.0 && poor_fraction < 1.0))
    throw_usage("poor_fraction must lie in (0, 1)");

  int n_poor = static_cast<int>(std::lround(n * poor_fraction));
  n_poor = std::max(1, std::min(n - 1, n_poor));

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::fill(labels.begin(), labels.begin() + n_poor, 1);
  Rng label_rng(Rng::derive(seed, 0x1abe1));
  label_rng.shuffle(labels);

  Cohort cohort;
  cohort.provenance = Provenance::synthetic;
  cohort.patients.reserve(static_cast<std::size_t>(n));

  for (int p = 0; p < n; ++p) {
    Rng rng(Rng::derive(seed, 0x9a7 + static_cast<std::uint64_t>(p)));

    PatientRecord rec;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%03d", p);
    rec.id = buf;
    rec.binary_label = labels[static_cast<std::size_t>(p)];
    rec.mrs = rec.binary_label == 0 ? static_cast<int>(rng.below(3))
                                    : 3 + static_cast<int>(rng.below(4));

    // One lesion per patient, shared across modalities; jitter the center
    // by up to +-15% of each dimension.
    const double cx = nx / 2.0 + (rng.real01() - 0.5) * 0.30 * nx;
    const double cy = ny / 2.0 + (rng.real01() - 0.5) * 0.30 * ny;
    const double cz = nz / 2.0 + (rng.real01() - 0.5) * 0.30 * nz;

    for (Modality m : kAllModalities) {
      Rng mod_rng(Rng::derive(rng.next_u64(), static_cast<std::uint64_t>(m)));
      rec.volumes[static_cast<std::size_t>(m)] =
          make_volume(nx, ny, nz, m, rec.mrs, cx, cy, cz, mod_rng);
    }
    rec.check_consistent();
    cohort.patients.push_back(std::move(rec));
  }

  cohort.check_unique_ids();
  return cohort;
}

}  // namespace ae2lstm
