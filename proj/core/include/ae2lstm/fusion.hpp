#ifndef AE2LSTM_FUSION_HPP
#define AE2LSTM_FUSION_HPP

#include <array>
#include <string>

#include "ae2lstm/features.hpp"
#include "ae2lstm/sparse_ae.hpp"
#include "ae2lstm/volume.hpp"

namespace ae2lstm {

// Two-level autoencoder arrangement: five unimodal AEs (one per Modality,
// in ordinal order) over flattened axial slices, and a second-level AE over
// the concatenation Z1..Z5 of their codes producing the multimodal feature
// Z. The two levels are trained separately, never jointly.
template <typename S>
class FusionStack {
 public:
  FusionStack() = default;
  FusionStack(Eigen::Index slice_dim, Eigen::Index d, Eigen::Index d_final,
              SparseAeHyper<S> hyper) {
    for (Modality m : kAllModalities)
      level1_[std::size_t(m)] = SparseAe<S>(
          slice_dim, d, hyper, std::string("l1.") + to_string(m));
    level2_ = SparseAe<S>(Eigen::Index(kNumModalities) * d, d_final, hyper, "l2");
  }

  Eigen::Index slice_dim() const { return level1_[0].input_dim(); }
  Eigen::Index d() const { return level1_[0].code_dim(); }
  Eigen::Index d_final() const { return level2_.code_dim(); }

  SparseAe<S>& level1(Modality m) { return level1_[std::size_t(m)]; }
  const SparseAe<S>& level1(Modality m) const { return level1_[std::size_t(m)]; }
  SparseAe<S>& level2() { return level2_; }
  const SparseAe<S>& level2() const { return level2_; }

  // Z = level2.encode(concat of level1 codes in Modality order). Pure;
  // safe for concurrent callers. Shape error on any mismatched slice.
  VecX<S> encode_slice(const std::array<VecX<S>, kNumModalities>& bundle) const {
    VecX<S> concat(Eigen::Index(kNumModalities) * d());
    for (Modality m : kAllModalities) {
      const VecX<S>& s = bundle[std::size_t(m)];
      if (s.size() != slice_dim())
        throw_shape(std::string(to_string(m)) + " slice has length " +
                    std::to_string(s.size()) + " but the stack expects " +
                    std::to_string(slice_dim()));
      concat.segment(Eigen::Index(std::size_t(m)) * d(), d()) =
          level1_[std::size_t(m)].encode(s);
    }
    return level2_.encode(concat);
  }

  // One Z per axial slice, ascending slice index (inferior -> superior).
  // With drop_empty, slices whose mean intensity across all five
  // modalities falls below 1e-4 are skipped (off by default: every slice
  // kept, sequence length == slice count).
  FeatureSequence<S> encode_patient(const PatientRecord& rec,
                                    bool drop_empty = false) const {
    rec.check_consistent();
    const Volume& ref = rec.volumes[0];
    if (Eigen::Index(ref.slice_size()) != slice_dim())
      throw_shape("patient " + rec.id + " slices have " +
                  std::to_string(ref.slice_size()) +
                  " pixels but the stack expects " +
                  std::to_string(slice_dim()));

    FeatureSequence<S> seq;
    seq.patient_id = rec.id;
    seq.label = rec.binary_label;
    std::array<VecX<S>, kNumModalities> bundle;
    for (int z = 0; z < ref.nz; ++z) {
      double mean = 0.0;
      for (Modality m : kAllModalities) {
        const float* src = rec.volumes[std::size_t(m)].slice(z);
        VecX<S>& dst = bundle[std::size_t(m)];
        dst.resize(slice_dim());
        for (Eigen::Index i = 0; i < slice_dim(); ++i) {
          dst(i) = S(src[i]);
          mean += double(src[i]);
        }
      }
      mean /= double(kNumModalities) * double(slice_dim());
      if (drop_empty && mean < 1e-4) continue;
      seq.steps.push_back(encode_slice(bundle));
    }
    if (seq.steps.empty())
      throw_data("patient " + rec.id + ": every slice was filtered out");
    return seq;
  }

 private:
  std::array<SparseAe<S>, kNumModalities> level1_;
  SparseAe<S> level2_;
};

template <typename S>
struct FusionConfig {
  SparseAeHyper<S> hyper;
  AeTrainConfig<S> train;  // shared by all six AEs; per-AE streams derived
};

template <typename S>
struct FusionTrainTrace {
  std::array<AeTrainResult<S>, kNumModalities> level1;
  AeTrainResult<S> level2;
};

// Pooled slice sets, one matrix per modality (slice_dim x n_slices, one
// slice per column), index-aligned: column k of every modality comes from
// the same patient and slice position. Trains the five level-1 AEs
// independently, then the level-2 AE on the concatenated training codes.
template <typename S>
FusionStack<S> train_fusion(const std::array<MatX<S>, kNumModalities>& slices,
                            Eigen::Index d, Eigen::Index d_final,
                            const FusionConfig<S>& cfg,
                            FusionTrainTrace<S>* trace = nullptr) {
  const Eigen::Index n = slices[0].cols();
  const Eigen::Index dim = slices[0].rows();
  for (Modality m : kAllModalities) {
    const MatX<S>& s = slices[std::size_t(m)];
    if (s.cols() != n)
      throw_data(std::string("modality slice sets are misaligned: ") +
                 to_string(m) + " has " + std::to_string(s.cols()) +
                 " slices, " + to_string(Modality::ADC) + " has " +
                 std::to_string(n));
    if (s.rows() != dim)
      throw_data(std::string("modality slice sets disagree on pixel count: ") +
                 to_string(m) + " has " + std::to_string(s.rows()) + ", " +
                 to_string(Modality::ADC) + " has " + std::to_string(dim));
  }
  if (n == 0) throw_data("train_fusion: no training slices");

  FusionStack<S> stack(dim, d, d_final, cfg.hyper);

  for (Modality m : kAllModalities) {
    const std::uint64_t ae_seed =
        Rng::derive(cfg.train.seed, 10 + std::uint64_t(m));
    Rng init_rng(Rng::derive(ae_seed, 0));
    stack.level1(m).init(init_rng);
    AeTrainConfig<S> c = cfg.train;
    c.seed = ae_seed;
    AeTrainResult<S> r = stack.level1(m).train(slices[std::size_t(m)], c);
    if (trace) trace->level1[std::size_t(m)] = std::move(r);
  }

  MatX<S> codes(Eigen::Index(kNumModalities) * d, n);
  for (Modality m : kAllModalities)
    codes.middleRows(Eigen::Index(std::size_t(m)) * d, d) =
        stack.level1(m).encode(slices[std::size_t(m)]);

  const std::uint64_t l2_seed = Rng::derive(cfg.train.seed, 20);
  Rng init_rng(Rng::derive(l2_seed, 0));
  stack.level2().init(init_rng);
  AeTrainConfig<S> c = cfg.train;
  c.seed = l2_seed;
  AeTrainResult<S> r = stack.level2().train(codes, c);
  if (trace) trace->level2 = std::move(r);

  return stack;
}

}  // namespace ae2lstm

#endif
