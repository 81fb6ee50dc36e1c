#include "ae2lstm/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "ae2lstm/error.hpp"

namespace ae2lstm {

namespace {

constexpr char kMagic[4] = {'A', 'E', '2', 'L'};

class Writer {
 public:
  explicit Writer(const std::string& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw_io("cannot open " + path + " for writing");
  }

  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out_.write(reinterpret_cast<const char*>(b), 4);
  }

  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), std::streamsize(n));
  }

  void matrix(const MatX<float>& m) {
    u32(std::uint32_t(m.rows()));
    u32(std::uint32_t(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f32(m(r, c));
  }

  void close() {
    out_.flush();
    if (!out_) throw_io("write failed for " + path_);
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open " + path);
    buf_.assign(std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>());
  }

  std::uint32_t u32() {
    if (pos_ + 4 > buf_.size())
      throw_parse("checkpoint " + path_ + " truncated at byte " +
                  std::to_string(pos_));
    const auto* b = reinterpret_cast<const unsigned char*>(buf_.data() + pos_);
    pos_ += 4;
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
           std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
  }

  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::string str(std::size_t n) {
    if (pos_ + n > buf_.size())
      throw_parse("checkpoint " + path_ + " truncated at byte " +
                  std::to_string(pos_));
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  MatX<float> matrix() {
    const std::uint32_t rows = u32();
    const std::uint32_t cols = u32();
    if (rows == 0 || cols == 0)
      throw_parse("checkpoint " + path_ + ": zero-sized matrix");
    MatX<float> m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) m(Eigen::Index(r), Eigen::Index(c)) = f32();
    return m;
  }

  // Reads a matrix and enforces its shape against the receiving parameter.
  void matrix_into(MatX<float>& dst, const char* what) {
    const MatX<float> m = matrix();
    if (m.rows() != dst.rows() || m.cols() != dst.cols())
      throw_parse("checkpoint " + path_ + ": " + what + " is " +
                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                  " but the model expects " + std::to_string(dst.rows()) + "x" +
                  std::to_string(dst.cols()));
    dst = m;
  }

  void expect_header(CheckpointKind expected) {
    if (buf_.size() < 12)
      throw_parse("checkpoint " + path_ + " is too short for a header");
    if (std::memcmp(buf_.data(), kMagic, 4) != 0)
      throw_parse(path_ + " is not an AE2L checkpoint (bad magic)");
    pos_ = 4;
    const std::uint32_t version = u32();
    if (version != kCheckpointVersion)
      throw_compat("checkpoint " + path_ + " has format version " +
                   std::to_string(version) + ", this build reads version " +
                   std::to_string(kCheckpointVersion));
    const std::uint32_t kind = u32();
    if (kind != std::uint32_t(expected))
      throw_compat("checkpoint " + path_ + " holds a " +
                   to_string(CheckpointKind(kind)) + " model, expected " +
                   to_string(expected));
  }

  CheckpointKind header_kind() {
    if (buf_.size() < 12)
      throw_parse("checkpoint " + path_ + " is too short for a header");
    if (std::memcmp(buf_.data(), kMagic, 4) != 0)
      throw_parse(path_ + " is not an AE2L checkpoint (bad magic)");
    pos_ = 4;
    const std::uint32_t version = u32();
    if (version != kCheckpointVersion)
      throw_compat("checkpoint " + path_ + " has format version " +
                   std::to_string(version) + ", this build reads version " +
                   std::to_string(kCheckpointVersion));
    return CheckpointKind(u32());
  }

  void expect_consumed() {
    if (pos_ != buf_.size())
      throw_parse("checkpoint " + path_ + " has " +
                  std::to_string(buf_.size() - pos_) + " trailing bytes");
  }

 private:
  std::string path_;
  std::string buf_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, CheckpointKind kind) {
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(std::uint32_t(kind));
}

void write_ae_body(Writer& w, const SparseAe<float>& ae) {
  w.f32(ae.hyper().rho);
  w.f32(ae.hyper().beta);
  w.f32(ae.hyper().lambda);
  w.matrix(ae.encoder_w().values);
  w.matrix(ae.encoder_b().values);
  w.matrix(ae.decoder_w().values);
  w.matrix(ae.decoder_b().values);
}

SparseAe<float> read_ae_body(Reader& r, const std::string& name) {
  SparseAeHyper<float> hyper;
  hyper.rho = r.f32();
  hyper.beta = r.f32();
  hyper.lambda = r.f32();
  const MatX<float> enc_w = r.matrix();
  SparseAe<float> ae(enc_w.cols(), enc_w.rows(), hyper, name);
  ae.encoder_w().values = enc_w;
  r.matrix_into(ae.encoder_b().values, "encoder bias");
  r.matrix_into(ae.decoder_w().values, "decoder weights");
  r.matrix_into(ae.decoder_b().values, "decoder bias");
  return ae;
}

}  // namespace

const char* to_string(CheckpointKind k) {
  switch (k) {
    case CheckpointKind::sparse_ae: return "sparse_ae";
    case CheckpointKind::fusion: return "fusion";
    case CheckpointKind::lstm: return "lstm";
    case CheckpointKind::feature_cache: return "feature_cache";
  }
  return "unknown";
}

CheckpointKind peek_checkpoint_kind(const std::string& path) {
  Reader r(path);
  return r.header_kind();
}

void save_sparse_ae(const std::string& path, const SparseAe<float>& ae) {
  Writer w(path);
  write_header(w, CheckpointKind::sparse_ae);
  write_ae_body(w, ae);
  w.close();
}

SparseAe<float> load_sparse_ae(const std::string& path) {
  Reader r(path);
  r.expect_header(CheckpointKind::sparse_ae);
  SparseAe<float> ae = read_ae_body(r, "ae");
  r.expect_consumed();
  return ae;
}

void save_fusion(const std::string& path, const FusionStack<float>& stack) {
  Writer w(path);
  write_header(w, CheckpointKind::fusion);
  w.u32(std::uint32_t(stack.slice_dim()));
  w.u32(std::uint32_t(stack.d()));
  w.u32(std::uint32_t(stack.d_final()));
  for (Modality m : kAllModalities) write_ae_body(w, stack.level1(m));
  write_ae_body(w, stack.level2());
  w.close();
}

FusionStack<float> load_fusion(const std::string& path) {
  Reader r(path);
  r.expect_header(CheckpointKind::fusion);
  const std::uint32_t slice_dim = r.u32();
  const std::uint32_t d = r.u32();
  const std::uint32_t d_final = r.u32();

  // Hyperparameters live in the per-AE bodies; seed the stack with the
  // first one after reading it.
  FusionStack<float> stack;
  std::array<SparseAe<float>, kNumModalities> level1;
  for (Modality m : kAllModalities)
    level1[std::size_t(m)] =
        read_ae_body(r, std::string("l1.") + to_string(m));
  SparseAe<float> level2 = read_ae_body(r, "l2");
  r.expect_consumed();

  stack = FusionStack<float>(Eigen::Index(slice_dim), Eigen::Index(d),
                             Eigen::Index(d_final), level1[0].hyper());
  for (Modality m : kAllModalities) {
    SparseAe<float>& src = level1[std::size_t(m)];
    if (src.input_dim() != Eigen::Index(slice_dim) ||
        src.code_dim() != Eigen::Index(d))
      throw_parse("checkpoint " + path + ": level-1 " +
                  std::string(to_string(m)) + " AE is " +
                  std::to_string(src.input_dim()) + "->" +
                  std::to_string(src.code_dim()) + " but the header says " +
                  std::to_string(slice_dim) + "->" + std::to_string(d));
    stack.level1(m) = std::move(src);
  }
  if (level2.input_dim() != Eigen::Index(kNumModalities) * Eigen::Index(d) ||
      level2.code_dim() != Eigen::Index(d_final))
    throw_parse("checkpoint " + path + ": level-2 AE is " +
                std::to_string(level2.input_dim()) + "->" +
                std::to_string(level2.code_dim()) + " but the header says " +
                std::to_string(kNumModalities * d) + "->" +
                std::to_string(d_final));
  stack.level2() = std::move(level2);
  return stack;
}

void save_lstm(const std::string& path, const LstmModel<float>& model) {
  Writer w(path);
  write_header(w, CheckpointKind::lstm);
  w.u32(std::uint32_t(model.input_dim()));
  w.u32(std::uint32_t(model.hidden_dim()));
  for (const ParamMatrix<float>* p : model.params()) w.matrix(p->values);
  w.close();
}

LstmModel<float> load_lstm(const std::string& path) {
  Reader r(path);
  r.expect_header(CheckpointKind::lstm);
  const std::uint32_t input_dim = r.u32();
  const std::uint32_t nh = r.u32();
  if (input_dim == 0 || nh == 0)
    throw_parse("checkpoint " + path + ": zero lstm dimensions");
  LstmModel<float> model{Eigen::Index(input_dim), Eigen::Index(nh)};
  for (ParamMatrix<float>* p : model.params())
    r.matrix_into(p->values, p->name.c_str());
  r.expect_consumed();
  return model;
}

void save_features(const std::string& path,
                   const std::vector<FeatureSequence<float>>& seqs) {
  if (seqs.empty()) throw_usage("feature cache: nothing to save");
  const Eigen::Index dim = seqs[0].steps.empty() ? 0 : seqs[0].steps[0].size();
  for (const auto& s : seqs) {
    if (s.steps.empty())
      throw_usage("feature cache: empty sequence for patient " + s.patient_id);
    for (const auto& step : s.steps)
      if (step.size() != dim)
        throw_usage("feature cache: inconsistent feature dimension for patient " +
                    s.patient_id);
  }

  Writer w(path);
  write_header(w, CheckpointKind::feature_cache);
  w.u32(std::uint32_t(dim));
  w.u32(std::uint32_t(seqs.size()));
  for (const auto& s : seqs) {
    w.u32(std::uint32_t(s.patient_id.size()));
    w.bytes(s.patient_id.data(), s.patient_id.size());
    w.u32(std::uint32_t(s.label));
    w.u32(std::uint32_t(s.steps.size()));
    for (const auto& step : s.steps)
      for (Eigen::Index i = 0; i < dim; ++i) w.f32(step(i));
  }
  w.close();
}

std::vector<FeatureSequence<float>> load_features(const std::string& path) {
  Reader r(path);
  r.expect_header(CheckpointKind::feature_cache);
  const std::uint32_t dim = r.u32();
  const std::uint32_t count = r.u32();
  if (dim == 0 || count == 0)
    throw_parse("checkpoint " + path + ": empty feature cache");

  std::vector<FeatureSequence<float>> seqs;
  seqs.reserve(count);
  for (std::uint32_t s = 0; s < count; ++s) {
    FeatureSequence<float> seq;
    seq.patient_id = r.str(r.u32());
    const std::uint32_t label = r.u32();
    if (label > 1)
      throw_parse("checkpoint " + path + ": label " + std::to_string(label) +
                  " for patient " + seq.patient_id + " is not binary");
    seq.label = int(label);
    const std::uint32_t steps = r.u32();
    if (steps == 0)
      throw_parse("checkpoint " + path + ": empty sequence for patient " +
                  seq.patient_id);
    seq.steps.resize(steps);
    for (std::uint32_t t = 0; t < steps; ++t) {
      VecX<float>& v = seq.steps[t];
      v.resize(Eigen::Index(dim));
      for (std::uint32_t i = 0; i < dim; ++i) v(Eigen::Index(i)) = r.f32();
    }
    seqs.push_back(std::move(seq));
  }
  r.expect_consumed();
  return seqs;
}

}  // namespace ae2lstm
