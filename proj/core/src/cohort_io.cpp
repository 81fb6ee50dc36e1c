#include "ae2lstm/cohort_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ae2lstm/error.hpp"
#include "ae2lstm/nifti.hpp"

namespace fs = std::filesystem;

namespace ae2lstm {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::string& origin) {
  std::vector<ManifestEntry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;

    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 2 + kNumModalities)
      throw_data(origin + " line " + std::to_string(line_no) + ": expected " +
                 std::to_string(2 + kNumModalities) + " tab-separated fields, got " +
                 std::to_string(fields.size()));

    ManifestEntry e;
    e.id = fields[0];
    if (e.id.empty())
      throw_data(origin + " line " + std::to_string(line_no) + ": empty patient id");
    for (std::size_t m = 0; m < kNumModalities; ++m) {
      e.paths[m] = fields[1 + m];
      if (e.paths[m].empty())
        throw_data(origin + " line " + std::to_string(line_no) + ": empty " +
                   to_string(Modality(m)) + " path");
    }

    const std::string& mrs_field = fields[1 + kNumModalities];
    std::size_t used = 0;
    int mrs = -1;
    try {
      mrs = std::stoi(mrs_field, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != mrs_field.size() || mrs < 0 || mrs > 6)
      throw_data(origin + " line " + std::to_string(line_no) + ": mRS '" +
                 mrs_field + "' is not an integer in 0..6");
    e.mrs = mrs;
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw_data(origin + ": no patient lines");
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open manifest " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path);
}

Cohort load_cohort(const std::string& manifest_path) {
  const std::vector<ManifestEntry> entries = load_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();

  Cohort cohort;
  cohort.provenance = Provenance::ingested;
  cohort.patients.reserve(entries.size());
  for (const ManifestEntry& e : entries) {
    PatientRecord rec;
    rec.id = e.id;
    rec.mrs = e.mrs;
    rec.binary_label = binarize_mrs(e.mrs);
    for (Modality m : kAllModalities) {
      const fs::path p = base / e.paths[std::size_t(m)];
      std::error_code ec;
      if (!fs::exists(p, ec))
        throw_data("patient " + e.id + ": missing " + to_string(m) +
                   " volume " + p.string());
      Volume v;
      try {
        v = nifti::parse_file(p.string());
      } catch (const Error& err) {
        throw Error(err.kind(), "patient " + e.id + " " + to_string(m) +
                                    " volume: " + err.what());
      }
      v.modality = m;
      rec.volumes[std::size_t(m)] = normalize_volume(v);
    }
    rec.check_consistent();
    cohort.patients.push_back(std::move(rec));
  }
  cohort.check_unique_ids();
  return cohort;
}

std::string write_cohort(const Cohort& cohort, const std::string& dir) {
  if (cohort.patients.empty()) throw_usage("write_cohort: empty cohort");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_io("cannot create directory " + dir + ": " + ec.message());

  std::ostringstream manifest;
  manifest << "# id\tadc\tcbf\tcbv\tdwi\ttmax\tmrs\n";
  for (const PatientRecord& rec : cohort.patients) {
    manifest << rec.id;
    for (Modality m : kAllModalities) {
      const std::string name =
          rec.id + "_" + to_string(m) + ".nii";
      nifti::write_volume_file(rec.volumes[std::size_t(m)],
                               (fs::path(dir) / name).string());
      manifest << '\t' << name;
    }
    manifest << '\t' << rec.mrs << '\n';
  }

  const std::string manifest_path = (fs::path(dir) / "manifest.tsv").string();
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw_io("cannot open " + manifest_path + " for writing");
  out << manifest.str();
  out.flush();
  if (!out) throw_io("write failed for " + manifest_path);
  return manifest_path;
}

}  // namespace ae2lstm
