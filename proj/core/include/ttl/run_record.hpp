#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ttl/rng.hpp"

namespace ttl {

// One raw Monte Carlo or grid value with the parameters that produced it.
struct RawValue {
  double t = 0.0;
  std::uint64_t replicate = 0;
  std::string quantity;
  double value = 0.0;
  double stderr = 0.0;
  std::string method;
  double param = 0.0;  // grid size or absorption shell, per method
  RngSeed seed;
};

struct ScalingFit {
  std::string model;
  std::vector<std::string> names;
  std::vector<double> coef;
  std::vector<double> stderr;
  double r2 = 0.0;
  std::vector<double> residuals;

  double get(const std::string& name) const;
  double get_stderr(const std::string& name) const;
};

struct RunRecord {
  std::string experiment;
  std::map<std::string, std::string> config;  // fully resolved, flat
  std::uint64_t seed = 0;
  std::string code_version;
  std::string created_at;
  std::vector<RawValue> rows;
  std::vector<ScalingFit> fits;

  std::uint64_t config_hash() const;
  std::vector<const RawValue*> select(const std::string& quantity) const;
  std::vector<double> t_values(const std::string& quantity) const;
};

std::string code_version();
std::uint64_t fnv1a64(const std::string& s);
std::string canonical_config(const std::map<std::string, std::string>& cfg);
std::string format_double(double v);
std::string hex64(std::uint64_t v);

void write_raw_csv(std::ostream& os, const RunRecord& rec);
void write_fits_csv(std::ostream& os, const RunRecord& rec);

// Writes manifest.json, raw.csv and fits.csv under dir.
void persist(const RunRecord& rec, const std::filesystem::path& dir);
// Reads a record back; throws FormatError on truncation or hash mismatch.
RunRecord load(const std::filesystem::path& dir);

}  // namespace ttl
