#include "ttl/run_record.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ttl/error.hpp"

#ifndef TTL_VERSION
#define TTL_VERSION "0.0.0"
#endif

namespace ttl {

using nlohmann::json;

double ScalingFit::get(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidArgument("fit has no coefficient " + name);
  return coef[static_cast<std::size_t>(it - names.begin())];
}

double ScalingFit::get_stderr(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidArgument("fit has no coefficient " + name);
  return stderr[static_cast<std::size_t>(it - names.begin())];
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_config(const std::map<std::string, std::string>& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t RunRecord::config_hash() const {
  return fnv1a64(experiment + "\n" + canonical_config(config) + "seed=" + std::to_string(seed));
}

std::vector<const RawValue*> RunRecord::select(const std::string& quantity) const {
  std::vector<const RawValue*> out;
  for (const auto& r : rows)
    if (r.quantity == quantity) out.push_back(&r);
  return out;
}

std::vector<double> RunRecord::t_values(const std::string& quantity) const {
  std::vector<double> ts;
  for (const auto* r : select(quantity)) ts.push_back(r->t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

std::string code_version() { return TTL_VERSION; }

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

namespace {

const char* kRawHeader = "t,replicate,quantity,value,stderr,method,param,seed_root,seed_stream";
const char* kFitHeader = "model,name,coef,stderr,r2";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw FormatError("record: bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
    throw FormatError("record: bad integer '" + s + "'");
  return v;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw FormatError("record: cannot open " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw FormatError("record: cannot write " + p.string());
  os << content;
}

}  // namespace

void write_raw_csv(std::ostream& os, const RunRecord& rec) {
  os << kRawHeader << '\n';
  for (const auto& r : rec.rows)
    os << format_double(r.t) << ',' << r.replicate << ',' << r.quantity << ',' << format_double(r.value)
       << ',' << format_double(r.stderr) << ',' << r.method << ',' << format_double(r.param) << ','
       << r.seed.root << ',' << r.seed.stream << '\n';
}

void write_fits_csv(std::ostream& os, const RunRecord& rec) {
  os << kFitHeader << '\n';
  for (const auto& f : rec.fits)
    for (std::size_t i = 0; i < f.names.size(); ++i)
      os << f.model << ',' << f.names[i] << ',' << format_double(f.coef[i]) << ','
         << format_double(f.stderr[i]) << ',' << format_double(f.r2) << '\n';
}

void persist(const RunRecord& rec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream raw, fits;
  write_raw_csv(raw, rec);
  write_fits_csv(fits, rec);
  json manifest;
  manifest["experiment"] = rec.experiment;
  manifest["config"] = rec.config;
  manifest["config_hash"] = hex64(rec.config_hash());
  manifest["seed"] = rec.seed;
  manifest["code_version"] = rec.code_version;
  manifest["created_at"] = rec.created_at;
  manifest["tables"] = json::array({"raw.csv", "fits.csv"});
  manifest["table_hashes"] = {{"raw.csv", hex64(fnv1a64(raw.str()))},
                              {"fits.csv", hex64(fnv1a64(fits.str()))}};
  write_file(dir / "raw.csv", raw.str());
  write_file(dir / "fits.csv", fits.str());
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

RunRecord load(const std::filesystem::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("record: manifest is not valid JSON: ") + e.what());
  }
  RunRecord rec;
  try {
    rec.experiment = manifest.at("experiment").get<std::string>();
    rec.config = manifest.at("config").get<std::map<std::string, std::string>>();
    rec.seed = manifest.at("seed").get<std::uint64_t>();
    rec.code_version = manifest.at("code_version").get<std::string>();
    rec.created_at = manifest.at("created_at").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("record: manifest field missing: ") + e.what());
  }
  if (manifest.value("config_hash", std::string{}) != hex64(rec.config_hash()))
    throw FormatError("record: config hash mismatch");

  auto tables = manifest.value("table_hashes", json::object());
  std::string raw = read_file(dir / "raw.csv");
  std::string fits = read_file(dir / "fits.csv");
  if (tables.value("raw.csv", std::string{}) != hex64(fnv1a64(raw)))
    throw FormatError("record: raw.csv does not match its manifest hash");
  if (tables.value("fits.csv", std::string{}) != hex64(fnv1a64(fits)))
    throw FormatError("record: fits.csv does not match its manifest hash");

  std::istringstream rs(raw);
  std::string line;
  if (!std::getline(rs, line) || line != kRawHeader) throw FormatError("record: bad raw.csv header");
  while (std::getline(rs, line)) {
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 9) throw FormatError("record: raw.csv row has wrong field count");
    RawValue v;
    v.t = parse_double(f[0]);
    v.replicate = parse_u64(f[1]);
    v.quantity = f[2];
    v.value = parse_double(f[3]);
    v.stderr = parse_double(f[4]);
    v.method = f[5];
    v.param = parse_double(f[6]);
    v.seed = {parse_u64(f[7]), parse_u64(f[8])};
    rec.rows.push_back(std::move(v));
  }
  std::istringstream fs(fits);
  if (!std::getline(fs, line) || line != kFitHeader) throw FormatError("record: bad fits.csv header");
  while (std::getline(fs, line)) {
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 5) throw FormatError("record: fits.csv row has wrong field count");
    if (rec.fits.empty() || rec.fits.back().model != f[0]) {
      rec.fits.emplace_back();
      rec.fits.back().model = f[0];
    }
    auto& fit = rec.fits.back();
    fit.names.push_back(f[1]);
    fit.coef.push_back(parse_double(f[2]));
    fit.stderr.push_back(parse_double(f[3]));
    fit.r2 = parse_double(f[4]);
  }
  return rec;
}

}  // namespace ttl
