#include "cache.hpp"

#include <atomic>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace loop3pt::cli {

namespace fs = std::filesystem;

std::string cell_identity(const CorrelatorSpec& s) {
  std::ostringstream os;
  os << std::setprecision(17) << kEngineVersion << "|" << to_string(s.model) << "|beta_sq=" << s.beta_sq;
  for (const FieldLabel& f : s.fields) os << "|" << f.describe() << (f.is_leg() ? "L" : f.is_identity() ? "I" : "D");
  os << "|L=" << s.L << "|M=" << s.rows() << "|digits=" << s.precision.significant_digits;
  os << "|enclosure=" << (s.enclosure ? 1 : 0);
  if (s.scaling) os << "|scaling=" << s.scaling->alpha << "," << s.scaling->f;
  return os.str();
}

std::string cell_key(const CorrelatorSpec& spec) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : cell_identity(spec)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ostringstream name;
  name << path.filename().string() << ".tmp." << ::getpid() << "." << counter++;
  const fs::path tmp = path.parent_path() / name.str();
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

CellCache::CellCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::optional<nlohmann::json> CellCache::load(const std::string& key) const {
  const fs::path p = dir_ / (key + ".json");
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("engine", "") != kEngineVersion) return std::nullopt;
    return j;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void CellCache::store(const std::string& key, const nlohmann::json& record) const {
  nlohmann::json stamped = record;
  stamped["engine"] = kEngineVersion;
  write_atomic(dir_ / (key + ".json"), stamped.dump(2) + "\n");
}

}  // namespace loop3pt::cli
