#pragma once

#include "loop3pt/correlator/correlator.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace loop3pt::cli {

// Bumped whenever engine changes can alter cached numbers.
inline constexpr const char* kEngineVersion = "loop3pt-engine-1";

// Canonical text of everything that determines a cell's result.
std::string cell_identity(const CorrelatorSpec& spec);
// 64-bit FNV-1a of the identity, as 16 hex digits.
std::string cell_key(const CorrelatorSpec& spec);

// Writes through a temporary file and a rename, so readers never see partial files.
void write_atomic(const std::filesystem::path& path, const std::string& content);

class CellCache {
 public:
  explicit CellCache(std::filesystem::path dir);

  std::optional<nlohmann::json> load(const std::string& key) const;
  void store(const std::string& key, const nlohmann::json& record) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace loop3pt::cli
