#pragma once

#include "loop3pt/correlator/correlator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace loop3pt::cli {

// A field as written in a config: "leg R S", "diag S" or "id" (the identity at
// whatever β² the cell uses).
struct FieldSpec {
  enum class Kind { Leg, Diagonal, Identity };
  Kind kind = Kind::Identity;
  double r = 0.0;
  double s = 0.0;

  FieldLabel at(const ModelParams& p) const;
  std::string text() const;
  static FieldSpec parse(const std::string& text);
};

struct TripleConfig {
  std::string name;
  std::array<FieldSpec, 3> fields;
  std::optional<Scaling> scaling;
  bool enclosure = false;
  int line = 0;  // line of the [triple] header, for diagnostics
};

struct RunConfig {
  ModelKind model = ModelKind::On;
  std::vector<double> beta_sq;
  std::optional<std::array<double, 3>> beta_grid;  // start, stop, step, when given as a grid
  std::vector<int> sizes;
  int rows = 0;           // fixed M; 0 selects rows_per_site·L
  int rows_per_site = 20;
  int digits = 30;
  std::optional<int> loops_m;  // also report p^(m) in the omega verb
  std::optional<std::pair<int, int>> window;
  int oracle_half_rows = 1;
  std::vector<TripleConfig> triples;

  // Throws ConfigError with line/field diagnostics.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string serialize() const;

  int rows_for(int L) const { return rows > 0 ? rows : rows_per_site * L; }
  CorrelatorSpec spec(const TripleConfig& t, double beta_sq, int L) const;
  // Checks that every triple is admissible at every grid point and size.
  void validate_cells() const;
};

}  // namespace loop3pt::cli
