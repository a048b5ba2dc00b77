#include <doctest.h>

#include "cache.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "loop3pt/correlator/record.hpp"
#include "loop3pt/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace loop3pt;
using namespace loop3pt::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("loop3pt_test_" + name + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string column(const std::vector<std::vector<std::string>>& rows, std::size_t r, const std::string& name) {
  const auto& head = rows.at(0);
  const auto it = std::find(head.begin(), head.end(), name);
  REQUIRE(it != head.end());
  return rows.at(r).at(static_cast<std::size_t>(it - head.begin()));
}

const char* kPsuConfig = R"(# four-site check
model = psu
beta_sq = 2/3
sizes = 4
M = 80

[triple]
name = legs111
field1 = leg 1 0
field2 = leg 1 0
field3 = leg 1 0
)";

}  // namespace

TEST_CASE("config parse and serialize round-trip") {
  const char* text = R"(model = on
beta_sq_grid = 0.6 1.0 0.2
sizes = 4 5 6
M_per_site = 25
digits = 40
loops_m = 1
window = 4 6
oracle_half_rows = 2

[triple]
name = spin
field1 = leg 1/2 0
field2 = leg 1 0
field3 = leg 3/2 2/3
scaling = -1 0.70710678118654757

[triple]
field1 = leg 1 0
field2 = diag 0.5
field3 = leg 1 0
)";
  const RunConfig a = RunConfig::parse(text);
  CHECK(a.beta_sq.size() == 3);
  CHECK(a.beta_sq[2] == doctest::Approx(1.0));
  CHECK(a.rows_for(6) == 150);
  CHECK(a.triples.size() == 2);
  CHECK(a.triples[0].fields[2].s == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(a.triples[1].fields[1].kind == FieldSpec::Kind::Diagonal);
  const std::string once = a.serialize();
  const RunConfig b = RunConfig::parse(once);
  CHECK(b.serialize() == once);
  CHECK(b.beta_sq == a.beta_sq);
  CHECK(b.triples[0].scaling->alpha == -1);
}

TEST_CASE("config errors carry line and field") {
  auto message = [](const std::string& text) {
    try {
      RunConfig::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("model = on\nbeta_sq =\n[triple]\nfield1 = id\nfield2 = id\nfield3 = id\n").find("line 2, field 'beta_sq'") !=
        std::string::npos);
  CHECK(message("model = on\nbeta_sq = 0.8\nfoo = 1\n").find("line 3, field 'foo'") != std::string::npos);
  CHECK(message("model = on\nbeta_sq = 0.8\n[triple]\nfield1 = leg 1 0\nfield2 = leg x 0\n").find("line 5, field 'field2'") !=
        std::string::npos);
  CHECK(message("model = on\nbeta_sq = 0.8\n[triple]\nfield1 = leg 1 0\n").find("field2") != std::string::npos);
  CHECK(message("model = on\n[triple]\nfield1 = id\nfield2 = id\nfield3 = id\n").find("empty grid") != std::string::npos);
  CHECK(message("model = potts\n").find("line 1, field 'model'") != std::string::npos);

  RunConfig bad = RunConfig::parse("model = on\nbeta_sq = 0.8\nsizes = 4\n[triple]\nfield1 = leg 1/2 0\nfield2 = leg 1/2 0\nfield3 = leg 2 0\n");
  CHECK_THROWS_AS(bad.validate_cells(), ConfigError);
}

TEST_CASE("omega verb") {
  const fs::path out = scratch_dir("omega");
  const RunConfig one = RunConfig::parse("model = on\nbeta_sq = 3/2\n[triple]\nfield1 = leg 1 0\nfield2 = leg 1 0\nfield3 = leg 1 0\n");
  CHECK(cmd_omega(one, Options{out, 1, false}) == kOk);
  auto rows = read_csv(out / "omega.csv");
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(std::stod(column(rows, 1, "omega")) - 1.20899262768922) < 1e-12);

  const RunConfig grid = RunConfig::parse(
      "model = on\nbeta_sq_grid = 0.6 1.0 0.2\nloops_m = 1\n[triple]\nfield1 = leg 1 0\nfield2 = leg 1 0\nfield3 = leg 1 0\n");
  CHECK(cmd_omega(grid, Options{out, 1, false}) == kOk);
  rows = read_csv(out / "omega.csv");
  CHECK(rows.size() == 4);
  const double n = std::stod(column(rows, 2, "n"));
  CHECK(std::stod(column(rows, 2, "p_m")) == doctest::Approx(std::stod(column(rows, 2, "omega")) / std::sqrt(n)).epsilon(1e-12));
  fs::remove_all(out);
}

TEST_CASE("lattice verb, cache and compare") {
  const fs::path out = scratch_dir("lattice");
  RunConfig cfg = RunConfig::parse(kPsuConfig);
  CHECK(cmd_lattice(cfg, Options{out, 1, false}) == kOk);
  auto rows = read_csv(out / "lattice.csv");
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(column(rows, 1, "C123_re")) == doctest::Approx(5 / (3 * std::sqrt(3.0))).epsilon(1e-10));
  const std::string first = slurp(out / "lattice.csv");
  const auto stamp = fs::last_write_time(out / "cells" / (column(rows, 1, "key") + ".json"));

  // A warm rerun reads every cell from the cache.
  CHECK(cmd_lattice(cfg, Options{out, 1, true}) == kOk);
  CHECK(slurp(out / "lattice.csv") == first);
  CHECK(fs::last_write_time(out / "cells" / (column(rows, 1, "key") + ".json")) == stamp);

  // A larger sweep only computes the missing cells.
  cfg = RunConfig::parse(std::string(kPsuConfig) + "\n");
  cfg.sizes = {4, 6};
  CHECK(cmd_lattice(cfg, Options{out, 2, true}) == kOk);
  CHECK(fs::last_write_time(out / "cells" / (column(rows, 1, "key") + ".json")) == stamp);
  rows = read_csv(out / "lattice.csv");
  CHECK(rows.size() == 3);

  CHECK(cmd_compare(cfg, Options{out, 1, false}) == kOk);
  const auto cmp = read_csv(out / "compare.csv");
  REQUIRE(cmp.size() == 2);
  CHECK(column(cmp, 1, "L_min") == "4");
  CHECK(column(cmp, 1, "L_max") == "6");
  CHECK(fs::exists(out / "plot_legs111.dat"));

  cfg.sizes = {4, 6, 8};
  CHECK(cmd_compare(cfg, Options{out, 1, false}) == kPartial);
  fs::remove_all(out);
}

TEST_CASE("failed cells are kept on resume and retried otherwise") {
  const fs::path out = scratch_dir("fail");
  const RunConfig cfg = RunConfig::parse(kPsuConfig);
  const std::string key = cell_key(cfg.spec(cfg.triples[0], cfg.beta_sq[0], 4));
  CellCache(out / "cells").store(key, {{"status", "failed"}, {"error", "interrupted"}, {"key", key}});

  CHECK(cmd_lattice(cfg, Options{out, 1, true}) == kPartial);
  auto rows = read_csv(out / "lattice.csv");
  CHECK(column(rows, 1, "status") == "failed: interrupted");

  CHECK(cmd_lattice(cfg, Options{out, 1, false}) == kOk);
  rows = read_csv(out / "lattice.csv");
  CHECK(column(rows, 1, "status") == "ok");
  fs::remove_all(out);
}

TEST_CASE("oracle verb") {
  const fs::path out = scratch_dir("oracle");
  const RunConfig cfg = RunConfig::parse(
      "model = on\nbeta_sq = 0.8\nsizes = 3\noracle_half_rows = 1\n[triple]\nfield1 = leg 1 0\nfield2 = leg 1 0\nfield3 = leg 1 0\n");
  CHECK(cmd_oracle(cfg, Options{out, 1, false}) == kOk);
  const auto rows = read_csv(out / "oracle.csv");
  CHECK(column(rows, 1, "status") == "ok");
  fs::remove_all(out);
}

TEST_CASE("cache keys and records") {
  RunConfig cfg = RunConfig::parse(kPsuConfig);
  const CorrelatorSpec a = cfg.spec(cfg.triples[0], cfg.beta_sq[0], 4);
  CorrelatorSpec b = a;
  CHECK(cell_key(a) == cell_key(b));
  CHECK(cell_key(a).size() == 16);
  b.M = 81;
  CHECK(cell_key(a) != cell_key(b));
  b = a;
  b.precision.significant_digits = 50;
  CHECK(cell_key(a) != cell_key(b));
  CHECK(cell_identity(a).find(kEngineVersion) != std::string::npos);

  const fs::path dir = scratch_dir("cache");
  CellCache cache(dir);
  const RunResult r = c123(a);
  nlohmann::json rec = to_json(r);
  for (const char* key : {"model", "beta_sq", "n", "fields", "L", "M", "Z", "C123", "abs_C123", "wall_time_s"}) {
    CHECK(rec.contains(key));
  }
  CHECK(rec["fields"].size() == 3);
  CHECK(rec["Z"].contains("z000"));
  cache.store(cell_key(a), rec);
  const auto back = cache.load(cell_key(a));
  REQUIRE(back.has_value());
  CHECK((*back)["C123"]["re"].get<double>() == r.c123_re);

  nlohmann::json stale = *back;
  stale["engine"] = "some-older-engine";
  std::ofstream(dir / (cell_key(a) + ".json")) << stale.dump();
  CHECK_FALSE(cache.load(cell_key(a)).has_value());
  fs::remove_all(dir);
}
