#include "commands.hpp"

#include "cache.hpp"
#include "loop3pt/analytic/structure_constants.hpp"
#include "loop3pt/correlator/record.hpp"
#include "loop3pt/errors.hpp"
#include "loop3pt/extrapolate/extrapolate.hpp"
#include "loop3pt/oracle/brute_force.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace loop3pt::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

std::string triple_name(const TripleConfig& t, std::size_t index) {
  if (!t.name.empty()) return t.name;
  return "triple" + std::to_string(index + 1);
}

// Runs job(i) for i < count on at most `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  const int k = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < k; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

struct Cell {
  std::size_t triple = 0;
  double beta_sq = 0.0;
  int L = 0;
};

std::vector<Cell> cells_of(const RunConfig& cfg) {
  std::vector<Cell> out;
  for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
    for (double b : cfg.beta_sq) {
      for (int L : cfg.sizes) out.push_back({t, b, L});
    }
  }
  return out;
}

// The number a lattice record contributes to a size series.
double series_value(const nlohmann::json& rec) {
  if (!rec["scaled"].is_null()) return rec["scaled"].get<double>();
  const double im = rec["C123"]["im"].get<double>();
  if (im == 0.0) return rec["C123"]["re"].get<double>();
  return rec["abs_C123"].get<double>();
}

}  // namespace

int cmd_omega(const RunConfig& cfg, const Options& opt) {
  const PrecisionContext pc{cfg.digits, 0.0};
  std::ostringstream csv;
  csv << "triple,beta_sq,n,omega";
  if (cfg.loops_m) csv << ",p_m";
  csv << ",status\n";
  int failures = 0;
  for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
    const TripleConfig& tc = cfg.triples[t];
    for (double b : cfg.beta_sq) {
      const ModelParams p = ModelParams::from_beta_sq(b);
      std::string status = "ok";
      std::string om = "", pm = "";
      try {
        const FieldLabel f1 = tc.fields[0].at(p), f2 = tc.fields[1].at(p), f3 = tc.fields[2].at(p);
        om = num(omega(f1, f2, f3, p, pc));
        if (cfg.loops_m) pm = num(probability_m_loops(f1.r(), f2.r(), f3.r(), *cfg.loops_m, p, pc));
      } catch (const std::exception& e) {
        status = e.what();
        ++failures;
      }
      std::cout << triple_name(tc, t) << "  beta_sq=" << num(b) << "  omega=" << (om.empty() ? "-" : om);
      if (cfg.loops_m) std::cout << "  p_" << *cfg.loops_m << "=" << (pm.empty() ? "-" : pm);
      if (status != "ok") std::cout << "  (" << status << ")";
      std::cout << "\n";
      csv << triple_name(tc, t) << "," << num(b) << "," << num(p.loop_weight) << "," << om;
      if (cfg.loops_m) csv << "," << pm;
      csv << ",\"" << status << "\"\n";
    }
  }
  write_atomic(opt.out / "omega.csv", csv.str());
  return failures ? kPartial : kOk;
}

int cmd_lattice(const RunConfig& cfg, const Options& opt) {
  cfg.validate_cells();
  const CellCache cache(opt.out / "cells");
  const auto cells = cells_of(cfg);
  std::vector<nlohmann::json> records(cells.size());
  std::mutex log_mutex;
  parallel_for(cells.size(), opt.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    const CorrelatorSpec spec = cfg.spec(cfg.triples[c.triple], c.beta_sq, c.L);
    const std::string key = cell_key(spec);
    if (auto hit = cache.load(key)) {
      const bool ok = hit->value("status", "") == "ok";
      if (ok || opt.resume) {
        records[i] = std::move(*hit);
        return;
      }
    }
    nlohmann::json rec;
    try {
      rec = to_json(c123(spec));
      rec["status"] = "ok";
    } catch (const std::exception& e) {
      rec = {{"status", "failed"}, {"error", e.what()}};
    }
    rec["key"] = key;
    rec["identity"] = cell_identity(spec);
    cache.store(key, rec);
    {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "cell " << triple_name(cfg.triples[c.triple], c.triple) << " beta_sq=" << num(c.beta_sq) << " L=" << c.L
                << ": " << (rec["status"] == "ok" ? num(rec["abs_C123"].get<double>()) : rec["error"].get<std::string>())
                << "\n";
    }
    records[i] = std::move(rec);
  });
  std::ostringstream csv;
  csv << "triple,beta_sq,n,L,M,C123_re,C123_im,abs_C123,scaled,digits,cancellation_warning,wall_time_s,key,status\n";
  int failures = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    const nlohmann::json& r = records[i];
    const double n = ModelParams::from_beta_sq(c.beta_sq).loop_weight;
    csv << triple_name(cfg.triples[c.triple], c.triple) << "," << num(c.beta_sq) << "," << num(n) << "," << c.L << ",";
    if (r["status"] == "ok") {
      csv << r["M"].get<int>() << "," << num(r["C123"]["re"].get<double>()) << "," << num(r["C123"]["im"].get<double>())
          << "," << num(r["abs_C123"].get<double>()) << "," << (r["scaled"].is_null() ? "" : num(r["scaled"].get<double>()))
          << "," << r["digits"].get<int>() << "," << (r["cancellation_warning"].get<bool>() ? 1 : 0) << ","
          << num(r["wall_time_s"].get<double>()) << "," << r["key"].get<std::string>() << ",ok\n";
    } else {
      ++failures;
      csv << ",,,,,,,," << r["key"].get<std::string>() << ",\"failed: " << r["error"].get<std::string>() << "\"\n";
    }
  }
  write_atomic(opt.out / "lattice.csv", csv.str());
  return failures ? kPartial : kOk;
}

int cmd_compare(const RunConfig& cfg, const Options& opt) {
  if (cfg.sizes.empty()) throw ConfigError("field 'sizes': empty size list");
  const CellCache cache(opt.out / "cells");
  const PrecisionContext pc{cfg.digits, 0.0};
  std::ostringstream csv;
  csv << "triple,beta_sq,n";
  for (int L : cfg.sizes) csv << ",C_L" << L;
  csv << ",limit,error,omega,ratio,abs_deviation,rel_deviation,L_min,L_max\n";
  int problems = 0;
  for (std::size_t t = 0; t < cfg.triples.size(); ++t) {
    const TripleConfig& tc = cfg.triples[t];
    std::ostringstream plot;
    plot << "# " << triple_name(tc, t) << ": x = n, one column per L, then the extrapolated limit and omega\n# n";
    for (int L : cfg.sizes) plot << " C_L" << L;
    plot << " limit omega\n";
    for (double b : cfg.beta_sq) {
      SizeSeries series;
      std::vector<int> missing;
      CorrelatorSpec spec;
      for (int L : cfg.sizes) {
        spec = cfg.spec(tc, b, L);
        auto rec = cache.load(cell_key(spec));
        if (!rec || rec->value("status", "") != "ok") {
          missing.push_back(L);
          continue;
        }
        series.add(L, series_value(*rec));
      }
      if (!missing.empty()) {
        std::cerr << "missing lattice data for " << triple_name(tc, t) << " at beta_sq=" << num(b) << ", L =";
        for (int L : missing) std::cerr << " " << L;
        std::cerr << " (run the lattice verb first)\n";
        ++problems;
        continue;
      }
      const double n = spec.params().loop_weight;
      try {
        const int lo = cfg.window ? cfg.window->first : series.min_size();
        const int hi = cfg.window ? cfg.window->second : series.max_size();
        const Comparison cmp = compare_with_omega(estimate_limit(series, lo, hi), spec, pc);
        csv << triple_name(tc, t) << "," << num(b) << "," << num(n);
        for (int L : cfg.sizes) csv << "," << num(series.at(L));
        csv << "," << num(cmp.limit) << "," << num(cmp.error) << "," << num(cmp.omega) << "," << num(cmp.ratio) << ","
            << num(cmp.abs_deviation) << "," << num(cmp.rel_deviation) << "," << cmp.l_min << "," << cmp.l_max << "\n";
        plot << num(n);
        for (int L : cfg.sizes) plot << " " << num(series.at(L));
        plot << " " << num(cmp.limit) << " " << num(cmp.omega) << "\n";
        std::cout << triple_name(tc, t) << "  beta_sq=" << num(b) << "  limit=" << num(cmp.limit) << " +- "
                  << num(cmp.error) << "  omega=" << num(cmp.omega) << "  ratio=" << num(cmp.ratio) << "  window=["
                  << cmp.l_min << "," << cmp.l_max << "]\n";
      } catch (const std::exception& e) {
        std::cerr << triple_name(tc, t) << " at beta_sq=" << num(b) << ": " << e.what() << "\n";
        ++problems;
      }
    }
    write_atomic(opt.out / ("plot_" + triple_name(tc, t) + ".dat"), plot.str());
  }
  write_atomic(opt.out / "compare.csv", csv.str());
  return problems ? kPartial : kOk;
}

int cmd_oracle(const RunConfig& cfg, const Options& opt) {
  if (cfg.sizes.empty()) throw ConfigError("field 'sizes': empty size list");
  const auto cells = cells_of(cfg);
  std::vector<std::string> rows(cells.size());
  std::atomic<int> failures{0};
  parallel_for(cells.size(), opt.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    const TripleConfig& tc = cfg.triples[c.triple];
    std::ostringstream row;
    row << triple_name(tc, c.triple) << "," << num(c.beta_sq) << "," << c.L << "," << cfg.oracle_half_rows << ",";
    try {
      CorrelatorSpec spec = cfg.spec(tc, c.beta_sq, c.L);
      spec.M = cfg.oracle_half_rows;
      spec.validate();
      if (spec.has_spin() || spec.enclosure) throw UnsupportedMode("the configuration-sum oracle covers spinless triples only");
      const ModelParams p = spec.params();
      const ZLayout z = ZLayout::of(spec.fields[0], spec.fields[1], spec.fields[2], p);
      oracle::BruteForceSpec bs;
      bs.model = spec.model;
      bs.sites = spec.L;
      bs.half_rows = spec.M;
      bs.rho = weights_for<double>(spec.model, spec.beta_sq).rho;
      bs.n = p.loop_weight;
      bs.w = (z.seam_bottom || z.seam_top) ? z.seam_w : p.loop_weight;
      bs.bottom_legs = z.bottom_legs;
      bs.middle_legs = z.middle_legs;
      bs.top_legs = z.top_legs;
      bs.seam_bottom = z.seam_bottom;
      bs.seam_top = z.seam_top;
      const auto bf = oracle::brute_force_z(bs);
      const Scaled<double> eng = z_markers(spec, z);
      const double e = std::ldexp(eng.mantissa, static_cast<int>(eng.exp2));
      const double rel = std::abs(e - bf.z) / std::max(std::abs(bf.z), 1e-300);
      const bool ok = rel < 1e-10 || (bf.z == 0.0 && e == 0.0);
      if (!ok) ++failures;
      row << bf.configurations << "," << num(bf.z) << "," << num(e) << "," << num(rel) << "," << (ok ? "ok" : "mismatch");
    } catch (const std::exception& ex) {
      ++failures;
      row << ",,,,\"" << ex.what() << "\"";
    }
    rows[i] = row.str();
  });
  std::ostringstream csv;
  csv << "triple,beta_sq,L,half_rows,configurations,brute_force,engine,rel_diff,status\n";
  for (const auto& r : rows) {
    csv << r << "\n";
    std::cout << r << "\n";
  }
  write_atomic(opt.out / "oracle.csv", csv.str());
  return failures ? kPartial : kOk;
}

}  // namespace loop3pt::cli
