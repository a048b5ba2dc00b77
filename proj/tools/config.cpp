#include "config.hpp"

#include "loop3pt/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace loop3pt::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line;
  if (!key.empty()) os << ", field '" << key << "'";
  os << ": " << msg;
  throw ConfigError(os.str());
}

// Decimal or rational ("2/3") number.
double number(const std::string& w) {
  const auto slash = w.find('/');
  size_t used = 0;
  if (slash == std::string::npos) {
    const double v = std::stod(w, &used);
    if (used != w.size()) throw std::invalid_argument(w);
    return v;
  }
  const double a = std::stod(w.substr(0, slash), &used);
  if (used != slash) throw std::invalid_argument(w);
  const std::string rest = w.substr(slash + 1);
  const double b = std::stod(rest, &used);
  if (used != rest.size() || b == 0) throw std::invalid_argument(w);
  return a / b;
}

int integer(const std::string& w) {
  size_t used = 0;
  const int v = std::stoi(w, &used);
  if (used != w.size()) throw std::invalid_argument(w);
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

FieldLabel FieldSpec::at(const ModelParams& p) const {
  switch (kind) {
    case Kind::Leg:
      return FieldLabel::leg(r, s);
    case Kind::Diagonal:
      return FieldLabel::diagonal(s);
    default:
      return FieldLabel::identity(p);
  }
}

std::string FieldSpec::text() const {
  switch (kind) {
    case Kind::Leg:
      return "leg " + fmt(r) + " " + fmt(s);
    case Kind::Diagonal:
      return "diag " + fmt(s);
    default:
      return "id";
  }
}

FieldSpec FieldSpec::parse(const std::string& text) {
  const auto w = words(text);
  FieldSpec f;
  if (w.size() == 3 && w[0] == "leg") {
    f.kind = Kind::Leg;
    f.r = number(w[1]);
    f.s = number(w[2]);
    (void)FieldLabel::leg(f.r, f.s);
  } else if (w.size() == 2 && (w[0] == "diag" || w[0] == "diagonal")) {
    f.kind = Kind::Diagonal;
    f.s = number(w[1]);
  } else if (w.size() == 1 && (w[0] == "id" || w[0] == "identity")) {
    f.kind = Kind::Identity;
  } else {
    throw std::invalid_argument("expected 'leg R S', 'diag S' or 'id'");
  }
  return f;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  bool have_model = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  TripleConfig* cur = nullptr;
  std::array<bool, 3> have_field{};
  auto close_triple = [&](int at) {
    if (cur == nullptr) return;
    for (int i = 0; i < 3; ++i) {
      if (!have_field[i]) fail(at, "field" + std::to_string(i + 1), "missing in [triple] block opened at line " + std::to_string(cur->line));
    }
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s == "[triple]") {
      close_triple(line);
      c.triples.emplace_back();
      cur = &c.triples.back();
      cur->line = line;
      have_field = {};
      continue;
    }
    if (s.front() == '[') fail(line, "", "unknown section " + s);
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "", "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const auto w = words(value);
    try {
      if (cur != nullptr) {
        if (key == "name") {
          cur->name = value;
        } else if (key == "field1" || key == "field2" || key == "field3") {
          const int i = key.back() - '1';
          cur->fields[i] = FieldSpec::parse(value);
          have_field[i] = true;
        } else if (key == "scaling") {
          if (w.size() != 2) throw std::invalid_argument("expected 'alpha f'");
          Scaling sc{integer(w[0]), number(w[1])};
          if (sc.alpha < -1 || sc.alpha > 1) throw std::invalid_argument("alpha must be -1, 0 or 1");
          cur->scaling = sc;
        } else if (key == "enclosure") {
          if (value != "standard" && value != "none") throw std::invalid_argument("expected 'standard' or 'none'");
          cur->enclosure = value == "standard";
        } else {
          fail(line, key, "unknown key in [triple] block");
        }
        continue;
      }
      if (key == "model") {
        c.model = model_from_string(value);
        have_model = true;
      } else if (key == "beta_sq") {
        if (w.empty()) throw std::invalid_argument("empty list");
        c.beta_sq.clear();
        for (const auto& x : w) c.beta_sq.push_back(number(x));
        c.beta_grid.reset();
      } else if (key == "beta_sq_grid") {
        if (w.size() != 3) throw std::invalid_argument("expected 'start stop step'");
        const double a = number(w[0]), b = number(w[1]), h = number(w[2]);
        if (!(h > 0) || b < a) throw std::invalid_argument("grid needs step > 0 and stop >= start");
        c.beta_grid = std::array<double, 3>{a, b, h};
        c.beta_sq.clear();
        const int count = static_cast<int>(std::floor((b - a) / h + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) c.beta_sq.push_back(a + i * h);
      } else if (key == "sizes") {
        c.sizes.clear();
        for (const auto& x : w) c.sizes.push_back(integer(x));
      } else if (key == "M") {
        c.rows = integer(value);
        if (c.rows < 0) throw std::invalid_argument("M must be >= 0");
      } else if (key == "M_per_site") {
        c.rows_per_site = integer(value);
        if (c.rows_per_site < 1) throw std::invalid_argument("M_per_site must be >= 1");
      } else if (key == "digits") {
        c.digits = integer(value);
      } else if (key == "loops_m") {
        c.loops_m = integer(value);
      } else if (key == "window") {
        if (w.size() != 2) throw std::invalid_argument("expected 'L_min L_max'");
        c.window = std::make_pair(integer(w[0]), integer(w[1]));
      } else if (key == "oracle_half_rows") {
        c.oracle_half_rows = integer(value);
      } else {
        fail(line, key, "unknown key");
      }
    } catch (const ConfigError& e) {
      if (std::string(e.what()).rfind("line ", 0) == 0) throw;
      fail(line, key, e.what());
    } catch (const std::exception& e) {
      fail(line, key, std::string("bad value '") + value + "': " + e.what());
    }
  }
  close_triple(line);
  if (!have_model) fail(line, "model", "missing");
  if (c.beta_sq.empty()) fail(line, "beta_sq", "empty grid");
  if (c.triples.empty()) fail(line, "[triple]", "no field triples");
  PrecisionContext pc{c.digits, 0.0};
  try {
    pc.validate();
  } catch (const std::exception& e) {
    fail(line, "digits", e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os << "model = " << to_string(model) << "\n";
  if (beta_grid) {
    os << "beta_sq_grid = " << fmt((*beta_grid)[0]) << " " << fmt((*beta_grid)[1]) << " " << fmt((*beta_grid)[2]) << "\n";
  } else {
    os << "beta_sq =";
    for (double b : beta_sq) os << " " << fmt(b);
    os << "\n";
  }
  if (!sizes.empty()) {
    os << "sizes =";
    for (int L : sizes) os << " " << L;
    os << "\n";
  }
  if (rows > 0) os << "M = " << rows << "\n";
  os << "M_per_site = " << rows_per_site << "\n";
  os << "digits = " << digits << "\n";
  if (loops_m) os << "loops_m = " << *loops_m << "\n";
  if (window) os << "window = " << window->first << " " << window->second << "\n";
  os << "oracle_half_rows = " << oracle_half_rows << "\n";
  for (const TripleConfig& t : triples) {
    os << "\n[triple]\n";
    if (!t.name.empty()) os << "name = " << t.name << "\n";
    for (int i = 0; i < 3; ++i) os << "field" << i + 1 << " = " << t.fields[i].text() << "\n";
    if (t.scaling) os << "scaling = " << t.scaling->alpha << " " << fmt(t.scaling->f) << "\n";
    if (t.enclosure) os << "enclosure = standard\n";
  }
  return os.str();
}

CorrelatorSpec RunConfig::spec(const TripleConfig& t, double b, int L) const {
  CorrelatorSpec s;
  const ModelParams p = ModelParams::from_beta_sq(b);
  for (int i = 0; i < 3; ++i) s.fields[i] = t.fields[i].at(p);
  s.L = L;
  s.M = rows_for(L);
  s.model = model;
  s.beta_sq = b;
  s.precision = PrecisionContext{digits, 0.0};
  s.scaling = t.scaling;
  if (t.enclosure) s.enclosure = EnclosurePlan::standard(s.fields[0].legs(), s.fields[1].legs(), s.fields[2].legs());
  return s;
}

void RunConfig::validate_cells() const {
  if (sizes.empty()) throw ConfigError("field 'sizes': empty size list");
  for (const TripleConfig& t : triples) {
    for (double b : beta_sq) {
      for (int L : sizes) {
        try {
          spec(t, b, L).validate();
        } catch (const std::exception& e) {
          std::ostringstream os;
          os << "line " << t.line << ", [triple]" << (t.name.empty() ? "" : " '" + t.name + "'") << " at beta_sq="
             << b << ", L=" << L << ": " << e.what();
          throw ConfigError(os.str());
        }
      }
    }
  }
}

}  // namespace loop3pt::cli
