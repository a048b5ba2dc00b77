#include "loop3pt/correlator/record.hpp"

namespace loop3pt {

namespace {

nlohmann::json z_json(const ZValue& z) { return {{"re", z.re}, {"im", z.im}, {"exp2", z.exp2}}; }

}  // namespace

nlohmann::json to_json(const FieldLabel& f) {
  if (f.is_identity()) return {{"kind", "identity"}, {"r", 0.0}, {"s", f.s()}};
  return {{"kind", f.is_leg() ? "leg" : "diagonal"}, {"r", f.r()}, {"s", f.s()}};
}

nlohmann::json to_json(const RunResult& r) {
  const CorrelatorSpec& s = r.spec;
  nlohmann::json j;
  j["model"] = to_string(s.model);
  j["beta_sq"] = s.beta_sq;
  j["n"] = s.params().loop_weight;
  j["fields"] = nlohmann::json::array();
  for (const FieldLabel& f : s.fields) j["fields"].push_back(to_json(f));
  j["L"] = s.L;
  j["M"] = s.rows();
  j["enclosure"] = s.enclosure.has_value();
  j["Z"] = {{"z123", z_json(r.z123)}, {"z220", z_json(r.z220)}, {"z202", z_json(r.z202)},
            {"z000", z_json(r.z000)}, {"z101", z_json(r.z101)}, {"z303", z_json(r.z303)}};
  j["C123"] = {{"re", r.c123_re}, {"im", r.c123_im}};
  j["abs_C123"] = r.c123_abs;
  if (s.scaling) {
    j["scaling"] = {{"alpha", s.scaling->alpha}, {"f", s.scaling->f}};
  } else {
    j["scaling"] = nullptr;
  }
  j["scaled"] = r.scaled ? nlohmann::json(*r.scaled) : nlohmann::json(nullptr);
  j["digits"] = r.digits_used;
  j["cancellation_warning"] = r.cancellation_warning;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

}  // namespace loop3pt
