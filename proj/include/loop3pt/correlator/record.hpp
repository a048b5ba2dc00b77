#pragma once

#include "loop3pt/correlator/correlator.hpp"

#include <json.hpp>

namespace loop3pt {

// JSON record of one lattice cell:
// {model, beta_sq, n, fields: [{kind, r, s} ×3], L, M, Z: {z123: {re, im, exp2}, …},
//  C123: {re, im}, abs_C123, scaling: {alpha, f} | null, scaled, digits,
//  cancellation_warning, wall_time_s}
nlohmann::json to_json(const RunResult& r);
nlohmann::json to_json(const FieldLabel& f);

}  // namespace loop3pt
