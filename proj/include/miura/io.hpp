#pragma once

#include <string>

#include "json.hpp"
#include "miura/evolution.hpp"
#include "miura/miura_map.hpp"
#include "miura/schrodinger.hpp"

namespace miura::io {

using json = nlohmann::ordered_json;

/// "%.17g" — lossless round-trip for doubles, fixed formatting for CSV.
std::string format17(double x);

json potential_to_json(const Potential& q);
Potential potential_from_json(const json& j);

Potential read_potential(const std::string& path);
void write_potential(const std::string& path, const Potential& q);

json spectral_report_to_json(const SpectralReport& rep);
json positivity_to_json(const PositivityResult& res);
json fiber_report_to_json(const FiberReport& rep);
json fiber_norms_to_json(const FiberNorms& norms);

std::string spectral_report_csv(const SpectralReport& rep);
/// x, r_plus, r_minus rows.
std::string fiber_endpoints_csv(const FiberReport& rep);
/// time, l2_v, special_integral_u, mass_v rows (l2_v is the norm itself).
std::string trace_csv(const EvolutionTrace& trace);
json trace_frames_to_json(const EvolutionTrace& trace);
/// Matrix layout: header "x\\y", y_0...; one row per x node.
std::string green_csv(const GreenKernel& K);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

} // namespace miura::io
