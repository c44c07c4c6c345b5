#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pdmpkit/bounds.hpp"
#include "pdmpkit/diagnostics.hpp"
#include "pdmpkit/samplers.hpp"
#include "pdmpkit/scaling.hpp"

namespace pdmpkit {

const char* toolkit_version();

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 hex digits of FNV-1a over the compact, key-sorted JSON dump.
std::string config_hash(const nlohmann::json& config);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const IactEstimate& iact);
nlohmann::json to_json(const Verdict& verdict);
nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const ScalingTable& table);

/// Adds {"toolkit_version", "config_hash"} to an output document.
nlohmann::json stamp(nlohmann::json doc, const std::string& hash);

/// Columnar skeleton: t, kind, k, x1..xd, v1..vd (post-event state). The
/// first row is the initial state with kind "start". Two comment lines carry
/// the version and the config hash.
void write_skeleton_csv(std::ostream& out, const EventSkeleton& skeleton, const std::string& hash);
/// Columns d, lambda_opt, alpha, alpha_inv, slope.
void write_scaling_csv(std::ostream& out, const ScalingTable& table, const std::string& hash);
/// Columns lag, time, autocov, stderr, used.
void write_lag_csv(std::ostream& out, const DecayFit& fit, double dt, const std::string& hash);

/// Event counts per kind and time-average moments of x_i, x_i² over the
/// window [t_begin, T].
nlohmann::json skeleton_summary(const SimulationResult& result, double t_begin);

}  // namespace pdmpkit
