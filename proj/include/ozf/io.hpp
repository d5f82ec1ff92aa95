#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ozf/certify.hpp"
#include "ozf/validate.hpp"
#include "ozf/model.hpp"
#include "ozf/nonlin.hpp"

namespace ozf::io {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes);

/// Fingerprint over the canonical (parsed, key-sorted) dump of the problem
/// document, so formatting changes do not invalidate certificates.
std::string problem_fingerprint(const json& problem_doc);

json to_json(const AnalysisProblem& problem);
AnalysisProblem problem_from_json(const json& doc);
AnalysisProblem load_problem(const std::string& path, std::string* fingerprint = nullptr);
void save_problem(const AnalysisProblem& problem, const std::string& path);

json to_json(const Certificate& cert);
Certificate certificate_from_json(const json& doc);
Certificate load_certificate(const std::string& path);
void save_certificate(const Certificate& cert, const std::string& path);

/// Replayable fixture for a slope-restricted function (kind, seed, band,
/// breakpoints) and for a multiplier (nu1, nu2, lambda, E row-major).
json to_json(const SlopeRestrictedFunction& f);
SlopeRestrictedFunction function_from_json(const json& doc);
json to_json(const FirMultiplier& mult);
FirMultiplier multiplier_from_json(const json& doc);

json to_json(const CheckReport& report);

/// Header: L,variant,gamma,size,mu,feasible,seconds.
void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path);
/// Header: t,x1..xn,z1..zd,w1..wd (one row per simulated step).
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Plain comma-split reader (no quoting); first row is the header.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace ozf::io
