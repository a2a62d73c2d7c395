#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "suq2/operators.hpp"

namespace suq2 {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    double q = 0.5;
    /// 2N, the number of half-levels kept.
    int levels = 16;
    /// Half-levels trimmed from the top for identity checks.
    int guard = 2;
    double tol_alg = 1e-10;
    double tol_spec = 1e-6;
    DiracVariant dirac = DiracVariant::right;
    std::string format = "json";
    std::string out = ".";
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument unless 0 < q < 1, 2N >= 2, 0 <= guard < 2N,
    /// both tolerances are positive and format is json or csv.
    void validate() const;
    HalfInt max_level() const { return HalfInt::from_twice(levels); }
    ModelParams params() const { return ModelParams::make(q, max_level(), dirac); }
};

nlohmann::ordered_json to_json(const RunConfig& config);

struct CheckResult {
    std::string module;
    std::string name;
    std::string anchor;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    /// Diagnostic checks are reported but do not affect the exit status.
    bool gated = true;
    std::string note;
};

struct VerifyReport {
    RunConfig config;
    std::vector<CheckResult> checks;

    bool passed() const;
    std::vector<const CheckResult*> failures() const;
};

VerifyReport run_verify(const RunConfig& config);

nlohmann::ordered_json to_json(const VerifyReport& report);
/// Header "module,name,anchor,residual,tolerance,passed,gated,note".
void write_csv(std::ostream& out, const VerifyReport& report);

std::string to_string(DiracVariant variant);
DiracVariant parse_dirac_variant(const std::string& text);

} // namespace suq2
