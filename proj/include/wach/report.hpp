#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wach/zp.hpp"

namespace wach {

// One requested verification.
struct CheckSpec {
    std::string name;           // commutation | mod_pi | heights | filtration |
                                // diagonal | congruence | stability
    unsigned n = 0;             // diagonal/congruence level, stability target N1
    std::string partner_json;   // congruence partner module (serialized object)
};

struct RunConfig {
    u64 p = 0;
    unsigned prec = 0;   // N
    unsigned mlen = 0;   // M
    unsigned rank = 0;   // d
    std::vector<unsigned> weights;
    std::vector<std::vector<std::string>> matrix;  // decimal strings
    bool gamma_default = true;
    std::vector<GammaValue> gamma;  // explicit values when not default
    std::vector<CheckSpec> checks;
    u64 seed = 0;
};

// Parses and validates a schema-1 config; UsageError/InputError carry the
// offending field path.
RunConfig parse_config(const std::string& json_text);

struct RunOutcome {
    std::string report_json;  // deterministic bytes for (config, seed)
    std::string report_text;  // pure function of the JSON report
    int exit_code;            // 0 all pass, 1 any failure/refusal/error
};

// build: construct the module and report the built matrices + invariants.
RunOutcome run_build(const RunConfig& cfg, bool with_timing = false);
// verify: build then execute every requested check.
RunOutcome run_verify(const RunConfig& cfg, bool with_timing = false);
// selftest: randomized oracle suites for one odd prime <= 13 (p = 2 refused).
RunOutcome run_selftest(u64 p, u64 seed, bool with_timing = false);

std::string render_text(const std::string& report_json);

}  // namespace wach
