#include "wach/report.hpp"

#include <chrono>
#include <json.hpp>

#include "wach/selfcheck.hpp"
#include "wach/wach.hpp"

namespace wach {

namespace {

using json = nlohmann::ordered_json;

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

json series_to_json(const Series& s) {
    json j;
    j["denom_exp"] = s.denom;
    json coeffs = json::array();
    for (u128 c : s.c) coeffs.push_back(dec_string(c));
    j["coeffs"] = coeffs;
    return j;
}

json matrix_to_json(const SeriesMatrix& m) {
    json rows = json::array();
    for (unsigned i = 0; i < m.dim; ++i) {
        json row = json::array();
        for (unsigned j = 0; j < m.dim; ++j) row.push_back(series_to_json(m.at(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json gamma_to_json(const GammaValue& c) {
    json j;
    if (c.teich_base != 0) j["teich"] = c.teich_base;
    j["int"] = c.integer_factor;
    return j;
}

const json& need(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw UsageError("config field '" + path + "' is missing");
    return *it;
}

unsigned get_uint(const json& j, const std::string& path, unsigned lo, unsigned hi) {
    if (!j.is_number_unsigned())
        throw UsageError("config field '" + path + "' must be a non-negative integer");
    u64 v = j.get<u64>();
    if (v < lo || v > hi)
        throw UsageError("config field '" + path + "' out of range [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
    return (unsigned)v;
}

u128 gamma_level_value(u64 p, unsigned level) {
    // (1+p)^{p^{n-1}}, the canonical generator of the level-n subgroup.
    if (level < 1 || level > 8) throw UsageError("diagonal level must be in [1, 8]");
    u128 e = 1;
    for (unsigned i = 1; i < level; ++i) e *= p;
    u128 base = p + 1, acc = 1;
    while (e) {
        if (e & 1) {
            if (acc > ((u128)1 << 120) / base) throw UsageError("diagonal level too large");
            acc *= base;
        }
        e >>= 1;
        if (e) {
            if (base > ((u128)1 << 120) / base) throw UsageError("diagonal level too large");
            base *= base;
        }
    }
    return acc;
}

FilteredPhiModule fm_from_parts(u64 p, unsigned prec, unsigned rank,
                                const std::vector<unsigned>& weights,
                                const std::vector<std::vector<std::string>>& matrix) {
    ZpRing ring = ZpRing::make(p, prec);
    if (matrix.size() != rank) throw InputError("matrix row count differs from rank");
    std::vector<std::vector<u128>> rows;
    for (const auto& row : matrix) {
        if (row.size() != rank) throw InputError("matrix is not square");
        std::vector<u128> r;
        for (const auto& cell : row) r.push_back(parse_decimal_mod(cell, ring.modulus));
        rows.push_back(std::move(r));
    }
    return FilteredPhiModule::make(p, weights, ConstMatrix::from_rows(ring, rows));
}

struct PartnerModule {
    unsigned rank = 0;
    std::vector<unsigned> weights;
    std::vector<std::vector<std::string>> matrix;
};

PartnerModule parse_partner(const std::string& text) {
    json j = json::parse(text);
    PartnerModule pm;
    pm.rank = get_uint(need(j, "rank", "partner.rank"), "partner.rank", 1, kMaxDim);
    for (const auto& w : need(j, "weights", "partner.weights"))
        pm.weights.push_back(get_uint(w, "partner.weights[]", 0, 1u << 20));
    for (const auto& row : need(j, "matrix", "partner.matrix")) {
        std::vector<std::string> r;
        for (const auto& cell : row) {
            if (cell.is_string())
                r.push_back(cell.get<std::string>());
            else if (cell.is_number_integer())
                r.push_back(std::to_string(cell.get<long long>()));
            else
                throw UsageError("partner.matrix entries must be integers or decimal strings");
        }
        pm.matrix.push_back(std::move(r));
    }
    return pm;
}

json config_echo(const RunConfig& cfg) {
    json j;
    j["schema"] = 1;
    j["p"] = cfg.p;
    j["precision"] = json{{"padic", cfg.prec}, {"pi", cfg.mlen}};
    json mod;
    mod["rank"] = cfg.rank;
    mod["weights"] = cfg.weights;
    json mat = json::array();
    for (const auto& row : cfg.matrix) {
        json r = json::array();
        for (const auto& cell : row) r.push_back(cell);
        mat.push_back(r);
    }
    mod["matrix"] = mat;
    j["module"] = mod;
    if (cfg.gamma_default) {
        j["gamma"] = "default";
    } else {
        json g = json::array();
        for (const auto& c : cfg.gamma) g.push_back(gamma_to_json(c));
        j["gamma"] = g;
    }
    json checks = json::array();
    for (const auto& c : cfg.checks) {
        json e;
        e["name"] = c.name;
        if (c.name == "diagonal" || c.name == "congruence") e["n"] = c.n;
        if (c.name == "stability") e["n1"] = c.n;
        if (!c.partner_json.empty()) e["partner"] = json::parse(c.partner_json);
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    if (get_uint(need(j, "schema", "schema"), "schema", 1, 1) != 1)
        throw UsageError("unsupported config schema");
    RunConfig cfg;
    {
        const json& p = need(j, "p", "p");
        if (!p.is_number_unsigned()) throw UsageError("config field 'p' must be an integer");
        cfg.p = p.get<u64>();
    }
    const json& prec = need(j, "precision", "precision");
    cfg.prec = get_uint(need(prec, "padic", "precision.padic"), "precision.padic", 1, 256);
    cfg.mlen = get_uint(need(prec, "pi", "precision.pi"), "precision.pi", 1, 1u << 16);
    const json& mod = need(j, "module", "module");
    cfg.rank = get_uint(need(mod, "rank", "module.rank"), "module.rank", 1, kMaxDim);
    for (const auto& w : need(mod, "weights", "module.weights"))
        cfg.weights.push_back(get_uint(w, "module.weights[]", 0, 1u << 20));
    for (const auto& row : need(mod, "matrix", "module.matrix")) {
        std::vector<std::string> r;
        for (const auto& cell : row) {
            if (cell.is_string())
                r.push_back(cell.get<std::string>());
            else if (cell.is_number_integer())
                r.push_back(std::to_string(cell.get<long long>()));
            else
                throw UsageError("module.matrix entries must be integers or decimal strings");
        }
        cfg.matrix.push_back(std::move(r));
    }
    if (j.contains("gamma") && j["gamma"].is_array()) {
        cfg.gamma_default = false;
        for (const auto& g : j["gamma"]) {
            if (g.is_string())
                cfg.gamma.push_back(GammaValue::integer(g.get<std::string>()));
            else if (g.is_object() && g.contains("teich"))
                cfg.gamma.push_back(GammaValue::teich(g["teich"].get<u64>()));
            else
                throw UsageError("config field 'gamma' entries must be decimal strings or "
                                 "{\"teich\": r}");
        }
        if (cfg.gamma.empty()) throw UsageError("config field 'gamma' must not be empty");
    } else if (j.contains("gamma") && !(j["gamma"].is_string() && j["gamma"] == "default")) {
        throw UsageError("config field 'gamma' must be \"default\" or an array");
    }
    if (j.contains("checks")) {
        for (const auto& c : j["checks"]) {
            CheckSpec spec;
            if (c.is_string()) {
                spec.name = c.get<std::string>();
            } else if (c.is_object()) {
                spec.name = need(c, "name", "checks[].name").get<std::string>();
                if (c.contains("n")) spec.n = get_uint(c["n"], "checks[].n", 1, 64);
                if (c.contains("n1")) spec.n = get_uint(c["n1"], "checks[].n1", 1, 256);
                if (c.contains("partner")) spec.partner_json = c["partner"].dump();
            } else {
                throw UsageError("config field 'checks' entries must be strings or objects");
            }
            static const char* known[] = {"commutation", "mod_pi",     "heights",  "filtration",
                                          "diagonal",    "congruence", "stability"};
            bool ok = false;
            for (const char* k : known) ok = ok || spec.name == k;
            if (!ok) throw UsageError("unknown check '" + spec.name + "'");
            if (spec.name == "diagonal" && spec.n == 0)
                throw UsageError("check 'diagonal' needs a level n >= 1");
            if (spec.name == "congruence" && (spec.n == 0 || spec.partner_json.empty()))
                throw UsageError("check 'congruence' needs a level n and a partner module");
            if (spec.name == "stability" && spec.n == 0)
                throw UsageError("check 'stability' needs a target precision n1");
            cfg.checks.push_back(std::move(spec));
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            throw UsageError("config field 'seed' must be a non-negative integer");
        cfg.seed = j["seed"].get<u64>();
    }
    if (cfg.mlen <= cfg.p - 1) throw UsageError("config requires precision.pi > p - 1");
    // Validate the module data eagerly so bad configs fail before any computation.
    fm_from_parts(cfg.p, cfg.prec, cfg.rank, cfg.weights, cfg.matrix);
    for (const auto& c : cfg.checks)
        if (c.name == "congruence") {
            PartnerModule pm = parse_partner(c.partner_json);
            fm_from_parts(cfg.p, cfg.prec, pm.rank, pm.weights, pm.matrix);
        }
    return cfg;
}

namespace {

std::vector<GammaValue> effective_gens(const RunConfig& cfg) {
    std::vector<GammaValue> gens =
        cfg.gamma_default ? default_gamma_generators(cfg.p) : cfg.gamma;
    for (const auto& c : cfg.checks)
        if (c.name == "diagonal") {
            GammaValue v = GammaValue::integer(dec_string(gamma_level_value(cfg.p, c.n)));
            bool present = false;
            for (const auto& g : gens) present = present || g == v;
            if (!present) gens.push_back(v);
        }
    return gens;
}

json build_section(const WachModule& w) {
    json b;
    b["p_matrix"] = matrix_to_json(w.p_mat);
    json gl = json::array();
    for (std::size_t i = 0; i < w.gens.size(); ++i) {
        json g;
        g["gamma"] = gamma_to_json(w.gens[i]);
        g["matrix"] = matrix_to_json(w.g_mats[i]);
        gl.push_back(g);
    }
    b["g_matrices"] = gl;
    json inv;
    inv["commutation"] = true;
    inv["id_mod_pi_pow"] = true;
    inv["cocycle"] = true;
    b["invariants"] = inv;
    return b;
}

json run_check(const RunConfig& cfg, const WachModule& w, const CheckSpec& chk) {
    json r;
    r["name"] = chk.name;
    try {
        if (chk.name == "commutation") {
            const Substitution phi = Substitution::frobenius(w.ring, w.mlen);
            bool ok = true;
            for (std::size_t i = 0; i < w.gens.size(); ++i) {
                const Substitution gam = Substitution::gamma(w.gens[i], w.ring, w.mlen);
                ok = ok && mat_mul(mat_apply(phi, w.g_mats[i]), w.p_mat) ==
                               mat_mul(mat_apply(gam, w.p_mat), w.g_mats[i]);
            }
            r["verdict"] = ok ? "pass" : "fail";
        } else if (chk.name == "mod_pi") {
            bool ok = true;
            std::string where;
            for (const auto& g : w.g_mats) {
                SeriesMatrix dev = mat_sub(g, SeriesMatrix::identity(w.ring, w.mlen, g.dim));
                for (unsigned i = 0; i < g.dim && ok; ++i)
                    for (unsigned j = 0; j < g.dim && ok; ++j)
                        for (unsigned k = 0; k < (unsigned)w.fm.p - 1 && ok; ++k)
                            if (dev.at(i, j).c[k] != 0) {
                                ok = false;
                                where = "pi^" + std::to_string(k);
                            }
            }
            r["verdict"] = ok ? "pass" : "fail";
            if (!ok) r["evidence"] = where;
        } else if (chk.name == "heights") {
            HeightReport h = verify_heights(w);
            r["verdict"] = h.pass ? "pass" : "fail";
            r["q_power"] = h.s;
            r["certified_pi_len"] = h.certified_len;
            if (h.pass) r["certificate"] = matrix_to_json(h.certificate);
            if (!h.evidence.empty()) r["evidence"] = h.evidence;
        } else if (chk.name == "filtration") {
            json steps = json::array();
            bool ok = true;
            for (unsigned i = 0; i <= w.fm.top_weight() + 1; ++i) {
                FiltrationReport f = filtration_dims(w, i);
                ok = ok && f.pass;
                steps.push_back(json{{"i", f.level}, {"dim", f.dim}, {"expected", f.expected}});
            }
            r["verdict"] = ok ? "pass" : "fail";
            r["steps"] = steps;
        } else if (chk.name == "diagonal") {
            GammaValue c = GammaValue::integer(dec_string(gamma_level_value(cfg.p, chk.n)));
            DiagonalReport dr = verify_diagonal(w, chk.n, c);
            r["verdict"] = dr.pass ? "pass" : "fail";
            r["n"] = dr.level;
            r["nq"] = dr.nq;
            r["char_poly"] = dr.char_coeffs;
            r["expected"] = dr.expected_coeffs;
            if (!dr.evidence.empty()) r["evidence"] = dr.evidence;
        } else if (chk.name == "congruence") {
            PartnerModule pm = parse_partner(chk.partner_json);
            FilteredPhiModule fm2 =
                fm_from_parts(cfg.p, cfg.prec, pm.rank, pm.weights, pm.matrix);
            WachModule w2 = build_wach(fm2, cfg.prec, cfg.mlen, w.gens);
            CongruenceReport cr = congruence_check(w, w2, chk.n);
            r["verdict"] = cr.refused ? "refused" : (cr.pass ? "pass" : "fail");
            r["n"] = cr.level;
            if (!cr.evidence.empty()) r["evidence"] = cr.evidence;
        } else if (chk.name == "stability") {
            StabilityReport sr = precision_stability(w, chk.n);
            r["verdict"] = sr.pass ? "pass" : "fail";
            r["n1"] = chk.n;
            if (!sr.evidence.empty()) r["evidence"] = sr.evidence;
        }
    } catch (const Error& e) {
        r["verdict"] = "error";
        r["evidence"] = e.what();
    }
    return r;
}

RunOutcome finish(json report, bool any_bad, bool with_timing, double t0) {
    if (with_timing) report["timing_ms"] = now_ms() - t0;
    RunOutcome out;
    out.report_json = report.dump(2) + "\n";
    out.report_text = render_text(out.report_json);
    out.exit_code = any_bad ? 1 : 0;
    return out;
}

}  // namespace

RunOutcome run_build(const RunConfig& cfg, bool with_timing) {
    double t0 = now_ms();
    json report;
    report["schema"] = 1;
    report["mode"] = "build";
    report["config"] = config_echo(cfg);
    bool bad = false;
    try {
        FilteredPhiModule fm =
            fm_from_parts(cfg.p, cfg.prec, cfg.rank, cfg.weights, cfg.matrix);
        WachModule w = build_wach(fm, cfg.prec, cfg.mlen, effective_gens(cfg));
        report["build"] = build_section(w);
        report["verdict"] = "pass";
    } catch (const Error& e) {
        report["verdict"] = "error";
        report["evidence"] = e.what();
        bad = true;
    }
    return finish(std::move(report), bad, with_timing, t0);
}

RunOutcome run_verify(const RunConfig& cfg, bool with_timing) {
    double t0 = now_ms();
    json report;
    report["schema"] = 1;
    report["mode"] = "verify";
    report["config"] = config_echo(cfg);
    bool bad = false;
    try {
        FilteredPhiModule fm =
            fm_from_parts(cfg.p, cfg.prec, cfg.rank, cfg.weights, cfg.matrix);
        WachModule w = build_wach(fm, cfg.prec, cfg.mlen, effective_gens(cfg));
        report["build"] = build_section(w);
        json checks = json::array();
        unsigned passed = 0, failed = 0, refused = 0, errors = 0;
        std::vector<CheckSpec> list = cfg.checks;
        if (list.empty())
            for (const char* k : {"commutation", "mod_pi", "heights"})
                list.push_back(CheckSpec{k, 0, ""});
        for (const auto& chk : list) {
            json r = run_check(cfg, w, chk);
            std::string v = r["verdict"].get<std::string>();
            if (v == "pass")
                ++passed;
            else if (v == "refused")
                ++refused;
            else if (v == "error")
                ++errors;
            else
                ++failed;
            checks.push_back(std::move(r));
        }
        report["checks"] = checks;
        report["summary"] = json{{"passed", passed},
                                 {"failed", failed},
                                 {"refused", refused},
                                 {"errors", errors}};
        bad = failed + refused + errors > 0;
        report["verdict"] = bad ? "fail" : "pass";
    } catch (const Error& e) {
        report["verdict"] = "error";
        report["evidence"] = e.what();
        bad = true;
    }
    return finish(std::move(report), bad, with_timing, t0);
}

RunOutcome run_selftest(u64 p, u64 seed, bool with_timing) {
    double t0 = now_ms();
    json report;
    report["schema"] = 1;
    report["mode"] = "selftest";
    report["p"] = p;
    report["seed"] = seed;
    bool bad = false;
    if (p == 2 || p > 13 || !is_prime_u64(p)) {
        report["verdict"] = "refused";
        report["evidence"] = "selftest needs an odd prime p <= 13";
        bad = true;
    } else {
        json suites = json::array();
        for (const auto& s : selfcheck::run_all(p, seed)) {
            json e;
            e["name"] = s.name;
            e["cases"] = s.cases;
            e["failures"] = s.failures;
            if (!s.first_failure.empty()) e["first_failure"] = s.first_failure;
            suites.push_back(e);
            bad = bad || !s.pass();
        }
        report["suites"] = suites;
        report["verdict"] = bad ? "fail" : "pass";
    }
    return finish(std::move(report), bad, with_timing, t0);
}

std::string render_text(const std::string& report_json) {
    json j = json::parse(report_json);
    std::string out;
    std::string mode = j.value("mode", "?");
    out += "mode: " + mode + "\n";
    if (mode == "selftest") {
        out += "p: " + std::to_string(j.value("p", (u64)0)) +
               "  seed: " + std::to_string(j.value("seed", (u64)0)) + "\n";
        if (j.contains("suites"))
            for (const auto& s : j["suites"]) {
                out += (s["failures"].get<std::size_t>() == 0 ? "  PASS  " : "  FAIL  ");
                out += s["name"].get<std::string>() + " (" +
                       std::to_string(s["cases"].get<std::size_t>()) + " cases";
                if (s["failures"].get<std::size_t>() != 0)
                    out += ", " + std::to_string(s["failures"].get<std::size_t>()) + " failures";
                out += ")\n";
                if (s.contains("first_failure"))
                    out += "        first failure: " + s["first_failure"].get<std::string>() +
                           "\n";
            }
    } else {
        if (j.contains("config")) {
            const json& c = j["config"];
            out += "p: " + std::to_string(c["p"].get<u64>()) +
                   "  N: " + std::to_string(c["precision"]["padic"].get<unsigned>()) +
                   "  M: " + std::to_string(c["precision"]["pi"].get<unsigned>()) +
                   "  rank: " + std::to_string(c["module"]["rank"].get<unsigned>()) + "\n";
        }
        if (j.contains("checks"))
            for (const auto& r : j["checks"]) {
                std::string v = r["verdict"].get<std::string>();
                for (auto& ch : v) ch = (char)toupper(ch);
                out += "  " + v + "  " + r["name"].get<std::string>();
                if (r.contains("n")) out += " (n=" + std::to_string(r["n"].get<unsigned>()) + ")";
                if (r.contains("evidence")) out += "  [" + r["evidence"].get<std::string>() + "]";
                out += "\n";
            }
        if (j.contains("summary")) {
            const json& s = j["summary"];
            out += "summary: " + std::to_string(s["passed"].get<unsigned>()) + " passed, " +
                   std::to_string(s["failed"].get<unsigned>()) + " failed, " +
                   std::to_string(s["refused"].get<unsigned>()) + " refused, " +
                   std::to_string(s["errors"].get<unsigned>()) + " errors\n";
        }
    }
    out += "verdict: " + j.value("verdict", "?") + "\n";
    if (j.contains("evidence") && j["evidence"].is_string())
        out += "evidence: " + j["evidence"].get<std::string>() + "\n";
    return out;
}

}  // namespace wach
