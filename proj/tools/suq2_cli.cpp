#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "suq2/blocks.hpp"
#include "suq2/commutator_lab.hpp"
#include "suq2/operators.hpp"
#include "suq2/verify.hpp"

using namespace suq2;
using json = nlohmann::ordered_json;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "1/2", "-3/2", "0.5", "2".
HalfInt parse_half(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            if (text.substr(slash + 1) != "2") throw UsageError("");
            return HalfInt::from_twice(std::stoi(text.substr(0, slash)));
        }
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        const double twice = 2.0 * v;
        if (used != text.size() || twice != std::round(twice)) throw UsageError("");
        return HalfInt::from_twice(static_cast<int>(twice));
    } catch (const std::exception&) {
        throw UsageError("not a half-integer: '" + text + "'");
    }
}

std::string tag(HalfInt h) {
    std::ostringstream os;
    os << h.value();
    return os.str();
}

json header(const std::string& command, const RunConfig& cfg) {
    json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = command;
    out["config"] = to_json(cfg);
    return out;
}

std::filesystem::path output_path(const RunConfig& cfg, const std::string& stem) {
    std::filesystem::create_directories(cfg.out);
    return std::filesystem::path(cfg.out) / (stem + "." + cfg.format);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    std::cout << "wrote " << path.string() << '\n';
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        std::string s = "\"";
        for (char ch : v.get<std::string>()) s += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return s + "\"";
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

/// Rows share the keys of the first row.
std::string csv_table(const json& rows) {
    std::ostringstream os;
    if (rows.empty()) return "";
    bool first = true;
    for (const auto& [key, _] : rows.front().items()) {
        os << (first ? "" : ",") << key;
        first = false;
    }
    os << '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [key, _] : rows.front().items()) {
            os << (first ? "" : ",") << csv_cell(row.contains(key) ? row[key] : json(nullptr));
            first = false;
        }
        os << '\n';
    }
    return os.str();
}

void emit(const RunConfig& cfg, const std::string& stem, const json& doc, const json& rows) {
    const auto path = output_path(cfg, stem);
    write_text(path, cfg.format == "json" ? doc.dump(2) + "\n" : csv_table(rows));
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_verify(const RunConfig& cfg) {
    const VerifyReport report = run_verify(cfg);
    const auto path = output_path(cfg, "verify");
    if (cfg.format == "json") {
        write_text(path, to_json(report).dump(2) + "\n");
    } else {
        std::ostringstream os;
        write_csv(os, report);
        write_text(path, os.str());
    }
    for (const auto& c : report.checks) {
        const char* status = c.passed ? "pass" : (c.gated ? "FAIL" : "info");
        std::cout << status << "  " << c.module << '/' << c.name << "  residual=" << c.residual << " tol=" << c.tolerance;
        if (!c.note.empty()) std::cout << "  (" << c.note << ')';
        std::cout << '\n';
    }
    const auto failed = report.failures();
    std::cout << report.checks.size() - failed.size() << '/' << report.checks.size() << " checks passed\n";
    return failed.empty() ? kOk : kCheckFailed;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& r_text, const std::string& s_text) {
    const BlockLabel label{parse_half(r_text), parse_half(s_text)};
    const ModelParams p = cfg.params();
    if (p.trunc->block_size(label) == 0)
        throw UsageError("block " + label.str() + " is empty at 2N=" + std::to_string(cfg.levels));
    bool ok = true;
    for (const auto& [name, mode_op] :
         {std::pair<std::string, SparseOp>{"gamma", build_gamma(p, BuildMode::formula)},
          std::pair<std::string, SparseOp>{"gamma_hat", build_gamma_hat(p, BuildMode::formula)}}) {
        const SpectrumReport rep = spectrum_report(restrict_tridiag(mode_op, label), p.q, cfg.tol_spec);
        const std::string stem = "spectrum_" + name + "_r" + tag(label.r) + "_s" + tag(label.s);
        const auto path = output_path(cfg, stem);
        if (cfg.format == "json") {
            json doc = header("spectrum", cfg);
            doc["operator"] = name;
            doc["report"] = to_json(rep);
            write_text(path, doc.dump(2) + "\n");
        } else {
            std::ostringstream os;
            write_csv(os, std::span<const SpectrumReport>(&rep, 1));
            write_text(path, os.str());
        }
        std::cout << name << ' ' << label.str() << ": " << rep.matched_count() << '/' << rep.entries.size()
                  << " eigenvalues matched, reliable zone " << (rep.reliable_zone_ok() ? "ok" : "NOT ok") << '\n';
        ok = ok && rep.reliable_zone_ok();
    }
    return ok ? kOk : kCheckFailed;
}

struct ExperimentArgs {
    int ell = 0;
    int m = 1;
    int n = 1;
    std::string r_max = "3";
    int trials = 100;
    int size = 8;
    std::vector<int> sweep_levels{8, 12, 16};
};

int run_overlaps(const RunConfig& cfg, const ExperimentArgs& a) {
    const OverlapResult res = overlap_experiment(cfg.params(), a.ell, a.m, parse_half(a.r_max), cfg.tol_spec);
    print_warnings(res.warnings);
    json doc = header("experiment", cfg);
    doc["experiment"] = "overlaps";
    doc["params"] = {{"ell", a.ell}, {"m", a.m}, {"r_max", parse_half(a.r_max).value()}};
    doc["commutator_norm"] = res.commutator_norm;
    doc["warnings"] = res.warnings;
    json rows = json::array();
    for (const auto& rec : res.records) rows.push_back(to_json(rec));
    doc["records"] = rows;
    emit(cfg, "overlaps", doc, rows);
    std::cout << res.records.size() << " overlap records, ||[Q,T]|| = " << res.commutator_norm << '\n';
    return kOk;
}

int run_aux3(const RunConfig& cfg, const ExperimentArgs& a) {
    const Aux3Result res = aux3_experiment(cfg.params(), a.n, a.m, parse_half(a.r_max), cfg.tol_spec);
    print_warnings(res.warnings);
    json doc = header("experiment", cfg);
    doc["experiment"] = "aux3";
    doc["params"] = {{"n", a.n}, {"m", a.m}, {"r_max", parse_half(a.r_max).value()}};
    doc["lower_bound"] = res.lower_bound;
    doc["commutator_norm"] = res.commutator_norm;
    doc["warnings"] = res.warnings;
    json rows = json::array();
    for (const auto& rec : res.records) rows.push_back(to_json(rec));
    doc["records"] = rows;
    emit(cfg, "aux3", doc, rows);
    std::cout << res.records.size() << " records, lower bound " << res.lower_bound << ", ||[Q,V^n g]|| = "
              << res.commutator_norm << '\n';
    return kOk;
}

int run_rigidity(const RunConfig& cfg, const ExperimentArgs& a) {
    std::vector<HalfInt> levels;
    for (int l : a.sweep_levels) {
        if (l < 2) throw UsageError("--sweep-levels entries must be >= 2");
        levels.push_back(HalfInt::from_twice(l));
    }
    const auto family = default_function_family(cfg.q);
    const RigidityReport rep = scalar_rigidity_sweep(cfg.q, cfg.dirac, levels, family, cfg.tol_spec);
    json doc = header("experiment", cfg);
    doc["experiment"] = "rigidity";
    doc["params"] = {{"sweep_levels", a.sweep_levels}};
    doc["passed"] = rep.passed();
    json rows = json::array();
    for (const auto& row : rep.rows) rows.push_back(to_json(row));
    doc["rows"] = rows;
    json probes = json::array();
    for (const auto& probe : rep.aux2) probes.push_back(to_json(probe));
    doc["aux2"] = probes;
    emit(cfg, "rigidity", doc, rows);
    for (const auto& row : rep.rows)
        std::cout << (row.passed ? "pass" : "FAIL") << "  " << row.label << " N=" << row.level.str()
                  << "  norm=" << row.commutator_norm << " bound=" << row.lower_bound << " required=" << row.required
                  << '\n';
    return rep.passed() ? kOk : kCheckFailed;
}

int run_distance(const RunConfig& cfg, const ExperimentArgs& a) {
    if (a.trials < 1 || a.size < 2) throw UsageError("--trials must be >= 1 and --size >= 2");
    const auto certs = distance_trials(a.trials, cfg.seed, cfg.q, a.size);
    json doc = header("experiment", cfg);
    doc["experiment"] = "distance";
    doc["params"] = {{"trials", a.trials}, {"size", a.size}};
    json rows = json::array();
    int held = 0;
    for (const auto& c : certs) {
        rows.push_back(to_json(c));
        held += c.holds() ? 1 : 0;
    }
    doc["held"] = held;
    doc["trials"] = rows;
    emit(cfg, "distance", doc, rows);
    std::cout << held << '/' << certs.size() << " trials satisfy observed >= certified\n";
    return held == static_cast<int>(certs.size()) ? kOk : kCheckFailed;
}

SparseOp named_operator(const ModelParams& p, const std::string& name, BuildMode mode) {
    if (name == "alpha") return build_alpha(p);
    if (name == "beta") return build_beta(p);
    if (name == "alpha_hat") return build_alpha_hat(p);
    if (name == "beta_hat") return build_beta_hat(p);
    if (name == "gamma") return build_gamma(p, mode);
    if (name == "gamma_hat") return build_gamma_hat(p, mode);
    if (name == "dirac") return build_dirac(p);
    if (name == "F") return build_F(p);
    if (name == "Q") return build_Q(p);
    if (name == "K") return build_K(p);
    if (name == "delta") return build_Delta_pow(p, 1.0);
    throw UsageError("unknown operator '" + name + "'");
}

int cmd_operator(const RunConfig& cfg, const std::string& name, const std::string& mode_text) {
    const BuildMode mode = mode_text == "formula" ? BuildMode::formula : BuildMode::product;
    const SparseOp op = named_operator(cfg.params(), name, mode);
    json doc = header("operator", cfg);
    doc["operator"] = name;
    doc["mode"] = mode_text;
    doc["matrix"] = to_json(op);
    json rows = json::array();
    op.for_each_entry([&](std::size_t row, std::size_t col, double v) { rows.push_back({{"row", row}, {"col", col}, {"value", v}}); });
    emit(cfg, "operator_" + name, doc, rows);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-section laboratory for the quantum group SU_q(2) and its Dirac operators"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string dirac = "right";
    app.add_option("--q", cfg.q, "Deformation parameter, 0 < q < 1")->capture_default_str();
    app.add_option("--levels", cfg.levels, "2N, number of half-levels kept")->capture_default_str();
    app.add_option("--guard", cfg.guard, "Half-levels trimmed from the top in identity checks")->capture_default_str();
    app.add_option("--tol-alg", cfg.tol_alg, "Tolerance for algebraic identities")->capture_default_str();
    app.add_option("--tol-spec", cfg.tol_spec, "Tolerance for spectral matching")->capture_default_str();
    app.add_option("--dirac", dirac, "Dirac operator variant")->check(CLI::IsMember({"right", "left"}))->capture_default_str();
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for randomized trials")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run every invariant check");

    std::string r_text = "0", s_text = "0";
    auto* spectrum = app.add_subcommand("spectrum", "Spectra of the (r,s) blocks of gamma and gamma_hat");
    spectrum->add_option("--r", r_text, "Block label r, e.g. 1/2")->capture_default_str();
    spectrum->add_option("--s", s_text, "Block label s, e.g. -1")->capture_default_str();

    std::string which;
    ExperimentArgs ea;
    auto* experiment = app.add_subcommand("experiment", "Commutator experiments");
    experiment->add_option("which", which, "overlaps | aux3 | rigidity | distance")
        ->required()
        ->check(CLI::IsMember({"overlaps", "aux3", "rigidity", "distance"}));
    experiment->add_option("--ell", ea.ell, "Exponent of the first eigenvalue q^{2l}")->capture_default_str();
    experiment->add_option("--m", ea.m, "Exponent of the second eigenvalue q^{2m}")->capture_default_str();
    experiment->add_option("--n", ea.n, "Power of the polar unitary (aux3)")->capture_default_str();
    experiment->add_option("--r-max", ea.r_max, "Largest plane r")->capture_default_str();
    experiment->add_option("--trials", ea.trials, "Randomized trials (distance)")->capture_default_str();
    experiment->add_option("--size", ea.size, "Matrix size (distance)")->capture_default_str();
    experiment->add_option("--sweep-levels", ea.sweep_levels, "Values of 2N (rigidity)")->delimiter(',')->capture_default_str();

    std::string op_name = "alpha", op_mode = "product";
    auto* op = app.add_subcommand("operator", "Dump a sparse operator");
    op->add_option("--name", op_name, "alpha beta alpha_hat beta_hat gamma gamma_hat dirac F Q K delta")->capture_default_str();
    op->add_option("--mode", op_mode, "Construction of gamma, gamma_hat")
        ->check(CLI::IsMember({"product", "formula"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        cfg.dirac = parse_dirac_variant(dirac);
        cfg.validate();
        if (*verify) return cmd_verify(cfg);
        if (*spectrum) return cmd_spectrum(cfg, r_text, s_text);
        if (*op) return cmd_operator(cfg, op_name, op_mode);
        if (which == "overlaps") return run_overlaps(cfg, ea);
        if (which == "aux3") return run_aux3(cfg, ea);
        if (which == "rigidity") return run_rigidity(cfg, ea);
        return run_distance(cfg, ea);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
}
