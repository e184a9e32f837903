#include "jumpflow/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "jumpflow/csv.hpp"

namespace jumpflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

struct Parser {
    ParseResult result;
    ExperimentConfig cfg;

    void error(int line, const std::string& msg) { result.errors.push_back({line, msg}); }
    void warn(int line, const std::string& msg) {
        result.warnings.push_back("line " + std::to_string(line) + ": " + msg);
    }

    bool to_double(int line, const std::string& key, const std::string& v, double& out) {
        char* end = nullptr;
        out = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0') {
            error(line, key + ": not a number: '" + v + "'");
            return false;
        }
        return true;
    }

    bool to_int(int line, const std::string& key, const std::string& v, long long& out) {
        char* end = nullptr;
        out = std::strtoll(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0') {
            error(line, key + ": not an integer: '" + v + "'");
            return false;
        }
        return true;
    }

    void require(int line, bool ok, const std::string& msg) {
        if (!ok) error(line, msg);
    }

    void handle(int line, const std::string& section, const std::string& key, const std::string& value) {
        double d = 0.0;
        long long n = 0;
        if (section == "grid") {
            if (key == "n_interior") {
                if (to_int(line, key, value, n)) {
                    require(line, n >= 1 && n <= 4096, "n_interior must be in [1, 4096]");
                    cfg.n_interior = static_cast<int>(n);
                }
            } else {
                error(line, "unknown key [grid] " + key);
            }
        } else if (section == "operator") {
            if (key == "kind") {
                require(line, value == "laplacian" || value == "fractional",
                        "operator kind must be laplacian or fractional");
                cfg.operator_kind = value;
            } else if (key == "s") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0 && d <= 1.0, "fractional order s must be in (0, 1]");
                    cfg.fractional_s = d;
                }
            } else {
                error(line, "unknown key [operator] " + key);
            }
        } else if (section == "nonlinearity") {
            double* slot = key == "a0"    ? &cfg.a0
                           : key == "a1"  ? &cfg.a1
                           : key == "a3"  ? &cfg.a3
                           : key == "a5"  ? &cfg.a5
                           : key == "eta" ? &cfg.eta
                                          : nullptr;
            if (!slot) {
                error(line, "unknown key [nonlinearity] " + key);
            } else if (to_double(line, key, value, d)) {
                if (key == "a1" || key == "a3" || key == "a5")
                    require(line, d >= 0.0, key + " must be >= 0");
                *slot = d;
            }
        } else if (section == "noise") {
            if (key == "kind") {
                require(line, value == "multiplicative" || value == "additive",
                        "noise kind must be multiplicative or additive");
                cfg.noise_kind = value;
            } else if (key == "marks") {
                // "sigma:mass" pairs, whitespace-separated.
                std::vector<std::pair<double, double>> marks;
                for (const std::string& tok : split_ws(value)) {
                    const auto colon = tok.find(':');
                    if (colon == std::string::npos) {
                        error(line, "marks: expected sigma:mass, got '" + tok + "'");
                        continue;
                    }
                    double sig = 0.0, mass = 0.0;
                    if (to_double(line, "marks.sigma", tok.substr(0, colon), sig) &&
                        to_double(line, "marks.mass", tok.substr(colon + 1), mass)) {
                        require(line, mass > 0.0, "mark mass must be > 0");
                        marks.emplace_back(sig, mass);
                    }
                }
                cfg.marks = std::move(marks);
            } else if (key == "g") {
                require(line,
                        value == "identity" || value == "constant" || value == "tanh" || value == "zero",
                        "g must be identity, constant, tanh or zero");
                cfg.g_kind = value;
            } else if (key == "profile") {
                require(line, value == "flat" || value == "sine", "profile must be flat or sine");
                cfg.profile = value;
            } else if (key == "profile_mode") {
                if (to_int(line, key, value, n)) {
                    require(line, n >= 1, "profile_mode must be >= 1");
                    cfg.profile_mode = static_cast<int>(n);
                }
            } else {
                error(line, "unknown key [noise] " + key);
            }
        } else if (section == "solver") {
            if (key == "T") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0, "T must be > 0");
                    cfg.T = d;
                }
            } else if (key == "dt") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0, "dt must be > 0");
                    cfg.dt = d;
                }
            } else if (key == "lambda") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0, "lambda must be > 0");
                    cfg.lambda = d;
                }
            } else if (key == "lambda_seq") {
                std::vector<double> seq;
                for (const std::string& tok : split_ws(value)) {
                    if (to_double(line, key, tok, d)) {
                        require(line, d > 0.0, "lambda_seq entries must be > 0");
                        seq.push_back(d);
                    }
                }
                require(line, std::is_sorted(seq.rbegin(), seq.rend()) && !seq.empty(),
                        "lambda_seq must be decreasing");
                cfg.lambda_seq = std::move(seq);
            } else if (key == "alpha") {
                if (value == "auto") {
                    cfg.alpha_auto = true;
                } else if (to_double(line, key, value, d)) {
                    require(line, d >= 0.0, "alpha must be >= 0 or auto");
                    cfg.alpha_auto = false;
                    cfg.alpha = d;
                }
            } else if (key == "tol") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0, "tol must be > 0");
                    cfg.tol = d;
                }
            } else if (key == "picard_tol") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0, "picard_tol must be > 0");
                    cfg.picard_tol = d;
                }
            } else if (key == "x0") {
                require(line, value == "sine" || value == "constant" || value == "zero",
                        "x0 must be sine, constant or zero");
                cfg.x0_kind = value;
            } else if (key == "x0_amp") {
                if (to_double(line, key, value, d)) cfg.x0_amp = d;
            } else if (key == "x0_mode") {
                if (to_int(line, key, value, n)) {
                    require(line, n >= 1, "x0_mode must be >= 1");
                    cfg.x0_mode = static_cast<int>(n);
                }
            } else {
                error(line, "unknown key [solver] " + key);
            }
        } else if (section == "experiment") {
            static const std::set<std::string> names = {
                "simulate", "bj", "bjconv", "apriori", "stability", "lipschitz",
                "yosida",  "generalized", "mixing", "backward", "kb", "moment_ode"};
            if (key == "name") {
                require(line, names.count(value) > 0, "unknown experiment name '" + value + "'");
                cfg.name = value;
            } else if (key == "samples") {
                if (to_int(line, key, value, n)) {
                    require(line, n >= 1, "samples must be >= 1");
                    cfg.samples = static_cast<long>(n);
                }
            } else if (key == "seed") {
                if (to_int(line, key, value, n)) {
                    require(line, n >= 0, "seed must be >= 0");
                    cfg.seed = static_cast<std::uint64_t>(n);
                }
            } else if (key == "horizon") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0, "horizon must be > 0");
                    cfg.horizon = d;
                }
            } else if (key == "dx_amp") {
                if (to_double(line, key, value, d)) cfg.dx_amp = d;
            } else if (key == "dx_mode") {
                if (to_int(line, key, value, n)) {
                    require(line, n >= 1, "dx_mode must be >= 1");
                    cfg.dx_mode = static_cast<int>(n);
                }
            } else if (key == "dg_amp") {
                if (to_double(line, key, value, d)) cfg.dg_amp = d;
            } else if (key == "s_levels") {
                std::vector<double> s;
                for (const std::string& tok : split_ws(value)) {
                    if (to_double(line, key, tok, d)) {
                        require(line, d < 0.0, "s_levels must be negative");
                        s.push_back(d);
                    }
                }
                require(line, std::is_sorted(s.rbegin(), s.rend()) && !s.empty(),
                        "s_levels must decrease");
                cfg.s_levels = std::move(s);
            } else if (key == "kb_spacing") {
                if (to_double(line, key, value, d)) {
                    require(line, d > 0.0, "kb_spacing must be > 0");
                    cfg.kb_spacing = d;
                }
            } else if (key == "cutoff_levels") {
                std::vector<int> lv;
                for (const std::string& tok : split_ws(value)) {
                    if (to_int(line, key, tok, n)) {
                        require(line, n >= 1, "cutoff_levels must be >= 1");
                        lv.push_back(static_cast<int>(n));
                    }
                }
                require(line, std::is_sorted(lv.begin(), lv.end()) && !lv.empty(),
                        "cutoff_levels must increase");
                cfg.cutoff_levels = std::move(lv);
            } else {
                error(line, "unknown key [experiment] " + key);
            }
        } else {
            error(line, "unknown section [" + section + "]");
        }
    }
};

} // namespace

ParseResult parse_config(const std::string& text) {
    Parser p;
    static const std::set<std::string> known_sections = {"grid", "operator", "nonlinearity",
                                                         "noise", "solver", "experiment"};
    std::set<std::pair<std::string, std::string>> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                p.error(line_no, "malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known_sections.count(section))
                p.error(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.error(line_no, "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            p.error(line_no, "key outside any section: " + key);
            continue;
        }
        if (!known_sections.count(section)) continue; // already reported
        if (!seen.insert({section, key}).second)
            p.warn(line_no, "duplicate key '" + key + "' in [" + section + "]; last one wins");
        p.handle(line_no, section, key, value);
    }

    if (p.result.errors.empty()) p.result.config = p.cfg;
    return p.result;
}

std::string dump_config(const ExperimentConfig& c) {
    std::string s;
    auto kv = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    s += "[grid]\n";
    kv("n_interior", std::to_string(c.n_interior));
    s += "\n[operator]\n";
    kv("kind", c.operator_kind);
    if (c.operator_kind == "fractional") kv("s", format_double(c.fractional_s));
    s += "\n[nonlinearity]\n";
    kv("a0", format_double(c.a0));
    kv("a1", format_double(c.a1));
    kv("a3", format_double(c.a3));
    kv("a5", format_double(c.a5));
    kv("eta", format_double(c.eta));
    s += "\n[noise]\n";
    kv("kind", c.noise_kind);
    {
        std::string m;
        for (auto [sig, mass] : c.marks) m += format_double(sig) + ":" + format_double(mass) + " ";
        if (!m.empty()) m.pop_back();
        kv("marks", m);
    }
    kv("g", c.g_kind);
    kv("profile", c.profile);
    kv("profile_mode", std::to_string(c.profile_mode));
    s += "\n[solver]\n";
    kv("T", format_double(c.T));
    kv("dt", format_double(c.dt));
    kv("lambda", format_double(c.lambda));
    {
        std::string l;
        for (double v : c.lambda_seq) l += format_double(v) + " ";
        if (!l.empty()) l.pop_back();
        kv("lambda_seq", l);
    }
    kv("alpha", c.alpha_auto ? "auto" : format_double(c.alpha));
    kv("tol", format_double(c.tol));
    kv("picard_tol", format_double(c.picard_tol));
    kv("x0", c.x0_kind);
    kv("x0_amp", format_double(c.x0_amp));
    kv("x0_mode", std::to_string(c.x0_mode));
    s += "\n[experiment]\n";
    kv("name", c.name);
    kv("samples", std::to_string(c.samples));
    kv("seed", std::to_string(c.seed));
    if (c.horizon > 0.0) kv("horizon", format_double(c.horizon));
    kv("dx_amp", format_double(c.dx_amp));
    kv("dx_mode", std::to_string(c.dx_mode));
    kv("dg_amp", format_double(c.dg_amp));
    {
        std::string l;
        for (double v : c.s_levels) l += format_double(v) + " ";
        if (!l.empty()) l.pop_back();
        kv("s_levels", l);
    }
    kv("kb_spacing", format_double(c.kb_spacing));
    {
        std::string l;
        for (int v : c.cutoff_levels) l += std::to_string(v) + " ";
        if (!l.empty()) l.pop_back();
        kv("cutoff_levels", l);
    }
    return s;
}

} // namespace jumpflow
