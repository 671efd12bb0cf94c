#include "pucci/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pucci/errors.hpp"

namespace pucci {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string s = "configuration error";
    for (const auto& i : issues) s += "\n  " + i;
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues) : Error(join_issues(issues)), issues_(std::move(issues)) {}

Config Config::parse(const std::string& text, const std::string& source) {
    Config c;
    std::vector<std::string> issues;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                issues.push_back(source + ":" + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back(source + ":" + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) {
            issues.push_back(source + ":" + std::to_string(lineno) + ": empty key");
            continue;
        }
        c.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    if (!issues.empty()) throw ConfigError(issues);
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
        throw ConfigError({"override '" + assignment + "' is not key=value"});
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError({"missing key '" + key + "'"});
    return it->second;
}

void Config::merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InputError("'" + s + "' is not a number");
    }
    if (pos != s.size() || !std::isfinite(v)) {
        // Allow simple fractions such as 1/32.
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            const double num = parse_real(trim(s.substr(0, slash)));
            const double den = parse_real(trim(s.substr(slash + 1)));
            if (den != 0.0) return num / den;
        }
        throw InputError("'" + s + "' is not a finite number");
    }
    return v;
}

long long parse_integer(const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw InputError("'" + s + "' is not an integer");
    }
    if (pos != s.size()) throw InputError("'" + s + "' is not an integer");
    return v;
}

bool parse_bool(const std::string& s) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
    if (l == "false" || l == "0" || l == "no" || l == "off") return false;
    throw InputError("'" + s + "' is not a boolean");
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_real(item));
    }
    return out;
}

const std::vector<KeySpec>& config_schema() {
    static const std::vector<KeySpec> schema = {
        {"run.experiment",
         KeyType::choice,
         "eval",
         {"eval", "radial-eig", "grid-eig", "solve", "symmetry", "verify-paper", "sweep"},
         "experiment to run"},
        {"run.seed", KeyType::integer, "42", {}, "random seed"},
        {"run.out_dir", KeyType::text, "results", {}, "output root"},
        {"run.workers", KeyType::integer, "1", {}, "concurrent runs in a sweep"},
        {"run.snapshots", KeyType::boolean, "true", {}, "write field snapshots"},
        {"domain.kind",
         KeyType::choice,
         "disc",
         {"disc", "ball", "annulus", "cap_disc", "cap_annulus", "rectangle", "ellipse"},
         "domain shape"},
        {"domain.radius", KeyType::real, "1", {}, "outer radius"},
        {"domain.inner", KeyType::real, "0.5", {}, "annulus inner radius"},
        {"domain.a", KeyType::real, "1", {}, "rectangle/ellipse half-width along x"},
        {"domain.b", KeyType::real, "1", {}, "rectangle/ellipse half-width along y"},
        {"domain.cut_angle", KeyType::real, "0", {}, "cap normal angle (radians)"},
        {"ell.alpha", KeyType::real, "1", {}, "lower ellipticity constant"},
        {"ell.beta", KeyType::real, "1", {}, "upper ellipticity constant"},
        {"grid.h", KeyType::real, "0.03125", {}, "grid spacing"},
        {"grid.directions", KeyType::integer, "16", {}, "stencil directions"},
        {"nl.c0", KeyType::real, "0", {}, "f constant term"},
        {"nl.c1", KeyType::real, "0", {}, "f linear coefficient"},
        {"nl.p", KeyType::real, "1", {}, "power exponent"},
        {"nl.c_p", KeyType::real, "0", {}, "power coefficient"},
        {"nl.mu", KeyType::real, "0", {}, "linear shift"},
        {"eval.matrix", KeyType::text, "2,0;0,-3", {}, "symmetric matrix rows separated by ';'"},
        {"eval.frames", KeyType::integer, "10000", {}, "random frames of the sup oracle"},
        {"eig.sign", KeyType::choice, "plus", {"plus", "minus"}, "operator M+ or M-"},
        {"eig.cone", KeyType::choice, "both", {"positive", "negative", "both"}, "principal cone"},
        {"eig.c0", KeyType::real, "0", {}, "constant potential"},
        {"eig.zeros", KeyType::integer, "1", {}, "highest interior zero count for radial eigenvalues"},
        {"eig.step", KeyType::real, "0", {}, "radial integration step (0: default)"},
        {"eig.family", KeyType::choice, "none", {"none", "caps", "concentric"}, "split-family estimates"},
        {"family.directions", KeyType::integer, "32", {}, "cap normals"},
        {"family.offsets", KeyType::integer, "17", {}, "cap offsets"},
        {"family.radii", KeyType::integer, "33", {}, "concentric radii"},
        {"solve.init_slope", KeyType::real, "1", {}, "radial shooting amplitude scan start"},
        {"solve.target_zeros", KeyType::integer, "0", {}, "radial interior zeros"},
        {"solve.initial_amplitude", KeyType::real, "0", {}, "grid initial guess A (1 - |x|^2/R^2)"},
        {"symmetry.field",
         KeyType::choice,
         "solve",
         {"solve", "gaussian", "x1", "x1x2", "doubly", "eigen"},
         "field to analyse"},
        {"symmetry.directions", KeyType::integer, "16", {}, "reflection directions"},
        {"symmetry.zero_band", KeyType::real, "-1", {}, "nodal zero band (negative: default)"},
        {"suite.name",
         KeyType::choice,
         "lame",
         {"eigengap", "monotonicity", "lame", "radminus", "stable", "fss-convex", "doubly-symmetric", "pis-properties"},
         "verification suite"},
        {"suite.ratios", KeyType::real_list, "1,2,5", {}, "beta/alpha values"},
        {"sweep.experiment",
         KeyType::choice,
         "radial-eig",
         {"eval", "radial-eig", "grid-eig", "solve", "symmetry", "verify-paper"},
         "experiment per sweep point"},
        {"sweep.axis", KeyType::text, "ell.beta", {}, "numeric key to vary"},
        {"sweep.values", KeyType::real_list, "", {}, "values of the axis"},
    };
    return schema;
}

Config resolve_config(const Config& raw) {
    std::vector<std::string> issues;
    Config out;
    const auto& schema = config_schema();
    for (const auto& s : schema) out.set(s.key, s.default_value);
    for (const auto& [key, value] : raw.values()) {
        auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.key == key; });
        if (it == schema.end()) {
            issues.push_back("unknown key '" + key + "'");
            continue;
        }
        try {
            switch (it->type) {
                case KeyType::real:
                    parse_real(value);
                    break;
                case KeyType::integer:
                    parse_integer(value);
                    break;
                case KeyType::boolean:
                    parse_bool(value);
                    break;
                case KeyType::real_list:
                    parse_real_list(value);
                    break;
                case KeyType::choice:
                    if (std::find(it->choices.begin(), it->choices.end(), value) == it->choices.end())
                        throw InputError("'" + value + "' is not one of the allowed values");
                    break;
                case KeyType::text:
                    break;
            }
        } catch (const InputError& e) {
            issues.push_back("key '" + key + "': " + e.what());
            continue;
        }
        out.set(key, value);
    }
    if (!issues.empty()) throw ConfigError(issues);
    return out;
}

}  // namespace pucci
