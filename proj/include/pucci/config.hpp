#pragma once

#include <map>
#include <string>
#include <vector>

namespace pucci {

/// Flat key/value configuration: `key = value` lines with `[section]`
/// headers. A key `k` under section `s` is stored as `s.k`. Comments start
/// with `#` or `;`.
class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "<string>");
    static Config load(const std::string& path);

    /// Applies `key=value` (dotted key).
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }

    /// Values of `other` override this one.
    void merge(const Config& other);

private:
    std::map<std::string, std::string> values_;
};

enum class KeyType { real, integer, boolean, text, real_list, choice };

struct KeySpec {
    std::string key;
    KeyType type;
    std::string default_value;
    std::vector<std::string> choices;  ///< for KeyType::choice
    std::string help;
};

/// Known configuration keys with their defaults.
const std::vector<KeySpec>& config_schema();

/// Fills defaults and checks every key against the schema. Throws
/// ConfigError listing all unknown keys and malformed values.
Config resolve_config(const Config& raw);

double parse_real(const std::string& s);
long long parse_integer(const std::string& s);
bool parse_bool(const std::string& s);
std::vector<double> parse_real_list(const std::string& s);

}  // namespace pucci
