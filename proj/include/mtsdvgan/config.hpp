#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mtsdvgan {

/// Flat `key = value` configuration. `#` starts a comment; blank lines are
/// ignored; later keys override earlier ones.
class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& source = "<config>");
    static KeyValues load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    /// Throws ValidationError naming the first key not in `known`.
    void require_known(const std::set<std::string>& known) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

private:
    std::map<std::string, std::string> values_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace mtsdvgan
