#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ehss/errors.hpp"

namespace ehss {

/// Minimal key-value configuration format with [section] headers,
/// `key = value` entries and `#` comments. Unknown keys are reported with
/// their line number when the consumer asks for strict validation.
class SpecFile {
public:
    static SpecFile parse_file(const std::filesystem::path& path);
    static SpecFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    /// Comma-separated list value.
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

    /// Throws ConfigError naming the first entry whose (section, key) pair was
    /// never read through one of the getters above.
    void check_all_consumed() const;

    const std::string& origin() const { return origin_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::string origin_;

    const Entry* find(const std::string& section, const std::string& key) const;
};

}  // namespace ehss
