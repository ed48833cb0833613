#include "ehss/spec_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ehss {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

SpecFile SpecFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

SpecFile SpecFile::parse_string(const std::string& text, const std::string& origin) {
    SpecFile spec;
    spec.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": unterminated section header",
                                  line_no);
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value",
                              line_no);
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key", line_no);
        }
        auto& sec = spec.sections_[section];
        if (sec.count(key)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                                  "' in section [" + section + "]",
                              line_no);
        }
        sec[key] = Entry{value, line_no, false};
    }
    return spec;
}

const SpecFile::Entry* SpecFile::find(const std::string& section, const std::string& key) const {
    auto s = sections_.find(lower(section));
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(lower(key));
    if (k == s->second.end()) return nullptr;
    k->second.consumed = true;
    return &k->second;
}

bool SpecFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string SpecFile::get_string(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double SpecFile::get_double(const std::string& section, const std::string& key,
                            double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument(e->value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": '" + e->value +
                              "' is not a number (key '" + key + "')",
                          e->line);
    }
}

int SpecFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    const double v = get_double(section, key, fallback);
    const Entry* e = find(section, key);
    if (e && v != static_cast<int>(v)) {
        throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                              "' requires an integer",
                          e->line);
    }
    return static_cast<int>(v);
}

bool SpecFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const std::string v = lower(e->value);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                          "' requires true/false",
                      e->line);
}

std::vector<std::string> SpecFile::get_list(const std::string& section,
                                            const std::string& key) const {
    const Entry* e = find(section, key);
    std::vector<std::string> out;
    if (!e) return out;
    std::istringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void SpecFile::check_all_consumed() const {
    for (const auto& [section, entries] : sections_) {
        for (const auto& [key, e] : entries) {
            if (!e.consumed) {
                throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" + key +
                                      "' in section [" + section + "]",
                                  e.line);
            }
        }
    }
}

}  // namespace ehss
