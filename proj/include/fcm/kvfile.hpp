#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fcm {

// Flat key-value text format shared by model files, schedules and sweep
// configs:  optional [section] headers, `key = value` lines, `#` comments.
struct KvEntry {
    std::string section; // "" before any section header
    std::string key;
    std::string value;
    int line;
};

struct KvFile {
    std::vector<KvEntry> entries;

    bool has(const std::string& key) const;
    // Lookup helpers; `get` throws std::invalid_argument when missing.
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key, bool def) const;

    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& key) const;
};

KvFile parse_kv_text(const std::string& text);
KvFile parse_kv_file(const std::string& path);

// Parse a comma-separated list of numbers.
std::vector<double> split_doubles(const std::string& s);
std::vector<std::int64_t> split_ints(const std::string& s);

} // namespace fcm
