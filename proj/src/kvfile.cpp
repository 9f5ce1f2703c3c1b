#include "fcm/kvfile.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fcm {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    std::ostringstream os;
    os << "config parse error at line " << line << ": " << msg;
    throw std::invalid_argument(os.str());
}

} // namespace

KvFile parse_kv_text(const std::string& text) {
    KvFile out;
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        auto hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(lineno, "empty key");
        out.entries.push_back({section, key, value, lineno});
    }
    return out;
}

KvFile parse_kv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_kv_text(buf.str());
}

bool KvFile::has(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return true;
    return false;
}

std::string KvFile::get(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return e.value;
    throw std::invalid_argument("missing config key: " + key);
}

std::string KvFile::get_or(const std::string& key, const std::string& def) const {
    for (const auto& e : entries)
        if (e.key == key) return e.value;
    return def;
}

double KvFile::get_double(const std::string& key) const {
    return std::stod(get(key));
}

std::int64_t KvFile::get_int(const std::string& key) const {
    return std::stoll(get(key));
}

std::uint64_t KvFile::get_u64(const std::string& key) const {
    return std::stoull(get(key));
}

bool KvFile::get_bool(const std::string& key, bool def) const {
    if (!has(key)) return def;
    std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("bad boolean for key " + key + ": " + v);
}

std::vector<double> KvFile::get_double_list(const std::string& key) const {
    return split_doubles(get(key));
}

std::vector<std::int64_t> KvFile::get_int_list(const std::string& key) const {
    return split_ints(get(key));
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::int64_t> split_ints(const std::string& s) {
    std::vector<std::int64_t> out;
    for (double d : split_doubles(s)) out.push_back(static_cast<std::int64_t>(d));
    return out;
}

} // namespace fcm
