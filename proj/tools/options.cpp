#include "options.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void bad(const std::string& message) { throw std::runtime_error(message); }

} // namespace

KeyValues default_options() {
    return {
        {"grid", "50"},
        {"order", "1"},
        {"domain-lo", "-3"},
        {"domain-hi", "3"},
        {"hidden", "16"},
        {"student-hidden", "20"},
        {"activation", "relu"},
        {"alpha", "5"},
        {"beta", "1"},
        {"lambda", "0.1"},
        {"warmup", "5"},
        {"temperature", "4"},
        {"epochs", "100"},
        {"batch", "256"},
        {"lr", "0.001"},
        {"optimizer", "adam"},
        {"seed", "0"},
        {"scaler", "standard"},
        {"split", "sequential"},
        {"test-fraction", "0.2"},
        {"mask-prob", "0"},
        {"mask-seed", "0"},
        {"class-weight-normal", "1"},
        {"class-weight-attack", "1"},
    };
}

KeyValues preset_options(const std::string& name) {
    if (name == "wadi") {
        // Grid 50 / order 1, alpha 5, beta 1, lambda 0.2, warmup 5; the
        // student is the 2,522-parameter MLP for 123 inputs.
        return {
            {"grid", "50"},     {"order", "1"},          {"alpha", "5"},
            {"beta", "1"},      {"lambda", "0.2"},       {"warmup", "5"},
            {"temperature", "4"}, {"hidden", "29"},      {"student-hidden", "20"},
        };
    }
    if (name == "swat") {
        // Grid 50 / order 3, alpha 5, beta 1, lambda 0.1, warmup 80; the
        // student is the 1,622-parameter MLP for 51 inputs.
        return {
            {"grid", "50"},     {"order", "3"},          {"alpha", "5"},
            {"beta", "1"},      {"lambda", "0.1"},       {"warmup", "80"},
            {"temperature", "4"}, {"hidden", "29"},      {"student-hidden", "30"},
        };
    }
    bad("unknown preset \"" + name + "\" (expected wadi or swat)");
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config file: " + path);
    const auto known = default_options();
    KeyValues out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            bad(path + ":" + std::to_string(line_no) + ": expected `key = value`");
        }
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        if (!known.contains(key)) {
            bad(path + ":" + std::to_string(line_no) + ": unknown option \"" + key + "\"");
        }
        out[key] = value;
    }
    return out;
}

KeyValues resolve_options(const KeyValues& flags, const std::string& config_path,
                          const std::string& preset) {
    KeyValues resolved = default_options();
    if (!preset.empty()) {
        for (const auto& [k, v] : preset_options(preset)) resolved[k] = v;
    }
    if (!config_path.empty()) {
        for (const auto& [k, v] : parse_config_file(config_path)) resolved[k] = v;
    }
    for (const auto& [k, v] : flags) {
        if (!resolved.contains(k)) bad("unknown option \"" + k + "\"");
        resolved[k] = v;
    }
    return resolved;
}

int get_int(const KeyValues& kv, const std::string& key) {
    const auto& text = get_string(kv, key);
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        bad("option \"" + key + "\" expects an integer, got \"" + text + "\"");
    }
    return value;
}

double get_double(const KeyValues& kv, const std::string& key) {
    const auto& text = get_string(kv, key);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        bad("option \"" + key + "\" expects a number, got \"" + text + "\"");
    }
    return value;
}

std::uint64_t get_seed(const KeyValues& kv, const std::string& key) {
    const auto& text = get_string(kv, key);
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        bad("option \"" + key + "\" expects a non-negative integer, got \"" + text + "\"");
    }
    return value;
}

std::vector<int> get_int_list(const KeyValues& kv, const std::string& key) {
    const auto& text = get_string(kv, key);
    std::vector<int> out;
    std::string cur;
    auto flush = [&] {
        const auto item = trim(cur);
        cur.clear();
        if (item.empty()) return;
        int value = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            bad("option \"" + key + "\" expects comma-separated integers, got \"" + text + "\"");
        }
        out.push_back(value);
    };
    for (char c : text) {
        if (c == ',') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    if (out.empty()) bad("option \"" + key + "\" must not be empty");
    return out;
}

const std::string& get_string(const KeyValues& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) bad("missing option \"" + key + "\"");
    return it->second;
}

std::string resolve_output_path(const std::string& path) {
    const char* base = std::getenv("KANDISTILL_OUT_DIR");
    if (!base || !*base || path.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base) / p).string();
}

} // namespace cli
