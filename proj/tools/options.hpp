#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cli {

using KeyValues = std::map<std::string, std::string>;

// Built-in defaults for every tunable knob.
KeyValues default_options();

// Values bundled by --preset {wadi|swat}.
KeyValues preset_options(const std::string& name);

// Plain `key = value` text; '#' starts a comment. Unknown keys are errors.
KeyValues parse_config_file(const std::string& path);

// Precedence: flags > config file > preset > built-in defaults.
KeyValues resolve_options(const KeyValues& flags, const std::string& config_path,
                          const std::string& preset);

// Typed getters; throw std::runtime_error naming the key on bad values.
int get_int(const KeyValues& kv, const std::string& key);
double get_double(const KeyValues& kv, const std::string& key);
std::uint64_t get_seed(const KeyValues& kv, const std::string& key);
std::vector<int> get_int_list(const KeyValues& kv, const std::string& key);
const std::string& get_string(const KeyValues& kv, const std::string& key);

// Relative output paths are placed under $KANDISTILL_OUT_DIR when set.
std::string resolve_output_path(const std::string& path);

} // namespace cli
