#pragma once

#include <map>
#include <string>

#include "chronospike/training.hpp"

namespace chronospike {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// flat "key = value" text, '#' comments, one pair per line
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

// apply pairs onto a TrainConfig; unknown keys are rejected
void apply_config(TrainConfig& cfg, const std::map<std::string, std::string>& kv);

// full key = value dump of the effective configuration
std::string dump_config(const TrainConfig& cfg);

}  // namespace chronospike
