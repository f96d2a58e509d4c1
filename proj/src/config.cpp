#include "chronospike/config.hpp"

#include <fstream>
#include <sstream>

namespace chronospike {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<size_t> parse_size_list(const std::string& v, const std::string& key) {
  std::vector<size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stoul(item));
    } catch (...) {
      throw ConfigError("config: bad list entry '" + item + "' for " + key);
    }
  }
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

double parse_num(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError("");
    return d;
  } catch (...) {
    throw ConfigError("config: bad number '" + v + "' for " + key);
  }
}

uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    uint64_t d = std::stoull(v, &pos);
    if (pos != v.size()) throw ConfigError("");
    return d;
  } catch (...) {
    throw ConfigError("config: bad integer '" + v + "' for " + key);
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw ConfigError("config: bad boolean '" + v + "' for " + key);
}

std::string join(const std::vector<size_t>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) +
                                       ": empty key");
    out[key] = val;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config(TrainConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, val] : kv) {
    if (key == "lr") cfg.lr = parse_num(val, key);
    else if (key == "batch_size") cfg.batch_size = parse_u64(val, key);
    else if (key == "epochs") cfg.epochs = parse_u64(val, key);
    else if (key == "lambda_con") cfg.lambda_con = parse_num(val, key);
    else if (key == "tau_con") cfg.tau_con = parse_num(val, key);
    else if (key == "p_con") cfg.p_con = parse_num(val, key);
    else if (key == "dropout") cfg.dropout = parse_num(val, key);
    else if (key == "clip_norm") cfg.clip_norm = parse_num(val, key);
    else if (key == "weight_decay") cfg.weight_decay = parse_num(val, key);
    else if (key == "patience") cfg.patience = parse_u64(val, key);
    else if (key == "sampling_p") cfg.sampling_p = parse_num(val, key);
    else if (key == "fanouts") cfg.fanouts = parse_size_list(val, key);
    else if (key == "hidden") cfg.hidden = parse_size_list(val, key);
    else if (key == "heads") cfg.heads = parse_u64(val, key);
    else if (key == "t_max") cfg.t_max = parse_u64(val, key);
    else if (key == "alpha") cfg.alpha = parse_num(val, key);
    else if (key == "seed") cfg.seed = parse_u64(val, key);
    else if (key == "infer_batch") cfg.infer_batch = parse_u64(val, key);
    else if (key == "causal_mask") cfg.causal_mask = parse_bool(val, key);
    else if (key == "sum_aggregation") cfg.sum_aggregation = parse_bool(val, key);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
}

std::string dump_config(const TrainConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "lr = " << cfg.lr << "\n";
  os << "batch_size = " << cfg.batch_size << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "lambda_con = " << cfg.lambda_con << "\n";
  os << "tau_con = " << cfg.tau_con << "\n";
  os << "p_con = " << cfg.p_con << "\n";
  os << "dropout = " << cfg.dropout << "\n";
  os << "clip_norm = " << cfg.clip_norm << "\n";
  os << "weight_decay = " << cfg.weight_decay << "\n";
  os << "patience = " << cfg.patience << "\n";
  os << "sampling_p = " << cfg.sampling_p << "\n";
  os << "fanouts = " << join(cfg.fanouts) << "\n";
  os << "hidden = " << join(cfg.hidden) << "\n";
  os << "heads = " << cfg.heads << "\n";
  os << "t_max = " << cfg.t_max << "\n";
  os << "alpha = " << cfg.alpha << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "infer_batch = " << cfg.infer_batch << "\n";
  os << "causal_mask = " << (cfg.causal_mask ? 1 : 0) << "\n";
  os << "sum_aggregation = " << (cfg.sum_aggregation ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace chronospike
