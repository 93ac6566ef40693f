#include "cli_support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "jspec/version.hpp"

namespace jspec::cli {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json metadata_object(const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = meta.command;
  j["config_hash"] = meta.config_hash();
  j["seed"] = meta.seed;
  j["config"] = meta.config;
  return j;
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

}  // namespace

std::string RunMetadata::config_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : config) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string metadata_comment(const RunMetadata& meta) {
  std::ostringstream os;
  os << "# version: " << kVersion << "\n";
  os << "# command: " << meta.command << "\n";
  os << "# config_hash: " << meta.config_hash() << "\n";
  os << "# seed: " << meta.seed << "\n";
  for (const auto& [k, v] : meta.config) os << "# config." << k << ": " << v << "\n";
  return os.str();
}

std::string metadata_json(const RunMetadata& meta) { return metadata_object(meta).dump(2); }

std::string table_csv(const Table& t, const RunMetadata& meta) {
  std::ostringstream os;
  os << metadata_comment(meta);
  for (const auto& n : t.notes) os << "# " << n << "\n";
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << csv_escape(t.header[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string table_json(const Table& t, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["metadata"] = metadata_object(meta);
  j["notes"] = t.notes;
  j["columns"] = t.header;
  j["rows"] = t.rows;
  return j.dump(2) + "\n";
}

void write_files(const std::vector<std::pair<std::string, std::string>>& files) {
  for (const auto& [path, content] : files) {
    const std::string tmp = path + ".partial";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
      out << content;
      if (!out) throw std::runtime_error("write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
  }
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw std::invalid_argument("config file '" + path + "' must hold a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back("--" + key);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + json_scalar(v);
      injected.insert(injected.end(), {"--" + key, joined});
    } else if (value.is_null() || value.is_object()) {
      throw std::invalid_argument("config key '" + key + "' must be a scalar, boolean or list");
    } else {
      injected.insert(injected.end(), {"--" + key, json_scalar(value)});
    }
  }
  // after the subcommand (first non-option token) and, for verify, after its positional
  std::size_t at = 0;
  while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;
  if (at < args.size()) ++at;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
  return args;
}

double keyed_value(const std::string& text, const std::string& key) {
  std::string v = text;
  const auto eq = text.find('=');
  if (eq != std::string::npos) {
    if (text.substr(0, eq) != key) throw std::invalid_argument("expected '" + key + "=VALUE', got '" + text + "'");
    v = text.substr(eq + 1);
  }
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("'" + text + "' is not a number");
  return x;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("'" + text + "' is not a list of integers");
    out.push_back(v);
  }
  return out;
}

}  // namespace jspec::cli
