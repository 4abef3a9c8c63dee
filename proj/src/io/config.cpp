#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "contactlab/error.hpp"
#include "contactlab/io/experiment.hpp"
#include "reader.hpp"

namespace contactlab {
namespace {

constexpr std::array<std::pair<Command, const char*>, 9> kCommands{{
    {Command::twobody, "twobody"},
    {Command::resonance, "resonance"},
    {Command::contact_spectrum, "contact-spectrum"},
    {Command::critical, "critical"},
    {Command::gp_groundstate, "gp-groundstate"},
    {Command::gp_evolve, "gp-evolve"},
    {Command::sweep, "sweep"},
    {Command::bs_kernel, "bs-kernel"},
    {Command::cross_term, "cross-term"},
}};

void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(2 * (indent + 1), ' '), close(2 * indent, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), indent + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], indent + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_number(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

std::string to_string(Command c) {
  for (const auto& [k, name] : kCommands)
    if (k == c) return name;
  return "unknown";
}

Command command_from_string(const std::string& s) {
  for (const auto& [k, name] : kCommands)
    if (s == name) return k;
  std::string list;
  for (const auto& [k, name] : kCommands) list += std::string(list.empty() ? "" : ", ") + name;
  throw ValidationError("command", "unknown command '" + s + "' (expected one of " + list + ")");
}

Json ExperimentConfig::to_json() const {
  Json j = Json::object();
  j["command"] = to_string(command);
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["parameters"] = parameters;
  return j;
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config_open", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config_parse", path.string() + ": " + e.what());
  }
}

ExperimentConfig resolve_config(const Json& doc, std::optional<Command> command) {
  if (!doc.is_object()) throw ValidationError("config_type", "config must be a JSON object");
  detail::Reader top(doc, "");
  ExperimentConfig cfg;
  const std::string name = top.str("command", command ? to_string(*command) : "");
  if (name.empty()) throw ValidationError("command", "no command given");
  cfg.command = command_from_string(name);
  if (command && *command != cfg.command)
    throw ValidationError("command", "config is for '" + name + "' but '" + to_string(*command) + "' was requested");
  cfg.seed = top.count("seed", 0);
  cfg.output_dir = top.str("output_dir", "out");
  if (cfg.output_dir.empty()) throw ValidationError("output_dir", "output_dir must not be empty");
  static const Json empty = Json::object();
  const Json& params = doc.contains("parameters") ? doc["parameters"] : empty;
  if (!params.is_object()) throw ValidationError("config_type", "parameters must be a table");
  cfg.parameters = detail::resolve_parameters(cfg.command, params);
  top.take("parameters", cfg.parameters);
  top.finish();
  return cfg;
}

namespace detail {

Reader::Reader(const Json& in, std::string path) : in_(in), path_(std::move(path)) {
  if (!in_.is_object()) throw ValidationError("config_type", (path_.empty() ? "config" : path_) + " must be a table");
}

std::string Reader::where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

const Json* Reader::find(const std::string& key) {
  used_.insert(key);
  auto it = in_.find(key);
  return it == in_.end() ? nullptr : &*it;
}

bool Reader::has(const std::string& key) const { return in_.contains(key); }

double Reader::num(const std::string& key, double def) {
  double v = def;
  if (const Json* j = find(key)) {
    if (!j->is_number()) throw ValidationError("config_type", where(key) + " must be a number");
    v = j->get<double>();
  }
  echo_[key] = v;
  return v;
}

std::uint64_t Reader::count(const std::string& key, std::uint64_t def) {
  std::uint64_t v = def;
  if (const Json* j = find(key)) {
    if (!j->is_number_integer() || (!j->is_number_unsigned() && j->get<std::int64_t>() < 0))
      throw ValidationError("config_type", where(key) + " must be a nonnegative integer");
    v = j->get<std::uint64_t>();
  }
  echo_[key] = v;
  return v;
}

bool Reader::flag(const std::string& key, bool def) {
  bool v = def;
  if (const Json* j = find(key)) {
    if (!j->is_boolean()) throw ValidationError("config_type", where(key) + " must be true or false");
    v = j->get<bool>();
  }
  echo_[key] = v;
  return v;
}

std::string Reader::str(const std::string& key, const std::string& def) {
  std::string v = def;
  if (const Json* j = find(key)) {
    if (!j->is_string()) throw ValidationError("config_type", where(key) + " must be a string");
    v = j->get<std::string>();
  }
  echo_[key] = v;
  return v;
}

std::vector<double> Reader::nums(const std::string& key, const std::vector<double>& def) {
  std::vector<double> v = def;
  if (const Json* j = find(key)) {
    if (!j->is_array()) throw ValidationError("config_type", where(key) + " must be a list of numbers");
    v.clear();
    for (const auto& e : *j) {
      if (!e.is_number()) throw ValidationError("config_type", where(key) + " must be a list of numbers");
      v.push_back(e.get<double>());
    }
  }
  Json arr = Json::array();
  for (double x : v) arr.push_back(x);
  echo_[key] = std::move(arr);
  return v;
}

void Reader::nested(const std::string& key, const std::function<void(Reader&)>& fn) {
  static const Json empty = Json::object();
  const Json* j = find(key);
  Reader sub(j ? *j : empty, where(key));
  fn(sub);
  sub.finish();
  echo_[key] = sub.echo_;
}

void Reader::take(const std::string& key, const Json& value) {
  used_.insert(key);
  echo_[key] = value;
}

void Reader::finish() const {
  for (auto it = in_.begin(); it != in_.end(); ++it)
    if (!used_.count(it.key())) throw ValidationError("unknown_key", "unknown key '" + where(it.key()) + "'");
}

}  // namespace detail
}  // namespace contactlab
