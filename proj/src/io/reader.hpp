#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "contactlab/io/experiment.hpp"

namespace contactlab::detail {

// Reads one config table. Every accessor records the key and writes the
// resolved value to the echo; finish() rejects keys nobody asked for.
class Reader {
 public:
  Reader(const Json& in, std::string path);

  double num(const std::string& key, double def);
  std::uint64_t count(const std::string& key, std::uint64_t def);
  bool flag(const std::string& key, bool def);
  std::string str(const std::string& key, const std::string& def);
  std::vector<double> nums(const std::string& key, const std::vector<double>& def);
  void nested(const std::string& key, const std::function<void(Reader&)>& fn);
  bool has(const std::string& key) const;
  // Marks key as consumed with an externally resolved value.
  void take(const std::string& key, const Json& value);

  void finish() const;
  const Json& echo() const { return echo_; }

 private:
  const Json* find(const std::string& key);
  std::string where(const std::string& key) const;
  const Json& in_;
  std::string path_;
  std::set<std::string> used_;
  Json echo_ = Json::object();
};

// Resolved parameter table for a command; throws on anything invalid.
Json resolve_parameters(Command c, const Json& in);

}  // namespace contactlab::detail
