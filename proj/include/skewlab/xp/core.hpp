#pragma once

// Run configuration, experiment records (JSON lines) and the deterministic task pool.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "skewlab/dyn_core.hpp"
#include "skewlab/error.hpp"

namespace skewlab::xp {

inline constexpr const char* kVersion = "skewlab 0.3.0";

/// `key = value` lines, `#` comments. Everything after a `[system]` line is a system descriptor.
class Config {
 public:
  static Config parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    bool in_system = false;
    std::ostringstream sys;
    while (std::getline(in, line)) {
      std::string raw = line;
      auto h = line.find('#');
      if (h != std::string::npos) line.resize(h);
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t == "[system]") {
        in_system = true;
        c.has_system_ = true;
        continue;
      }
      if (in_system) {
        sys << raw << '\n';
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos) throw ParseError("config line without '=': " + t);
      const std::string key = trim(t.substr(0, eq));
      if (key.empty()) throw ParseError("config line with empty key: " + t);
      c.kv_[key] = trim(t.substr(eq + 1));
    }
    c.system_text_ = sys.str();
    if (c.kv_.empty() && !c.has_system_) throw ParseError("empty config");
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  bool has(const std::string& k) const { return kv_.count(k) > 0; }
  void set(const std::string& k, const std::string& v) { kv_[k] = v; }
  const std::map<std::string, std::string>& values() const { return kv_; }

  std::string str(const std::string& k, const std::string& dflt = "") const {
    auto it = kv_.find(k);
    return it == kv_.end() ? dflt : it->second;
  }
  double num(const std::string& k, double dflt) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ParseError("config key '" + k + "' is not a number: " + it->second);
    }
  }
  std::uint64_t u64(const std::string& k, std::uint64_t dflt) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    try {
      std::size_t pos = 0;
      auto v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ParseError("config key '" + k + "' is not an unsigned integer: " + it->second);
    }
  }
  std::vector<double> nums(const std::string& k, std::vector<double> dflt) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string tok;
    while (in >> tok) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ParseError("config key '" + k + "' has a non-numeric entry: " + tok);
      }
    }
    return out;
  }

  bool has_system() const { return has_system_; }
  const std::string& system_text() const { return system_text_; }
  std::optional<SkewSystem> system() const {
    if (!has_system_) return std::nullopt;
    return SkewSystem::parse(system_text_);
  }

 private:
  static std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> kv_;
  std::string system_text_;
  bool has_system_ = false;
};

struct Record {
  std::string id;
  std::uint64_t hash = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;
  std::string metric;
  std::vector<double> values;
  std::optional<double> err;
  std::uint64_t censored = 0;
  double wall = 0;  // seconds, excluded from comparisons
  std::string version = kVersion;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["id"] = id;
    std::ostringstream h;
    h << std::hex << std::setw(16) << std::setfill('0') << hash;
    j["hash"] = h.str();
    j["seed"] = seed;
    j["params"] = params;
    j["metric"] = metric;
    nlohmann::json vals = nlohmann::json::array();
    for (double v : values) vals.push_back(encode(v));
    j["values"] = vals;
    j["err"] = err ? nlohmann::json(*err) : nlohmann::json(nullptr);
    j["censored"] = censored;
    j["wall"] = wall;
    j["version"] = version;
    return j;
  }

  static Record from_json(const nlohmann::json& j) {
    static const char* keys[] = {"id", "hash", "seed", "params", "metric", "values", "err", "censored", "wall", "version"};
    for (const char* k : keys) {
      if (!j.contains(k)) throw ParseError(std::string("record is missing field '") + k + "'");
    }
    Record r;
    try {
      r.id = j.at("id").get<std::string>();
      r.hash = std::stoull(j.at("hash").get<std::string>(), nullptr, 16);
      r.seed = j.at("seed").get<std::uint64_t>();
      r.params = j.at("params").get<std::map<std::string, std::string>>();
      r.metric = j.at("metric").get<std::string>();
      for (const auto& v : j.at("values")) r.values.push_back(decode(v));
      if (!j.at("err").is_null()) r.err = j.at("err").get<double>();
      r.censored = j.at("censored").get<std::uint64_t>();
      r.wall = j.at("wall").get<double>();
      r.version = j.at("version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("record schema mismatch: ") + e.what());
    }
    return r;
  }

  // JSON has no inf/nan; censored values travel as strings
  static nlohmann::json encode(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
  }
  static double decode(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    const auto s = v.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw ParseError("record value '" + s + "' is not a number");
  }

  /// Everything except the wall clock.
  std::string identity() const {
    auto j = to_json();
    j.erase("wall");
    return j.dump();
  }
};

inline void write_records(std::ostream& os, const std::vector<Record>& rs) {
  for (const auto& r : rs) os << r.to_json().dump() << '\n';
}

inline std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(Record::from_json(j));
  }
  return out;
}

/// f(i) for i in [0, n) on `workers` threads; results land at their index, so the
/// outcome does not depend on scheduling. The first exception (lowest index) is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned workers, const std::function<T(std::size_t)>& f) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errs(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

}  // namespace skewlab::xp
