#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skewlab/xp/core.hpp"

namespace skewlab::xp {

struct Context {
  Config cfg = Config::parse("experiment = none");
  std::uint64_t seed = 1;
  unsigned workers = 1;
  unsigned bits = 256;
  std::optional<SkewSystem> system;  // replaces the default system where an experiment has one
};

/// Stamps id, hash, seed and parameters onto each record.
class Emitter {
 public:
  Emitter(std::string id, const Context& ctx, std::uint64_t hash = 0)
      : id_(std::move(id)), seed_(ctx.seed), hash_(hash) {}

  void set_hash(std::uint64_t h) { hash_ = h; }

  Record& emit(const std::string& metric, std::vector<double> values,
               std::map<std::string, std::string> params = {}, std::optional<double> err = std::nullopt,
               std::uint64_t censored = 0) {
    Record r;
    r.id = id_;
    r.hash = hash_;
    r.seed = seed_;
    r.params = std::move(params);
    r.metric = metric;
    r.values = std::move(values);
    r.err = err;
    r.censored = censored;
    r.wall = clock_.seconds();
    out_.push_back(std::move(r));
    return out_.back();
  }

  std::vector<Record> take() { return std::move(out_); }

 private:
  std::string id_;
  std::uint64_t seed_;
  std::uint64_t hash_;
  Stopwatch clock_;
  std::vector<Record> out_;
};

struct Verdict {
  std::string check;
  bool pass = false;
  std::string detail;
};

struct Experiment {
  std::string id;
  int criterion = 0;
  std::string summary;
  std::function<std::vector<Record>(const Context&)> run;
  std::function<std::vector<Verdict>(const std::vector<Record>&)> judge;
};

inline std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

/// Records of one metric, in emission order.
inline std::vector<const Record*> select(const std::vector<Record>& rs, const std::string& metric) {
  std::vector<const Record*> out;
  for (const auto& r : rs) {
    if (r.metric == metric) out.push_back(&r);
  }
  return out;
}

inline const Record& one(const std::vector<Record>& rs, const std::string& metric) {
  auto s = select(rs, metric);
  if (s.empty()) throw ParseError("no record with metric '" + metric + "'");
  return *s.front();
}

inline std::string param(const Record& r, const std::string& k) {
  auto it = r.params.find(k);
  return it == r.params.end() ? "" : it->second;
}

}  // namespace skewlab::xp
