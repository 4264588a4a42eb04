#pragma once

// One registered experiment per claim, plus run/report over JSON-lines records.

#include <iostream>
#include <sstream>

#include "skewlab/xp/exp_arith.hpp"
#include "skewlab/xp/exp_corr.hpp"
#include "skewlab/xp/exp_disc.hpp"
#include "skewlab/xp/exp_rec.hpp"

namespace skewlab::xp {

inline const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> all{
      {"cf-exact", 1, "continued fraction recurrences, gcd, best approximations", arith::cf_exact, arith::judge_cf_exact},
      {"prop-diofalin1", 2, "intertwined pair audit (items 1-4)", arith::diofalin1, arith::judge_diofalin1},
      {"prop-diofalin2", 3, "linear form certificate ||k a - l a'|| >= 1/(8 m^5)", arith::diofalin2, arith::judge_diofalin2},
      {"thm-ks", 4, "rotation hitting/recurrence exponents against the type", rec::thm_ks, rec::judge_thm_ks},
      {"prop-discrepancy", 5, "golden orbit discrepancy decay", disc::prop_discrepancy, disc::judge_prop_discrepancy},
      {"prop-dnmu", 5, "random walk discrepancy decay", disc::prop_dnmu, disc::judge_prop_dnmu},
      {"thm-maine", 6, "doubling map exponents against d_mu", rec::thm_maine, rec::judge_thm_maine},
      {"thm-11", 7, "skew product hitting floor and recurrence ceiling", rec::thm_11, rec::judge_thm_11},
      {"thm-upper", 8, "lower recurrence along the radius schedule", rec::thm_upper, rec::judge_thm_upper},
      {"thm-trivial-hts", 9, "degenerate hitting-time law along the construction", rec::thm_trivial_hts,
       rec::judge_thm_trivial_hts},
      {"exp-benchmark", 10, "exponential return-time law for the doubling map", rec::exp_benchmark,
       rec::judge_exp_benchmark},
      {"operator-suite", 11, "twisted transfer operator checks", corr::operator_suite, corr::judge_operator_suite},
      {"bound-calculators", 12, "closed-form exponent calculators", arith::bounds, arith::judge_bounds},
      {"mstp", 13, "shrinking target hit counts against expectation", rec::mstp, rec::judge_mstp},
  };
  return all;
}

inline const Experiment& find_experiment(const std::string& id) {
  for (const auto& e : registry()) {
    if (e.id == id) return e;
  }
  throw PreconditionError("unknown experiment '" + id + "'");
}

inline Context make_context(const Config& cfg) {
  Context ctx;
  ctx.cfg = cfg;
  ctx.seed = cfg.u64("seed", 1);
  ctx.workers = static_cast<unsigned>(cfg.u64("workers", 1));
  ctx.bits = static_cast<unsigned>(cfg.u64("bits", 256));
  if (ctx.bits == 0 || ctx.bits % 64 != 0 || ctx.bits > 1024) {
    throw ParseError("bits must be a positive multiple of 64, at most 1024");
  }
  ctx.system = cfg.system();
  return ctx;
}

/// Runs the experiment named by `experiment = id`.
inline std::vector<Record> run(const Config& cfg) {
  if (!cfg.has("experiment")) throw ParseError("config does not name an experiment");
  const auto& e = find_experiment(cfg.str("experiment"));
  const Context ctx = make_context(cfg);
  try {
    return e.run(ctx);
  } catch (const PrecisionContractError& err) {
    std::ostringstream os;
    os << e.id << " (seed " << ctx.seed << ", bits " << ctx.bits << "): " << err.what();
    throw PrecisionContractError(os.str());
  }
}

inline std::vector<Verdict> judge(const std::string& id, const std::vector<Record>& rs) {
  return find_experiment(id).judge(rs);
}

struct ReportRow {
  std::string id, metric, params;
  std::size_t count = 0;
  double median = NAN, min = NAN, max = NAN;
  std::optional<double> refit;  // decay exponent re-fitted from a discrepancy curve
};

struct Report {
  std::vector<std::string> ids;  // first-appearance order
  std::vector<ReportRow> rows;
  std::map<std::string, std::vector<Verdict>> verdicts;
  std::map<std::string, std::string> incomplete;

  void write_table(std::ostream& os) const {
    for (const auto& id : ids) {
      os << "== " << id << '\n';
      for (const auto& r : rows) {
        if (r.id != id) continue;
        os << "  " << std::left << std::setw(28) << r.metric << " n=" << std::setw(4) << r.count
           << " median=" << std::setw(12) << fmt(r.median, 6) << " min=" << std::setw(12) << fmt(r.min, 6)
           << " max=" << std::setw(12) << fmt(r.max, 6);
        if (r.refit) os << " refit=" << fmt(*r.refit, 6);
        os << '\n';
      }
      if (auto it = incomplete.find(id); it != incomplete.end()) os << "  (no verdict: " << it->second << ")\n";
      if (auto it = verdicts.find(id); it != verdicts.end()) {
        for (const auto& v : it->second) {
          os << "  " << (v.pass ? "PASS " : "FAIL ") << v.check;
          if (!v.detail.empty()) os << " [" << v.detail << ']';
          os << '\n';
        }
      }
    }
  }

  void write_csv(std::ostream& os) const {
    os << "id,metric,params,count,median,min,max,refit\n";
    for (const auto& r : rows) {
      std::string p = r.params;
      for (auto& c : p) {
        if (c == '"') c = '\'';
      }
      os << r.id << ',' << r.metric << ",\"" << p << "\"," << r.count << ',' << fmt(r.median, 10) << ','
         << fmt(r.min, 10) << ',' << fmt(r.max, 10) << ',' << (r.refit ? fmt(*r.refit, 10) : "") << '\n';
    }
  }
};

inline Report report(const std::vector<Record>& rs) {
  Report rep;
  std::map<std::string, std::vector<Record>> by_id;
  for (const auto& r : rs) {
    if (!by_id.count(r.id)) rep.ids.push_back(r.id);
    by_id[r.id].push_back(r);
  }
  for (const auto& r : rs) {
    ReportRow row;
    row.id = r.id;
    row.metric = r.metric;
    row.params = nlohmann::json(r.params).dump();
    row.count = r.values.size();
    if (!r.values.empty()) {
      row.median = median(r.values);
      row.min = *std::min_element(r.values.begin(), r.values.end());
      row.max = *std::max_element(r.values.begin(), r.values.end());
    }
    const std::string n = param(r, "n");
    if (r.metric.rfind("D_n", 0) == 0 && !n.empty()) {
      std::vector<double> ns;
      std::istringstream in(n);
      for (double x; in >> x;) ns.push_back(x);
      if (ns.size() == r.values.size()) row.refit = decay_exponent(ns, r.values).slope;
    }
    rep.rows.push_back(std::move(row));
  }
  for (const auto& id : rep.ids) {
    try {
      auto v = judge(id, by_id[id]);
      if (v.empty()) throw ParseError("records cover none of the checks");
      rep.verdicts[id] = std::move(v);
    } catch (const std::exception& e) {
      rep.incomplete[id] = e.what();
    }
  }
  return rep;
}

}  // namespace skewlab::xp
