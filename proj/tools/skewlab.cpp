#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "skewlab/angle_forge.hpp"
#include "skewlab/xp/registry.hpp"

using namespace skewlab;
using namespace skewlab::xp;

namespace {

struct Common {
  std::uint64_t seed = 1;
  unsigned bits = 256;
  std::string out;
  std::string system_file;
};

void add_common(CLI::App* app, Common& c, bool with_system = true) {
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--bits", c.bits, "fixed-point bits per torus coordinate")->capture_default_str();
  app->add_option("--out", c.out, "output file (default: stdout)");
  if (with_system) app->add_option("--system", c.system_file, "system descriptor file (default: doubling + golden)");
}

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ParseError("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

SkewSystem load_system(const Common& c) {
  if (c.system_file.empty()) return SkewSystem::doubling_golden(c.bits);
  std::ifstream in(c.system_file);
  if (!in) throw ParseError("cannot read system '" + c.system_file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return SkewSystem::parse(ss.str());
}

std::vector<CFAngle> parse_angles(const std::vector<std::string>& s) {
  if (s.empty()) return {golden_angle(200)};
  std::vector<CFAngle> out;
  for (const auto& a : s) out.push_back(CFAngle::parse(a));
  return out;
}

std::vector<std::int64_t> one_walk(const SkewSystem& sys, std::uint64_t seed, const std::vector<double>& radii,
                                   std::uint64_t n_max, const Target* y) {
  Rng rng(derive_seed(seed, 5));
  const auto t0 = random_torus_point(sys.d(), sys.bits(), rng);
  if (sys.kind() == SystemKind::rotation) {
    if (y) return hitting_times(sys, nullptr, t0, *y, radii, n_max);
    return return_times(sys, nullptr, t0, radii, n_max);
  }
  SymbolicOrbit o(sys.base(), derive_seed(seed, 3));
  if (y) return hitting_times(sys, &o, t0, *y, radii, n_max);
  return return_times(sys, &o, t0, radii, n_max);
}

void write_times(std::ostream& os, const SkewSystem& sys, const Common& c, std::size_t starts, unsigned j_min,
                 unsigned j_max, std::uint64_t n_max, bool hitting) {
  const auto radii = dyadic_radii(j_min, j_max);
  const unsigned m = sys.kind() == SystemKind::rotation ? 0 : sys.base().cylinder_length(radii.back());
  os << "start,r,tau\n";
  for (std::size_t i = 0; i < starts; ++i) {
    const auto s = derive_seed(c.seed, i);
    std::optional<Target> y;
    if (hitting) y = random_target(sys, m, derive_seed(s, 2));
    const auto tau = one_walk(sys, s, radii, n_max, y ? &*y : nullptr);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      os << i << ',' << fmt(radii[j], 10) << ',';
      if (tau[j] == kTimeout) {
        os << "censored\n";
      } else {
        os << tau[j] << '\n';
      }
    }
    const auto f = fit_exponents(radii, tau);
    std::cerr << "start " << i << ": ratios [" << fmt(f.lower_ratio) << ", " << fmt(f.upper_ratio) << "] slopes ["
              << fmt(f.lower_slope) << ", " << fmt(f.upper_slope) << "] used " << f.used << '/' << radii.size()
              << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skewlab: recurrence, hitting times, discrepancy and correlations for toral skew products"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // build-angle
  Common ba;
  unsigned xi = 4;
  std::size_t levels = 3, depth = 24;
  double gamma = 0;
  std::string budget = "1000000";
  auto* c_ba = app.add_subcommand("build-angle", "intertwined pair, or a single angle of given type");
  add_common(c_ba, ba, false);
  c_ba->add_option("--xi", xi, "intertwining exponent")->capture_default_str();
  c_ba->add_option("--levels", levels, "construction levels")->capture_default_str();
  c_ba->add_option("--digit-budget", budget, "abort when a denominator exceeds this many digits")
      ->capture_default_str();
  c_ba->add_option("--gamma", gamma, "build a single angle of this type instead");
  c_ba->add_option("--depth", depth, "partial quotients for --gamma")->capture_default_str();

  // scan
  Common sc;
  std::vector<std::string> sc_alpha;
  std::int64_t K = 200;
  std::string sc_kind = "linear";
  auto* c_sc = app.add_subcommand("scan", "lattice scan for the Diophantine type");
  add_common(c_sc, sc, false);
  c_sc->add_option("--alpha", sc_alpha, "angle as 'cf:a0 a1 ...' (repeat for d > 1; default golden)");
  c_sc->add_option("--K", K, "scan radius")->capture_default_str();
  c_sc->add_option("--kind", sc_kind, "linear | simultaneous")->check(CLI::IsMember({"linear", "simultaneous"}));

  // rotate
  Common ro;
  std::size_t ro_n = 16;
  auto* c_ro = app.add_subcommand("rotate", "skew-product orbit in exact fixed point");
  add_common(c_ro, ro);
  c_ro->add_option("-n", ro_n, "iterates")->capture_default_str();

  // recur / hit
  Common re, hi;
  std::size_t starts = 5;
  unsigned j_min = 3, j_max = 12;
  std::uint64_t n_max = std::uint64_t{1} << 24;
  auto* c_re = app.add_subcommand("recur", "return times over dyadic radii");
  auto* c_hi = app.add_subcommand("hit", "hitting times of random targets over dyadic radii");
  for (auto [cmd, c] : {std::pair{c_re, &re}, std::pair{c_hi, &hi}}) {
    add_common(cmd, *c);
    cmd->add_option("--starts", starts, "independent starts")->capture_default_str();
    cmd->add_option("--j-min", j_min, "largest radius 2^-j_min")->capture_default_str();
    cmd->add_option("--j-max", j_max, "smallest radius 2^-j_max")->capture_default_str();
    cmd->add_option("--n-max", n_max, "time budget")->capture_default_str();
  }

  // corr
  Common co;
  std::size_t co_n = 20, co_samples = 0;
  std::int64_t freq = 1;
  auto* c_co = app.add_subcommand("corr", "correlation of e(k t) against e(-k t), exact and Monte Carlo");
  add_common(c_co, co);
  c_co->add_option("-n", co_n, "largest lag")->capture_default_str();
  c_co->add_option("--k", freq, "fibre frequency")->capture_default_str();
  c_co->add_option("--samples", co_samples, "Monte Carlo samples (0: exact only)")->capture_default_str();

  // discrepancy
  Common di;
  std::string di_mode = "orbit";
  unsigned k_min = 4, k_max = 14;
  std::size_t walkers = 10000;
  std::uint64_t grid = 4096;
  auto* c_di = app.add_subcommand("discrepancy", "discrepancy curve over n = 2^k");
  add_common(c_di, di);
  c_di->add_option("--mode", di_mode, "orbit | walk")->check(CLI::IsMember({"orbit", "walk"}));
  c_di->add_option("--k-min", k_min)->capture_default_str();
  c_di->add_option("--k-max", k_max)->capture_default_str();
  c_di->add_option("--walkers", walkers)->capture_default_str();
  c_di->add_option("--grid", grid)->capture_default_str();

  // stats
  Common st;
  std::string st_mode = "return";
  double st_r = 1.0 / 64;
  std::size_t st_samples = 2000;
  std::uint64_t st_nmax = std::uint64_t{1} << 24;
  auto* c_st = app.add_subcommand("stats", "rescaled hitting/return time distribution");
  add_common(c_st, st);
  c_st->add_option("--mode", st_mode, "hitting | return")->check(CLI::IsMember({"hitting", "return"}));
  c_st->add_option("--r", st_r, "radius")->capture_default_str();
  c_st->add_option("--samples", st_samples)->capture_default_str();
  c_st->add_option("--n-max", st_nmax)->capture_default_str();

  // run
  Common ru;
  std::string cfg_path;
  unsigned workers = 0;
  auto* c_ru = app.add_subcommand("run", "run the experiment named in a config, JSON-lines out");
  add_common(c_ru, ru, false);
  c_ru->add_option("config", cfg_path, "config file")->required();
  c_ru->add_option("--workers", workers, "worker threads (overrides the config)");
  c_ru->add_flag("--judge", "print verdicts to stderr");

  // report
  Common rp;
  std::string rec_path;
  auto* c_rp = app.add_subcommand("report", "summary table of records; --out writes CSV");
  add_common(c_rp, rp, false);
  c_rp->add_option("records", rec_path, "JSON-lines records")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_ba->parsed()) {
      Sink out(ba.out);
      if (c_ba->count("--gamma")) {
        out.os() << angle_with_type(gamma, depth, ba.seed).to_string() << '\n';
      } else {
        build_intertwined(xi, levels, ba.seed, std::stoull(budget)).write(out.os());
      }
    } else if (c_sc->parsed()) {
      const auto alpha = parse_angles(sc_alpha);
      const auto rep = sc_kind == "linear" ? gamma_l_estimate(alpha, K) : gamma_s_estimate(alpha, K);
      Sink out(sc.out);
      rep.write_csv(out.os());
      std::cerr << "fitted exponent " << fmt(rep.exponent) << (rep.degenerate ? " (degenerate)" : "") << '\n';
    } else if (c_ro->parsed()) {
      const auto sys = load_system(ro);
      Sink out(ro.out);
      SymbolicOrbit o(sys.base(), ro.seed);
      Rng rng(derive_seed(ro.seed, 1));
      const auto pts = iterate_skew(sys, o, random_torus_point(sys.d(), sys.bits(), rng), ro_n);
      out.os() << "k,symbol,t\n";
      for (std::size_t k = 0; k < pts.size(); ++k) {
        out.os() << k << ',' << (k < o.symbols().size() ? int(o.symbols()[k]) : -1) << ',' << pts[k].to_string() << '\n';
      }
    } else if (c_re->parsed() || c_hi->parsed()) {
      const bool hitting = c_hi->parsed();
      const Common& c = hitting ? hi : re;
      const auto sys = load_system(c);
      Sink out(c.out);
      write_times(out.os(), sys, c, starts, j_min, j_max, n_max, hitting);
    } else if (c_co->parsed()) {
      const auto sys = load_system(co);
      const auto A = Observable::fourier(sys.base().p(), sys.d(), std::vector<std::int64_t>(sys.d(), freq));
      const auto B = Observable::fourier(sys.base().p(), sys.d(), std::vector<std::int64_t>(sys.d(), -freq));
      Sink out(co.out);
      out.os() << "n,exact_re,exact_im" << (co_samples ? ",mc_re,mc_im,mc_err" : "") << '\n';
      for (std::size_t n = 0; n <= co_n; ++n) {
        const auto ex = corr_fourier(sys, A, B, n);
        out.os() << n << ',' << fmt(ex.value.real(), 12) << ',' << fmt(ex.value.imag(), 12);
        if (co_samples) {
          const auto mc = corr_mc(sys, A, B, n, co_samples, derive_seed(co.seed, n));
          out.os() << ',' << fmt(mc.value.real(), 8) << ',' << fmt(mc.value.imag(), 8) << ',' << fmt(mc.err, 4);
        }
        out.os() << '\n';
      }
    } else if (c_di->parsed()) {
      Config cfg = Config::parse("k_min = " + std::to_string(k_min) + "\nk_max = " + std::to_string(k_max) +
                                 "\nwalkers = " + std::to_string(walkers) + "\ngrid = " + std::to_string(grid) +
                                 "\nseed = " + std::to_string(di.seed) + "\nbits = " + std::to_string(di.bits));
      Context ctx = make_context(cfg);
      if (!di.system_file.empty()) ctx.system = load_system(di);
      const auto rs = di_mode == "orbit" ? disc::prop_discrepancy(ctx) : disc::prop_dnmu(ctx);
      const auto& curve = one(rs, di_mode == "orbit" ? "D_n" : "D_n_mu");
      std::vector<double> ns;
      std::istringstream in(param(curve, "n"));
      for (double x; in >> x;) ns.push_back(x);
      Sink out(di.out);
      out.os() << "n,value,err\n";
      for (std::size_t i = 0; i < ns.size(); ++i) {
        out.os() << fmt(ns[i], 17) << ',' << fmt(curve.values[i], 10) << ',' << (curve.err ? fmt(*curve.err, 4) : "0")
                 << '\n';
      }
      std::cerr << "decay exponent " << fmt(one(rs, "decay_exponent").values[0]) << '\n';
    } else if (c_st->parsed()) {
      const auto sys = load_system(st);
      const StatMode mode = st_mode == "hitting" ? StatMode::hitting : StatMode::return_;
      const unsigned m = sys.kind() == SystemKind::rotation ? 0 : sys.base().cylinder_length(st_r);
      const auto y = random_target(sys, m, derive_seed(st.seed, 2));
      const auto ts = time_statistics(sys, y, st_r, st_samples, mode, st.seed, st_nmax);
      Sink out(st.out);
      ts.write_csv(out.os(), {0.25, 0.5, 1, 1.5, 2, 3}, st.seed);
      std::cerr << "sup distance to 1 - e^-t: " << fmt(ts.sup_distance_exp()) << ", censored " << ts.censored << '/'
                << ts.samples << '\n';
    } else if (c_ru->parsed()) {
      Config cfg = Config::load(cfg_path);
      if (c_ru->count("--seed")) cfg.set("seed", std::to_string(ru.seed));
      if (c_ru->count("--bits")) cfg.set("bits", std::to_string(ru.bits));
      if (c_ru->count("--workers")) cfg.set("workers", std::to_string(workers));
      const auto rs = run(cfg);
      Sink out(ru.out);
      write_records(out.os(), rs);
      if (c_ru->count("--judge")) {
        for (const auto& v : judge(cfg.str("experiment"), rs)) {
          std::cerr << (v.pass ? "PASS " : "FAIL ") << v.check << " [" << v.detail << "]\n";
        }
      }
    } else if (c_rp->parsed()) {
      std::ifstream in(rec_path);
      if (!in) throw ParseError("cannot read records '" + rec_path + "'");
      const auto rep = report(read_records(in));
      rep.write_table(std::cout);
      if (!rp.out.empty()) {
        Sink out(rp.out);
        rep.write_csv(out.os());
      }
    }
  } catch (const ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
