#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "skewlab/xp/registry.hpp"

using namespace skewlab;
using namespace skewlab::xp;

TEST_CASE("config parsing") {
  auto c = Config::parse(
      "# comment\n"
      "experiment = thm-ks   # trailing\n"
      "seed=7\n"
      "u = 0.1 0.2\n"
      "[system]\n"
      "base = doubling\n");
  CHECK(c.str("experiment") == "thm-ks");
  CHECK(c.u64("seed", 1) == 7);
  CHECK(c.nums("u", {}) == std::vector<double>{0.1, 0.2});
  CHECK(c.num("missing", 2.5) == 2.5);
  CHECK(c.has_system());
  CHECK(c.system_text().find("doubling") != std::string::npos);

  CHECK_THROWS_AS(Config::parse(""), ParseError);
  CHECK_THROWS_AS(Config::parse("# only a comment\n\n"), ParseError);
  CHECK_THROWS_AS(Config::parse("no equals sign"), ParseError);
  CHECK_THROWS_AS(Config::parse("seed = x").u64("seed", 1), ParseError);
  CHECK_THROWS_AS(Config::parse("seed = 3abc").u64("seed", 1), ParseError);
}

TEST_CASE("records round-trip through JSON lines") {
  Record r;
  r.id = "thm-upper";
  r.hash = 0xdeadbeef;
  r.seed = 3;
  r.params = {{"gamma", "8"}};
  r.metric = "ratio";
  r.values = {1.25, INFINITY, -0.5};
  r.err = 0.01;
  r.censored = 1;
  r.wall = 0.3;

  std::stringstream ss;
  write_records(ss, {r, r});
  auto back = read_records(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].identity() == r.identity());
  CHECK(std::isinf(back[0].values[1]));
  CHECK(back[0].hash == 0xdeadbeef);
  CHECK(back[0].err == 0.01);

  std::istringstream bad1("{\"id\": \"x\"}\n");
  CHECK_THROWS_AS(read_records(bad1), ParseError);
  std::istringstream bad2("not json\n");
  CHECK_THROWS_AS(read_records(bad2), ParseError);
  auto j = r.to_json();
  j["values"] = "oops";
  CHECK_THROWS_AS(Record::from_json(j), ParseError);
}

TEST_CASE("wall time is not part of the identity") {
  Record a;
  a.id = "x";
  a.values = {1};
  Record b = a;
  b.wall = 99;
  CHECK(a.identity() == b.identity());
  b.values = {2};
  CHECK(a.identity() != b.identity());
}

TEST_CASE("parallel_map is independent of the worker count") {
  auto f = [](std::size_t i) { return Rng(derive_seed(5, i)).uniform(); };
  auto a = parallel_map<double>(37, 1, f);
  auto b = parallel_map<double>(37, 4, f);
  CHECK(a == b);
  CHECK(parallel_map<int>(0, 3, [](std::size_t) { return 1; }).empty());
  CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                    [](std::size_t i) -> int {
                                      if (i >= 4) throw PreconditionError("boom " + std::to_string(i));
                                      return 0;
                                    }),
                  PreconditionError);
}

TEST_CASE("registry covers every criterion") {
  std::set<int> seen;
  for (const auto& e : registry()) seen.insert(e.criterion);
  for (int c = 1; c <= 13; ++c) CHECK(seen.count(c) == 1);
  CHECK_THROWS_AS(find_experiment("nope"), PreconditionError);
  CHECK_THROWS_AS(run(Config::parse("experiment = nope")), PreconditionError);
  CHECK_THROWS_AS(run(Config::parse("seed = 1")), ParseError);
  CHECK_THROWS_AS(run(Config::parse("experiment = cf-exact\nbits = 100")), ParseError);
}

TEST_CASE("reruns are byte-identical and worker-invariant") {
  for (const char* id : {"cf-exact", "bound-calculators", "prop-discrepancy"}) {
    auto cfg = Config::parse(std::string("experiment = ") + id + "\nk_max = 10\n");
    auto a = run(cfg);
    auto b = run(cfg);
    cfg.set("workers", "3");
    auto c = run(cfg);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].identity() == b[i].identity());
      CHECK(a[i].identity() == c[i].identity());
    }
    for (const auto& v : judge(id, a)) CHECK(v.pass);
  }
}

TEST_CASE("report groups by experiment and refits discrepancy curves") {
  auto rs = run(Config::parse("experiment = prop-discrepancy\nk_max = 10"));
  auto more = run(Config::parse("experiment = bound-calculators"));
  rs.insert(rs.end(), more.begin(), more.end());
  std::stringstream ss;
  write_records(ss, rs);
  auto rep = report(read_records(ss));
  REQUIRE(rep.ids == std::vector<std::string>{"prop-discrepancy", "bound-calculators"});
  const double e = one(rs, "decay_exponent").values[0];
  bool refit = false;
  for (const auto& row : rep.rows) {
    if (row.metric == "D_n") {
      REQUIRE(row.refit);
      CHECK(std::abs(*row.refit - e) < 1e-12);
      refit = true;
    }
  }
  CHECK(refit);
  CHECK(rep.incomplete.empty());
  std::ostringstream table, csv;
  rep.write_table(table);
  rep.write_csv(csv);
  CHECK(table.str().find("PASS orbit decay exponent") != std::string::npos);
  CHECK(csv.str().rfind("id,metric,params", 0) == 0);
}

TEST_CASE("a partial record set is reported without a verdict") {
  Record r;
  r.id = "thm-ks";
  r.metric = "something_else";
  r.values = {1};
  auto rep = report({r});
  CHECK(rep.rows.size() == 1);
  CHECK(rep.incomplete.count("thm-ks") == 1);
  std::ostringstream t;
  rep.write_table(t);
  CHECK(t.str().find("no verdict") != std::string::npos);
}

TEST_CASE("sample configs parse and name registered experiments") {
  std::size_t n = 0;
  for (const auto& f : std::filesystem::directory_iterator(SKEWLAB_CONFIG_DIR)) {
    if (f.path().extension() != ".cfg") continue;
    INFO(f.path().string());
    const auto cfg = Config::load(f.path().string());
    CHECK_NOTHROW(find_experiment(cfg.str("experiment")));
    CHECK_NOTHROW(make_context(cfg));
    ++n;
  }
  CHECK(n >= 14);
}

TEST_CASE("the build config reproduces the pair audit") {
  const auto rs = run(Config::load(std::string(SKEWLAB_CONFIG_DIR) + "/intertwined-build.cfg"));
  for (const auto& v : judge("prop-diofalin1", rs)) CHECK(v.pass);
}
