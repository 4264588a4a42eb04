// Runs every registered experiment with its default configuration and prints one
// PASS/FAIL line per criterion. Exit status is nonzero when any criterion fails.

#include <iostream>
#include <map>
#include <set>

#include "skewlab/xp/registry.hpp"

using namespace skewlab::xp;

int main(int argc, char** argv) {
  // optional: restrict to a list of criterion numbers
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  std::map<int, std::vector<std::string>> ids;
  for (const auto& e : registry()) ids[e.criterion].push_back(e.id);

  int failed = 0;
  for (const auto& [crit, list] : ids) {
    if (!only.empty() && !only.count(crit)) continue;
    bool pass = true;
    std::string detail;
    Stopwatch clock;
    for (const auto& id : list) {
      try {
        const auto rs = run(Config::parse("experiment = " + id + "\nseed = 1\n"));
        for (const auto& v : judge(id, rs)) {
          pass = pass && v.pass;
          if (!v.pass) detail += " | " + id + ": " + v.check + " [" + v.detail + "]";
        }
      } catch (const std::exception& e) {
        pass = false;
        detail += " | " + id + ": error: " + e.what();
      }
    }
    std::string names;
    for (const auto& id : list) names += (names.empty() ? "" : "+") + id;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << crit << " (" << names << ", " << fmt(clock.seconds(), 3)
              << " s)" << detail << std::endl;
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
