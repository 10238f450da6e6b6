#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "systems.hpp"

using namespace regreg;
using namespace rt;
using dataflow::Lattice;
using dataflow::Solver;

TEST_CASE("lattice laws on samples") {
  Lattice<int> l = bounded_max();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    int a = static_cast<int>(rng() % (kHeight + 1)), b = static_cast<int>(rng() % (kHeight + 1)),
        c = static_cast<int>(rng() % (kHeight + 1));
    CHECK(l.join(a, a) == a);
    CHECK(l.join(a, b) == l.join(b, a));
    CHECK(l.join(l.join(a, b), c) == l.join(a, l.join(b, c)));
    CHECK(l.join(l.bottom, a) == a);
  }
}

TEST_CASE("minimal string size of a small expression") {
  // Or[Seq[a,b,c], Seq[d,e]] with keys naming subexpressions. The order is
  // reversed: bottom is "no string yet" and join keeps the smaller size.
  const int inf = 1 << 20;
  Lattice<int> minsize{inf, [](const int& a, const int& b) { return std::min(a, b); },
                       [](const int& a, const int& b) { return a == b; }};
  std::map<std::string, std::vector<std::string>> seq{{"abc", {"a", "b", "c"}}, {"de", {"d", "e"}}};
  std::map<std::string, std::vector<std::string>> alt{{"root", {"abc", "de"}}};
  Solver<std::string, int> s(minsize, [&](const std::string& k, Solver<std::string, int>& sv) {
    if (auto it = seq.find(k); it != seq.end()) {
      int total = 0;
      for (const std::string& part : it->second) total += sv.depends(part);
      return std::min(total, inf);
    }
    if (auto it = alt.find(k); it != alt.end()) {
      int best = inf;
      for (const std::string& a : it->second) best = std::min(best, sv.depends(a));
      return best;
    }
    return 1;
  });
  CHECK(s.solve("root") == 2);
  CHECK(s.visited_count() == 8);
}

TEST_CASE("single key is evaluated once") {
  int calls = 0;
  Solver<int, int> s(bounded_max(), [&](const int&, Solver<int, int>&) {
    ++calls;
    return 7;
  });
  CHECK(s.solve(0) == 7);
  CHECK(calls == 1);
  CHECK(s.evaluations(0) == 1);
  CHECK(s.total_evaluations() == 1);
}

TEST_CASE("mutually recursive pair matches brute force") {
  // x = min(y + 1, 5), y = x
  System sys{{true, {{1, 1}, {-1, 5}}}, {false, {{0, 0}}}};
  Solver<int, int> s(bounded_max(), system_flow(sys));
  CHECK(s.solve(0) == 5);
  auto want = kleene(sys);
  CHECK(*s.value(0) == want[0]);
  CHECK(*s.value(1) == want[1]);
}

TEST_CASE("depends registration") {
  std::vector<int> seen;
  Solver<int, int> s(bounded_max(), [&](const int& k, Solver<int, int>& sv) {
    if (k == 0) {
      seen.push_back(sv.depends(1));
      sv.depends(1);
      return seen.back();
    }
    return 3;
  });
  CHECK(s.solve(0) == 3);
  REQUIRE(seen.size() == 2);
  CHECK(seen[0] == 0);
  CHECK(seen[1] == 3);
  CHECK(s.dependent_count(1) == 1);
  CHECK(s.enqueue_count(0) == 2);
  CHECK(s.enqueue_count(1) == 1);
}

TEST_CASE("depends outside a flow evaluation") {
  Solver<int, int> s(bounded_max(), [](const int&, Solver<int, int>&) { return 1; });
  bool thrown = false;
  try {
    s.depends(3);
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::CalledOutsideFlow;
  }
  CHECK(thrown);
}

TEST_CASE("re-enqueued once while inactive") {
  // 0 reads 1 and 2; both rise, but 0 is queued only once per round.
  Solver<int, int> s(bounded_max(), [](const int& k, Solver<int, int>& sv) {
    if (k == 0) return std::max(sv.depends(1), sv.depends(2));
    return k;
  });
  CHECK(s.solve(0) == 2);
  CHECK(s.enqueue_count(0) == 2);
  CHECK(s.evaluations(0) == 2);
}

TEST_CASE("non-monotone flows are detected") {
  Solver<int, int> s(bounded_max(), [](const int& k, Solver<int, int>& sv) {
    if (k == 0) return sv.depends(1) == 0 ? 5 : 3;
    return 1;
  });
  bool thrown = false;
  try {
    s.solve(0);
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::NonMonotoneDetected;
  }
  CHECK(thrown);
}

TEST_CASE("height budget") {
  Lattice<int> unbounded{0, [](const int& a, const int& b) { return std::max(a, b); },
                         [](const int& a, const int& b) { return a == b; }};
  dataflow::Options o;
  o.height_budget = 100;
  Solver<int, int> s(unbounded, [](const int&, Solver<int, int>& sv) { return sv.depends(0) + 1; }, o);
  bool thrown = false;
  try {
    s.solve(0);
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::HeightBudgetExceeded;
  }
  CHECK(thrown);
}

TEST_CASE("property: least fixpoint, laziness and stability on random systems") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 200; ++i) {
    int keys = 1 + static_cast<int>(rng() % 5);
    auto sys = random_system(rng, keys);
    int root = static_cast<int>(rng() % static_cast<std::uint64_t>(keys));
    auto want = kleene(sys);
    auto live = reachable(sys, root);
    Solver<int, int> s(bounded_max(), system_flow(sys));
    CHECK(s.solve(root) == want[static_cast<std::size_t>(root)]);
    std::vector<int> final_values(sys.size(), 0);
    for (int k = 0; k < keys; ++k) {
      if (!live.count(k)) {
        CHECK_FALSE(s.visited(k));
        CHECK(s.evaluations(k) == 0);
        continue;
      }
      REQUIRE(s.value(k) != nullptr);
      CHECK(*s.value(k) == want[static_cast<std::size_t>(k)]);
      final_values[static_cast<std::size_t>(k)] = *s.value(k);
    }
    CHECK(s.visited_count() == live.size());
    for (int k : live) CHECK(eval(sys[static_cast<std::size_t>(k)], final_values) <= final_values[static_cast<std::size_t>(k)]);
  }
}
