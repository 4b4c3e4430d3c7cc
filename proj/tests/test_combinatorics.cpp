#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "helpers.hpp"
#include "spintail/combinatorics.hpp"

using namespace spintail;

namespace {

// Reference counter: enumerate every ordered tuple and test the property
// directly, with no shared machinery beyond the predicate itself.
std::uint64_t brute_count_P(const LatticeSpec& spec, int r, long long l) {
  const auto all = dual_interactions(spec);
  const std::uint64_t n = all.size();
  std::vector<int> idx(r, 0);
  std::uint64_t count = 0;
  while (true) {
    std::vector<Interaction> tuple;
    for (int i : idx) tuple.push_back(all[i]);
    if (satisfies_P(tuple, l)) ++count;
    int pos = r - 1;
    while (pos >= 0 && idx[pos] == static_cast<int>(n) - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return count;
}

std::uint64_t brute_count_Q(const InteractionHypergraph& h, int r) {
  const int n = static_cast<int>(h.num_terms());
  std::vector<int> idx(r, 0);
  std::uint64_t count = 0;
  while (true) {
    if (satisfies_Q(h, idx)) ++count;
    int pos = r - 1;
    while (pos >= 0 && idx[pos] == n - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return count;
}

}  // namespace

TEST_CASE("partner property on the lattice", "[combinatorics]") {
  CHECK_FALSE(satisfies_P({Interaction{{0}}}, 5));
  CHECK(satisfies_P({Interaction{{0}}, Interaction{{0}}}, 1));
  CHECK_FALSE(satisfies_P({Interaction{{0}}, Interaction{{2}}}, 1));
  CHECK(satisfies_P({Interaction{{0}}, Interaction{{2}}}, 2));
}

TEST_CASE("partner property on the hypergraph", "[combinatorics]") {
  const auto h = helpers::triangle_chain();
  CHECK_FALSE(satisfies_Q(h, {0}));
  CHECK(satisfies_Q(h, {0, 0}));
  CHECK(satisfies_Q(h, {0, 1}));
  CHECK_FALSE(satisfies_Q(h, {0, 5}));
  // Index 1 here has no partner: term 3 is disjoint from both copies of 0.
  CHECK_FALSE(satisfies_Q(h, {0, 3, 0}));
}

TEST_CASE("lattice tuple counting oracles", "[combinatorics]") {
  const LatticeSpec line3{1, 3, 0, 2};
  CHECK(count_P_tuples(line3, 2, 1) == 7);
  CHECK(count_P_tuples(line3, 2, 2) == 9);
  CHECK(count_P_tuples(line3, 1, 1) == 0);
}

TEST_CASE("lattice counting matches brute force", "[combinatorics]") {
  for (int L : {2, 3, 4}) {
    const LatticeSpec spec{1, L, 0, 2};
    for (int r : {2, 3, 4}) {
      for (long long l : {1LL, 2LL}) {
        CAPTURE(L, r, l);
        CHECK(count_P_tuples(spec, r, l) == brute_count_P(spec, r, l));
      }
    }
  }
  const LatticeSpec plane{2, 3, 0, 2};
  CHECK(count_P_tuples(plane, 2, 1) == brute_count_P(plane, 2, 1));
  CHECK(count_P_tuples(plane, 2, 2) == brute_count_P(plane, 2, 2));
}

TEST_CASE("thread count does not change totals", "[combinatorics]") {
  const LatticeSpec spec{1, 5, 0, 2};
  const auto serial = count_P_tuples(spec, 4, 1, 1);
  CHECK(count_P_tuples(spec, 4, 1, 3) == serial);
  CHECK(count_P_tuples(spec, 4, 1, 8) == serial);

  const auto h = helpers::triangle_chain();
  CHECK(count_Q_tuples(h, 4, 1) == count_Q_tuples(h, 4, 5));
}

TEST_CASE("hypergraph tuple counting oracles", "[combinatorics]") {
  CHECK(count_Q_tuples(helpers::triangle_chain(), 2) == 16);
  CHECK(count_Q_tuples(helpers::triangle_chain(), 1) == 0);

  const auto disjoint = InteractionHypergraph::build(4, {{0, 1}, {2, 3}});
  CHECK(count_Q_tuples(disjoint, 2) == 2);
}

TEST_CASE("hypergraph counting matches brute force", "[combinatorics]") {
  Prng rng(411);
  for (int trial = 0; trial < 25; ++trial) {
    const auto h = helpers::random_hypergraph(rng);
    for (int r : {2, 3, 4}) {
      CAPTURE(trial, r);
      CHECK(count_Q_tuples(h, r) == brute_count_Q(h, r));
    }
  }
}

TEST_CASE("selection traces", "[combinatorics]") {
  SECTION("repeated entry") {
    const auto s = assign_selection(
        std::vector<Interaction>{Interaction{{0}}, Interaction{{0}}}, 1);
    CHECK(s.bits == std::vector<int>{0, 1});
    CHECK(s.entries == std::vector<int>{0, 1});
  }
  SECTION("all later entries have earlier partners") {
    const auto s = assign_selection(
        std::vector<Interaction>{Interaction{{2}}, Interaction{{2}},
                                 Interaction{{1}}, Interaction{{2}}},
        1);
    CHECK(s.bits == std::vector<int>{0, 1, 1, 1});
  }
  SECTION("update phase resolves a shared pointer target") {
    // Entries 0.5 and 2.5 both point at the later 1.5 (distance 1 each);
    // after grouping, only the first keeps its zero bit.
    const std::vector<Interaction> tuple{Interaction{{0}}, Interaction{{2}},
                                         Interaction{{1}}};
    const auto s = assign_selection(tuple, 1);
    CHECK(s.pointers == std::vector<int>{3, 3, 0});
    CHECK(s.bits == std::vector<int>{0, 1, 1});
  }
  SECTION("non-qualifying tuple is rejected") {
    CHECK_THROWS_AS(
        assign_selection(
            std::vector<Interaction>{Interaction{{0}}, Interaction{{9}}}, 1),
        ValidationError);
  }
}

TEST_CASE("selections are valid and injective on the lattice", "[combinatorics]") {
  for (int L : {3, 4}) {
    const LatticeSpec spec{1, L, 0, 2};
    const auto all = dual_interactions(spec);
    const int n = static_cast<int>(all.size());
    for (int r : {2, 3, 4}) {
      for (long long l : {1LL, 2LL}) {
        std::set<Selection> seen;
        std::uint64_t qualifying = 0;
        std::vector<int> idx(r, 0);
        while (true) {
          std::vector<Interaction> tuple;
          for (int i : idx) tuple.push_back(all[i]);
          if (satisfies_P(tuple, l)) {
            ++qualifying;
            const auto s = assign_selection(tuple, l, &idx);
            CHECK(selection_valid(s, all, l));
            const int zeros = static_cast<int>(
                std::count(s.bits.begin(), s.bits.end(), 0));
            CHECK(2 * zeros <= r);
            seen.insert(s);
          }
          int pos = r - 1;
          while (pos >= 0 && idx[pos] == n - 1) idx[pos--] = 0;
          if (pos < 0) break;
          ++idx[pos];
        }
        CAPTURE(L, r, l);
        CHECK(seen.size() == qualifying);
      }
    }
  }
}

TEST_CASE("selections are valid and injective on hypergraphs", "[combinatorics]") {
  Prng rng(555);
  for (int trial = 0; trial < 15; ++trial) {
    const auto h = trial == 0 ? helpers::triangle_chain()
                              : helpers::random_hypergraph(rng);
    const int n = static_cast<int>(h.num_terms());
    for (int r : {2, 3, 4}) {
      std::set<Selection> seen;
      std::uint64_t qualifying = 0;
      std::vector<int> idx(r, 0);
      while (true) {
        if (satisfies_Q(h, idx)) {
          ++qualifying;
          const auto s = assign_selection(h, idx);
          CHECK(selection_valid(s, h));
          const int zeros =
              static_cast<int>(std::count(s.bits.begin(), s.bits.end(), 0));
          CHECK(2 * zeros <= r);
          seen.insert(s);
        }
        int pos = r - 1;
        while (pos >= 0 && idx[pos] == n - 1) idx[pos--] = 0;
        if (pos < 0) break;
        ++idx[pos];
      }
      CAPTURE(trial, r);
      CHECK(seen.size() == qualifying);
    }
  }
}

TEST_CASE("closed-form bound on the lattice", "[combinatorics]") {
  CHECK(bound_P(3, 2, 1, 1) == 96);
  CHECK(bound_P(1, 2, 1, 1) == 32);
  CHECK_THROWS_AS(bound_P(3, 3, 1, 1), ValidationError);
  CHECK_THROWS_AS(bound_P(3, 0, 1, 1), ValidationError);

  for (int L : {1, 2, 3, 4, 5}) {
    const LatticeSpec spec{1, L, 0, 2};
    for (int r : {2, 4}) {
      for (long long l : {1LL, 2LL}) {
        CAPTURE(L, r, l);
        CHECK(bound_P(spec.interaction_count(), r, l, 1) >=
              BigInt(count_P_tuples(spec, r, l)));
      }
    }
  }
  for (int L : {2, 3}) {
    const LatticeSpec spec{2, L, 0, 2};
    for (long long l : {1LL, 2LL}) {
      CHECK(bound_P(spec.interaction_count(), 2, l, 2) >=
            BigInt(count_P_tuples(spec, 2, l)));
    }
  }
}

TEST_CASE("closed-form bound on hypergraphs", "[combinatorics]") {
  CHECK(bound_Q(6, 2, 2) == 192);
  CHECK(bound_Q(0, 2, 0) == 0);
  CHECK(bound_Q(3, 2, 0) == 24);  // isolated terms still admit repeats
  CHECK_THROWS_AS(bound_Q(6, 5, 2), ValidationError);

  CHECK(bound_Q(6, 2, 2) >= BigInt(count_Q_tuples(helpers::triangle_chain(), 2)));
  CHECK(bound_Q(6, 4, 2) >= BigInt(count_Q_tuples(helpers::triangle_chain(), 4)));

  Prng rng(9001);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = helpers::random_hypergraph(rng);
    for (int r : {2, 4}) {
      CAPTURE(trial, r);
      CHECK(bound_Q(h.num_terms(), r, h.max_neighbors()) >=
            BigInt(count_Q_tuples(h, r)));
    }
  }
}

TEST_CASE("big integer bounds avoid overflow", "[combinatorics]") {
  // (4 * 4 * 10^6 * 32)^16 needs ~430 bits, far past any built-in width.
  const BigInt huge = bound_P(1000000, 32, 1, 1);
  BigInt expect = 1;
  for (int i = 0; i < 16; ++i) expect *= BigInt(4) * 4 * 1000000 * 32;
  CHECK(huge == expect);
  CHECK(huge > BigInt(std::uint64_t(-1)));
}

TEST_CASE("farthest distance grouping", "[combinatorics]") {
  const LatticeSpec spec{1, 3, 0, 2};
  const auto groups = group_by_farthest_distance(spec, 2);
  REQUIRE(groups.count(0) == 1);
  REQUIRE(groups.count(1) == 1);
  REQUIRE(groups.count(2) == 1);
  CHECK(groups.at(0).size() == 3);
  CHECK(groups.at(1).size() == 4);
  CHECK(groups.at(2).size() == 2);

  std::size_t total = 0;
  for (const auto& [l, tuples] : groups) total += tuples.size();
  CHECK(total == 9);

  const auto all = dual_interactions(spec);
  for (const auto& [l, tuples] : groups) {
    for (const auto& idx : tuples) {
      std::vector<Interaction> tuple{all[idx[0]], all[idx[1]]};
      CHECK(farthest_distance(tuple) == l);
      CHECK(one_norm_distance(tuple[0], tuple[1]) == l);
    }
  }
}

TEST_CASE("enumeration guards trip before work starts", "[combinatorics]") {
  const LatticeSpec big{2, 46, 0, 2};  // n = 2116, n^4 ~ 2e13
  try {
    count_P_tuples(big, 4, 1);
    FAIL("expected a guard trip");
  } catch (const EnumerationLimitError& e) {
    CHECK(std::string(e.what()).find("closed-form bound") != std::string::npos);
  }
  CHECK_THROWS_AS(group_by_farthest_distance(LatticeSpec{2, 60, 0, 2}, 4),
                  EnumerationLimitError);
}
