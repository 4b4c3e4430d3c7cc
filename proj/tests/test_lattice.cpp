#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "spintail/lattice.hpp"

using namespace spintail;

TEST_CASE("one-norm distance between sites", "[lattice]") {
  CHECK(one_norm_distance(Site{{0, 2}}, Site{{2, 3}}) == 3);
  CHECK(one_norm_distance(Site{{1, 1, 1}}, Site{{1, 1, 1}}) == 0);
  CHECK(one_norm_distance(Site{{0}}, Site{{5}}) == 5);
  CHECK_THROWS_AS(one_norm_distance(Site{{0}}, Site{{0, 0}}), ValidationError);
}

TEST_CASE("one-norm distance between interactions", "[lattice]") {
  // Half-integer coordinates are stored shifted down by 1/2, so (2.5, 2.5)
  // is {2, 2}. Same-kind distances are always integral.
  CHECK(one_norm_distance(Interaction{{2, 2}}, Interaction{{0, 1}}) == 3);
  CHECK(one_norm_distance(Interaction{{3}}, Interaction{{3}}) == 0);
  CHECK(Interaction{{2}}.coord(0) == 2.5);
  CHECK_THROWS_AS(one_norm_distance(Interaction{{0}}, Interaction{{0, 0}}),
                  ValidationError);
}

TEST_CASE("lattice spec validation and counts", "[lattice]") {
  LatticeSpec good{2, 4, 1, 2};
  good.validate();
  CHECK(good.site_count() == 25);
  CHECK(good.interaction_count() == 16);

  CHECK_THROWS_AS((LatticeSpec{0, 4, 1, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((LatticeSpec{1, 0, 1, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((LatticeSpec{1, 4, -1, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((LatticeSpec{1, 4, 1, 1}.validate()), ValidationError);
}

TEST_CASE("dual interaction enumeration", "[lattice]") {
  const auto line = dual_interactions(LatticeSpec{1, 4, 0, 2});
  REQUIRE(line.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(line[i].coord(0) == i + 0.5);

  CHECK(dual_interactions(LatticeSpec{2, 4, 0, 2}).size() == 16);

  const auto single = dual_interactions(LatticeSpec{1, 1, 0, 2});
  REQUIRE(single.size() == 1);
  CHECK(single[0].coord(0) == 0.5);

  const auto grid = dual_interactions(LatticeSpec{2, 3, 1, 2});
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
}

TEST_CASE("support sites of an interaction", "[lattice]") {
  const LatticeSpec plane{2, 4, 0, 2};
  const auto corners = support_sites(Interaction{{2, 2}}, plane);
  const std::vector<Site> expect{Site{{2, 2}}, Site{{2, 3}}, Site{{3, 2}},
                                 Site{{3, 3}}};
  CHECK(corners == expect);

  const auto ends = support_sites(Interaction{{0}}, LatticeSpec{1, 1, 0, 2});
  CHECK(ends == std::vector<Site>{Site{{0}}, Site{{1}}});

  const auto window = support_sites(Interaction{{1}}, LatticeSpec{1, 4, 1, 2});
  CHECK(window == std::vector<Site>{Site{{0}}, Site{{1}}, Site{{2}}, Site{{3}}});
}

TEST_CASE("support size and clipping bounds", "[lattice]") {
  for (int D = 1; D <= 2; ++D) {
    for (int k = 0; k <= 2; ++k) {
      const LatticeSpec spec{D, 4, k, 2};
      const std::uint64_t cap = checked_pow(2 * k + 2, D, UINT64_C(1) << 40);
      for (const auto& w : dual_interactions(spec)) {
        const auto sites = support_sites(w, spec);
        CHECK(sites.size() <= cap);
        CHECK(std::is_sorted(sites.begin(), sites.end()));
        for (const auto& v : sites) {
          CHECK(spec.contains(v));
          for (int i = 0; i < D; ++i)
            CHECK(std::abs(v.coords[i] - w.coord(i)) <= k + 0.5);
        }
      }
    }
  }
}

TEST_CASE("site index round trip", "[lattice]") {
  const LatticeSpec spec{2, 3, 0, 2};
  for (std::size_t i = 0; i < spec.site_count(); ++i) {
    const Site v = site_from_index(i, spec);
    CHECK(site_index(v, spec) == i);
  }
  CHECK_THROWS_AS(site_index(Site{{7, 0}}, spec), ValidationError);
}

TEST_CASE("triangle chain hypergraph parameters", "[lattice]") {
  const auto h = helpers::triangle_chain();
  CHECK(h.num_spins() == 12);
  CHECK(h.num_terms() == 6);
  CHECK(h.locality() == 3);
  CHECK(h.max_neighbors() == 2);
  CHECK(h.max_degree() == 2);

  CHECK(h.neighbor_sets()[3] == std::vector<int>{2, 4});
  CHECK(h.neighbor_sets()[0] == std::vector<int>{1});
  CHECK(h.neighbor_sets()[5] == std::vector<int>{4});
  CHECK_FALSE(h.terms_intersect(5, 0));
  CHECK(h.terms_intersect(4, 5));
  CHECK(h.uniform_locality());
}

TEST_CASE("hypergraph degree relations", "[lattice]") {
  // m <= k g always; k n <= g N needs uniform term size.
  const auto fixed = helpers::triangle_chain();
  CHECK(fixed.max_neighbors() <= fixed.locality() * fixed.max_degree());
  CHECK(fixed.locality() * static_cast<int>(fixed.num_terms()) <=
        fixed.max_degree() * fixed.num_spins());

  Prng rng(2026);
  for (int trial = 0; trial < 40; ++trial) {
    const auto h = helpers::random_hypergraph(rng);
    CHECK(h.max_neighbors() <= h.locality() * h.max_degree());
    if (h.uniform_locality()) {
      CHECK(h.locality() * static_cast<int>(h.num_terms()) <=
            h.max_degree() * h.num_spins());
    }
  }
}

TEST_CASE("hypergraph neighbor edge cases", "[lattice]") {
  const auto disjoint = InteractionHypergraph::build(4, {{0, 1}, {2, 3}});
  CHECK(disjoint.neighbor_sets()[0].empty());
  CHECK(disjoint.neighbor_sets()[1].empty());
  CHECK(disjoint.max_neighbors() == 0);

  // Duplicate spins inside a term collapse; terms may repeat as sets.
  const auto collapsed = InteractionHypergraph::build(3, {{1, 1, 2}});
  CHECK(collapsed.terms()[0] == std::vector<int>{1, 2});
  CHECK(collapsed.locality() == 2);

  CHECK_THROWS_AS(InteractionHypergraph::build(2, {{0, 5}}), ValidationError);
  CHECK_THROWS_AS(InteractionHypergraph::build(2, {{}}), ValidationError);
  CHECK_THROWS_AS(InteractionHypergraph::build(0, {}), ValidationError);
}

TEST_CASE("declared caps are enforced", "[lattice]") {
  const std::vector<std::vector<int>> sets{{0, 1}, {1, 2}, {2, 3}};
  CHECK_NOTHROW(InteractionHypergraph::build(4, sets, 2, 2));
  CHECK_THROWS_AS(InteractionHypergraph::build(4, sets, 1, -1), ValidationError);
  CHECK_THROWS_AS(InteractionHypergraph::build(4, sets, -1, 1), ValidationError);
}

TEST_CASE("closed neighborhood overlap", "[lattice]") {
  const auto h = helpers::triangle_chain();
  CHECK(h.closed_neighborhood_overlap(0, 0));
  CHECK(h.closed_neighborhood_overlap(0, 1));
  CHECK(h.closed_neighborhood_overlap(0, 2));   // both neighbor term 1
  CHECK_FALSE(h.closed_neighborhood_overlap(0, 4));
  CHECK_FALSE(h.closed_neighborhood_overlap(0, 5));
}
