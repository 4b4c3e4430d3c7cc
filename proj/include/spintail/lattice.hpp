#ifndef SPINTAIL_LATTICE_HPP
#define SPINTAIL_LATTICE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "spintail/core.hpp"

namespace spintail {

/// Lattice point with integer coordinates, each in [0, L].
struct Site {
  std::vector<int> coords;
};

/// Dual-lattice point. Coordinate i is stored as the integer c_i with the
/// actual position c_i + 1/2, so all geometry stays in exact integer
/// arithmetic; 0 <= c_i <= L-1 keeps the point strictly inside (0, L).
struct Interaction {
  std::vector<int> half_coords;

  double coord(std::size_t i) const { return half_coords[i] + 0.5; }
};

inline bool operator==(const Site& a, const Site& b) { return a.coords == b.coords; }
inline bool operator<(const Site& a, const Site& b) { return a.coords < b.coords; }
inline bool operator==(const Interaction& a, const Interaction& b) {
  return a.half_coords == b.half_coords;
}
inline bool operator<(const Interaction& a, const Interaction& b) {
  return a.half_coords < b.half_coords;
}

/// Hypercubic lattice of spins with one interaction per unit hypercube.
/// dim = D, side = L, halfwidth = k (interaction support reach), local_dim = d.
struct LatticeSpec {
  int dim = 1;
  int side = 1;
  int halfwidth = 0;
  int local_dim = 2;

  void validate() const {
    if (dim < 1) throw ValidationError("lattice: dim must be >= 1");
    if (side < 1) throw ValidationError("lattice: side must be >= 1");
    if (halfwidth < 0) throw ValidationError("lattice: halfwidth must be >= 0");
    if (local_dim < 2) throw ValidationError("lattice: local_dim must be >= 2");
  }

  std::uint64_t site_count() const {
    return checked_pow(static_cast<std::uint64_t>(side) + 1, dim, UINT64_C(1) << 62);
  }

  /// Number of interactions n = L^D.
  std::uint64_t interaction_count() const {
    return checked_pow(static_cast<std::uint64_t>(side), dim, UINT64_C(1) << 62);
  }

  bool contains(const Site& v) const {
    if (static_cast<int>(v.coords.size()) != dim) return false;
    return std::all_of(v.coords.begin(), v.coords.end(),
                       [&](int c) { return 0 <= c && c <= side; });
  }

  bool contains(const Interaction& w) const {
    if (static_cast<int>(w.half_coords.size()) != dim) return false;
    return std::all_of(w.half_coords.begin(), w.half_coords.end(),
                       [&](int c) { return 0 <= c && c <= side - 1; });
  }
};

/// 1-norm distance between two sites. Always a non-negative integer.
inline long long one_norm_distance(const Site& a, const Site& b) {
  if (a.coords.size() != b.coords.size()) {
    throw ValidationError("one_norm_distance: dimension mismatch");
  }
  long long s = 0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    s += std::abs(static_cast<long long>(a.coords[i]) - b.coords[i]);
  }
  return s;
}

/// 1-norm distance between two interactions; the half offsets cancel, so
/// this is again an exact integer.
inline long long one_norm_distance(const Interaction& a, const Interaction& b) {
  if (a.half_coords.size() != b.half_coords.size()) {
    throw ValidationError("one_norm_distance: dimension mismatch");
  }
  long long s = 0;
  for (std::size_t i = 0; i < a.half_coords.size(); ++i) {
    s += std::abs(static_cast<long long>(a.half_coords[i]) - b.half_coords[i]);
  }
  return s;
}

/// All interactions of the dual lattice in lexicographic order; length L^D.
inline std::vector<Interaction> dual_interactions(const LatticeSpec& spec) {
  spec.validate();
  const std::uint64_t n = spec.interaction_count();
  std::vector<Interaction> out;
  out.reserve(n);
  std::vector<int> c(spec.dim, 0);
  while (true) {
    out.push_back(Interaction{c});
    int axis = spec.dim - 1;
    while (axis >= 0) {
      if (++c[axis] < spec.side) break;
      c[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

/// Sites v with |v_i - w_i| <= k + 1/2 on every axis: per axis the integer
/// window [c_i - k, c_i + k + 1] clipped to [0, L]. Lexicographic order.
inline std::vector<Site> support_sites(const Interaction& w, const LatticeSpec& spec) {
  spec.validate();
  if (!spec.contains(w)) throw ValidationError("support_sites: interaction outside dual lattice");
  std::vector<int> lo(spec.dim), hi(spec.dim);
  for (int i = 0; i < spec.dim; ++i) {
    lo[i] = std::max(0, w.half_coords[i] - spec.halfwidth);
    hi[i] = std::min(spec.side, w.half_coords[i] + spec.halfwidth + 1);
  }
  std::vector<Site> out;
  std::vector<int> v(lo);
  while (true) {
    out.push_back(Site{v});
    int axis = spec.dim - 1;
    while (axis >= 0) {
      if (++v[axis] <= hi[axis]) break;
      v[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

/// Lexicographic index of a site (site (0,...,0) is index 0).
inline std::size_t site_index(const Site& v, const LatticeSpec& spec) {
  if (!spec.contains(v)) throw ValidationError("site_index: site outside lattice");
  std::size_t idx = 0;
  for (int i = 0; i < spec.dim; ++i) {
    idx = idx * (spec.side + 1) + static_cast<std::size_t>(v.coords[i]);
  }
  return idx;
}

inline Site site_from_index(std::size_t idx, const LatticeSpec& spec) {
  std::vector<int> c(spec.dim);
  for (int i = spec.dim - 1; i >= 0; --i) {
    c[i] = static_cast<int>(idx % (spec.side + 1));
    idx /= (spec.side + 1);
  }
  return Site{c};
}

/// Bounded-degree interaction hypergraph on an abstract spin collection.
/// locality = k (max term size), max_neighbors = m, max_degree = g; all three
/// are exact values computed from the terms at build time.
class InteractionHypergraph {
 public:
  /// Builds and validates. `declared_max_neighbors`, when >= 0, is checked
  /// against the computed value and rejected if exceeded.
  static InteractionHypergraph build(int num_spins,
                                     std::vector<std::vector<int>> terms,
                                     int declared_max_neighbors = -1,
                                     int declared_max_degree = -1) {
    InteractionHypergraph h;
    h.num_spins_ = num_spins;
    if (num_spins < 1) throw ValidationError("hypergraph: needs at least one spin");
    for (auto& t : terms) {
      if (t.empty()) throw ValidationError("hypergraph: empty term");
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      for (int s : t) {
        if (s < 0 || s >= num_spins) {
          throw ValidationError("hypergraph: spin id " + std::to_string(s) +
                                " out of range");
        }
      }
    }
    h.terms_ = std::move(terms);
    h.locality_ = 0;
    for (const auto& t : h.terms_) {
      h.locality_ = std::max(h.locality_, static_cast<int>(t.size()));
    }
    h.neighbors_ = compute_neighbor_sets(h.terms_);
    h.max_neighbors_ = 0;
    for (const auto& nb : h.neighbors_) {
      h.max_neighbors_ = std::max(h.max_neighbors_, static_cast<int>(nb.size()));
    }
    if (declared_max_neighbors >= 0 && h.max_neighbors_ > declared_max_neighbors) {
      throw ValidationError("hypergraph: a term has " +
                            std::to_string(h.max_neighbors_) +
                            " neighbors, exceeding declared m = " +
                            std::to_string(declared_max_neighbors));
    }
    std::vector<int> degree(num_spins, 0);
    for (const auto& t : h.terms_) {
      for (int s : t) ++degree[s];
    }
    h.max_degree_ = h.terms_.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
    if (declared_max_degree >= 0 && h.max_degree_ > declared_max_degree) {
      throw ValidationError("hypergraph: a spin touches " +
                            std::to_string(h.max_degree_) +
                            " terms, exceeding declared g = " +
                            std::to_string(declared_max_degree));
    }
    return h;
  }

  int num_spins() const { return num_spins_; }
  std::size_t num_terms() const { return terms_.size(); }
  const std::vector<std::vector<int>>& terms() const { return terms_; }
  int locality() const { return locality_; }
  int max_neighbors() const { return max_neighbors_; }
  int max_degree() const { return max_degree_; }

  /// N(w): terms w' != w sharing at least one spin with w.
  const std::vector<std::vector<int>>& neighbor_sets() const { return neighbors_; }

  bool terms_intersect(int a, int b) const {
    const auto& ta = terms_[a];
    const auto& tb = terms_[b];
    std::size_t i = 0, j = 0;
    while (i < ta.size() && j < tb.size()) {
      if (ta[i] == tb[j]) return true;
      if (ta[i] < tb[j]) ++i; else ++j;
    }
    return false;
  }

  /// Whether the closed neighborhoods N(a) u {a} and N(b) u {b} intersect.
  /// This is the closeness relation behind selection condition 1; the closed
  /// form keeps repeat-only tuples (which qualify for the moment expansion)
  /// inside the selection machinery.
  bool closed_neighborhood_overlap(int a, int b) const {
    if (a == b) return true;
    std::vector<int> ca = neighbors_[a];
    ca.push_back(a);
    std::sort(ca.begin(), ca.end());
    std::vector<int> cb = neighbors_[b];
    cb.push_back(b);
    std::sort(cb.begin(), cb.end());
    std::size_t i = 0, j = 0;
    while (i < ca.size() && j < cb.size()) {
      if (ca[i] == cb[j]) return true;
      if (ca[i] < cb[j]) ++i; else ++j;
    }
    return false;
  }

  /// All-uniform-locality relations k*n <= g*N and m <= k*g.
  bool uniform_locality() const {
    return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) {
      return static_cast<int>(t.size()) == locality_;
    });
  }

 private:
  static std::vector<std::vector<int>> compute_neighbor_sets(
      const std::vector<std::vector<int>>& terms) {
    const std::size_t n = terms.size();
    std::vector<std::vector<int>> nb(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        std::size_t i = 0, j = 0;
        bool hit = false;
        while (i < terms[a].size() && j < terms[b].size()) {
          if (terms[a][i] == terms[b][j]) { hit = true; break; }
          if (terms[a][i] < terms[b][j]) ++i; else ++j;
        }
        if (hit) {
          nb[a].push_back(static_cast<int>(b));
          nb[b].push_back(static_cast<int>(a));
        }
      }
    }
    return nb;
  }

  int num_spins_ = 0;
  std::vector<std::vector<int>> terms_;
  std::vector<std::vector<int>> neighbors_;
  int locality_ = 0;
  int max_neighbors_ = 0;
  int max_degree_ = 0;
};

/// Pretty-printers for error messages and reports.
inline std::string to_string(const Site& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v.coords[i]);
  }
  return s + ")";
}

inline std::string to_string(const Interaction& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.half_coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(w.half_coords[i]) + ".5";
  }
  return s + ")";
}

}  // namespace spintail

#endif  // SPINTAIL_LATTICE_HPP
