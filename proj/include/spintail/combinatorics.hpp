#ifndef SPINTAIL_COMBINATORICS_HPP
#define SPINTAIL_COMBINATORICS_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <thread>
#include <vector>

#include "spintail/core.hpp"
#include "spintail/lattice.hpp"

namespace spintail {

// Tuple closeness machinery. A tuple is a sequence of r elements of some
// ambient interaction set, repeats allowed. "Partner" predicates are always
// evaluated on tuple positions, so a repeated element is its own partner.

/// Result of the three-phase assignment. bits/entries form the selection
/// proper; pointers is the relation R built in phase two (0 means none),
/// kept because tests want to inspect the pre-update state.
struct Selection {
  std::vector<int> bits;
  std::vector<int> entries;
  std::vector<int> pointers;
};

inline bool operator==(const Selection& a, const Selection& b) {
  return a.bits == b.bits && a.entries == b.entries;
}
inline bool operator<(const Selection& a, const Selection& b) {
  if (a.bits != b.bits) return a.bits < b.bits;
  return a.entries < b.entries;
}

namespace detail {

/// Runs Initialization, Pointer creation and Update for a tuple of length r
/// whose position-level closeness is given by `close(a, b)`. Entries are
/// copied into the result verbatim by the callers.
///
/// Update is done as one grouping pass: among the zero-bit positions sharing
/// a pointer target, only the smallest keeps its zero. Iterating a pairwise
/// subset loop to fixpoint produces exactly this outcome, because the
/// minimum of a group can never be flipped and every other member is flipped
/// by its pair with the minimum.
template <class ClosePred>
inline Selection run_selection_phases(int r, ClosePred&& close) {
  if (r < 1) throw ValidationError("selection: tuple must be non-empty");
  std::vector<int> b(r, 0);
  for (int i = 1; i < r; ++i) {
    for (int j = 0; j < i; ++j) {
      if (close(i, j)) {
        b[i] = 1;
        break;
      }
    }
  }
  // Pointer creation; R uses 1-based targets with 0 meaning "no pointer".
  std::vector<int> R(r, 0);
  for (int i = 0; i < r; ++i) {
    if (b[i] == 1) continue;
    int target = 0;
    for (int j = i + 1; j < r; ++j) {
      if (b[j] == 1 && close(i, j)) {
        target = j + 1;
        break;
      }
    }
    if (target == 0) {
      throw ValidationError(
          "selection: pointer creation failed; tuple does not satisfy the "
          "partner property");
    }
    R[i] = target;
  }
  Selection out;
  out.pointers = R;
  // Update: first zero-bit position per pointer target survives.
  std::vector<int> first_for_target(r + 1, -1);
  for (int i = 0; i < r; ++i) {
    if (b[i] != 0) continue;
    int t = R[i];
    if (first_for_target[t] < 0) {
      first_for_target[t] = i;
    } else {
      b[i] = 1;
    }
  }
  out.bits = std::move(b);
  return out;
}

inline std::uint64_t tuple_space_size(std::uint64_t n, int r, std::uint64_t guard,
                                      const char* what) {
  if (r < 1) throw ValidationError(std::string(what) + ": r must be >= 1");
  if (n == 0) return 0;
  try {
    return checked_pow(n, r, guard);
  } catch (const EnumerationLimitError&) {
    throw EnumerationLimitError(
        std::string(what) + ": n^r exceeds the enumeration guard of " +
        std::to_string(guard) + "; use the closed-form bound instead");
  }
}

inline void decode_tuple(std::uint64_t linear, std::uint64_t n, int r,
                         std::vector<int>& out) {
  out.resize(r);
  for (int i = r - 1; i >= 0; --i) {
    out[i] = static_cast<int>(linear % n);
    linear /= n;
  }
}

inline bool advance_tuple(std::vector<int>& idx, std::uint64_t n) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    if (static_cast<std::uint64_t>(++idx[i]) < n) return true;
    idx[i] = 0;
  }
  return false;
}

/// Counts tuples in [0, n^r) accepted by `pred`, optionally splitting the
/// linear range across threads. Summation order does not affect the result.
template <class Pred>
inline std::uint64_t count_tuples(std::uint64_t n, int r, std::uint64_t total,
                                  unsigned threads, Pred&& pred) {
  if (total == 0) return 0;
  threads = std::max(1u, threads);
  const std::uint64_t per =
      std::min<std::uint64_t>(total, std::max<std::uint64_t>(1, total / threads));
  std::vector<std::uint64_t> starts;
  for (std::uint64_t s = 0; s < total; s += per) starts.push_back(s);
  std::vector<std::uint64_t> partial(starts.size(), 0);
  auto work = [&](std::size_t chunk) {
    const std::uint64_t begin = starts[chunk];
    const std::uint64_t end = std::min(total, begin + per);
    std::vector<int> idx;
    decode_tuple(begin, n, r, idx);
    std::uint64_t c = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      if (pred(idx)) ++c;
      advance_tuple(idx, n);
    }
    partial[chunk] = c;
  };
  if (starts.size() == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(starts.size());
    for (std::size_t c = 0; c < starts.size(); ++c) pool.emplace_back(work, c);
    for (auto& t : pool) t.join();
  }
  std::uint64_t sum = 0;
  for (std::uint64_t p : partial) sum += p;
  return sum;
}

}  // namespace detail

/// True iff every position i has a partner position j != i with
/// ||w_i - w_j|| <= l. Singletons never qualify.
inline bool satisfies_P(const std::vector<Interaction>& tuple, long long l) {
  const int r = static_cast<int>(tuple.size());
  if (r < 2) return false;
  for (int i = 0; i < r; ++i) {
    bool found = false;
    for (int j = 0; j < r && !found; ++j) {
      if (j != i && one_norm_distance(tuple[i], tuple[j]) <= l) found = true;
    }
    if (!found) return false;
  }
  return true;
}

/// True iff every position i has a partner position j != i whose term shares
/// a spin with term i. A repeated term is its own partner (terms are
/// non-empty, so |w n w| > 0).
inline bool satisfies_Q(const InteractionHypergraph& h,
                        const std::vector<int>& term_ids) {
  const int r = static_cast<int>(term_ids.size());
  if (r < 2) return false;
  for (int i = 0; i < r; ++i) {
    bool found = false;
    for (int j = 0; j < r && !found; ++j) {
      if (j != i && h.terms_intersect(term_ids[i], term_ids[j])) found = true;
    }
    if (!found) return false;
  }
  return true;
}

/// Three-phase selection assignment, lattice flavor. Precondition: the tuple
/// satisfies the distance-l partner property; otherwise pointer creation
/// fails and a ValidationError is thrown. x_i = w_i verbatim (entries hold
/// positions into `tuple`'s ambient set only when the caller enumerates by
/// index; here they are positions 0..r-1 resolved by the caller).
inline Selection assign_selection(const std::vector<Interaction>& tuple,
                                  long long l,
                                  const std::vector<int>* entry_ids = nullptr) {
  const int r = static_cast<int>(tuple.size());
  Selection s = detail::run_selection_phases(r, [&](int a, int b) {
    return one_norm_distance(tuple[a], tuple[b]) <= l;
  });
  if (entry_ids) {
    s.entries = *entry_ids;
  } else {
    s.entries.resize(r);
    for (int i = 0; i < r; ++i) s.entries[i] = i;
  }
  return s;
}

/// Hypergraph flavor. The phase predicates use closed neighborhoods: term a
/// is close to term b when a == b or they share a spin. The open-neighborhood
/// reading strands tuples whose only partners are exact repeats (for example
/// (w, w) over pairwise-disjoint terms): such a tuple has the partner
/// property but no pointer target would exist. Closing the neighborhood
/// restores totality while keeping every flip justified by a shared spin.
inline Selection assign_selection(const InteractionHypergraph& h,
                                  const std::vector<int>& term_ids) {
  const int r = static_cast<int>(term_ids.size());
  Selection s = detail::run_selection_phases(r, [&](int a, int b) {
    return term_ids[a] == term_ids[b] ||
           h.terms_intersect(term_ids[a], term_ids[b]);
  });
  s.entries = term_ids;
  return s;
}

/// Selection validity, lattice flavor: every 1-bit needs an earlier entry
/// within distance 2l, and at most r/2 bits are zero.
inline bool selection_valid(const Selection& s,
                            const std::vector<Interaction>& ambient,
                            long long l) {
  const int r = static_cast<int>(s.bits.size());
  if (static_cast<int>(s.entries.size()) != r) return false;
  int zeros = 0;
  for (int i = 0; i < r; ++i) {
    if (s.bits[i] == 0) {
      ++zeros;
      continue;
    }
    bool ok = false;
    for (int j = 0; j < i && !ok; ++j) {
      if (one_norm_distance(ambient[s.entries[i]], ambient[s.entries[j]]) <= 2 * l)
        ok = true;
    }
    if (!ok) return false;
  }
  return 2 * zeros <= r;
}

/// Hypergraph flavor: every 1-bit needs an earlier entry whose closed
/// neighborhood meets its own closed neighborhood.
inline bool selection_valid(const Selection& s, const InteractionHypergraph& h) {
  const int r = static_cast<int>(s.bits.size());
  if (static_cast<int>(s.entries.size()) != r) return false;
  int zeros = 0;
  for (int i = 0; i < r; ++i) {
    if (s.bits[i] == 0) {
      ++zeros;
      continue;
    }
    bool ok = false;
    for (int j = 0; j < i && !ok; ++j) {
      if (h.closed_neighborhood_overlap(s.entries[i], s.entries[j])) ok = true;
    }
    if (!ok) return false;
  }
  return 2 * zeros <= r;
}

constexpr std::uint64_t kCountGuard = 100000000;     // 1e8 tuples
constexpr std::uint64_t kGroupingGuard = 10000000;   // 1e7 tuples

/// Exact N_D(n, r, l) over the dual interactions of `spec` by exhaustive
/// enumeration. Guarded: refuses when n^r > 1e8.
inline std::uint64_t count_P_tuples(const LatticeSpec& spec, int r, long long l,
                                    unsigned threads = 1) {
  spec.validate();
  if (l < 1) throw ValidationError("count_P_tuples: l must be >= 1");
  const std::vector<Interaction> all = dual_interactions(spec);
  const std::uint64_t n = all.size();
  const std::uint64_t total =
      detail::tuple_space_size(n, r, kCountGuard, "count_P_tuples");
  if (r < 2) return 0;
  // Pairwise distance table when it fits; otherwise compute on the fly.
  std::vector<long long> dist;
  const bool tabulate = n <= 2048;
  if (tabulate) {
    dist.resize(n * n);
    for (std::uint64_t a = 0; a < n; ++a)
      for (std::uint64_t b = 0; b < n; ++b)
        dist[a * n + b] = one_norm_distance(all[a], all[b]);
  }
  auto close = [&](int a, int b) {
    return tabulate ? dist[static_cast<std::uint64_t>(a) * n + b] <= l
                    : one_norm_distance(all[a], all[b]) <= l;
  };
  return detail::count_tuples(n, r, total, threads, [&](const std::vector<int>& idx) {
    for (int i = 0; i < r; ++i) {
      bool found = false;
      for (int j = 0; j < r && !found; ++j) {
        if (j != i && close(idx[i], idx[j])) found = true;
      }
      if (!found) return false;
    }
    return true;
  });
}

/// Exact N_{k,m}(n, r) over the terms of `h`. Guarded: n^r <= 1e8.
inline std::uint64_t count_Q_tuples(const InteractionHypergraph& h, int r,
                                    unsigned threads = 1) {
  const std::uint64_t n = h.num_terms();
  const std::uint64_t total =
      detail::tuple_space_size(n, r, kCountGuard, "count_Q_tuples");
  if (r < 2) return 0;
  std::vector<char> meet;
  const bool tabulate = n <= 2048;
  if (tabulate) {
    meet.resize(n * n);
    for (std::uint64_t a = 0; a < n; ++a)
      for (std::uint64_t b = 0; b < n; ++b)
        meet[a * n + b] = h.terms_intersect(static_cast<int>(a), static_cast<int>(b));
  }
  auto close = [&](int a, int b) {
    return tabulate ? meet[static_cast<std::uint64_t>(a) * n + b] != 0
                    : h.terms_intersect(a, b);
  };
  return detail::count_tuples(n, r, total, threads, [&](const std::vector<int>& idx) {
    for (int i = 0; i < r; ++i) {
      bool found = false;
      for (int j = 0; j < r && !found; ++j) {
        if (j != i && close(idx[i], idx[j])) found = true;
      }
      if (!found) return false;
    }
    return true;
  });
}

/// Closed-form tuple count bound (4 (4l)^D n r)^(r/2), exact integers.
inline BigInt bound_P(std::uint64_t n, int r, long long l, int D) {
  if (r < 2 || r % 2 != 0)
    throw ValidationError("bound_P: r must be a positive even integer");
  if (l < 1) throw ValidationError("bound_P: l must be >= 1");
  if (D < 1) throw ValidationError("bound_P: D must be >= 1");
  const BigInt base = BigInt(4) * big_pow(BigInt(4) * l, D) * n * r;
  return big_pow(base, r / 2);
}

/// Closed-form bound (4 m^2 n r)^(r/2). A zero m is lifted to 1: the formula
/// would otherwise return 0 while repeat-only tuples still exist, and with
/// the lift the bound again dominates the exhaustive count.
inline BigInt bound_Q(std::uint64_t n, int r, int m) {
  if (r < 2 || r % 2 != 0)
    throw ValidationError("bound_Q: r must be a positive even integer");
  if (m < 0) throw ValidationError("bound_Q: m must be >= 0");
  const long long m_eff = std::max(m, 1);
  const BigInt base = BigInt(4) * m_eff * m_eff * n * r;
  return big_pow(base, r / 2);
}

/// D(w_1..w_r) = max_i min_{j != i} ||w_i - w_j||: how far the most isolated
/// entry sits from the rest. Needs r >= 2.
inline long long farthest_distance(const std::vector<Interaction>& tuple) {
  const int r = static_cast<int>(tuple.size());
  if (r < 2) throw ValidationError("farthest_distance: needs at least 2 entries");
  long long worst = 0;
  for (int i = 0; i < r; ++i) {
    long long best = -1;
    for (int j = 0; j < r; ++j) {
      if (j == i) continue;
      const long long d = one_norm_distance(tuple[i], tuple[j]);
      if (best < 0 || d < best) best = d;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

/// Partitions all n^r tuples over the dual interactions by farthest
/// distance. Keys are the distances; values list the tuples as index vectors
/// into dual_interactions order. Guarded: n^r <= 1e7.
inline std::map<long long, std::vector<std::vector<int>>> group_by_farthest_distance(
    const LatticeSpec& spec, int r) {
  spec.validate();
  if (r < 2)
    throw ValidationError("group_by_farthest_distance: r must be >= 2");
  const std::vector<Interaction> all = dual_interactions(spec);
  const std::uint64_t n = all.size();
  const std::uint64_t total =
      detail::tuple_space_size(n, r, kGroupingGuard, "group_by_farthest_distance");
  std::map<long long, std::vector<std::vector<int>>> groups;
  if (total == 0) return groups;
  std::vector<int> idx(r, 0);
  std::vector<Interaction> tuple(r);
  for (std::uint64_t t = 0; t < total; ++t) {
    for (int i = 0; i < r; ++i) tuple[i] = all[idx[i]];
    groups[farthest_distance(tuple)].push_back(idx);
    detail::advance_tuple(idx, n);
  }
  return groups;
}

}  // namespace spintail

#endif  // SPINTAIL_COMBINATORICS_HPP
