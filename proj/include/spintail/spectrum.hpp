#ifndef SPINTAIL_SPECTRUM_HPP
#define SPINTAIL_SPECTRUM_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "spintail/combinatorics.hpp"
#include "spintail/core.hpp"
#include "spintail/hamiltonian.hpp"
#include "spintail/linalg.hpp"
#include "spintail/states.hpp"

namespace spintail {

constexpr double kRouteAgreementRel = 1e-8;
constexpr int kMaxMomentOrder = 32;
constexpr std::uint64_t kExpansionGuard = 1000000;  // 1e6 tuples

struct EnergyLevel {
  double f = 0.0;
  double weight = 0.0;
};

/// Spectral weights Tr(rho Pi_f), one entry per eigenvalue cluster, sorted
/// ascending. Eigenvalues within cluster_tol of their predecessor are merged
/// so that degenerate blocks report a basis-independent weight.
struct EnergyDistribution {
  std::vector<EnergyLevel> levels;
  double cluster_tol = 0.0;
};

namespace detail {

struct Cluster {
  double center;
  int begin;
  int end;  // half-open index range into the ascending eigenvalue list
};

inline std::vector<Cluster> cluster_eigenvalues(const RealVector& vals, double tol) {
  std::vector<Cluster> out;
  const int n = static_cast<int>(vals.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || vals(i) - vals(i - 1) > tol) {
      double sum = 0.0;
      for (int j = start; j < i; ++j) sum += vals(j);
      out.push_back({sum / (i - start), start, i});
      start = i;
    }
  }
  return out;
}

}  // namespace detail

/// Full spectral decomposition of H with weights <psi|rho|psi> summed per
/// cluster. Exactly diagonal H takes the basis-state path (no eigensolver).
/// A negative cluster_tol selects the default 1e-9 * max(1, spectral width).
inline EnergyDistribution energy_distribution(const DensityState& rho,
                                              const Matrix& H,
                                              double cluster_tol = -1.0) {
  if (H.rows() != H.cols() || H.rows() != rho.matrix.rows())
    throw ValidationError("energy_distribution: dimension mismatch");
  if (static_cast<std::uint64_t>(H.rows()) > kDimCap)
    throw EnumerationLimitError("energy_distribution: dimension exceeds 2^14 cap");
  EnergyDistribution dist;
  if (is_exactly_diagonal(H)) {
    const Eigen::Index n = H.rows();
    std::vector<int> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return H(a, a).real() < H(b, b).real();
    });
    RealVector vals(n);
    for (Eigen::Index i = 0; i < n; ++i) vals(i) = H(order[i], order[i]).real();
    if (cluster_tol < 0.0)
      cluster_tol = 1e-9 * std::max(1.0, vals(n - 1) - vals(0));
    dist.cluster_tol = cluster_tol;
    for (const auto& c : detail::cluster_eigenvalues(vals, cluster_tol)) {
      double w = 0.0;
      for (int j = c.begin; j < c.end; ++j)
        w += rho.matrix(order[j], order[j]).real();
      dist.levels.push_back({c.center, w});
    }
    return dist;
  }
  Eigensystem es = hermitian_eigensystem(H);
  const Eigen::Index n = es.values.size();
  if (cluster_tol < 0.0)
    cluster_tol = 1e-9 * std::max(1.0, es.values(n - 1) - es.values(0));
  dist.cluster_tol = cluster_tol;
  const Matrix M = rho.matrix * es.vectors;
  for (const auto& c : detail::cluster_eigenvalues(es.values, cluster_tol)) {
    double w = 0.0;
    for (int j = c.begin; j < c.end; ++j)
      w += es.vectors.col(j).dot(M.col(j)).real();
    dist.levels.push_back({c.center, w});
  }
  return dist;
}

inline EnergyDistribution energy_distribution(const DensityState& rho,
                                              const LocalHamiltonian& h,
                                              double cluster_tol = -1.0) {
  return energy_distribution(rho, assemble(h), cluster_tol);
}

/// Sum of level weights at or beyond the threshold.
inline double tail_weight(const EnergyDistribution& dist, double threshold,
                          const std::string& side) {
  if (side != "geq" && side != "leq")
    throw ValidationError("tail_weight: side must be geq or leq");
  double s = 0.0;
  for (const auto& lv : dist.levels) {
    if (side == "geq" ? lv.f >= threshold : lv.f <= threshold) s += lv.weight;
  }
  return s;
}

/// Mean and even central moments Tr(rho (H - mean)^r), r = 2, 4, ..., r_max.
struct MomentTable {
  double mean = 0.0;
  std::map<int, double> central;
};

/// Computes the table along two independent routes and refuses to return if
/// they disagree: spectrally via the clustered energy distribution, and by
/// literal powers of the centered matrix. The agreement gate is relative
/// 1e-8 plus a roundoff floor of r * dim * 1e-15 * width^r (the scale of
/// accumulated floating-point error in an r-fold product of matrices of
/// norm width). Returns the spectral values.
inline MomentTable central_moments(const DensityState& rho, const Matrix& H,
                                   int r_max, double cluster_tol = -1.0) {
  if (r_max < 2 || r_max % 2 != 0)
    throw ValidationError("central_moments: r_max must be a positive even integer");
  if (r_max > kMaxMomentOrder)
    throw ValidationError("central_moments: r_max capped at 32");
  const EnergyDistribution dist = energy_distribution(rho, H, cluster_tol);
  const double mean = rho.matrix.cwiseProduct(H.transpose()).sum().real();
  MomentTable table;
  table.mean = mean;
  std::map<int, double> spectral;
  for (int r = 2; r <= r_max; r += 2) {
    double m = 0.0;
    for (const auto& lv : dist.levels) m += std::pow(lv.f - mean, r) * lv.weight;
    spectral[r] = m;
  }
  std::map<int, double> matrix_route;
  double width = 0.0;
  if (!dist.levels.empty())
    width = dist.levels.back().f - dist.levels.front().f;
  if (is_exactly_diagonal(H)) {
    for (int r = 2; r <= r_max; r += 2) {
      double m = 0.0;
      for (Eigen::Index i = 0; i < H.rows(); ++i)
        m += rho.matrix(i, i).real() * std::pow(H(i, i).real() - mean, r);
      matrix_route[r] = m;
    }
  } else {
    const Matrix M =
        H - mean * Matrix::Identity(H.rows(), H.cols());
    Matrix T = rho.matrix;
    for (int j = 1; j <= r_max; ++j) {
      T = (T * M).eval();
      if (j % 2 == 0) matrix_route[j] = T.trace().real();
    }
  }
  for (int r = 2; r <= r_max; r += 2) {
    const double s = spectral[r];
    const double m = matrix_route[r];
    const double floor_tol =
        static_cast<double>(r) * static_cast<double>(H.rows()) * 1e-15 *
        std::pow(std::max(1.0, width), r);
    const double tol = kRouteAgreementRel * std::max(std::abs(s), std::abs(m)) +
                       floor_tol;
    if (std::abs(s - m) > tol) {
      throw ConsistencyError(
          "central_moments: spectral and matrix-power routes disagree at r=" +
          std::to_string(r) + " (" + std::to_string(s) + " vs " +
          std::to_string(m) + ")");
    }
    table.central[r] = s;
  }
  return table;
}

inline MomentTable central_moments(const DensityState& rho,
                                   const LocalHamiltonian& h, int r_max,
                                   double cluster_tol = -1.0) {
  return central_moments(rho, assemble(h), r_max, cluster_tol);
}

/// moment_r / a^r, the even-moment Markov bound on Tr(rho Pi_{>= mean + a}).
inline double markov_tail_bound(const MomentTable& table, double a, int r) {
  if (a <= 0.0) throw ValidationError("markov_tail_bound: a must be positive");
  auto it = table.central.find(r);
  if (r % 2 != 0 || it == table.central.end())
    throw ValidationError("markov_tail_bound: r must be an even entry of the table");
  return it->second / std::pow(a, r);
}

/// Same bound, but also checks it against the actual tail of `dist` and
/// throws if the inequality fails beyond 1e-12 slack.
inline double markov_tail_bound(const MomentTable& table,
                                const EnergyDistribution& dist, double a, int r) {
  const double bound = markov_tail_bound(table, a, r);
  const double tail = tail_weight(dist, table.mean + a, "geq");
  if (tail > bound + 1e-12)
    throw TheoremViolation("markov_tail_bound: tail " + std::to_string(tail) +
                           " exceeds bound " + std::to_string(bound));
  return bound;
}

/// Sum over ordered term tuples of Tr(rho g_{w_1} ... g_{w_r}) for a product
/// state, where g_w = h_w - <h_w> I. With filter_q set (the default), tuples
/// in which some index has no support-sharing partner are skipped; for
/// product states those traces factor a lone Tr(rho g_w) = 0, so the skipped
/// contribution is exactly zero. Every evaluated trace is checked against
/// the |Tr(rho g...g)| <= 1 envelope.
inline double tuple_moment_expansion(const ProductState& p,
                                     const LocalHamiltonian& h, int r,
                                     bool filter_q = true) {
  if (static_cast<int>(p.factors.size()) != h.num_spins() ||
      p.local_dim != h.local_dim())
    throw ValidationError("tuple_moment_expansion: state/hamiltonian shape mismatch");
  if (r < 1) throw ValidationError("tuple_moment_expansion: r must be >= 1");
  const std::uint64_t n = h.num_terms();
  const std::uint64_t total =
      detail::tuple_space_size(n, r, kExpansionGuard, "tuple_moment_expansion");
  if (total == 0) return 0.0;
  std::vector<std::vector<int>> supports;
  supports.reserve(n);
  for (const auto& t : h.terms()) supports.push_back(t.support);
  const auto qgraph = InteractionHypergraph::build(h.num_spins(), supports);
  // Per-term expectation against the product state: only the factors under
  // the support matter.
  const int d = p.local_dim;
  std::vector<double> offsets(n);
  std::vector<Matrix> centered(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto& term = h.terms()[i];
    Matrix local = p.factors[term.support[0]];
    for (std::size_t s = 1; s < term.support.size(); ++s)
      local = kron(local, p.factors[term.support[s]]);
    offsets[i] = (local.cwiseProduct(term.matrix.transpose())).sum().real();
    centered[i] =
        term.matrix - offsets[i] * Matrix::Identity(term.matrix.rows(),
                                                    term.matrix.cols());
  }
  double sum = 0.0;
  std::vector<int> idx(r, 0);
  for (std::uint64_t t = 0; t < total; ++t) {
    bool use = true;
    if (filter_q) {
      for (int i = 0; i < r && use; ++i) {
        bool partner = false;
        for (int j = 0; j < r && !partner; ++j)
          if (j != i && qgraph.terms_intersect(idx[i], idx[j])) partner = true;
        use = partner;
      }
    }
    if (use) {
      // Union support of the tuple, then embed each centered factor there.
      std::vector<int> uni;
      for (int i = 0; i < r; ++i)
        uni.insert(uni.end(), supports[idx[i]].begin(), supports[idx[i]].end());
      std::sort(uni.begin(), uni.end());
      uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
      const Eigen::Index dim = static_cast<Eigen::Index>(checked_pow(
          static_cast<std::uint64_t>(d), static_cast<int>(uni.size()), kDimCap));
      Matrix rho_u = p.factors[uni[0]];
      for (std::size_t s = 1; s < uni.size(); ++s)
        rho_u = kron(rho_u, p.factors[uni[s]]);
      Matrix prod = Matrix::Identity(dim, dim);
      for (int i = 0; i < r; ++i) {
        std::vector<int> pos;
        for (int s : supports[idx[i]])
          pos.push_back(static_cast<int>(
              std::lower_bound(uni.begin(), uni.end(), s) - uni.begin()));
        Matrix emb = Matrix::Zero(dim, dim);
        add_embedded(emb, centered[idx[i]], pos, static_cast<int>(uni.size()), d);
        prod = (prod * emb).eval();
      }
      const double val = (rho_u.cwiseProduct(prod.transpose())).sum().real();
      if (std::abs(val) > 1.0 + 1e-12)
        throw TheoremViolation(
            "tuple_moment_expansion: a tuple trace exceeded the norm envelope");
      sum += val;
    }
    detail::advance_tuple(idx, n);
  }
  return sum;
}

/// Cumulative views matching the export format: entry i of the first vector
/// is the weight at or above level i, of the second at or below.
inline std::pair<std::vector<double>, std::vector<double>> cumulative_weights(
    const EnergyDistribution& dist) {
  const std::size_t n = dist.levels.size();
  std::vector<double> geq(n, 0.0), leq(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += dist.levels[i].weight;
    geq[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += dist.levels[i].weight;
    leq[i] = acc;
  }
  return {geq, leq};
}

}  // namespace spintail

#endif  // SPINTAIL_SPECTRUM_HPP
