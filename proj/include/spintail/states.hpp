#ifndef SPINTAIL_STATES_HPP
#define SPINTAIL_STATES_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "spintail/core.hpp"
#include "spintail/hamiltonian.hpp"
#include "spintail/lattice.hpp"
#include "spintail/linalg.hpp"

namespace spintail {

constexpr double kFactorTraceTol = 1e-12;
constexpr double kStateTraceTol = 1e-10;

/// Tensor-product state: one d x d density factor per spin, combined in site
/// order (site 0 is the leftmost, most significant factor).
struct ProductState {
  std::vector<Matrix> factors;
  int local_dim = 2;
};

/// Dense density matrix on the full Hilbert space.
struct DensityState {
  Matrix matrix;
};

inline void validate_factor(const Matrix& f, int d, const std::string& label) {
  if (f.rows() != d || f.cols() != d)
    throw ValidationError("state factor " + label + ": wrong dimension");
  if (hermitian_deviation(f) > kHermitianTol)
    throw ValidationError("state factor " + label + ": not Hermitian");
  const RealVector ev = hermitian_eigenvalues(f);
  if (ev.minCoeff() < -kPsdTol)
    throw ValidationError("state factor " + label + ": not PSD");
  if (std::abs(f.trace().real() - 1.0) > kFactorTraceTol ||
      std::abs(f.trace().imag()) > kFactorTraceTol)
    throw ValidationError("state factor " + label + ": trace must be 1");
}

inline ProductState make_product_state(std::vector<Matrix> factors, int local_dim) {
  if (factors.empty()) throw ValidationError("product state: needs >= 1 factor");
  for (std::size_t i = 0; i < factors.size(); ++i)
    validate_factor(factors[i], local_dim, std::to_string(i));
  return ProductState{std::move(factors), local_dim};
}

inline void validate_density(const DensityState& rho, const std::string& label) {
  const Matrix& m = rho.matrix;
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ValidationError("state " + label + ": matrix must be square");
  if (hermitian_deviation(m) > kHermitianTol)
    throw ValidationError("state " + label + ": not Hermitian");
  const RealVector ev = hermitian_eigenvalues(m);
  if (ev.minCoeff() < -kPsdTol)
    throw ValidationError("state " + label + ": not PSD (min eigenvalue " +
                          std::to_string(ev.minCoeff()) + ")");
  if (std::abs(m.trace().real() - 1.0) > kStateTraceTol ||
      std::abs(m.trace().imag()) > kStateTraceTol)
    throw ValidationError("state " + label + ": trace must be 1");
}

inline DensityState product_to_density(const ProductState& p) {
  Matrix rho = p.factors[0];
  for (std::size_t i = 1; i < p.factors.size(); ++i) rho = kron(rho, p.factors[i]);
  return DensityState{std::move(rho)};
}

/// (|0...0> + |1...1>)/sqrt(2) as a density matrix. The four nonzero entries
/// are the literal constant 0.5, so downstream exactness checks see no
/// rounding at all.
inline DensityState make_cat_state(int num_qubits) {
  if (num_qubits < 1) throw ValidationError("cat state: needs >= 1 qubit");
  const std::uint64_t dim =
      checked_pow(2, num_qubits, kDimCap);
  Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  const Eigen::Index last = static_cast<Eigen::Index>(dim) - 1;
  rho(0, 0) = 0.5;
  rho(0, last) = 0.5;
  rho(last, 0) = 0.5;
  rho(last, last) = 0.5;
  return DensityState{std::move(rho)};
}

/// Lowest eigenvector of H as a pure density matrix. Degenerate ground
/// spaces resolve to the eigensolver's first ascending column; the phase is
/// canonicalized so the first nonvanishing amplitude is real positive.
inline DensityState make_ground_state(const Matrix& H) {
  Eigensystem es = hermitian_eigensystem(H);
  Vector v = es.vectors.col(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  Matrix rho = v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return DensityState{std::move(rho)};
}

/// e^{-beta H} / Tr e^{-beta H} by spectral decomposition. The spectrum is
/// shifted by its minimum before exponentiating, which cancels in the
/// normalization and avoids underflow at large beta.
inline DensityState make_gibbs_state(const Matrix& H, double beta) {
  if (beta < 0.0) throw ValidationError("gibbs state: beta must be >= 0");
  Eigensystem es = hermitian_eigensystem(H);
  const double shift = es.values.minCoeff();
  RealVector w(es.values.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w(i) = std::exp(-beta * (es.values(i) - shift));
  w /= w.sum();
  Matrix rho = es.vectors * w.asDiagonal() * es.vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return DensityState{std::move(rho)};
}

inline int infer_num_spins(Eigen::Index dim, int d) {
  int s = 0;
  std::uint64_t acc = 1;
  while (acc < static_cast<std::uint64_t>(dim)) {
    acc *= static_cast<std::uint64_t>(d);
    ++s;
  }
  if (acc != static_cast<std::uint64_t>(dim))
    throw ValidationError("state dimension is not a power of the local dimension");
  return s;
}

/// Reduced density matrix on `keep` (strictly increasing spin indices).
inline DensityState partial_trace(const DensityState& rho, std::vector<int> keep,
                                  int num_spins, int d) {
  if (keep.empty()) throw ValidationError("partial_trace: keep set must be non-empty");
  for (std::size_t i = 1; i < keep.size(); ++i)
    if (keep[i] <= keep[i - 1])
      throw ValidationError("partial_trace: keep set must be strictly increasing");
  if (keep.front() < 0 || keep.back() >= num_spins)
    throw ValidationError("partial_trace: keep set out of range");
  const auto plan = detail::embed_plan(keep, num_spins, d);
  const Eigen::Index out_dim = static_cast<Eigen::Index>(plan.local_offset.size());
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (std::uint64_t base : plan.rest_offset) {
    for (Eigen::Index u = 0; u < out_dim; ++u) {
      for (Eigen::Index v = 0; v < out_dim; ++v) {
        out(u, v) += rho.matrix(
            static_cast<Eigen::Index>(base + plan.local_offset[u]),
            static_cast<Eigen::Index>(base + plan.local_offset[v]));
      }
    }
  }
  return DensityState{std::move(out)};
}

inline double expectation(const DensityState& rho, const Matrix& op,
                          const std::vector<int>& support, int num_spins, int d) {
  return trace_against_embedded(rho.matrix, op, support, num_spins, d);
}

/// Tr(rho A (x) B) - Tr(rho A) Tr(rho B) for operators on disjoint supports.
inline double covariance(const DensityState& rho, int num_spins, int d,
                         const Matrix& A, const std::vector<int>& suppA,
                         const Matrix& B, const std::vector<int>& suppB) {
  std::vector<int> joint;
  std::merge(suppA.begin(), suppA.end(), suppB.begin(), suppB.end(),
             std::back_inserter(joint));
  for (std::size_t i = 1; i < joint.size(); ++i)
    if (joint[i] == joint[i - 1])
      throw ValidationError("covariance: probe supports must be disjoint");
  std::vector<int> posA, posB;
  for (int s : suppA)
    posA.push_back(static_cast<int>(
        std::lower_bound(joint.begin(), joint.end(), s) - joint.begin()));
  for (int s : suppB)
    posB.push_back(static_cast<int>(
        std::lower_bound(joint.begin(), joint.end(), s) - joint.begin()));
  const Eigen::Index dim = static_cast<Eigen::Index>(checked_pow(
      static_cast<std::uint64_t>(d), static_cast<int>(joint.size()), kDimCap));
  Matrix ea = Matrix::Zero(dim, dim), eb = Matrix::Zero(dim, dim);
  add_embedded(ea, A, posA, static_cast<int>(joint.size()), d);
  add_embedded(eb, B, posB, static_cast<int>(joint.size()), d);
  const Matrix ab = ea * eb;
  const double both = trace_against_embedded(rho.matrix, ab, joint, num_spins, d);
  const double ma = trace_against_embedded(rho.matrix, A, suppA, num_spins, d);
  const double mb = trace_against_embedded(rho.matrix, B, suppB, num_spins, d);
  return both - ma * mb;
}

/// Named norm-1 probe operators for one qubit.
inline std::vector<std::pair<std::string, Matrix>> pauli_probes() {
  Matrix X = Matrix::Zero(2, 2), Y = Matrix::Zero(2, 2), Z = Matrix::Zero(2, 2);
  X(0, 1) = 1.0; X(1, 0) = 1.0;
  Y(0, 1) = Complex(0, -1.0); Y(1, 0) = Complex(0, 1.0);
  Z(0, 0) = 1.0; Z(1, 1) = -1.0;
  return {{"X", X}, {"Y", Y}, {"Z", Z}};
}

/// Outcome of an empirical decay-of-correlation check. The claim is scoped
/// to the recorded probe class; `max_cov_by_distance` keeps the strongest
/// covariance seen at each support distance >= 1, while the pass/fail verdict
/// only weighs distances >= l0.
struct DecayCheck {
  bool holds = false;
  double C = 0.0;
  long long l0 = 1;
  double sigma = 1.0;
  std::string probe_class;
  double worst_ratio = 0.0;          // max |cov| / (C e^{-l/sigma}) over l >= l0
  double worst_covariance = 0.0;
  long long worst_distance = 0;
  std::string worst_pair;
  std::map<long long, double> max_cov_by_distance;
};

namespace detail {

struct Probe {
  std::string name;
  std::vector<int> support;
  Matrix op;
};

inline std::vector<Probe> build_probes(const LatticeSpec& spec,
                                       const std::string& probe_class) {
  if (spec.local_dim != 2)
    throw ValidationError("certify_decay: probe classes are defined for qubits only");
  const auto paulis = pauli_probes();
  std::vector<Probe> probes;
  const int sites = static_cast<int>(spec.site_count());
  if (probe_class == "single-site-basis" || probe_class == "contiguous-region-basis") {
    for (int s = 0; s < sites; ++s) {
      for (const auto& [name, op] : paulis) {
        probes.push_back({name + "@" + std::to_string(s), {s}, op});
      }
    }
  } else {
    throw ValidationError("certify_decay: unknown probe class '" + probe_class + "'");
  }
  if (probe_class == "contiguous-region-basis") {
    if (spec.dim != 1)
      throw ValidationError(
          "certify_decay: contiguous-region probes are defined on chains");
    for (int s = 0; s + 1 < sites; ++s) {
      for (const auto& [na, a] : paulis) {
        for (const auto& [nb, b] : paulis) {
          probes.push_back({na + nb + "@" + std::to_string(s), {s, s + 1}, kron(a, b)});
        }
      }
    }
  }
  return probes;
}

}  // namespace detail

/// Checks |cov(A, B)| <= C e^{-l/sigma} exhaustively over the probe class,
/// for every disjoint probe pair at support distance l >= l0. Violations are
/// reported, not thrown.
inline DecayCheck certify_decay(const DensityState& rho, const LatticeSpec& spec,
                                double C, long long l0, double sigma,
                                const std::string& probe_class) {
  if (C <= 0.0) throw ValidationError("certify_decay: C must be positive");
  if (l0 < 1) throw ValidationError("certify_decay: l0 must be >= 1");
  if (sigma <= 0.0) throw ValidationError("certify_decay: sigma must be positive");
  const int sites = static_cast<int>(spec.site_count());
  const auto probes = detail::build_probes(spec, probe_class);
  DecayCheck out;
  out.holds = true;
  out.C = C;
  out.l0 = l0;
  out.sigma = sigma;
  out.probe_class = probe_class;
  auto site_coords = [&](int s) { return site_from_index(s, spec); };
  for (std::size_t a = 0; a < probes.size(); ++a) {
    for (std::size_t b = a + 1; b < probes.size(); ++b) {
      const auto& pa = probes[a];
      const auto& pb = probes[b];
      bool overlap = false;
      long long dist = -1;
      for (int sa : pa.support) {
        for (int sb : pb.support) {
          if (sa == sb) overlap = true;
          const long long dd = one_norm_distance(site_coords(sa), site_coords(sb));
          if (dist < 0 || dd < dist) dist = dd;
        }
      }
      if (overlap || dist < 1) continue;
      const double cov = covariance(rho, sites, spec.local_dim, pa.op, pa.support,
                                    pb.op, pb.support);
      auto [it, fresh] = out.max_cov_by_distance.try_emplace(dist, std::abs(cov));
      if (!fresh) it->second = std::max(it->second, std::abs(cov));
      if (dist < l0) continue;
      const double budget = C * std::exp(-static_cast<double>(dist) / sigma);
      const double ratio = std::abs(cov) / budget;
      if (ratio > out.worst_ratio) {
        out.worst_ratio = ratio;
        out.worst_covariance = cov;
        out.worst_distance = dist;
        out.worst_pair = pa.name + " / " + pb.name;
      }
      if (std::abs(cov) > budget + 1e-12) out.holds = false;
    }
  }
  return out;
}

/// Least-squares slope of log(max covariance) against distance, using the
/// distances whose covariance is above the 1e-15 noise floor. A negative
/// slope is the empirical signature of exponential decay; the implied
/// correlation length is -1/slope.
struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

inline DecayFit fit_decay_slope(const std::map<long long, double>& max_cov) {
  DecayFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [l, cov] : max_cov) {
    if (cov <= 1e-15) continue;
    const double x = static_cast<double>(l);
    const double y = std::log(cov);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++fit.points;
  }
  if (fit.points >= 2) {
    const double n = fit.points;
    const double denom = n * sxx - sx * sx;
    if (denom != 0.0) {
      fit.slope = (n * sxy - sx * sy) / denom;
      fit.intercept = (sy - fit.slope * sx) / n;
    }
  }
  return fit;
}

}  // namespace spintail

#endif  // SPINTAIL_STATES_HPP
