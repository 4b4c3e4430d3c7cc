#ifndef SPINTAIL_HAMILTONIAN_HPP
#define SPINTAIL_HAMILTONIAN_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "spintail/core.hpp"
#include "spintail/lattice.hpp"
#include "spintail/linalg.hpp"

namespace spintail {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdTol = 1e-10;      // min eigenvalue >= -kPsdTol
constexpr double kNormTol = 1e-10;     // operator norm <= 1 + kNormTol
constexpr std::uint64_t kDimCap = UINT64_C(1) << 14;

/// One summand h_w: a Hermitian PSD matrix of norm at most one acting on the
/// listed sites. Supports are strictly increasing site indices; the matrix is
/// indexed big-endian over them (first support site = most significant digit).
struct LocalTerm {
  std::vector<int> support;
  Matrix matrix;
};

/// g_w = h_w - offset * I with offset = Tr(rho h_w) for the centering state.
struct CenteredTerm {
  LocalTerm base;
  double offset = 0.0;
};

inline void validate_local_term(const LocalTerm& term, int local_dim,
                                const std::string& label) {
  if (term.support.empty())
    throw ValidationError("term " + label + ": empty support");
  for (std::size_t i = 1; i < term.support.size(); ++i) {
    if (term.support[i] <= term.support[i - 1])
      throw ValidationError("term " + label +
                            ": support must be strictly increasing");
  }
  const std::uint64_t want =
      checked_pow(static_cast<std::uint64_t>(local_dim),
                  static_cast<int>(term.support.size()), kDimCap);
  if (term.matrix.rows() != term.matrix.cols() ||
      static_cast<std::uint64_t>(term.matrix.rows()) != want) {
    throw ValidationError("term " + label + ": matrix dimension " +
                          std::to_string(term.matrix.rows()) +
                          " does not match d^|support| = " + std::to_string(want));
  }
  const double dev = hermitian_deviation(term.matrix);
  if (dev > kHermitianTol)
    throw ValidationError("term " + label + ": not Hermitian (deviation " +
                          std::to_string(dev) + ")");
  const RealVector ev = hermitian_eigenvalues(term.matrix);
  if (ev.size() > 0) {
    if (ev.minCoeff() < -kPsdTol)
      throw ValidationError("term " + label + ": not positive semi-definite (min eigenvalue " +
                            std::to_string(ev.minCoeff()) + ")");
    const double norm = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
    if (norm > 1.0 + kNormTol)
      throw ValidationError("term " + label + ": operator norm " +
                            std::to_string(norm) + " exceeds 1");
  }
}

/// h -> (h + ||h|| I) / (2 ||h||): the explicit opt-in repair for inputs that
/// fail the PSD/norm gate. Zero matrices pass through unchanged.
inline LocalTerm shift_to_psd(const LocalTerm& term) {
  const double norm = hermitian_norm(term.matrix);
  LocalTerm out = term;
  if (norm > 0.0) {
    out.matrix = (term.matrix + norm * Matrix::Identity(term.matrix.rows(),
                                                        term.matrix.cols())) /
                 (2.0 * norm);
  }
  return out;
}

/// H = sum_w h_w over either geometry. Lattice kind keys term i by the i-th
/// dual interaction (lexicographic) and requires support inside S(w_i, k);
/// hypergraph kind requires support == term spin set.
class LocalHamiltonian {
 public:
  enum class Kind { lattice, hypergraph };

  static LocalHamiltonian on_lattice(const LatticeSpec& spec, int local_dim,
                                     std::vector<LocalTerm> terms) {
    spec.validate();
    if (local_dim < 2) throw ValidationError("hamiltonian: local_dim must be >= 2");
    LocalHamiltonian h;
    h.kind_ = Kind::lattice;
    h.lattice_ = spec;
    h.local_dim_ = local_dim;
    const std::vector<Interaction> duals = dual_interactions(spec);
    if (terms.size() != duals.size())
      throw ValidationError("hamiltonian: expected " + std::to_string(duals.size()) +
                            " terms (one per interaction), got " +
                            std::to_string(terms.size()));
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string label = to_string(duals[i]);
      validate_local_term(terms[i], local_dim, label);
      std::vector<int> allowed;
      for (const Site& v : support_sites(duals[i], spec))
        allowed.push_back(static_cast<int>(site_index(v, spec)));
      for (int s : terms[i].support) {
        if (!std::binary_search(allowed.begin(), allowed.end(), s))
          throw ValidationError("term " + label + ": site " + std::to_string(s) +
                                " outside the interaction's support window");
      }
    }
    h.terms_ = std::move(terms);
    h.num_spins_ = static_cast<int>(spec.site_count());
    return h;
  }

  static LocalHamiltonian on_hypergraph(InteractionHypergraph graph, int local_dim,
                                        std::vector<LocalTerm> terms) {
    if (local_dim < 2) throw ValidationError("hamiltonian: local_dim must be >= 2");
    LocalHamiltonian h;
    h.kind_ = Kind::hypergraph;
    h.local_dim_ = local_dim;
    if (terms.size() != graph.num_terms())
      throw ValidationError("hamiltonian: expected " +
                            std::to_string(graph.num_terms()) + " terms, got " +
                            std::to_string(terms.size()));
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string label = "#" + std::to_string(i);
      validate_local_term(terms[i], local_dim, label);
      if (terms[i].support != graph.terms()[i])
        throw ValidationError("term " + label +
                              ": support must equal the hypergraph term's spin set");
    }
    h.num_spins_ = graph.num_spins();
    h.hypergraph_ = std::move(graph);
    h.terms_ = std::move(terms);
    return h;
  }

  Kind kind() const { return kind_; }
  const LatticeSpec& lattice() const { return lattice_; }
  const InteractionHypergraph& hypergraph() const { return hypergraph_; }
  int local_dim() const { return local_dim_; }
  int num_spins() const { return num_spins_; }
  std::size_t num_terms() const { return terms_.size(); }
  const std::vector<LocalTerm>& terms() const { return terms_; }

  std::uint64_t total_dim() const {
    return checked_pow(static_cast<std::uint64_t>(local_dim_), num_spins_,
                       UINT64_C(1) << 62);
  }

 private:
  Kind kind_ = Kind::hypergraph;
  LatticeSpec lattice_;
  InteractionHypergraph hypergraph_ = InteractionHypergraph::build(1, {{0}});
  int local_dim_ = 2;
  int num_spins_ = 0;
  std::vector<LocalTerm> terms_;
};

namespace detail {

/// Strides for big-endian digit encoding: site s contributes digit * d^(S-1-s).
inline std::vector<std::uint64_t> site_strides(int num_spins, int d) {
  std::vector<std::uint64_t> stride(num_spins);
  std::uint64_t s = 1;
  for (int i = num_spins - 1; i >= 0; --i) {
    stride[i] = s;
    s *= static_cast<std::uint64_t>(d);
  }
  return stride;
}

/// Offsets of each local basis index of a term into the full space, plus the
/// list of base offsets ranging over the non-support sites.
struct EmbedPlan {
  std::vector<std::uint64_t> local_offset;  // size d^j
  std::vector<std::uint64_t> rest_offset;   // size d^(S-j)
};

inline EmbedPlan embed_plan(const std::vector<int>& support, int num_spins, int d) {
  const auto stride = site_strides(num_spins, d);
  const int j = static_cast<int>(support.size());
  EmbedPlan plan;
  const std::uint64_t dj =
      checked_pow(static_cast<std::uint64_t>(d), j, UINT64_C(1) << 62);
  plan.local_offset.assign(dj, 0);
  for (std::uint64_t u = 0; u < dj; ++u) {
    std::uint64_t rem = u;
    std::uint64_t off = 0;
    for (int t = j - 1; t >= 0; --t) {
      off += (rem % d) * stride[support[t]];
      rem /= d;
    }
    plan.local_offset[u] = off;
  }
  std::vector<int> rest;
  for (int s = 0; s < num_spins; ++s) {
    if (!std::binary_search(support.begin(), support.end(), s)) rest.push_back(s);
  }
  const std::uint64_t dr = checked_pow(static_cast<std::uint64_t>(d),
                                       static_cast<int>(rest.size()),
                                       UINT64_C(1) << 62);
  plan.rest_offset.assign(dr, 0);
  for (std::uint64_t c = 0; c < dr; ++c) {
    std::uint64_t rem = c;
    std::uint64_t off = 0;
    for (int t = static_cast<int>(rest.size()) - 1; t >= 0; --t) {
      off += (rem % d) * stride[rest[t]];
      rem /= d;
    }
    plan.rest_offset[c] = off;
  }
  return plan;
}

}  // namespace detail

/// Adds h tensor identity (padding over the non-support sites) into target.
inline void add_embedded(Matrix& target, const Matrix& h,
                         const std::vector<int>& support, int num_spins, int d) {
  const auto plan = detail::embed_plan(support, num_spins, d);
  for (std::uint64_t base : plan.rest_offset) {
    for (std::size_t u = 0; u < plan.local_offset.size(); ++u) {
      for (std::size_t v = 0; v < plan.local_offset.size(); ++v) {
        target(static_cast<Eigen::Index>(base + plan.local_offset[u]),
               static_cast<Eigen::Index>(base + plan.local_offset[v])) += h(u, v);
      }
    }
  }
}

/// Tr(rho * embed(h)) without materializing the embedding.
inline double trace_against_embedded(const Matrix& rho, const Matrix& h,
                                     const std::vector<int>& support,
                                     int num_spins, int d) {
  const auto plan = detail::embed_plan(support, num_spins, d);
  Complex acc = 0.0;
  for (std::uint64_t base : plan.rest_offset) {
    for (std::size_t u = 0; u < plan.local_offset.size(); ++u) {
      for (std::size_t v = 0; v < plan.local_offset.size(); ++v) {
        acc += rho(static_cast<Eigen::Index>(base + plan.local_offset[v]),
                   static_cast<Eigen::Index>(base + plan.local_offset[u])) *
               h(u, v);
      }
    }
  }
  return acc.real();
}

/// Dense assembly of the full operator. Dimension-capped at 2^14.
inline Matrix assemble(const LocalHamiltonian& h) {
  std::uint64_t dim;
  try {
    dim = checked_pow(static_cast<std::uint64_t>(h.local_dim()), h.num_spins(), kDimCap);
  } catch (const EnumerationLimitError&) {
    throw EnumerationLimitError("assemble: total dimension exceeds the 2^14 cap");
  }
  Matrix H = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const LocalTerm& t : h.terms()) {
    add_embedded(H, t.matrix, t.support, h.num_spins(), h.local_dim());
  }
  return H;
}

/// Term-wise complement: every h_w becomes I - h_w, so the assembled operator
/// is n*I - H. Complemented terms stay PSD with norm <= 1.
inline LocalHamiltonian complement_hamiltonian(const LocalHamiltonian& h) {
  std::vector<LocalTerm> out;
  out.reserve(h.num_terms());
  for (const LocalTerm& t : h.terms()) {
    LocalTerm c = t;
    c.matrix = Matrix::Identity(t.matrix.rows(), t.matrix.cols()) - t.matrix;
    out.push_back(std::move(c));
  }
  if (h.kind() == LocalHamiltonian::Kind::lattice) {
    return LocalHamiltonian::on_lattice(h.lattice(), h.local_dim(), std::move(out));
  }
  return LocalHamiltonian::on_hypergraph(h.hypergraph(), h.local_dim(), std::move(out));
}

/// Minimum 1-norm distance between the site sets two terms act on; 0 when
/// the supports overlap.
inline long long operator_distance(const LocalTerm& a, const LocalTerm& b,
                                   const LatticeSpec& spec) {
  long long best = -1;
  for (int sa : a.support) {
    const Site va = site_from_index(static_cast<std::size_t>(sa), spec);
    for (int sb : b.support) {
      const Site vb = site_from_index(static_cast<std::size_t>(sb), spec);
      const long long d = one_norm_distance(va, vb);
      if (best < 0 || d < best) best = d;
      if (best == 0) return 0;
    }
  }
  if (best < 0) throw ValidationError("operator_distance: empty support");
  return best;
}

/// Centers each term against rho: g_w = h_w - Tr(rho h_w) I.
inline std::vector<CenteredTerm> center_terms(const LocalHamiltonian& h,
                                              const Matrix& rho) {
  std::vector<CenteredTerm> out;
  out.reserve(h.num_terms());
  for (const LocalTerm& t : h.terms()) {
    CenteredTerm c;
    c.base = t;
    c.offset = trace_against_embedded(rho, t.matrix, t.support, h.num_spins(),
                                      h.local_dim());
    out.push_back(std::move(c));
  }
  return out;
}

/// Test-model factory. All models emit PSD terms of norm at most 1.
///   classical-field: N singleton terms |1><1|_i (hypergraph, m = 0).
///   transverse-ising: nearest-neighbor chain, critical field, each two-site
///     term shifted and scaled to [0, 1] (lattice, D=1, k=0).
///   random-psd: nearest-neighbor chain with seeded A^dagger A terms scaled
///     to norm 1 (lattice, D=1, k=0).
inline LocalHamiltonian standard_model(const std::string& name, int num_spins,
                                       std::uint64_t seed = 0) {
  if (num_spins < 2) throw ValidationError("standard_model: needs >= 2 spins");
  if (name == "classical-field") {
    std::vector<std::vector<int>> spin_sets;
    std::vector<LocalTerm> terms;
    Matrix excited = Matrix::Zero(2, 2);
    excited(1, 1) = 1.0;
    for (int i = 0; i < num_spins; ++i) {
      spin_sets.push_back({i});
      terms.push_back(LocalTerm{{i}, excited});
    }
    auto graph = InteractionHypergraph::build(num_spins, spin_sets);
    return LocalHamiltonian::on_hypergraph(std::move(graph), 2, std::move(terms));
  }
  if (name == "transverse-ising" || name == "random-psd") {
    LatticeSpec spec{1, num_spins - 1, 0, 2};
    std::vector<LocalTerm> terms;
    Prng rng(seed);
    for (int i = 0; i + 1 < num_spins; ++i) {
      Matrix raw(4, 4);
      if (name == "transverse-ising") {
        Matrix Z = Matrix::Zero(2, 2), X = Matrix::Zero(2, 2), I2 = Matrix::Identity(2, 2);
        Z(0, 0) = 1.0; Z(1, 1) = -1.0;
        X(0, 1) = 1.0; X(1, 0) = 1.0;
        // Field-dominant ratio h/J = 4: the chain is in the gapped
        // paramagnetic phase, so ground-state correlations decay
        // exponentially (length ~ 1/ln 4) and certificates can hold.
        raw = -0.25 * kron(Z, Z) - 0.5 * (kron(X, I2) + kron(I2, X));
      } else {
        Matrix A(4, 4);
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q)
            A(p, q) = Complex(rng.next_gaussian(), rng.next_gaussian());
        raw = A.adjoint() * A;
      }
      const double norm = hermitian_norm(raw);
      LocalTerm t;
      t.support = {i, i + 1};
      if (name == "transverse-ising") {
        t.matrix = (raw + norm * Matrix::Identity(4, 4)) / (2.0 * norm);
      } else {
        t.matrix = raw / norm;
      }
      // Symmetrize away the last floating-point dust so the 1e-12 gate holds.
      t.matrix = 0.5 * (t.matrix + t.matrix.adjoint().eval());
      terms.push_back(std::move(t));
    }
    return LocalHamiltonian::on_lattice(spec, 2, std::move(terms));
  }
  throw ValidationError("standard_model: unknown model '" + name + "'");
}

}  // namespace spintail

#endif  // SPINTAIL_HAMILTONIAN_HPP
