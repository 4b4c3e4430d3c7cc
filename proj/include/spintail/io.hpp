#ifndef SPINTAIL_IO_HPP
#define SPINTAIL_IO_HPP

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "spintail/bounds.hpp"
#include "spintail/core.hpp"
#include "spintail/hamiltonian.hpp"
#include "spintail/lattice.hpp"
#include "spintail/spectrum.hpp"
#include "spintail/states.hpp"

namespace spintail {

using Json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "binary matrix export assumes a little-endian host");

/// Shortest-exact float rendering used in every CSV cell, pinned so reruns
/// are byte-identical.
inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

struct Geometry {
  bool is_lattice = true;
  LatticeSpec lattice;
  InteractionHypergraph hypergraph = InteractionHypergraph::build(1, {{0}});
};

/// { "kind":"lattice", "D","L","k","d" } or
/// { "kind":"hypergraph", "spins":[ids], "terms":[[ids]...] }.
inline Geometry parse_geometry(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ValidationError("geometry: expected an object with a 'kind' field");
  Geometry g;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lattice") {
    g.is_lattice = true;
    g.lattice.dim = j.at("D").get<int>();
    g.lattice.side = j.at("L").get<int>();
    g.lattice.halfwidth = j.at("k").get<int>();
    g.lattice.local_dim = j.value("d", 2);
    g.lattice.validate();
    return g;
  }
  if (kind == "hypergraph") {
    g.is_lattice = false;
    const auto spins = j.at("spins").get<std::vector<int>>();
    const int N = static_cast<int>(spins.size());
    std::vector<bool> seen(N, false);
    for (int s : spins) {
      if (s < 0 || s >= N || seen[s])
        throw ValidationError(
            "geometry: spins must list each id in 0..N-1 exactly once");
      seen[s] = true;
    }
    auto terms = j.at("terms").get<std::vector<std::vector<int>>>();
    g.hypergraph = InteractionHypergraph::build(N, std::move(terms));
    return g;
  }
  throw ValidationError("geometry: unknown kind '" + kind + "'");
}

/// Dense complex matrix from [[re, im], ...] row-major.
inline Matrix parse_matrix(const Json& rows) {
  if (!rows.is_array())
    throw ValidationError("matrix: expected an array of [re, im] pairs");
  const std::size_t total = rows.size();
  std::size_t q = 0;
  while (q * q < total) ++q;
  if (q * q != total)
    throw ValidationError("matrix: entry count " + std::to_string(total) +
                          " is not a perfect square");
  Matrix m(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < total; ++i) {
    const Json& cell = rows[i];
    if (!cell.is_array() || cell.size() != 2)
      throw ValidationError("matrix: entry " + std::to_string(i) +
                            " is not a [re, im] pair");
    m(static_cast<Eigen::Index>(i / q), static_cast<Eigen::Index>(i % q)) =
        Complex(cell[0].get<double>(), cell[1].get<double>());
  }
  return m;
}

/// { "support":[site ids], "matrix":[[re,im]...] }.
inline LocalTerm parse_term(const Json& j) {
  LocalTerm t;
  t.support = j.at("support").get<std::vector<int>>();
  t.matrix = parse_matrix(j.at("matrix"));
  return t;
}

/// Interleaved re/im f64 pairs, row-major, little-endian.
inline void write_matrix_binary(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = m(r, c).real();
      const double im = m(r, c).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(double));
      out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
  }
}

inline Matrix read_matrix_binary(const std::string& path, Eigen::Index dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof(double));
      in.read(reinterpret_cast<char*>(&im), sizeof(double));
      m(r, c) = Complex(re, im);
    }
  }
  if (!in) throw ValidationError("binary matrix '" + path + "' truncated");
  return m;
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << content;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

/// Columns: f, weight, cumulative_geq, cumulative_leq.
inline std::string distribution_csv(const EnergyDistribution& dist) {
  const auto [geq, leq] = cumulative_weights(dist);
  std::string out = "f,weight,cumulative_geq,cumulative_leq\n";
  for (std::size_t i = 0; i < dist.levels.size(); ++i) {
    out += format_g17(dist.levels[i].f) + "," + format_g17(dist.levels[i].weight) +
           "," + format_g17(geq[i]) + "," + format_g17(leq[i]) + "\n";
  }
  return out;
}

/// Exact integers up to 2^53 stay JSON numbers; larger values become decimal
/// strings so no precision is lost.
inline Json big_to_json(const BigInt& v) {
  if (v <= BigInt(UINT64_C(1) << 53)) return Json(v.convert_to<std::uint64_t>());
  return Json(v.str());
}

inline Json moment_table_json(const MomentTable& table) {
  Json central = Json::object();
  for (const auto& [r, m] : table.central) central[std::to_string(r)] = m;
  return Json{{"mean", table.mean}, {"central_moments", central}};
}

inline Json decay_check_json(const DecayCheck& check, const DecayFit& fit) {
  Json cov = Json::object();
  for (const auto& [l, c] : check.max_cov_by_distance) cov[std::to_string(l)] = c;
  return Json{{"holds", check.holds},
              {"C", check.C},
              {"l0", check.l0},
              {"sigma", check.sigma},
              {"probe_class", check.probe_class},
              {"worst_ratio", check.worst_ratio},
              {"worst_covariance", check.worst_covariance},
              {"worst_distance", check.worst_distance},
              {"worst_pair", check.worst_pair},
              {"max_cov_by_distance", cov},
              {"fit", Json{{"slope", fit.slope},
                           {"intercept", fit.intercept},
                           {"points", fit.points}}}};
}

inline Json bound_report_json(const BoundReport& rep) {
  Json j{{"theorem_id", rep.theorem_id},
         {"params", rep.params},
         {"side", rep.side},
         {"grid_point", rep.a},
         {"regime_valid", rep.regime_valid}};
  if (rep.has_bound) {
    j["bound_value"] = rep.bound_value;
    j["vacuous"] = rep.vacuous;
    j["chosen_r"] = rep.chosen_r;
  }
  if (rep.has_empirical) j["empirical_tail"] = rep.empirical_tail;
  if (rep.has_satisfied) j["satisfied"] = rep.satisfied;
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

/// Columns: a, side, empirical_tail, bound, regime. A report outside its
/// regime leaves the bound cell empty and marks the regime column.
inline std::string verify_csv(const std::vector<BoundReport>& reports) {
  std::string out = "a,side,empirical_tail,bound,regime\n";
  for (const auto& rep : reports) {
    out += format_g17(rep.a) + "," + rep.side + ",";
    out += rep.has_empirical ? format_g17(rep.empirical_tail) : std::string();
    out += ",";
    out += rep.has_bound ? format_g17(rep.bound_value) : std::string();
    out += ",";
    out += rep.regime_valid ? rep.theorem_id : ("outside:" + rep.theorem_id);
    out += "\n";
  }
  return out;
}

/// Mixed state container for the CLI: product states keep their factor list
/// (the tuple expansion needs it), everything else is a dense matrix.
struct ParsedState {
  bool is_product = false;
  ProductState product;
  DensityState density;
  std::string kind;
};

/// kinds: product (explicit factors), product-iid (pure sqrt(1-p)|0> +
/// sqrt(p)|1> at every site), product-random (seeded Haar-like pure qubit
/// factors), cat, ground, gibbs. `assembled` may be null unless kind needs
/// the spectrum.
inline ParsedState parse_state(const Json& j, int num_spins, int d,
                               const Matrix* assembled, std::uint64_t seed) {
  ParsedState out;
  out.kind = j.at("kind").get<std::string>();
  if (out.kind == "product") {
    std::vector<Matrix> factors;
    for (const Json& f : j.at("factors")) factors.push_back(parse_matrix(f));
    out.product = make_product_state(std::move(factors), d);
    if (static_cast<int>(out.product.factors.size()) != num_spins)
      throw ValidationError("state: factor count must equal the spin count");
    out.density = product_to_density(out.product);
    out.is_product = true;
    return out;
  }
  if (out.kind == "product-iid") {
    if (d != 2) throw ValidationError("state: product-iid is defined for qubits");
    const double p = j.at("p").get<double>();
    if (p < 0.0 || p > 1.0) throw ValidationError("state: p must lie in [0,1]");
    Matrix f(2, 2);
    const double c = std::sqrt(p * (1.0 - p));
    f(0, 0) = 1.0 - p; f(0, 1) = c;
    f(1, 0) = c;       f(1, 1) = p;
    out.product = make_product_state(std::vector<Matrix>(num_spins, f), 2);
    out.density = product_to_density(out.product);
    out.is_product = true;
    return out;
  }
  if (out.kind == "product-random") {
    if (d != 2) throw ValidationError("state: product-random is defined for qubits");
    Prng rng(seed);
    std::vector<Matrix> factors;
    for (int s = 0; s < num_spins; ++s) {
      Vector psi(2);
      psi(0) = Complex(rng.next_gaussian(), rng.next_gaussian());
      psi(1) = Complex(rng.next_gaussian(), rng.next_gaussian());
      psi /= psi.norm();
      Matrix f = psi * psi.adjoint();
      f = 0.5 * (f + f.adjoint().eval());
      f /= f.trace().real();
      factors.push_back(std::move(f));
    }
    out.product = make_product_state(std::move(factors), 2);
    out.density = product_to_density(out.product);
    out.is_product = true;
    return out;
  }
  if (out.kind == "cat") {
    if (d != 2) throw ValidationError("state: cat is defined for qubits");
    out.density = make_cat_state(num_spins);
    return out;
  }
  if (out.kind == "ground" || out.kind == "gibbs") {
    if (!assembled)
      throw ValidationError("state: '" + out.kind + "' needs a hamiltonian");
    if (out.kind == "ground") {
      out.density = make_ground_state(*assembled);
    } else {
      out.density = make_gibbs_state(*assembled, j.at("beta").get<double>());
    }
    return out;
  }
  throw ValidationError("state: unknown kind '" + out.kind + "'");
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
}

}  // namespace spintail

#endif  // SPINTAIL_IO_HPP
