#ifndef SPINTAIL_TESTS_HELPERS_HPP
#define SPINTAIL_TESTS_HELPERS_HPP

#include <cmath>
#include <vector>

#include "spintail/bounds.hpp"
#include "spintail/io.hpp"

namespace helpers {

using namespace spintail;

// Six 3-spin terms on 12 spins forming a path in the neighbor graph:
// consecutive terms share one spin, except the last pair which shares two,
// and the two end terms are disjoint. Exact parameters: k=3, m=2, g=2.
inline InteractionHypergraph triangle_chain() {
  return InteractionHypergraph::build(12, {{0, 1, 2},
                                           {2, 3, 4},
                                           {4, 5, 6},
                                           {6, 7, 8},
                                           {8, 9, 10},
                                           {9, 10, 11}});
}

inline Matrix pauli(char which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = Complex(0, -1); m(1, 0) = Complex(0, 1); break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default:  m = Matrix::Identity(2, 2); break;
  }
  return m;
}

// Pure qubit factor sqrt(1-p)|0> + sqrt(p)|1> as a density matrix.
inline Matrix iid_factor(double p) {
  Vector psi(2);
  psi << std::sqrt(1.0 - p), std::sqrt(p);
  return psi * psi.adjoint();
}

inline ProductState iid_product(int num_spins, double p) {
  std::vector<Matrix> f(num_spins, iid_factor(p));
  return make_product_state(std::move(f), 2);
}

// Full-rank random density matrix, A^dagger A normalized to unit trace.
inline DensityState random_density(int dim, Prng& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
  Matrix rho = a.adjoint() * a;
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return DensityState{std::move(rho)};
}

inline Matrix random_hermitian(int dim, Prng& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());
  return 0.5 * (a + a.adjoint().eval());
}

// Seeded pure-state product over qubits, Gaussian amplitudes normalized.
inline ProductState random_product(int num_spins, Prng& rng) {
  std::vector<Matrix> factors;
  for (int s = 0; s < num_spins; ++s) {
    Vector psi(2);
    psi << Complex(rng.next_gaussian(), rng.next_gaussian()),
        Complex(rng.next_gaussian(), rng.next_gaussian());
    psi /= psi.norm();
    factors.push_back(psi * psi.adjoint());
  }
  return make_product_state(std::move(factors), 2);
}

// Small random hypergraph: spins 3..8, up to 6 terms of size 1..3.
inline InteractionHypergraph random_hypergraph(Prng& rng) {
  const int spins = 3 + static_cast<int>(rng.next_below(6));
  const int terms = 1 + static_cast<int>(rng.next_below(6));
  std::vector<std::vector<int>> sets;
  for (int t = 0; t < terms; ++t) {
    const int size = 1 + static_cast<int>(rng.next_below(3));
    std::vector<int> s;
    for (int j = 0; j < size; ++j)
      s.push_back(static_cast<int>(rng.next_below(spins)));
    sets.push_back(std::move(s));
  }
  return InteractionHypergraph::build(spins, std::move(sets));
}

inline long double binomial_coeff(int n, int j) {
  long double c = 1.0L;
  for (int i = 1; i <= j; ++i) c = c * (n - j + i) / i;
  return c;
}

// Central moment of Binomial(n, p) from the exact pmf in long double.
inline double binomial_central_moment(int n, double p, int r) {
  const long double mean = static_cast<long double>(n) * p;
  long double acc = 0.0L;
  for (int j = 0; j <= n; ++j) {
    const long double pmf = binomial_coeff(n, j) *
                            std::pow(static_cast<long double>(p), j) *
                            std::pow(static_cast<long double>(1.0 - p), n - j);
    acc += std::pow(static_cast<long double>(j) - mean, r) * pmf;
  }
  return static_cast<double>(acc);
}

}  // namespace helpers

#endif  // SPINTAIL_TESTS_HELPERS_HPP
