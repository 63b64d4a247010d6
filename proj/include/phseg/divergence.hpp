// Kullback-Leibler divergence (natural log) and the symmetric PHP distance.
#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "phseg/profile.hpp"

namespace phseg {

// One-sided KLD: sum_i p(i) * ln(p(i)/q(i)). Both inputs must be strictly
// positive distributions of equal length.
template <typename DerivedP, typename DerivedQ>
double kl(const Eigen::ArrayBase<DerivedP>& p, const Eigen::ArrayBase<DerivedQ>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl: distributions differ in length");
  if (p.size() == 0) throw std::invalid_argument("kl: empty distribution");
  if ((p.derived() <= 0.0).any() || (q.derived() <= 0.0).any())
    throw std::invalid_argument("kl: distributions must be strictly positive");
  return (p.derived() * (p.derived() / q.derived()).log()).sum();
}

// Symmetrized, non-negative KLD. The two one-sided calls are summed rather
// than fused so a swap of arguments yields the identical floating result.
template <typename DerivedP, typename DerivedQ>
double sym_kl(const Eigen::ArrayBase<DerivedP>& p, const Eigen::ArrayBase<DerivedQ>& q) {
  return kl(p, q) + kl(q, p);
}

// Scalar distance between two profiles over the same filtration: the
// beta0 and beta1 symmetric divergences, summed unweighted.
inline double php_distance(const PhProfile& a, const PhProfile& b) {
  if (a.filtration != b.filtration)
    throw std::invalid_argument("php_distance: profiles use different filtrations");
  return sym_kl(a.p0, b.p0) + sym_kl(a.p1, b.p1);
}

}  // namespace phseg
