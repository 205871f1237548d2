#pragma once

// Ordering, nearest-neighbor DAG construction, and the Vecchia factorization
// that turns any positive-definite matrix C into a sparse approximate
// precision Ctilde^-1 = (I - A)^T D^-1 (I - A) and its implied covariance.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nngpkl/covariance.hpp"
#include "nngpkl/numerics.hpp"
#include "nngpkl/rng.hpp"

namespace nngpkl {

// Permutation of {0..n-1}; position k holds the original index of the k-th
// ordered point.
class Ordering {
 public:
  explicit Ordering(std::vector<Index> perm) : perm_(std::move(perm)) {
    std::vector<bool> seen(perm_.size(), false);
    for (const Index p : perm_) {
      if (p < 0 || p >= static_cast<Index>(perm_.size()) || seen[static_cast<std::size_t>(p)]) {
        throw InvalidPermutation("Ordering: not a permutation of {0.." +
                                 std::to_string(perm_.size() - 1) + "}");
      }
      seen[static_cast<std::size_t>(p)] = true;
    }
  }

  static Ordering identity(Index n) {
    std::vector<Index> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), Index(0));
    return Ordering(std::move(p));
  }

  Index size() const { return static_cast<Index>(perm_.size()); }
  Index at(Index position) const { return perm_[static_cast<std::size_t>(position)]; }
  const std::vector<Index>& perm() const { return perm_; }

 private:
  std::vector<Index> perm_;
};

// Sort by first coordinate, ties by the remaining coordinates, then by
// original index.
struct CoordinateOrder {};
// Seeded uniform shuffle; identical seeds give identical permutations.
struct RandomOrder {
  std::uint64_t seed;
};
struct GivenOrder {
  std::vector<Index> perm;
};
using OrderingStrategy = std::variant<CoordinateOrder, RandomOrder, GivenOrder>;

inline Ordering build_ordering(const LocationSet& locs, const OrderingStrategy& strategy) {
  const Index n = locs.size();
  if (std::holds_alternative<CoordinateOrder>(strategy)) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index(0));
    std::sort(perm.begin(), perm.end(), [&](Index a, Index b) {
      for (Index j = 0; j < locs.dim(); ++j) {
        if (locs.points()(a, j) != locs.points()(b, j)) {
          return locs.points()(a, j) < locs.points()(b, j);
        }
      }
      return a < b;
    });
    return Ordering(std::move(perm));
  }
  if (const auto* random = std::get_if<RandomOrder>(&strategy)) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index(0));
    Rng rng(random->seed);
    for (Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.bounded(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }
    return Ordering(std::move(perm));
  }
  const auto& given = std::get<GivenOrder>(strategy);
  if (static_cast<Index>(given.perm.size()) != n) {
    throw InvalidPermutation("build_ordering: permutation length " +
                             std::to_string(given.perm.size()) + " does not match " +
                             std::to_string(n) + " points");
  }
  return Ordering(given.perm);
}

// Points rearranged into ordered sequence: row k of the result is the point
// at ordered position k.
inline LocationSet reorder(const LocationSet& locs, const Ordering& ord) {
  if (ord.size() != locs.size()) throw DimensionMismatch("reorder: ordering/location size mismatch");
  Eigen::MatrixXd pts(locs.size(), locs.dim());
  for (Index k = 0; k < locs.size(); ++k) pts.row(k) = locs.points().row(ord.at(k));
  return LocationSet(std::move(pts));
}

// Per-node predecessor sets N(i) (ordered positions, sorted ascending); the
// sparsity pattern of the Vecchia approximation. N(0) is always empty.
class NeighborDag {
 public:
  NeighborDag(Index n, std::vector<std::vector<Index>> neighbors)
      : n_(n), neighbors_(std::move(neighbors)) {
    if (n_ < 1 || static_cast<Index>(neighbors_.size()) != n_) {
      throw DimensionMismatch("NeighborDag: need one neighbor set per node");
    }
    max_neighbors_ = 0;
    for (Index i = 0; i < n_; ++i) {
      auto& nb = neighbors_[static_cast<std::size_t>(i)];
      std::sort(nb.begin(), nb.end());
      if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
        throw std::invalid_argument("NeighborDag: duplicate neighbor at node " + std::to_string(i));
      }
      if (!nb.empty() && (nb.front() < 0 || nb.back() >= i)) {
        throw std::invalid_argument("NeighborDag: neighbors of node " + std::to_string(i) +
                                    " must be earlier positions");
      }
      max_neighbors_ = std::max(max_neighbors_, static_cast<Index>(nb.size()));
    }
  }

  // Every node conditions on all predecessors; the Vecchia approximation is
  // then exact.
  static NeighborDag saturated(Index n) {
    std::vector<std::vector<Index>> nb(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      nb[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(i));
      std::iota(nb[static_cast<std::size_t>(i)].begin(), nb[static_cast<std::size_t>(i)].end(),
                Index(0));
    }
    return NeighborDag(n, std::move(nb));
  }

  // m = 0: the independence approximation.
  static NeighborDag independent(Index n) {
    return NeighborDag(n, std::vector<std::vector<Index>>(static_cast<std::size_t>(n)));
  }

  Index size() const { return n_; }
  Index max_neighbors() const { return max_neighbors_; }
  const std::vector<Index>& neighbors(Index i) const {
    return neighbors_[static_cast<std::size_t>(i)];
  }

 private:
  Index n_;
  std::vector<std::vector<Index>> neighbors_;
  Index max_neighbors_;
};

// N(i) = the min(i, m) ordered predecessors nearest in Euclidean distance to
// point i, distance ties broken by the smaller ordered position. Linear scan;
// at desk scale a kd-tree would be noise.
inline NeighborDag build_neighbor_dag(const LocationSet& locs, const Ordering& ord, Index m) {
  if (m < 0) throw std::invalid_argument("build_neighbor_dag: m must be >= 0");
  if (ord.size() != locs.size()) {
    throw DimensionMismatch("build_neighbor_dag: ordering/location size mismatch");
  }
  const Index n = locs.size();
  std::vector<std::vector<Index>> nb(static_cast<std::size_t>(n));
  std::vector<std::pair<double, Index>> cand;
  for (Index i = 1; i < n; ++i) {
    const Index k = std::min(i, m);
    if (k == 0) continue;
    cand.clear();
    for (Index j = 0; j < i; ++j) {
      const double d2 = (locs.points().row(ord.at(i)) - locs.points().row(ord.at(j))).squaredNorm();
      cand.emplace_back(d2, j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    auto& out = nb[static_cast<std::size_t>(i)];
    out.reserve(static_cast<std::size_t>(k));
    for (Index t = 0; t < k; ++t) out.push_back(cand[static_cast<std::size_t>(t)].second);
  }
  return NeighborDag(n, std::move(nb));
}

// Row-wise conditional regression of the input matrix on the neighbor sets:
// coeffs(i, N(i)) = c(i, N(i)) * c(N(i), N(i))^-1 and cond_var(i) is the
// resulting conditional variance. coeffs is strictly lower triangular with
// row i supported only on N(i).
struct VecchiaFactor {
  Eigen::MatrixXd coeffs;
  Eigen::VectorXd cond_var;
};

inline VecchiaFactor vecchia_factor(const SymMatrixd& c, const NeighborDag& dag) {
  if (c.size() != dag.size()) {
    throw DimensionMismatch("vecchia_factor: matrix size " + std::to_string(c.size()) +
                            " does not match dag size " + std::to_string(dag.size()));
  }
  const Index n = c.size();
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd cond_var(n);
  for (Index i = 0; i < n; ++i) {
    const std::vector<Index>& nb = dag.neighbors(i);
    if (nb.empty()) {
      cond_var(i) = c(i, i);
    } else {
      const Eigen::MatrixXd sub = c.mat()(nb, nb);
      const Eigen::VectorXd cross = c.mat()(nb, i);
      Eigen::LLT<Eigen::MatrixXd> llt(sub);
      if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("vecchia_factor: neighbor submatrix at node " +
                                  std::to_string(i) + " is not positive definite");
      }
      const Eigen::VectorXd coef = llt.solve(cross);
      for (std::size_t t = 0; t < nb.size(); ++t) coeffs(i, nb[t]) = coef(static_cast<Index>(t));
      cond_var(i) = c(i, i) - coef.dot(cross);
    }
    if (!(cond_var(i) > 0.0)) {
      throw NotPositiveDefinite("vecchia_factor: nonpositive conditional variance at node " +
                                std::to_string(i));
    }
  }
  return {std::move(coeffs), std::move(cond_var)};
}

// (I - A)^T D^-1 (I - A): symmetric positive definite, and exactly zero at
// (i, j) whenever i and j are non-adjacent in the moralized DAG.
inline SymMatrixd precision_from_factor(const VecchiaFactor& f) {
  const Index n = f.cond_var.size();
  const Eigen::MatrixXd lower = Eigen::MatrixXd::Identity(n, n) - f.coeffs;
  return SymMatrixd(lower.transpose() * f.cond_var.cwiseInverse().asDiagonal() * lower);
}

// Inverse of precision_from_factor, computed from the unit-lower-triangular
// structure: Ctilde = (I - A)^-1 D (I - A)^-T.
inline SymMatrixd cov_from_factor(const VecchiaFactor& f) {
  const Index n = f.cond_var.size();
  const Eigen::MatrixXd lower = Eigen::MatrixXd::Identity(n, n) - f.coeffs;
  const Eigen::MatrixXd half = lower.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd(f.cond_var.cwiseSqrt().asDiagonal()));
  return SymMatrixd(half * half.transpose());
}

}  // namespace nngpkl
