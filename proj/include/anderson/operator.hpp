#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "anderson/graph.hpp"
#include "anderson/rng.hpp"
#include "anderson/ssd.hpp"

namespace anderson {

// One draw of the i.i.d. potential. The values are a pure function of
// (master_seed, index, vertex order, ssd) and in particular do NOT depend on
// the disorder strength, so operators at different lambda built from the same
// realization differ by exactly (lambda1 - lambda2) * diag(omega).
struct DisorderRealization {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  Eigen::VectorXd values;
};

// H = Delta + lambda * diag(omega): off-diagonal 1.0 on every graph edge,
// diagonal lambda * omega_n.
struct SparseOperator {
  Eigen::SparseMatrix<double> matrix;
  double lambda = 0.0;

  int dimension() const { return static_cast<int>(matrix.rows()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return matrix * v; }

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }

  Eigen::VectorXd diagonal() const { return matrix.diagonal(); }

  // Bandwidth <= 1; true for 1-D chains in the native vertex order, where the
  // much faster tridiagonal eigensolver applies.
  bool is_tridiagonal() const {
    for (int col = 0; col < matrix.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, col); it; ++it)
        if (std::abs(it.row() - col) > 1) return false;
    return true;
  }

  // First sub/super-diagonal (valid only when is_tridiagonal()).
  Eigen::VectorXd off_diagonal() const {
    const int n = dimension();
    Eigen::VectorXd off = Eigen::VectorXd::Zero(std::max(0, n - 1));
    for (int i = 0; i + 1 < n; ++i) off[i] = matrix.coeff(i + 1, i);
    return off;
  }
};

struct EnsembleSpec {
  GraphSpec graph;
  Ssd ssd;
  double lambda = 0.0;
  int n_realizations = 1;
  std::uint64_t master_seed = 0;
  // Configured disorder window [lambda0, lambda0_tilde].
  double lambda_min = 0.0;
  double lambda_max = std::numeric_limits<double>::infinity();

  void validate() const {
    if (n_realizations < 1) throw std::invalid_argument("EnsembleSpec: n_realizations must be >= 1");
    if (lambda < lambda_min || lambda > lambda_max)
      throw std::invalid_argument("EnsembleSpec: lambda outside the configured window");
  }
};

inline DisorderRealization realize_disorder(const EnsembleSpec& spec, std::uint64_t index) {
  spec.validate();
  if (index >= static_cast<std::uint64_t>(spec.n_realizations))
    throw std::invalid_argument("realize_disorder: index out of range");
  DisorderRealization real;
  real.master_seed = spec.master_seed;
  real.index = index;
  RandomStream stream = RandomStream::keyed(spec.master_seed, index);
  real.values.resize(spec.graph.vertex_count);
  for (int v = 0; v < spec.graph.vertex_count; ++v) real.values[v] = spec.ssd.sample_one(stream);
  return real;
}

inline SparseOperator assemble(const GraphSpec& graph, double lambda,
                               const DisorderRealization& omega) {
  if (omega.values.size() != graph.vertex_count)
    throw std::invalid_argument("assemble: realization size does not match the graph");
  SparseOperator op;
  op.lambda = lambda;
  std::vector<Eigen::Triplet<double>> entries;
  std::size_t edge_slots = 0;
  for (const auto& nbrs : graph.adjacency) edge_slots += nbrs.size();
  entries.reserve(edge_slots + static_cast<std::size_t>(graph.vertex_count));
  for (int v = 0; v < graph.vertex_count; ++v) {
    entries.emplace_back(v, v, lambda * omega.values[v]);
    for (int u : graph.adjacency[static_cast<std::size_t>(v)]) entries.emplace_back(u, v, 1.0);
  }
  op.matrix.resize(graph.vertex_count, graph.vertex_count);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  return op;
}

// Almost-sure spectral support at finite volume. For boxes this is the
// infinite-volume interval [-2d, 2d] + lambda [a, b]; for truncated Bethe
// trees the Laplacian norm is only bounded by the degree K+1, so the finite
// check uses that, and the infinite-lattice edge 2*sqrt(K) is reported for
// comparison.
struct SpectrumInterval {
  double lo = 0.0, hi = 0.0;                     // finite-volume guarantee
  double lo_infinite = 0.0, hi_infinite = 0.0;   // infinite-lattice statement
};

inline double laplacian_edge_finite(const GraphSpec& g) {
  return g.kind == GraphKind::zd_box ? 2.0 * g.dim : static_cast<double>(g.connectivity + 1);
}

inline double laplacian_edge_infinite(const GraphSpec& g) {
  return g.kind == GraphKind::zd_box ? 2.0 * g.dim : 2.0 * std::sqrt(static_cast<double>(g.connectivity));
}

inline SpectrumInterval spectrum_interval(const GraphSpec& g, double lambda, const Ssd& ssd) {
  SpectrumInterval iv;
  const double edge = laplacian_edge_finite(g);
  const double edge_inf = laplacian_edge_infinite(g);
  iv.lo = -edge + lambda * ssd.support_min();
  iv.hi = edge + lambda * ssd.support_max();
  iv.lo_infinite = -edge_inf + lambda * ssd.support_min();
  iv.hi_infinite = edge_inf + lambda * ssd.support_max();
  return iv;
}

struct SupportCheckResult {
  bool pass = false;
  SpectrumInterval interval;
  double worst_margin = 0.0;  // min distance of any eigenvalue to the interval edge; < 0 violates
};

inline SupportCheckResult spectrum_support_check(const EnsembleSpec& spec,
                                                 const Eigen::VectorXd& eigenvalues) {
  SupportCheckResult result;
  result.interval = spectrum_interval(spec.graph, spec.lambda, spec.ssd);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < eigenvalues.size(); ++i) {
    worst = std::min(worst, eigenvalues[i] - result.interval.lo);
    worst = std::min(worst, result.interval.hi - eigenvalues[i]);
  }
  result.worst_margin = worst;
  result.pass = worst >= -1e-10;
  return result;
}

}  // namespace anderson
