#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/objective.hpp"

namespace wiretap {

struct OptimizerOptions {
  std::size_t max_iters = 5000;
  double step0 = 1.0;
  double tol_grad = 1e-8;
  double tol_value = 1e-10;
  std::size_t restarts = 8;
  std::uint64_t seed = 42;
};

struct Optimum {
  InputCovariance K_star;
  double value = 0.0;  // nats
  std::size_t rank = 0;
  double trace = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double multiplier_estimate = 0.0;  // lambda from the trace constraint
};

/// Multi-start projected gradient ascent over {K PSD, Tr K <= P}. The value
/// is clamped below at 0 (K = 0 is always feasible).
Optimum maximize_secrecy(const WiretapChannel& ch, const OptimizerOptions& opts = {});

/// Independent derivative-free reference: seeded random covariance sampling
/// plus a coarse deterministic grid for n <= 2, with a shrinking random
/// refinement around the incumbent. Evaluates rates through its own
/// determinant route, not the eigendecomposition path the optimizer uses.
double oracle_search(const WiretapChannel& ch, std::size_t budget, std::uint64_t seed);

/// || Pi(G - lambda I) ||_F where Pi keeps the full range-of-K block and the
/// feasible (positive) part on the kernel of K.
double kkt_residual(const WiretapChannel& ch, const InputCovariance& k, double lambda);
/// Same, with lambda estimated as Re Tr(G K)/Tr(K) (0 when K = 0).
double kkt_residual(const WiretapChannel& ch, const InputCovariance& k);

double multiplier_estimate(const WiretapChannel& ch, const HermMatrix& k);

/// Count of eigenvalues above tol::rank * scale.
std::size_t rank_of(const HermMatrix& k, double scale);

// --- generic driver (shared with the converse's inner maximization) ---------

struct AscentResult {
  HermMatrix K;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Projected gradient ascent with Armijo backtracking (halving, reset each
/// iteration) along the projection arc.
AscentResult ascend_projected(const std::function<double(const HermMatrix&)>& f,
                              const std::function<HermMatrix(const HermMatrix&)>& grad,
                              const HermMatrix& start, double power,
                              const OptimizerOptions& opts,
                              std::vector<double>* value_trace = nullptr);

}  // namespace wiretap
