#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twisted/quadrature.hpp"

namespace twisted {

/// An estimate of log ||P_lambda||_{2->p}, lambda^2 = n + 2k.
struct NormEstimate {
  enum class Kind { Exact, CandidateLowerBound, PowerIterationLowerBound };

  double value_log = 0.0;
  Kind kind = Kind::Exact;
  std::size_t n = 1;
  int k = 0;
  double p = 2.0;
  int B = 0;
  int iterations = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  bool converged = true;
  std::vector<double> objective_trace;  // power iteration only: best restart, per iteration
};

std::string to_string(NormEstimate::Kind kind);
/// Inverse of to_string; throws ValidationError.
NormEstimate::Kind kind_from_string(const std::string& s);

/// Exact: (1/2) log K(0,0) with K(0,0) = pi^{-n} binom(n+k-1, k).
NormEstimate norm_2_to_infty(std::size_t n, int k);

/// log(||z_1^k e^{-|z|^2/2}||_p / ||.||_2) from the Gamma formula in log-space. p may be infinite.
NormEstimate candidate_ratio_zbar(std::size_t n, int k, double p);

/// log(||f_k||_p / ||f_k||_2) with the L^p norm by radial quadrature. Infinite p gives the
/// exact 2->infty ratio.
NormEstimate candidate_ratio_radial(std::size_t n, int k, double p, const QuadSpec& spec);

struct PowerIterationOptions {
  int B = 0;                  // |beta| <= B truncation of the eigenspace
  double tol = 1e-9;          // relative objective change that stops a restart
  int max_iter = 200;
  int random_restarts = 5;
  std::uint64_t seed = 1;
  QuadSpec grid;              // resolution of the fixed grid (refined until the basis is orthonormal on it)
};

/// Nonlinear power method for max ||f_v||_p / ||f_v||_2 over the truncated eigenspace. Starts from
/// the zbar^k state, the radial f_k (when B >= k) and seeded random vectors; keeps the best.
/// Non-convergence leaves converged = false; the value is still a lower bound.
NormEstimate norm_2_to_p_lower_power(std::size_t n, int k, double p, const PowerIterationOptions& opts);

}  // namespace twisted
