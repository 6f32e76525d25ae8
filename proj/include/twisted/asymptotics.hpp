#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twisted/exact_value.hpp"
#include "twisted/gaussian_fn.hpp"
#include "twisted/opnorm.hpp"
#include "twisted/quadrature.hpp"

namespace twisted {

/// Sharp exponents for ||P_lambda||_{2->p} ~ lambda^rho and the dilation exponent sigma.
struct ExponentTheory {
  int d = 2;
  double p = 2.0;
  double rho = 0.0;
  double sigma = 0.0;
  double p_critical = 6.0;
};

/// d even >= 2, p in [2, infinity]. Throws ValidationError otherwise.
ExponentTheory theory_exponents(int d, double p);

enum class Candidate { Zbar, Radial, TwoToInfty, PowerIteration };
enum class Regressor { LogK, LogLambda };

std::string to_string(Candidate c);
Candidate candidate_from_string(const std::string& s);  // zbar | radial | twoinfty | power
std::string to_string(Regressor r);
Regressor regressor_from_string(const std::string& s);  // log-k | log-lambda

struct SweepRow {
  int k = 0;
  double lambda = 0.0;  // sqrt(n + 2k)
  NormEstimate estimate;
  bool ok = true;
  std::string error;  // set when the row was skipped

  double value_log() const { return estimate.value_log; }
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square
  Regressor regressor = Regressor::LogK;
  std::vector<SweepRow> rows;  // all rows, skipped ones with ok = false

  double regressor_value(const SweepRow& row) const;
};

struct SweepOptions {
  Candidate candidate = Candidate::Zbar;
  std::size_t n = 1;
  double p = 4.0;
  int k_min = 1;
  int k_max = 1024;
  Regressor regressor = Regressor::LogK;
  QuadSpec spec;               // radial candidate
  PowerIterationOptions power; // power-iteration candidate
  int threads = 1;
};

/// Powers of two in [k_min, k_max]; throws ValidationError when there are none.
std::vector<int> dyadic_levels(int k_min, int k_max);

/// Ordinary least squares of value_log on the regressor over the ok rows (needs two).
FitResult fit_rows(std::vector<SweepRow> rows, Regressor regressor);

/// Evaluates the candidate on the dyadic levels and fits. Rows that fail numerically are kept
/// with ok = false and left out of the fit. Row order does not depend on `threads`.
FitResult sweep_fit(const SweepOptions& opts);

struct DispersiveRow {
  std::string family;  // radial | zbar | random0 | random1 | random2
  int k = 0;
  Point center;
  double lambda = 0.0;
  double ratio = 0.0;
  bool ok = true;
  std::string error;
};

struct DispersiveOptions {
  std::size_t n = 1;
  std::vector<int> ks{4, 8, 16, 32, 64};
  std::vector<Point> centers;  // empty: 0, lambda e_1 and lambda e^{i pi/3} e_1 per k
  double outer_factor = 2.0;   // denominator ball radius, in units of lambda
  std::uint64_t seed = 7;
  QuadSpec spec;               // panel width and angular count are tightened per k
  int threads = 1;
};

struct DispersiveResult {
  std::vector<DispersiveRow> rows;
  double sup = 0.0;
  std::vector<std::pair<int, double>> sup_by_k;
  double log_sup_slope = 0.0;  // slope of log sup_k against log lambda
};

/// Tabulates lambda^{1/(d+1)} ||u||_{L^{p_c}(B_lambda(c))} / ||u||_{L^2(B_{R lambda}(c))}, R = outer_factor,
/// over f_k, the zbar^k state and three seeded random unit elements of the B = 2 truncation.
DispersiveResult dispersive_check(const DispersiveOptions& opts);

/// z |-> g(sqrt|m| z), conjugated when m < 0. Exact; |m| must be a perfect square.
GaussianFn scale_eigenfunction(const GaussianFn& g, long m);

/// Same dilation for any nonzero real m, at the evaluator level.
Evaluator scale_evaluator(const Evaluator& u, double m);

struct HeisenbergRow {
  long m = 1;
  int p = 2;
  ExactValue observed;  // (||s||_p^p / ||g||_p^p) (||g||_2^2 / ||s||_2^2)^{p/2}, s = scale(g, m)
  ExactValue expected;  // |m|^{p sigma(p)} = |m|^{n (p/2 - 1)}
  bool equal = false;
};

/// Exact check of the dilation law for every (m, p); p must be even.
std::vector<HeisenbergRow> heisenberg_check(const GaussianFn& g, const std::vector<long>& ms, const std::vector<int>& ps);

}  // namespace twisted
