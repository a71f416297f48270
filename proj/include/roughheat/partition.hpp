#pragma once
// Successive removal of the inner points of {0, 1, ..., N}.
//
// Each step sweeps right to left and removes every second remaining inner
// point, starting with the rightmost one. If that leaves a single inner point
// between 0 and the last removed point, it is removed too and closes the step.
// The order of removals, the neighbours of each point at the moment it is
// removed, and the cumulative counts A_r are recorded.

#include <cstdint>
#include <string>
#include <vector>

namespace roughheat {

struct RemovalTrace {
  std::int64_t N = 0;
  int M = 0;  // number of steps
  // Index m - 1 holds the m-th removal, m = 1..N-1.
  std::vector<std::int64_t> removed;
  std::vector<std::int64_t> plus;   // right neighbour when removed
  std::vector<std::int64_t> minus;  // left neighbour when removed
  std::vector<std::int64_t> A;      // A[0] = 0, ..., A[M] = N - 1

  std::int64_t k(std::int64_t m) const { return removed.at(static_cast<std::size_t>(m - 1)); }
  std::int64_t k_plus(std::int64_t m) const { return plus.at(static_cast<std::size_t>(m - 1)); }
  std::int64_t k_minus(std::int64_t m) const { return minus.at(static_cast<std::size_t>(m - 1)); }
  /// Step r with A_{r-1} < m <= A_r.
  int step_of(std::int64_t m) const;
};

RemovalTrace run_removal(std::int64_t N);

/// A_1, ..., A_M from A_{r+1} = A_r + floor((N - A_r + 1)/2).
std::vector<std::int64_t> a_sequence(std::int64_t N);

struct Neighbors {
  std::int64_t k = 0;
  std::int64_t plus = 0;
  std::int64_t minus = 0;
};

/// Explicit positions for A_{r-1} < m <= A_r, where A = (A_0, A_1, ...).
/// Inside a step the survivors are spaced 2^r apart from N downwards:
///   k^+ = N - 2^r (m - A_{r-1}) + 2^r,  k^- = N - 2^r (m - A_{r-1}),  k = k^- + 2^{r-1}.
/// The last removal of a step always has k^- = 0; when N - A_{r-1} is odd it
/// is the leftover point, with k^+ equal to the previous removal's k^+.
Neighbors closed_form_neighbors(std::int64_t N, int r, std::int64_t m, const std::vector<std::int64_t>& A);

struct BoundsReport {
  bool ok = true;
  std::vector<std::string> violations;  // "N=..., r=...: ..."
};

/// 0 <= A_r - N(1 - 2^-r) <= 1, |A_r - A_{r-1} - N/2^r| <= 1, 2^{M-1} <= N <= 2^{M+1}.
BoundsReport verify_bounds(std::int64_t N);

/// Simulation, recurrence and closed forms agree on every removal.
BoundsReport cross_check(std::int64_t N);

/// sum_{r=1}^{M-1} [ (1 - k^-_{A_{r-1}+1}/N)^kappa
///                   + N^-mu sum_{m=A_{r-1}+2}^{A_r} (1 - k^+_m/N)^-gamma' (k^+_m - k^-_m)^mu ]
/// with terms where k^+_m = N left out.
double weighted_sum(std::int64_t N, double kappa, double mu, double gamma_prime);
double weighted_sum(const RemovalTrace& trace, double kappa, double mu, double gamma_prime);

}  // namespace roughheat
