#include "roughheat/partition.hpp"

#include <algorithm>
#include <cmath>

#include "roughheat/error.hpp"

namespace roughheat {
namespace {

void require_n(std::int64_t N) {
  if (N < 2) throw ParameterError("partition size N must be >= 2");
}

std::string where(std::int64_t N, int r) {
  return "N=" + std::to_string(N) + ", r=" + std::to_string(r) + ": ";
}

}  // namespace

int RemovalTrace::step_of(std::int64_t m) const {
  if (m < 1 || m > N - 1) throw ParameterError("removal index out of range");
  for (int r = 1; r <= M; ++r) {
    if (m <= A[static_cast<std::size_t>(r)]) return r;
  }
  return M;
}

RemovalTrace run_removal(std::int64_t N) {
  require_n(N);
  RemovalTrace tr;
  tr.N = N;
  const auto n = static_cast<std::size_t>(N);
  // Doubly linked list over 0..N; 0 and N are never removed.
  std::vector<std::int64_t> prev(n + 1), next(n + 1);
  for (std::int64_t i = 0; i <= N; ++i) {
    prev[static_cast<std::size_t>(i)] = i - 1;
    next[static_cast<std::size_t>(i)] = i + 1;
  }
  auto remove = [&](std::int64_t p) {
    const auto P = static_cast<std::size_t>(p);
    tr.removed.push_back(p);
    tr.plus.push_back(next[P]);
    tr.minus.push_back(prev[P]);
    next[static_cast<std::size_t>(prev[P])] = next[P];
    prev[static_cast<std::size_t>(next[P])] = prev[P];
  };
  tr.removed.reserve(n);
  tr.plus.reserve(n);
  tr.minus.reserve(n);
  tr.A.push_back(0);
  std::int64_t remaining = N - 1;
  while (remaining > 0) {
    std::int64_t p = prev[n];
    std::int64_t last = -1;
    while (p > 0) {
      const std::int64_t after = prev[static_cast<std::size_t>(p)];
      remove(p);
      last = p;
      p = after > 0 ? prev[static_cast<std::size_t>(after)] : 0;
    }
    // A single survivor between 0 and the last removed point goes too.
    const std::int64_t first = next[0];
    if (first != N && first < last) remove(first);
    ++tr.M;
    tr.A.push_back(static_cast<std::int64_t>(tr.removed.size()));
    remaining = N - 1 - tr.A.back();
  }
  return tr;
}

std::vector<std::int64_t> a_sequence(std::int64_t N) {
  require_n(N);
  std::vector<std::int64_t> out;
  std::int64_t a = 0;
  while (a < N - 1) {
    a += (N - a + 1) / 2;
    out.push_back(a);
  }
  return out;
}

Neighbors closed_form_neighbors(std::int64_t N, int r, std::int64_t m, const std::vector<std::int64_t>& A) {
  require_n(N);
  if (r < 1 || static_cast<std::size_t>(r) >= A.size()) throw ParameterError("step index out of range");
  const std::int64_t a0 = A[static_cast<std::size_t>(r - 1)];
  const std::int64_t a1 = A[static_cast<std::size_t>(r)];
  if (m <= a0 || m > a1) throw ParameterError("removal index m outside step r");
  const std::int64_t s = std::int64_t{1} << r;
  const std::int64_t h = s / 2;
  Neighbors out;
  if ((N - a0) % 2 != 0 && m == a1) {
    out.plus = N - s * (a1 - a0 - 1) + s;
    out.minus = 0;
    out.k = N - s * (a1 - a0 - 1);
    return out;
  }
  out.plus = N - s * (m - a0) + s;
  out.minus = N - s * (m - a0);
  out.k = out.minus + h;
  if (m == a1) out.minus = 0;
  return out;
}

BoundsReport verify_bounds(std::int64_t N) {
  require_n(N);
  BoundsReport rep;
  const auto A = a_sequence(N);
  const int M = static_cast<int>(A.size());
  const auto Nd = static_cast<double>(N);
  std::int64_t prev = 0;
  for (int r = 1; r <= M; ++r) {
    const auto ar = A[static_cast<std::size_t>(r - 1)];
    const double slack = static_cast<double>(ar) - Nd * (1.0 - std::ldexp(1.0, -r));
    if (slack < -1e-9 || slack > 1.0 + 1e-9) {
      rep.ok = false;
      rep.violations.push_back(where(N, r) + "A_r - N(1 - 2^-r) = " + std::to_string(slack));
    }
    const double gap = static_cast<double>(ar - prev) - std::ldexp(Nd, -r);
    if (std::abs(gap) > 1.0 + 1e-9) {
      rep.ok = false;
      rep.violations.push_back(where(N, r) + "A_r - A_{r-1} - N/2^r = " + std::to_string(gap));
    }
    prev = ar;
  }
  if (!(std::ldexp(1.0, M - 1) <= Nd && Nd <= std::ldexp(1.0, M + 1))) {
    rep.ok = false;
    rep.violations.push_back(where(N, M) + "2^{M-1} <= N <= 2^{M+1} fails");
  }
  return rep;
}

BoundsReport cross_check(std::int64_t N) {
  BoundsReport rep;
  const auto tr = run_removal(N);
  const auto rec = a_sequence(N);
  if (rec.size() != static_cast<std::size_t>(tr.M) ||
      !std::equal(rec.begin(), rec.end(), tr.A.begin() + 1)) {
    rep.ok = false;
    rep.violations.push_back(where(N, tr.M) + "recurrence disagrees with simulation");
    return rep;
  }
  for (int r = 1; r <= tr.M; ++r) {
    for (std::int64_t m = tr.A[static_cast<std::size_t>(r - 1)] + 1; m <= tr.A[static_cast<std::size_t>(r)]; ++m) {
      const auto cf = closed_form_neighbors(N, r, m, tr.A);
      if (cf.k != tr.k(m) || cf.plus != tr.k_plus(m) || cf.minus != tr.k_minus(m)) {
        rep.ok = false;
        rep.violations.push_back(where(N, r) + "closed form differs at m=" + std::to_string(m));
      }
    }
  }
  return rep;
}

double weighted_sum(const RemovalTrace& tr, double kappa, double mu, double gamma_prime) {
  if (!(kappa > 0.0)) throw ParameterError("kappa must be > 0");
  if (!(mu > 1.0)) throw ParameterError("mu must be > 1");
  if (!(gamma_prime > 0.0 && gamma_prime < 1.0)) throw ParameterError("gamma_prime must lie in (0, 1)");
  const auto Nd = static_cast<double>(tr.N);
  const double scale = std::pow(Nd, -mu);
  double total = 0.0;
  for (int r = 1; r <= tr.M - 1; ++r) {
    const std::int64_t a0 = tr.A[static_cast<std::size_t>(r - 1)];
    const std::int64_t a1 = tr.A[static_cast<std::size_t>(r)];
    total += std::pow(std::abs(1.0 - static_cast<double>(tr.k_minus(a0 + 1)) / Nd), kappa);
    double inner = 0.0;
    for (std::int64_t m = a0 + 2; m <= a1; ++m) {
      const std::int64_t kp = tr.k_plus(m);
      if (kp == tr.N) continue;
      inner += std::pow(1.0 - static_cast<double>(kp) / Nd, -gamma_prime) *
               std::pow(static_cast<double>(kp - tr.k_minus(m)), mu);
    }
    total += scale * inner;
  }
  return total;
}

double weighted_sum(std::int64_t N, double kappa, double mu, double gamma_prime) {
  return weighted_sum(run_removal(N), kappa, mu, gamma_prime);
}

}  // namespace roughheat
