#pragma once
// CSV import/export.
//
// Field:       "# K=<K> G=<G> representation=<coefficients|grid|both>" then one
//              value per line (coefficients first when both are present).
// Path:        header "t,x1,...,xm", one row per fine grid point.
// Trajectory:  header "t,c1,...,cK", plus a sidecar "<file>.meta.json" with
//              n, K, G, gamma, gamma_prime, driver descriptor and seed.
// Multipliers: header "kind,channel_i,channel_j,mode,lambda,multiplier".

#include <cstdint>
#include <iosfwd>
#include <string>

#include "roughheat/driver.hpp"
#include "roughheat/operator_path.hpp"
#include "roughheat/scheme.hpp"
#include "roughheat/spectral.hpp"

namespace roughheat {

void write_field_csv(std::ostream& os, const SpectralBasis& basis, const Field& f);
Field read_field_csv(std::istream& is, const SpectralBasis& basis);

void write_path_csv(std::ostream& os, const DriverPath& path);
/// The row count must be 2^fine_level + 1 with times j 2^-fine_level.
DriverPath read_path_csv(std::istream& is, int fine_level, const std::string& origin);
DriverPath read_path_csv_file(const std::string& file, int fine_level);

struct TrajectoryMeta {
  double gamma = 0.0;
  double gamma_prime = 0.0;
  std::string driver;
  std::uint64_t seed = 0;
};
void write_trajectory_csv(const std::string& file, const SpectralBasis& basis, const Trajectory& traj,
                          const TrajectoryMeta& meta);

void write_multipliers_csv(std::ostream& os, const SpectralBasis& basis, const OperatorSet& ops);

}  // namespace roughheat
