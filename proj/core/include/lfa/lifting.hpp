#pragma once

#include <cstdint>
#include <vector>

#include "lfa/markov.hpp"

namespace lfa::lifting {

/// Total surjection from fine-chain states to coarse-chain states.
struct LiftingMap {
  std::vector<std::uint32_t> fine_to_coarse;  // size = fine num_states
  std::size_t num_coarse = 0;

  std::size_t num_fine() const { return fine_to_coarse.size(); }
  /// fibers()[k] = fine states mapped to coarse state k.
  std::vector<std::vector<std::uint32_t>> fibers() const;
  bool is_surjective() const;
};

struct LiftingReport {
  bool flow_homomorphism_ok = false;
  double max_flow_residual = 0;
  bool aggregation_ok = false;
  double max_aggregation_residual = 0;
  bool fiber_symmetry_ok = false;
  double max_fiber_spread = 0;

  bool ok() const { return flow_homomorphism_ok && aggregation_ok && fiber_symmetry_ok; }
};

/// Checks that `map` carries the fine chain's ergodic flow onto the coarse
/// chain's: for every coarse pair (i, j),
///   Q_ij = sum over x in f^-1(i), y in f^-1(j) of Q'_xy,
/// plus stationary aggregation and fiber symmetry. Both chains must be
/// irreducible (unique stationary distributions); the map must be total and
/// surjective.
LiftingReport verify_lifting(const markov::Chain& fine, const markov::Chain& coarse,
                             const LiftingMap& map, double tol = 1e-9);

/// Coarse distribution obtained by summing fiber masses.
markov::Distribution aggregate_distribution(const markov::Distribution& fine_pi,
                                            const LiftingMap& map);

struct FiberSymmetry {
  bool ok = false;
  double max_spread = 0;  // max over fibers of (max - min) stationary mass
};

FiberSymmetry check_fiber_symmetry(const markov::Chain& fine, const LiftingMap& map,
                                   double tol = 1e-9);

}  // namespace lfa::lifting
