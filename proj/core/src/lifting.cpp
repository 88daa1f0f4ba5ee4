#include "lfa/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lfa::lifting {

std::vector<std::vector<std::uint32_t>> LiftingMap::fibers() const {
  std::vector<std::vector<std::uint32_t>> f(num_coarse);
  for (std::size_t x = 0; x < fine_to_coarse.size(); ++x) {
    if (fine_to_coarse[x] >= num_coarse)
      throw std::invalid_argument("lifting map image out of range");
    f[fine_to_coarse[x]].push_back(static_cast<std::uint32_t>(x));
  }
  return f;
}

bool LiftingMap::is_surjective() const {
  std::vector<char> hit(num_coarse, 0);
  for (auto k : fine_to_coarse) {
    if (k >= num_coarse) return false;
    hit[k] = 1;
  }
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

markov::Distribution aggregate_distribution(const markov::Distribution& fine_pi,
                                            const LiftingMap& map) {
  if (fine_pi.size() != map.num_fine())
    throw std::invalid_argument("aggregate_distribution: dimension mismatch");
  std::vector<double> coarse(map.num_coarse, 0.0);
  for (std::size_t x = 0; x < map.num_fine(); ++x)
    coarse[map.fine_to_coarse[x]] += fine_pi[x];
  return markov::Distribution{std::move(coarse)};
}

FiberSymmetry check_fiber_symmetry(const markov::Chain& fine, const LiftingMap& map,
                                   double tol) {
  if (fine.num_states != map.num_fine())
    throw std::invalid_argument("check_fiber_symmetry: dimension mismatch");
  markov::Distribution pi = markov::stationary(fine);
  std::vector<double> lo(map.num_coarse, 2.0), hi(map.num_coarse, -1.0);
  for (std::size_t x = 0; x < map.num_fine(); ++x) {
    std::uint32_t k = map.fine_to_coarse[x];
    lo[k] = std::min(lo[k], pi[x]);
    hi[k] = std::max(hi[k], pi[x]);
  }
  FiberSymmetry result;
  for (std::size_t k = 0; k < map.num_coarse; ++k)
    if (hi[k] >= 0) result.max_spread = std::max(result.max_spread, hi[k] - lo[k]);
  result.ok = result.max_spread < tol;
  return result;
}

LiftingReport verify_lifting(const markov::Chain& fine, const markov::Chain& coarse,
                             const LiftingMap& map, double tol) {
  if (fine.num_states != map.num_fine() || coarse.num_states != map.num_coarse)
    throw std::invalid_argument("verify_lifting: dimension mismatch");
  if (!map.is_surjective())
    throw std::invalid_argument("verify_lifting: map is not surjective");
  if (!markov::is_irreducible(fine) || !markov::is_irreducible(coarse))
    throw std::invalid_argument("verify_lifting: chain has no unique stationary distribution");

  markov::Distribution fine_pi = markov::stationary(fine);
  markov::Distribution coarse_pi = markov::stationary(coarse);

  // Aggregate the fine flow onto coarse index pairs.
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> agg_flow;
  for (std::size_t x = 0; x < fine.num_states; ++x) {
    std::uint32_t i = map.fine_to_coarse[x];
    for (std::size_t e = fine.row_begin(x); e < fine.row_end(x); ++e) {
      const markov::Edge& ed = fine.edges[e];
      agg_flow[{i, map.fine_to_coarse[ed.to]}] += fine_pi[x] * ed.prob();
    }
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> coarse_flow;
  for (std::size_t i = 0; i < coarse.num_states; ++i)
    for (std::size_t e = coarse.row_begin(i); e < coarse.row_end(i); ++e)
      coarse_flow[{static_cast<std::uint32_t>(i), coarse.edges[e].to}] +=
          coarse_pi[i] * coarse.edges[e].prob();

  LiftingReport report;
  for (const auto& [key, q] : coarse_flow) {
    auto it = agg_flow.find(key);
    double diff = std::abs(q - (it == agg_flow.end() ? 0.0 : it->second));
    report.max_flow_residual = std::max(report.max_flow_residual, diff);
  }
  for (const auto& [key, q] : agg_flow) {
    if (coarse_flow.count(key) == 0)
      report.max_flow_residual = std::max(report.max_flow_residual, std::abs(q));
  }
  report.flow_homomorphism_ok = report.max_flow_residual < tol;

  markov::Distribution agg_pi = aggregate_distribution(fine_pi, map);
  for (std::size_t k = 0; k < coarse.num_states; ++k)
    report.max_aggregation_residual =
        std::max(report.max_aggregation_residual, std::abs(agg_pi[k] - coarse_pi[k]));
  report.aggregation_ok = report.max_aggregation_residual < tol;

  FiberSymmetry sym = check_fiber_symmetry(fine, map, tol);
  report.fiber_symmetry_ok = sym.ok;
  report.max_fiber_spread = sym.max_spread;
  return report;
}

}  // namespace lfa::lifting
