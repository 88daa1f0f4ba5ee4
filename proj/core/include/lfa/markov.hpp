#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lfa::markov {

/// One outgoing transition. Probabilities are exact rationals at build time
/// (num/den) and are converted to floating point for solving.
struct Edge {
  std::uint32_t to = 0;
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool event = false;  // marked as a completion ("success") edge

  double prob() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Finite labeled Markov chain with sparse row-stochastic transitions stored
/// in compressed-row form: edges of state i live in
/// edges[row_ptr[i] .. row_ptr[i+1]).
struct Chain {
  std::size_t num_states = 0;
  std::vector<std::size_t> row_ptr;  // size num_states + 1
  std::vector<Edge> edges;           // sorted by (from, to), unique (from, to)
  std::vector<std::string> labels;   // optional, empty or size num_states

  std::size_t row_begin(std::size_t i) const { return row_ptr[i]; }
  std::size_t row_end(std::size_t i) const { return row_ptr[i + 1]; }
  std::span<const Edge> row(std::size_t i) const {
    return {edges.data() + row_ptr[i], edges.data() + row_ptr[i + 1]};
  }
  const std::string& label(std::size_t i) const { return labels[i]; }
};

/// Build a Chain from an unsorted edge list. Edges with identical (from, to)
/// are accumulated (their rational probabilities are added).
Chain make_chain(std::size_t num_states,
                 std::vector<std::pair<std::uint32_t, Edge>> edge_list,
                 std::vector<std::string> labels = {});

/// Copy of `chain` with the event marks replaced by the given (from, to) set.
Chain with_event_edges(const Chain& chain,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& events);

struct Distribution {
  std::vector<double> probabilities;

  std::size_t size() const { return probabilities.size(); }
  double operator[](std::size_t i) const { return probabilities[i]; }
};

/// Ergodic flow Q_ij = pi_i * p_ij, stored on the chain's sparsity pattern.
struct FlowMatrix {
  std::size_t num_states = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::pair<std::uint32_t, double>> flows;  // (to, Q_ij)
};

struct ValidationReport {
  struct RowSumViolation {
    std::uint32_t state;
    double row_sum;
  };
  std::vector<RowSumViolation> row_sum_violations;  // |sum - 1| > 1e-12
  std::vector<std::uint32_t> out_of_range_edges;    // edge index with p outside [0, 1]
  std::vector<std::uint32_t> unreachable_states;    // not reachable from state 0

  bool ok() const {
    return row_sum_violations.empty() && out_of_range_edges.empty() &&
           unreachable_states.empty();
  }
};

ValidationReport validate(const Chain& chain);

/// True iff the chain has a unique stationary distribution: strongly
/// connected (single-state chains qualify by convention).
bool is_irreducible(const Chain& chain);

/// Period of an irreducible chain: gcd of all cycle lengths.
/// Precondition: is_irreducible(chain).
std::uint32_t period(const Chain& chain);

/// Textbook ergodicity: irreducible and aperiodic (any self-loop suffices;
/// a single-state chain is ergodic by convention).
bool is_ergodic(const Chain& chain);

/// Stationary distribution pi with ||pi P - pi||_inf < tolerance.
/// Direct dense solve for <= 2000 states, damped fixed-point iteration on
/// (P + I)/2 otherwise (same fixed point, aperiodic iteration), capped at
/// 1e7 iterations. Requires irreducibility (unique stationary); throws
/// std::runtime_error "stationary undefined/non-unique" otherwise.
Distribution stationary(const Chain& chain, double tolerance = 1e-12);

/// Expected return time h_jj = 1 / pi_j.
double expected_return_time(const Chain& chain, std::uint32_t state);

/// Expected hitting time E[T_{from,to}] by first-step analysis; for
/// from == to this is the expected return time. Throws if `to` is not
/// reachable from `from`.
double expected_hitting_time(const Chain& chain, std::uint32_t from, std::uint32_t to);

/// Hitting times to `to` from every state (entry `to` is the return time).
std::vector<double> expected_hitting_times(const Chain& chain, std::uint32_t to);

FlowMatrix ergodic_flow(const Chain& chain, const Distribution& pi);

struct EventRate {
  double mu = 0;       // per-step probability of traversing an event edge
  double latency = 0;  // 1 / mu: expected steps between events in stationarity
};

/// mu = sum over event edges of pi_i * p_ij; latency = 1/mu.
/// Throws std::invalid_argument if the chain has no event edges.
EventRate event_rate(const Chain& chain, const Distribution& pi);

}  // namespace lfa::markov
