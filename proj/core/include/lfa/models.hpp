#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lfa/lifting.hpp"
#include "lfa/markov.hpp"

namespace lfa::models {

/// Per-process extended local state of the scan-validate loop, as seen by the
/// whole system: about to read the decision register, about to CAS with the
/// current value, or about to CAS with a stale value.
enum class ExtendedLocalState : std::uint8_t { Read = 0, CCAS = 1, OldCAS = 2 };

using EdgeRef = std::pair<std::uint32_t, std::uint32_t>;  // (from, to)

// --- Scan-validate (CAS retry loop) chains -------------------------------
//
// Individual chain: one state per n-vector of extended local states, minus
// the impossible all-OldCAS vector; 3^n - 1 states. State index = base-3
// encoding with digit p for process p (Read=0, CCAS=1, OldCAS=2).
// System chain: states (a, b) = (#Read, #OldCAS) with a + b <= n and
// (a, b) != (0, n), ordered lexicographically. A scheduled process moves
//   Read -> CCAS              (system: (a,b) -> (a-1,b)   w.p. a/n)
//   OldCAS -> Read            (system: (a,b) -> (a+1,b-1) w.p. b/n)
//   CCAS -> Read, success; every other CCAS process -> OldCAS
//                             (system: (a,b) -> (a+1,n-a-1) w.p. (n-a-b)/n)
// Success edges are marked as events.
//
// Labels are generated for chains up to 200000 states (strings over
// {R,C,O} for the individual chain, "(a,b)" for the system chain) and left
// empty beyond that.

markov::Chain build_scu_individual(std::uint32_t n);  // 1 <= n <= 10
markov::Chain build_scu_system(std::uint32_t n);      // 1 <= n <= 10000
lifting::LiftingMap scu_lifting_map(std::uint32_t n);

/// Success edges of one fixed process in the individual chain.
std::vector<EdgeRef> scu_process_success_edges(std::uint32_t n, std::uint32_t process);

/// Dense index of system state (a, b).
std::uint32_t scu_system_index(std::uint32_t n, std::uint32_t a, std::uint32_t b);

// --- Fetch-and-increment counter chains ----------------------------------
//
// Individual chain: one state per non-empty subset S of processes holding
// the current counter value; 2^n - 1 states, index = bitmask - 1. A
// scheduled process in S wins (success) and the new holder set is {p}; a
// scheduled process outside S learns the value and joins. Global chain:
// states v_1..v_n (index i-1), v_i -> v_1 w.p. i/n (success, the v_1
// self-loop included), v_i -> v_{i+1} w.p. 1 - i/n.

markov::Chain build_fai_individual(std::uint32_t n);  // 1 <= n <= 20
markov::Chain build_fai_global(std::uint32_t n);      // 1 <= n <= 1000000
lifting::LiftingMap fai_lifting_map(std::uint32_t n);

std::vector<EdgeRef> fai_process_success_edges(std::uint32_t n, std::uint32_t process);

/// Z[0] = 1, Z[i] = (i/n) Z[i-1] + 1: Z[i] is the expected number of steps
/// for the global chain to reach v_1 from v_{n-i}; Z[n-1] is the expected
/// return time of v_1.
std::vector<double> fai_hitting_recurrence(std::uint32_t n);

/// Z[n-1] evaluated directly as sum_{j>=0} prod_{m=1..j} (1 - m/n) with the
/// tail truncated below 1e-18; O(sqrt(n)) time, agrees with the recurrence
/// to ~1e-15.
double fai_expected_return_time(std::uint64_t n);

// --- Parallel (contention-free) chains ------------------------------------
//
// Each process cycles a private counter 0..q-1; a step increments it mod q
// and a wrap to 0 is a completion. Individual chain: q^n counter vectors,
// index = base-q encoding. System chain: occupancy vectors (v_0..v_{q-1})
// with sum n, enumerated lexicographically.

markov::Chain build_parallel_individual(std::uint32_t n, std::uint32_t q);  // q^n <= 1e6
markov::Chain build_parallel_system(std::uint32_t n, std::uint32_t q);      // <= 1e5 states
lifting::LiftingMap parallel_lifting_map(std::uint32_t n, std::uint32_t q);

std::vector<EdgeRef> parallel_process_success_edges(std::uint32_t n, std::uint32_t q,
                                                    std::uint32_t process);

/// Occupancy vectors of the parallel system chain in index order.
std::vector<std::vector<std::uint32_t>> parallel_occupancies(std::uint32_t n,
                                                             std::uint32_t q);

}  // namespace lfa::models
