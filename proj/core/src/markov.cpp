#include "lfa/markov.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lfa::markov {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

// a/b + c/d reduced; throws on overflow of the unreduced cross products.
void add_rational(std::int64_t& a, std::int64_t& b, std::int64_t c, std::int64_t d) {
  __int128 num = static_cast<__int128>(a) * d + static_cast<__int128>(c) * b;
  __int128 den = static_cast<__int128>(b) * d;
  if (num < std::numeric_limits<std::int64_t>::min() ||
      num > std::numeric_limits<std::int64_t>::max() ||
      den > std::numeric_limits<std::int64_t>::max())
    throw std::overflow_error("rational addition overflow");
  std::int64_t g = gcd64(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  if (g == 0) g = 1;
  a = static_cast<std::int64_t>(num) / g;
  b = static_cast<std::int64_t>(den) / g;
}

// Forward BFS over the support graph from `start`; returns visited flags.
std::vector<char> reach_forward(const Chain& c, std::uint32_t start) {
  std::vector<char> seen(c.num_states, 0);
  std::deque<std::uint32_t> queue{start};
  seen[start] = 1;
  while (!queue.empty()) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    for (std::size_t e = c.row_begin(u); e < c.row_end(u); ++e) {
      const Edge& ed = c.edges[e];
      if (ed.num == 0) continue;
      if (!seen[ed.to]) {
        seen[ed.to] = 1;
        queue.push_back(ed.to);
      }
    }
  }
  return seen;
}

std::vector<char> reach_backward(const Chain& c, std::uint32_t start) {
  // Build reverse adjacency once.
  std::vector<std::size_t> indeg(c.num_states + 1, 0);
  for (std::size_t i = 0; i < c.num_states; ++i)
    for (std::size_t e = c.row_begin(i); e < c.row_end(i); ++e)
      if (c.edges[e].num != 0) ++indeg[c.edges[e].to + 1];
  for (std::size_t i = 0; i < c.num_states; ++i) indeg[i + 1] += indeg[i];
  std::vector<std::uint32_t> radj(indeg.back());
  {
    std::vector<std::size_t> fill(indeg.begin(), indeg.end() - 1);
    for (std::size_t i = 0; i < c.num_states; ++i)
      for (std::size_t e = c.row_begin(i); e < c.row_end(i); ++e)
        if (c.edges[e].num != 0) radj[fill[c.edges[e].to]++] = static_cast<std::uint32_t>(i);
  }
  std::vector<char> seen(c.num_states, 0);
  std::deque<std::uint32_t> queue{start};
  seen[start] = 1;
  while (!queue.empty()) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    for (std::size_t e = indeg[u]; e < indeg[u + 1]; ++e) {
      std::uint32_t v = radj[e];
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

Distribution stationary_dense(const Chain& c, double tolerance);
Distribution stationary_damped(const Chain& c, double tolerance);

double residual_inf(const Chain& c, const std::vector<double>& pi) {
  std::vector<double> piP(c.num_states, 0.0);
  for (std::size_t i = 0; i < c.num_states; ++i)
    for (std::size_t e = c.row_begin(i); e < c.row_end(i); ++e)
      piP[c.edges[e].to] += pi[i] * c.edges[e].prob();
  double r = 0;
  for (std::size_t i = 0; i < c.num_states; ++i) r = std::max(r, std::abs(piP[i] - pi[i]));
  return r;
}

}  // namespace

Chain make_chain(std::size_t num_states,
                 std::vector<std::pair<std::uint32_t, Edge>> edge_list,
                 std::vector<std::string> labels) {
  for (const auto& [from, e] : edge_list) {
    if (from >= num_states || e.to >= num_states)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.den <= 0) throw std::invalid_argument("edge denominator must be positive");
  }
  std::sort(edge_list.begin(), edge_list.end(),
            [](const auto& x, const auto& y) {
              return x.first != y.first ? x.first < y.first : x.second.to < y.second.to;
            });
  Chain c;
  c.num_states = num_states;
  c.row_ptr.assign(num_states + 1, 0);
  c.edges.reserve(edge_list.size());
  std::size_t current_row = 0;
  for (const auto& [from, e] : edge_list) {
    while (current_row <= from) c.row_ptr[current_row++] = c.edges.size();
    bool same_cell = c.edges.size() > c.row_ptr[from] && c.edges.back().to == e.to;
    if (same_cell) {
      Edge& back = c.edges.back();
      add_rational(back.num, back.den, e.num, e.den);
      back.event = back.event || e.event;
    } else {
      c.edges.push_back(e);
    }
  }
  while (current_row <= num_states) c.row_ptr[current_row++] = c.edges.size();
  if (!labels.empty() && labels.size() != num_states)
    throw std::invalid_argument("label count mismatch");
  c.labels = std::move(labels);
  return c;
}

Chain with_event_edges(const Chain& chain,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& events) {
  Chain c = chain;
  for (auto& e : c.edges) e.event = false;
  std::size_t applied = 0;
  for (const auto& [from, to] : events) {
    if (from >= c.num_states) throw std::invalid_argument("event edge out of range");
    for (std::size_t e = c.row_begin(from); e < c.row_end(from); ++e) {
      if (c.edges[e].to == to) {
        c.edges[e].event = true;
        ++applied;
        break;
      }
    }
  }
  if (applied != events.size())
    throw std::invalid_argument("event edge outside transition support");
  return c;
}

ValidationReport validate(const Chain& chain) {
  ValidationReport report;
  for (std::size_t i = 0; i < chain.num_states; ++i) {
    // Exact rational row sum when the cross products stay in range,
    // floating point otherwise.
    std::int64_t num = 0, den = 1;
    bool exact = true;
    double fsum = 0;
    for (std::size_t e = chain.row_begin(i); e < chain.row_end(i); ++e) {
      const Edge& ed = chain.edges[e];
      fsum += ed.prob();
      if (ed.num < 0 || ed.num > ed.den)
        report.out_of_range_edges.push_back(static_cast<std::uint32_t>(e));
      if (exact) {
        try {
          add_rational(num, den, ed.num, ed.den);
        } catch (const std::overflow_error&) {
          exact = false;
        }
      }
    }
    bool row_ok = exact ? (num == den) : (std::abs(fsum - 1.0) <= 1e-12);
    if (!row_ok)
      report.row_sum_violations.push_back({static_cast<std::uint32_t>(i), fsum});
  }
  auto seen = reach_forward(chain, 0);
  for (std::size_t i = 0; i < chain.num_states; ++i)
    if (!seen[i]) report.unreachable_states.push_back(static_cast<std::uint32_t>(i));
  return report;
}

bool is_irreducible(const Chain& chain) {
  if (chain.num_states == 0) return false;
  if (chain.num_states == 1) return true;
  auto fwd = reach_forward(chain, 0);
  if (std::find(fwd.begin(), fwd.end(), 0) != fwd.end()) return false;
  auto bwd = reach_backward(chain, 0);
  return std::find(bwd.begin(), bwd.end(), 0) == bwd.end();
}

std::uint32_t period(const Chain& chain) {
  if (!is_irreducible(chain)) throw std::invalid_argument("period: chain not irreducible");
  if (chain.num_states == 1) return 1;
  // BFS levels from state 0; period = gcd over support edges of d[u] + 1 - d[v].
  std::vector<std::int64_t> level(chain.num_states, -1);
  std::deque<std::uint32_t> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    for (std::size_t e = chain.row_begin(u); e < chain.row_end(u); ++e) {
      const Edge& ed = chain.edges[e];
      if (ed.num == 0) continue;
      if (level[ed.to] < 0) {
        level[ed.to] = level[u] + 1;
        queue.push_back(ed.to);
      }
    }
  }
  std::int64_t g = 0;
  for (std::size_t u = 0; u < chain.num_states; ++u)
    for (std::size_t e = chain.row_begin(u); e < chain.row_end(u); ++e) {
      const Edge& ed = chain.edges[e];
      if (ed.num == 0) continue;
      g = gcd64(g, level[u] + 1 - level[ed.to]);
    }
  return g == 0 ? 1u : static_cast<std::uint32_t>(g);
}

bool is_ergodic(const Chain& chain) {
  if (chain.num_states == 1) return true;
  return is_irreducible(chain) && period(chain) == 1;
}

namespace {

Distribution stationary_dense(const Chain& c, double tolerance) {
  const auto n = static_cast<Eigen::Index>(c.num_states);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < c.num_states; ++i)
    for (std::size_t e = c.row_begin(i); e < c.row_end(i); ++e)
      A(c.edges[e].to, static_cast<Eigen::Index>(i)) += c.edges[e].prob();
  A -= Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd x = A.partialPivLu().solve(b);
  Distribution pi;
  pi.probabilities.assign(x.data(), x.data() + n);
  double sum = 0;
  for (auto& p : pi.probabilities) {
    if (p < 0 && p > -1e-12) p = 0;
    sum += p;
  }
  for (auto& p : pi.probabilities) p /= sum;
  double r = residual_inf(c, pi.probabilities);
  if (!(r < tolerance)) return stationary_damped(c, tolerance);
  return pi;
}

Distribution stationary_damped(const Chain& c, double tolerance) {
  const std::size_t n = c.num_states;
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), y(n);
  constexpr std::size_t kMaxIters = 10'000'000;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < kMaxIters; ++it) {
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * x[i];
    for (std::size_t i = 0; i < n; ++i) {
      double xi = 0.5 * x[i];
      if (xi == 0) continue;
      for (std::size_t e = c.row_begin(i); e < c.row_end(i); ++e)
        y[c.edges[e].to] += xi * c.edges[e].prob();
    }
    residual = 0;
    for (std::size_t i = 0; i < n; ++i)
      residual = std::max(residual, 2.0 * std::abs(y[i] - x[i]));
    x.swap(y);
    if (residual < tolerance) {
      double sum = std::accumulate(x.begin(), x.end(), 0.0);
      for (auto& p : x) p /= sum;
      return Distribution{std::move(x)};
    }
  }
  throw std::runtime_error("stationary iteration budget exhausted, residual " +
                           std::to_string(residual));
}

}  // namespace

Distribution stationary(const Chain& chain, double tolerance) {
  if (!is_irreducible(chain))
    throw std::runtime_error("stationary undefined/non-unique: chain is not irreducible");
  if (chain.num_states <= 2000) return stationary_dense(chain, tolerance);
  return stationary_damped(chain, tolerance);
}

double expected_return_time(const Chain& chain, std::uint32_t state) {
  if (state >= chain.num_states) throw std::invalid_argument("state out of range");
  Distribution pi = stationary(chain);
  return 1.0 / pi[state];
}

std::vector<double> expected_hitting_times(const Chain& chain, std::uint32_t to) {
  if (to >= chain.num_states) throw std::invalid_argument("state out of range");
  const std::size_t n = chain.num_states;
  auto reaches = reach_backward(chain, to);  // states that can reach `to`
  // Unknowns: h_i for i != to with reaches[i]; h_i = 1 + sum_{j != to} p_ij h_j.
  std::vector<std::int64_t> col(n, -1);
  std::vector<std::uint32_t> unknowns;
  for (std::size_t i = 0; i < n; ++i)
    if (i != to && reaches[i]) {
      col[i] = static_cast<std::int64_t>(unknowns.size());
      unknowns.push_back(static_cast<std::uint32_t>(i));
    }
  const auto m = static_cast<Eigen::Index>(unknowns.size());
  std::vector<double> h(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd sol;
  if (m > 0) {
    if (m <= 2000) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
      Eigen::VectorXd b = Eigen::VectorXd::Ones(m);
      for (Eigen::Index r = 0; r < m; ++r) {
        std::uint32_t i = unknowns[static_cast<std::size_t>(r)];
        for (std::size_t e = chain.row_begin(i); e < chain.row_end(i); ++e) {
          const Edge& ed = chain.edges[e];
          if (ed.to != to && col[ed.to] >= 0)
            A(r, static_cast<Eigen::Index>(col[ed.to])) -= ed.prob();
        }
      }
      sol = A.partialPivLu().solve(b);
    } else {
      using Trip = Eigen::Triplet<double>;
      std::vector<Trip> trips;
      trips.reserve(chain.edges.size() + static_cast<std::size_t>(m));
      for (Eigen::Index r = 0; r < m; ++r) {
        std::uint32_t i = unknowns[static_cast<std::size_t>(r)];
        double diag = 1.0;
        for (std::size_t e = chain.row_begin(i); e < chain.row_end(i); ++e) {
          const Edge& ed = chain.edges[e];
          if (ed.to == to || col[ed.to] < 0) continue;
          if (static_cast<Eigen::Index>(col[ed.to]) == r)
            diag -= ed.prob();
          else
            trips.emplace_back(r, static_cast<Eigen::Index>(col[ed.to]), -ed.prob());
        }
        trips.emplace_back(r, r, diag);
      }
      Eigen::SparseMatrix<double> A(m, m);
      A.setFromTriplets(trips.begin(), trips.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.analyzePattern(A);
      lu.factorize(A);
      if (lu.info() != Eigen::Success)
        throw std::runtime_error("hitting-time sparse factorization failed");
      Eigen::VectorXd b = Eigen::VectorXd::Ones(m);
      sol = lu.solve(b);
    }
    for (Eigen::Index r = 0; r < m; ++r) h[unknowns[static_cast<std::size_t>(r)]] = sol(r);
  }
  // Return time for `to` itself: 1 + sum_j p_to,j h_j (h_to counts as 0).
  double rt = 1.0;
  bool finite = true;
  for (std::size_t e = chain.row_begin(to); e < chain.row_end(to); ++e) {
    const Edge& ed = chain.edges[e];
    if (ed.to == to || ed.num == 0) continue;
    if (!reaches[ed.to]) {
      finite = false;
      continue;
    }
    rt += ed.prob() * h[ed.to];
  }
  h[to] = finite ? rt : std::numeric_limits<double>::infinity();
  return h;
}

double expected_hitting_time(const Chain& chain, std::uint32_t from, std::uint32_t to) {
  if (from >= chain.num_states || to >= chain.num_states)
    throw std::invalid_argument("state out of range");
  auto h = expected_hitting_times(chain, to);
  if (!std::isfinite(h[from])) throw std::runtime_error("infinite hitting time");
  return h[from];
}

FlowMatrix ergodic_flow(const Chain& chain, const Distribution& pi) {
  if (pi.size() != chain.num_states) throw std::invalid_argument("dimension mismatch");
  FlowMatrix q;
  q.num_states = chain.num_states;
  q.row_ptr = chain.row_ptr;
  q.flows.reserve(chain.edges.size());
  for (std::size_t i = 0; i < chain.num_states; ++i)
    for (std::size_t e = chain.row_begin(i); e < chain.row_end(i); ++e)
      q.flows.emplace_back(chain.edges[e].to, pi[i] * chain.edges[e].prob());
  return q;
}

EventRate event_rate(const Chain& chain, const Distribution& pi) {
  if (pi.size() != chain.num_states) throw std::invalid_argument("dimension mismatch");
  bool any = false;
  double mu = 0;
  for (std::size_t i = 0; i < chain.num_states; ++i)
    for (std::size_t e = chain.row_begin(i); e < chain.row_end(i); ++e)
      if (chain.edges[e].event) {
        any = true;
        mu += pi[i] * chain.edges[e].prob();
      }
  if (!any) throw std::invalid_argument("event_rate: chain has no event edges");
  return EventRate{mu, 1.0 / mu};
}

}  // namespace lfa::markov
