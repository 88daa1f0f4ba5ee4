#include "lfa/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace lfa::models {

namespace {

constexpr std::size_t kLabelCap = 200000;

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

void check_scu_individual_cap(std::uint32_t n) {
  if (n < 1 || n > 10) throw std::invalid_argument("scu individual chain: n must be in [1, 10]");
}

void check_scu_system_cap(std::uint32_t n) {
  if (n < 1 || n > 10000)
    throw std::invalid_argument("scu system chain: n must be in [1, 10000]");
}

// Digit p of the base-3 state encoding.
inline std::uint32_t scu_digit(std::uint64_t state, std::uint32_t p) {
  static const std::uint64_t pow3[11] = {1,      3,      9,      27,    81,   243,
                                         729,    2187,   6561,   19683, 59049};
  return static_cast<std::uint32_t>((state / pow3[p]) % 3);
}

std::uint64_t scu_success_target(std::uint64_t state, std::uint32_t n, std::uint32_t p) {
  // Stepper p (in CCAS) moves to Read; every other CCAS process to OldCAS.
  std::uint64_t target = 0;
  std::uint64_t pw = 1;
  for (std::uint32_t j = 0; j < n; ++j, pw *= 3) {
    std::uint32_t d = scu_digit(state, j);
    std::uint32_t nd = d;
    if (j == p)
      nd = 0;
    else if (d == 1)
      nd = 2;
    target += nd * pw;
  }
  return target;
}

}  // namespace

std::uint32_t scu_system_index(std::uint32_t n, std::uint32_t a, std::uint32_t b) {
  if (a + b > n || (a == 0 && b == n))
    throw std::invalid_argument("invalid scu system state");
  // States ordered lexicographically by (a, b); (0, n) is skipped.
  std::uint64_t before_a =
      static_cast<std::uint64_t>(a) * (n + 1) - static_cast<std::uint64_t>(a) * (a - 1) / 2;
  std::uint64_t idx = before_a + b - (a > 0 ? 1 : 0);
  return static_cast<std::uint32_t>(idx);
}

markov::Chain build_scu_individual(std::uint32_t n) {
  check_scu_individual_cap(n);
  const std::uint64_t total = ipow(3, n);  // all-OldCAS (= total - 1) excluded
  const std::size_t num_states = total - 1;
  std::vector<std::pair<std::uint32_t, markov::Edge>> edges;
  edges.reserve(num_states * n);
  for (std::uint64_t s = 0; s < num_states; ++s) {
    for (std::uint32_t p = 0; p < n; ++p) {
      std::uint32_t d = scu_digit(s, p);
      std::uint64_t target;
      bool event = false;
      std::uint64_t pw = 1;
      for (std::uint32_t j = 0; j < p; ++j) pw *= 3;
      if (d == 0) {
        target = s + pw;  // Read -> CCAS
      } else if (d == 2) {
        target = s - 2 * pw;  // OldCAS -> Read
      } else {
        target = scu_success_target(s, n, p);
        event = true;
      }
      edges.push_back({static_cast<std::uint32_t>(s),
                       markov::Edge{static_cast<std::uint32_t>(target), 1,
                                    static_cast<std::int64_t>(n), event}});
    }
  }
  std::vector<std::string> labels;
  if (num_states <= kLabelCap) {
    labels.resize(num_states);
    for (std::uint64_t s = 0; s < num_states; ++s) {
      std::string l(n, 'R');
      for (std::uint32_t p = 0; p < n; ++p) l[p] = "RCO"[scu_digit(s, p)];
      labels[s] = std::move(l);
    }
  }
  return markov::make_chain(num_states, std::move(edges), std::move(labels));
}

markov::Chain build_scu_system(std::uint32_t n) {
  check_scu_system_cap(n);
  const std::size_t num_states =
      static_cast<std::size_t>(n + 1) * (n + 2) / 2 - 1;  // (0, n) excluded
  std::vector<std::pair<std::uint32_t, markov::Edge>> edges;
  edges.reserve(num_states * 3);
  const auto den = static_cast<std::int64_t>(n);
  for (std::uint32_t a = 0; a <= n; ++a) {
    for (std::uint32_t b = 0; a + b <= n; ++b) {
      if (a == 0 && b == n) continue;
      std::uint32_t from = scu_system_index(n, a, b);
      std::uint32_t c = n - a - b;
      if (a > 0)
        edges.push_back({from, markov::Edge{scu_system_index(n, a - 1, b), a, den, false}});
      if (b > 0)
        edges.push_back({from, markov::Edge{scu_system_index(n, a + 1, b - 1), b, den, false}});
      if (c > 0)
        edges.push_back(
            {from, markov::Edge{scu_system_index(n, a + 1, n - a - 1), c, den, true}});
    }
  }
  std::vector<std::string> labels;
  if (num_states <= kLabelCap) {
    labels.resize(num_states);
    for (std::uint32_t a = 0; a <= n; ++a)
      for (std::uint32_t b = 0; a + b <= n; ++b) {
        if (a == 0 && b == n) continue;
        labels[scu_system_index(n, a, b)] =
            "(" + std::to_string(a) + "," + std::to_string(b) + ")";
      }
  }
  return markov::make_chain(num_states, std::move(edges), std::move(labels));
}

lifting::LiftingMap scu_lifting_map(std::uint32_t n) {
  check_scu_individual_cap(n);
  const std::uint64_t num_fine = ipow(3, n) - 1;
  lifting::LiftingMap map;
  map.num_coarse = static_cast<std::size_t>(n + 1) * (n + 2) / 2 - 1;
  map.fine_to_coarse.resize(num_fine);
  for (std::uint64_t s = 0; s < num_fine; ++s) {
    std::uint32_t a = 0, b = 0;
    for (std::uint32_t p = 0; p < n; ++p) {
      std::uint32_t d = scu_digit(s, p);
      a += d == 0;
      b += d == 2;
    }
    map.fine_to_coarse[s] = scu_system_index(n, a, b);
  }
  return map;
}

std::vector<EdgeRef> scu_process_success_edges(std::uint32_t n, std::uint32_t process) {
  check_scu_individual_cap(n);
  if (process >= n) throw std::invalid_argument("process out of range");
  const std::uint64_t num_fine = ipow(3, n) - 1;
  std::vector<EdgeRef> result;
  for (std::uint64_t s = 0; s < num_fine; ++s)
    if (scu_digit(s, process) == 1)
      result.push_back({static_cast<std::uint32_t>(s),
                        static_cast<std::uint32_t>(scu_success_target(s, n, process))});
  return result;
}

markov::Chain build_fai_individual(std::uint32_t n) {
  if (n < 1 || n > 20) throw std::invalid_argument("fai individual chain: n must be in [1, 20]");
  const std::uint64_t num_states = (1ull << n) - 1;  // non-empty subsets, index = mask - 1
  std::vector<std::pair<std::uint32_t, markov::Edge>> edges;
  edges.reserve(num_states * n);
  const auto den = static_cast<std::int64_t>(n);
  for (std::uint64_t mask = 1; mask <= num_states; ++mask) {
    auto from = static_cast<std::uint32_t>(mask - 1);
    for (std::uint32_t p = 0; p < n; ++p) {
      std::uint64_t bit = 1ull << p;
      if (mask & bit)
        edges.push_back({from, markov::Edge{static_cast<std::uint32_t>(bit - 1), 1, den, true}});
      else
        edges.push_back(
            {from, markov::Edge{static_cast<std::uint32_t>((mask | bit) - 1), 1, den, false}});
    }
  }
  std::vector<std::string> labels;
  if (num_states <= kLabelCap) {
    labels.resize(num_states);
    for (std::uint64_t mask = 1; mask <= num_states; ++mask) {
      std::string l(n, '0');
      for (std::uint32_t p = 0; p < n; ++p)
        if (mask & (1ull << p)) l[p] = '1';
      labels[mask - 1] = std::move(l);
    }
  }
  return markov::make_chain(num_states, std::move(edges), std::move(labels));
}

markov::Chain build_fai_global(std::uint32_t n) {
  if (n < 1 || n > 1000000)
    throw std::invalid_argument("fai global chain: n must be in [1, 1000000]");
  std::vector<std::pair<std::uint32_t, markov::Edge>> edges;
  edges.reserve(2 * n);
  const auto den = static_cast<std::int64_t>(n);
  for (std::uint32_t i = 1; i <= n; ++i) {
    std::uint32_t from = i - 1;
    edges.push_back({from, markov::Edge{0, i, den, true}});  // v_i -> v_1, success
    if (i < n) edges.push_back({from, markov::Edge{i, static_cast<std::int64_t>(n - i), den, false}});
  }
  std::vector<std::string> labels;
  if (n <= kLabelCap) {
    labels.resize(n);
    for (std::uint32_t i = 1; i <= n; ++i) labels[i - 1] = "v" + std::to_string(i);
  }
  return markov::make_chain(n, std::move(edges), std::move(labels));
}

lifting::LiftingMap fai_lifting_map(std::uint32_t n) {
  if (n < 1 || n > 20) throw std::invalid_argument("fai lifting map: n must be in [1, 20]");
  lifting::LiftingMap map;
  map.num_coarse = n;
  map.fine_to_coarse.resize((1ull << n) - 1);
  for (std::uint64_t mask = 1; mask < (1ull << n); ++mask)
    map.fine_to_coarse[mask - 1] = static_cast<std::uint32_t>(std::popcount(mask)) - 1;
  return map;
}

std::vector<EdgeRef> fai_process_success_edges(std::uint32_t n, std::uint32_t process) {
  if (n < 1 || n > 20) throw std::invalid_argument("n out of range");
  if (process >= n) throw std::invalid_argument("process out of range");
  std::vector<EdgeRef> result;
  const std::uint64_t bit = 1ull << process;
  for (std::uint64_t mask = 1; mask < (1ull << n); ++mask)
    if (mask & bit)
      result.push_back({static_cast<std::uint32_t>(mask - 1),
                        static_cast<std::uint32_t>(bit - 1)});
  return result;
}

std::vector<double> fai_hitting_recurrence(std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  std::vector<double> z(n);
  z[0] = 1.0;
  for (std::uint32_t i = 1; i < n; ++i)
    z[i] = (static_cast<double>(i) / n) * z[i - 1] + 1.0;
  return z;
}

double fai_expected_return_time(std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  double sum = 1.0, term = 1.0;
  const auto dn = static_cast<double>(n);
  for (std::uint64_t j = 1; j < n; ++j) {
    term *= 1.0 - static_cast<double>(j) / dn;
    sum += term;
    if (term < 1e-18) break;
  }
  return sum;
}

namespace {

void check_parallel_caps(std::uint32_t n, std::uint32_t q, bool individual) {
  if (n < 1 || q < 1) throw std::invalid_argument("parallel chain: n and q must be positive");
  if (individual) {
    double states = std::pow(static_cast<double>(q), static_cast<double>(n));
    if (states > 1e6 + 0.5)
      throw std::invalid_argument("parallel individual chain: q^n must be <= 1e6");
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> parallel_occupancies(std::uint32_t n,
                                                             std::uint32_t q) {
  check_parallel_caps(n, q, false);
  std::vector<std::vector<std::uint32_t>> occs;
  std::vector<std::uint32_t> cur(q, 0);
  // Lexicographic enumeration of q-part compositions of n.
  auto rec = [&](auto&& self, std::uint32_t pos, std::uint32_t remaining) -> void {
    if (pos + 1 == q) {
      cur[pos] = remaining;
      occs.push_back(cur);
      return;
    }
    for (std::uint32_t v = 0; v <= remaining; ++v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, n);
  if (occs.size() > 100000)
    throw std::invalid_argument("parallel system chain: too many states (> 1e5)");
  return occs;
}

markov::Chain build_parallel_system(std::uint32_t n, std::uint32_t q) {
  auto occs = parallel_occupancies(n, q);
  std::map<std::vector<std::uint32_t>, std::uint32_t> index;
  for (std::size_t i = 0; i < occs.size(); ++i)
    index[occs[i]] = static_cast<std::uint32_t>(i);
  std::vector<std::pair<std::uint32_t, markov::Edge>> edges;
  const auto den = static_cast<std::int64_t>(n);
  for (std::size_t s = 0; s < occs.size(); ++s) {
    for (std::uint32_t i = 0; i < q; ++i) {
      if (occs[s][i] == 0) continue;
      std::vector<std::uint32_t> next = occs[s];
      --next[i];
      ++next[(i + 1) % q];
      edges.push_back({static_cast<std::uint32_t>(s),
                       markov::Edge{index.at(next), occs[s][i], den, i + 1 == q}});
    }
  }
  std::vector<std::string> labels;
  if (occs.size() <= kLabelCap) {
    labels.resize(occs.size());
    for (std::size_t s = 0; s < occs.size(); ++s) {
      std::string l;
      for (std::uint32_t i = 0; i < q; ++i) {
        if (i) l += ",";
        l += std::to_string(occs[s][i]);
      }
      labels[s] = std::move(l);
    }
  }
  return markov::make_chain(occs.size(), std::move(edges), std::move(labels));
}

markov::Chain build_parallel_individual(std::uint32_t n, std::uint32_t q) {
  check_parallel_caps(n, q, true);
  const std::uint64_t num_states = ipow(q, n);
  std::vector<std::pair<std::uint32_t, markov::Edge>> edges;
  edges.reserve(num_states * n);
  const auto den = static_cast<std::int64_t>(n);
  for (std::uint64_t s = 0; s < num_states; ++s) {
    std::uint64_t pw = 1;
    for (std::uint32_t p = 0; p < n; ++p, pw *= q) {
      auto digit = static_cast<std::uint32_t>((s / pw) % q);
      bool wrap = digit + 1 == q;
      std::uint64_t target = wrap ? s - static_cast<std::uint64_t>(digit) * pw : s + pw;
      edges.push_back({static_cast<std::uint32_t>(s),
                       markov::Edge{static_cast<std::uint32_t>(target), 1, den, wrap}});
    }
  }
  std::vector<std::string> labels;
  if (num_states <= kLabelCap) {
    labels.resize(num_states);
    for (std::uint64_t s = 0; s < num_states; ++s) {
      std::string l;
      std::uint64_t pw = 1;
      for (std::uint32_t p = 0; p < n; ++p, pw *= q) {
        if (p) l += ",";
        l += std::to_string((s / pw) % q);
      }
      labels[s] = std::move(l);
    }
  }
  return markov::make_chain(num_states, std::move(edges), std::move(labels));
}

lifting::LiftingMap parallel_lifting_map(std::uint32_t n, std::uint32_t q) {
  check_parallel_caps(n, q, true);
  auto occs = parallel_occupancies(n, q);
  std::map<std::vector<std::uint32_t>, std::uint32_t> index;
  for (std::size_t i = 0; i < occs.size(); ++i)
    index[occs[i]] = static_cast<std::uint32_t>(i);
  const std::uint64_t num_fine = ipow(q, n);
  lifting::LiftingMap map;
  map.num_coarse = occs.size();
  map.fine_to_coarse.resize(num_fine);
  std::vector<std::uint32_t> occ(q);
  for (std::uint64_t s = 0; s < num_fine; ++s) {
    std::fill(occ.begin(), occ.end(), 0);
    std::uint64_t v = s;
    for (std::uint32_t p = 0; p < n; ++p) {
      ++occ[v % q];
      v /= q;
    }
    map.fine_to_coarse[s] = index.at(occ);
  }
  return map;
}

std::vector<EdgeRef> parallel_process_success_edges(std::uint32_t n, std::uint32_t q,
                                                    std::uint32_t process) {
  check_parallel_caps(n, q, true);
  if (process >= n) throw std::invalid_argument("process out of range");
  const std::uint64_t num_states = ipow(q, n);
  const std::uint64_t pw = ipow(q, process);
  std::vector<EdgeRef> result;
  for (std::uint64_t s = 0; s < num_states; ++s) {
    auto digit = static_cast<std::uint32_t>((s / pw) % q);
    if (digit + 1 == q)
      result.push_back({static_cast<std::uint32_t>(s),
                        static_cast<std::uint32_t>(s - static_cast<std::uint64_t>(digit) * pw)});
  }
  return result;
}

}  // namespace lfa::models
