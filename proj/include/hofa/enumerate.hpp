#ifndef HOFA_ENUMERATE_HPP
#define HOFA_ENUMERATE_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hofa/error.hpp"
#include "hofa/field.hpp"
#include "hofa/polynomial.hpp"

namespace hofa {

/// Caps exhaustive sweeps; the default is 10^9 evaluated points.
struct Budget {
  std::uint64_t max_points = 1'000'000'000;
};

namespace detail {
inline std::atomic<unsigned>& thread_override() {
  static std::atomic<unsigned> value{0};
  return value;
}
} // namespace detail

/// Worker threads for exhaustive sweeps: set_thread_count(), else the
/// HOFA_THREADS environment variable, else the hardware concurrency.
inline unsigned thread_count() {
  if (unsigned t = detail::thread_override().load()) return t;
  if (const char* env = std::getenv("HOFA_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}
inline void set_thread_count(unsigned threads) { detail::thread_override().store(threads); }

/// p^nvars if it fits in the budget, otherwise BudgetError naming the
/// feasible envelope.
inline std::uint64_t domain_size(std::uint32_t p, std::size_t nvars, const Budget& budget,
                                 const std::string& what) {
  auto size = checked_power(p, nvars);
  if (!size || *size > budget.max_points) {
    std::size_t feasible = 0;
    while (true) {
      auto s = checked_power(p, feasible + 1);
      if (!s || *s > budget.max_points) break;
      ++feasible;
    }
    throw BudgetError(what + ": exhaustive enumeration of " + std::to_string(p) + "^" +
                      std::to_string(nvars) + " points exceeds budget of " +
                      std::to_string(budget.max_points) + " (feasible: at most " +
                      std::to_string(feasible) + " variables over F_" + std::to_string(p) +
                      "); use sampling or raise --budget");
  }
  return *size;
}

/// Flattened polynomial for fast repeated evaluation.
class CompiledPolynomial {
public:
  explicit CompiledPolynomial(const Polynomial& f) : field_(f.field()), nvars_(f.nvars()) {
    for (const auto& [e, c] : f.terms()) {
      Term t{c.value, static_cast<std::uint32_t>(factors_.size()), 0};
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) {
          factors_.push_back({static_cast<std::uint32_t>(i), e[i]});
          ++t.count;
        }
      terms_.push_back(t);
    }
  }

  std::size_t nvars() const { return nvars_; }
  const FieldSpec& field() const { return field_; }

  std::uint32_t operator()(std::span<const std::uint32_t> x) const {
    const std::uint64_t p = field_.p();
    std::uint64_t sum = 0;
    for (const Term& t : terms_) {
      std::uint64_t v = t.coeff;
      for (std::uint32_t k = 0; k < t.count && v; ++k) {
        const Factor& f = factors_[t.first + k];
        const std::uint64_t base = x[f.var];
        for (std::uint16_t j = 0; j < f.exp; ++j) v = v * base % p;
      }
      sum += v;
      if (sum >= p) sum -= p;
    }
    return static_cast<std::uint32_t>(sum);
  }

private:
  struct Term {
    std::uint32_t coeff;
    std::uint32_t first;
    std::uint32_t count;
  };
  struct Factor {
    std::uint32_t var;
    std::uint16_t exp;
  };
  FieldSpec field_;
  std::size_t nvars_;
  std::vector<Term> terms_;
  std::vector<Factor> factors_;
};

/// Writes the digits of index (base p, last coordinate fastest) into x.
inline void decode_point(std::uint64_t index, std::uint32_t p, std::span<std::uint32_t> x) {
  for (std::size_t i = x.size(); i > 0; --i) {
    x[i - 1] = static_cast<std::uint32_t>(index % p);
    index /= p;
  }
}

/// Odometer increment, last coordinate fastest (row-major order).
inline void next_point(std::uint32_t p, std::span<std::uint32_t> x) {
  for (std::size_t i = x.size(); i > 0; --i) {
    if (++x[i - 1] < p) return;
    x[i - 1] = 0;
  }
}

/// Calls visit(x) for every x in F_p^nvars in row-major order.
template <class Visit>
void for_each_point(std::uint32_t p, std::size_t nvars, Visit&& visit) {
  const auto total = checked_power(p, nvars);
  detail::require(total.has_value(), "domain too large");
  std::vector<std::uint32_t> x(nvars, 0);
  for (std::uint64_t i = 0; i < *total; ++i) {
    visit(std::span<const std::uint32_t>(x));
    next_point(p, x);
  }
}

/// Per-worker accumulation over F_p^nvars. Each worker owns a contiguous
/// index range and an accumulator from make(); visit(acc, x) updates it; the
/// accumulators are then folded left-to-right with merge(into, from).
/// Deterministic whenever merge is associative and commutative.
template <class Acc, class Make, class Visit, class Merge>
Acc parallel_accumulate(std::uint32_t p, std::size_t nvars, Make&& make, Visit&& visit,
                        Merge&& merge) {
  const auto total_opt = checked_power(p, nvars);
  detail::require(total_opt.has_value(), "domain too large");
  const std::uint64_t total = *total_opt;
  constexpr std::uint64_t min_chunk = 1u << 15;
  const std::uint64_t workers =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(thread_count(), total / min_chunk));

  auto run = [&](std::uint64_t begin, std::uint64_t end, Acc& acc) {
    std::vector<std::uint32_t> x(nvars);
    decode_point(begin, p, x);
    for (std::uint64_t i = begin; i < end; ++i) {
      visit(acc, std::span<const std::uint32_t>(x));
      next_point(p, x);
    }
  };

  if (workers == 1) {
    Acc acc = make();
    run(0, total, acc);
    return acc;
  }
  std::vector<Acc> parts;
  parts.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w) parts.push_back(make());
  std::vector<std::thread> pool;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = total * w / workers, end = total * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] { run(begin, end, parts[w]); });
  }
  for (auto& t : pool) t.join();
  Acc acc = std::move(parts[0]);
  for (std::uint64_t w = 1; w < workers; ++w) merge(acc, parts[w]);
  return acc;
}

/// Exact histogram of value(x) over F_p^nvars.
template <class Value>
ValueHistogram histogram_over(std::uint32_t p, std::size_t nvars, Value&& value) {
  return parallel_accumulate<ValueHistogram>(
      p, nvars, [p] { return ValueHistogram(p); },
      [&](ValueHistogram& h, std::span<const std::uint32_t> x) { h.add(FieldElement(value(x))); },
      [](ValueHistogram& into, const ValueHistogram& from) { into.merge(from); });
}

/// Exact value histogram of f over all of F_p^n.
inline ValueHistogram value_histogram(const Polynomial& f, const Budget& budget = {}) {
  domain_size(f.field().p(), f.nvars(), budget, "value histogram");
  CompiledPolynomial cf(f);
  return histogram_over(f.field().p(), f.nvars(), cf);
}

/// Values of f at every point of F_p^n, indexed row-major.
inline std::vector<std::uint32_t> value_table(const Polynomial& f, const Budget& budget = {}) {
  const std::uint64_t size = domain_size(f.field().p(), f.nvars(), budget, "value table");
  CompiledPolynomial cf(f);
  std::vector<std::uint32_t> table(size);
  std::uint64_t i = 0;
  for_each_point(f.field().p(), f.nvars(),
                 [&](std::span<const std::uint32_t> x) { table[i++] = cf(x); });
  return table;
}

inline std::vector<FieldElement> to_elements(std::span<const std::uint32_t> x) {
  std::vector<FieldElement> out;
  out.reserve(x.size());
  for (auto v : x) out.emplace_back(v);
  return out;
}

} // namespace hofa

#endif // HOFA_ENUMERATE_HPP
