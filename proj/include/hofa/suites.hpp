#ifndef HOFA_SUITES_HPP
#define HOFA_SUITES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hofa/bias.hpp"
#include "hofa/certificate_io.hpp"
#include "hofa/enumerate.hpp"
#include "hofa/linalg.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/pipelines.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/random.hpp"
#include "hofa/rank.hpp"
#include "hofa/rkstar.hpp"
#include "hofa/text_format.hpp"

// Seeded property suites behind `hofa check`. Each property draws an
// instance, checks it, and on failure shrinks it by deleting terms while it
// keeps failing; the survivor is printed in the polynomial text format.

namespace hofa {

/// Replaceable pieces, so a deliberately broken implementation can be fed
/// through the suites.
struct SuiteHooks {
  std::function<Polynomial(const Polynomial&, int)> derivative =
      [](const Polynomial& f, int d) { return iterated_discrete_derivative_semisurjection(f, d); };
};

/// Polynomials plus integer parameters plus one point.
struct Instance {
  std::vector<Polynomial> polys;
  std::vector<int> ints;
  Point point;
};

struct Property {
  std::string suite;
  std::string name;
  std::function<Instance(Rng&)> generate;
  std::function<bool(const Instance&)> check;
};

struct PropertyResult {
  std::string suite;
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t passed = 0;
  std::optional<std::string> counterexample;  // serialized instance
  std::string error;                          // exception text, if any
};

inline std::string format_instance(const std::string& name, const Instance& inst) {
  std::ostringstream out;
  out << "property=" << name << '\n';
  for (int v : inst.ints) out << "int=" << v << '\n';
  if (!inst.point.empty()) {
    out << "point=";
    for (std::size_t i = 0; i < inst.point.size(); ++i) out << (i ? "," : "") << inst.point[i].value;
    out << '\n';
  }
  for (const auto& f : inst.polys) out << "poly=" << format_polynomial_file(f) << '\n';
  return out.str();
}

/// Inverse of format_instance: (property name, instance).
inline std::pair<std::string, Instance> parse_instance(std::string_view text) {
  detail::CertRecord rec(text);
  rec.allow_only({"property", "int", "point", "poly"});
  std::pair<std::string, Instance> out{rec.get("property").value, {}};
  for (const CertLine* l : rec.all("int")) {
    const bool neg = !l->value.empty() && l->value[0] == '-';
    const auto v = detail::parse_uint(neg ? l->value.substr(1) : l->value, l->line, l->column);
    out.second.ints.push_back(neg ? -static_cast<int>(v) : static_cast<int>(v));
  }
  if (const CertLine* l = rec.find("point"))
    for (auto v : detail::uint_list(*l)) out.second.point.emplace_back(static_cast<std::uint32_t>(v));
  for (const CertLine* l : rec.all("poly")) {
    try {
      out.second.polys.push_back(parse_polynomial(l->value));
    } catch (const ParseError& e) {
      throw ParseError(e.reason(), l->line, l->column + e.column() - 1);
    }
  }
  return out;
}

namespace detail {

inline FieldSpec pick_field(Rng& rng, std::initializer_list<std::uint32_t> primes) {
  return FieldSpec(*(primes.begin() + uniform_below(rng, primes.size())));
}

inline Point slice(const Point& x, std::size_t from, std::size_t count) {
  return Point(x.begin() + static_cast<std::ptrdiff_t>(from),
               x.begin() + static_cast<std::ptrdiff_t>(from + count));
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

/// Random certificate target = sum alpha_i beta_i with deg alpha_i +
/// deg beta_i = k; redrawn until the target is nonzero.
inline DecompositionCert random_decomposition(const FieldSpec& F, std::size_t n, int k, int r,
                                              Rng& rng) {
  Polynomial target(F, n);
  std::vector<FactorPair> pairs;
  while (target.is_zero()) {
    target = Polynomial(F, n);
    pairs.clear();
    for (int i = 0; i < r; ++i) {
      const int a = uniform_int(rng, 1, k / 2);
      HomogeneousForm alpha = random_nonzero_form(F, n, a, rng);
      HomogeneousForm beta = random_nonzero_form(F, n, k - a, rng);
      target += alpha.poly() * beta.poly();
      pairs.push_back({std::move(alpha), std::move(beta)});
    }
  }
  return DecompositionCert{HomogeneousForm(std::move(target), k), std::move(pairs)};
}

/// Whether the alphas of each degree are linearly independent.
inline bool alphas_independent(const DecompositionCert& c) {
  const std::size_t n = c.target.nvars();
  std::map<int, std::vector<const Polynomial*>> by_degree;
  for (const auto& pr : c.factors) by_degree[pr.alpha.degree()].push_back(&pr.alpha.poly());
  for (const auto& [deg, polys] : by_degree) {
    const auto basis = monomials_of_degree(n, deg);
    std::map<Exponents, std::size_t, GradedLexLess> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);
    Matrix m(polys.size(), basis.size());
    for (std::size_t r = 0; r < polys.size(); ++r)
      for (const auto& [e, v] : polys[r]->terms()) m.at(r, index.at(e)) = v;
    if (rank(m, c.target.field()) != polys.size()) return false;
  }
  return true;
}

/// E_x e(f(x) - xi . x) for every xi, as complex numbers.
inline std::vector<std::complex<double>> fourier_coefficients(const Polynomial& f) {
  const FieldSpec& F = f.field();
  const std::size_t n = f.nvars();
  std::vector<std::complex<double>> out;
  for_each_point(F.p(), n, [&](std::span<const std::uint32_t> xi) {
    Polynomial g = f;
    for (std::size_t i = 0; i < n; ++i) {
      Exponents e(n, 0);
      e[i] = 1;
      g.add_term(e, F.neg(FieldElement(xi[i])));
    }
    out.push_back(histogram_to_bias(value_histogram(g)).value);
  });
  return out;
}

inline bool near(double a, double b) { return std::abs(a - b) <= kBiasTolerance; }

} // namespace detail

/// Every property, in a fixed order.
inline std::vector<Property> all_properties(const SuiteHooks& hooks = {}) {
  using namespace detail;
  std::vector<Property> ps;
  auto add = [&](const char* suite, const char* name, std::function<Instance(Rng&)> gen,
                 std::function<bool(const Instance&)> check) {
    ps.push_back({suite, name, std::move(gen), std::move(check)});
  };
  const auto derivative = hooks.derivative;

  // ---- identities ----
  add("identities", "derivative-implementations-agree",
      [](Rng& rng) {
        FieldSpec F(5);
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        return Instance{{random_polynomial(F, n, uniform_int(rng, 0, 4), rng)},
                        {uniform_int(rng, 1, 3)}, {}};
      },
      [derivative](const Instance& in) {
        return iterated_discrete_derivative_recursive(in.polys[0], in.ints[0]) ==
               derivative(in.polys[0], in.ints[0]);
      });

  add("identities", "derivative-pointwise",
      [](Rng& rng) {
        FieldSpec F(3);
        return Instance{{random_polynomial(F, 2, uniform_int(rng, 1, 3), rng)},
                        {uniform_int(rng, 1, 3)}, {}};
      },
      [derivative](const Instance& in) {
        const Polynomial& f = in.polys[0];
        const int d = in.ints[0];
        const std::uint32_t p = f.field().p();
        const std::size_t n = f.nvars();
        const auto table = value_table(f);
        auto lookup = [&](std::span<const std::uint32_t> y) {
          std::uint64_t idx = 0;
          for (auto c : y) idx = idx * p + c;
          return table[idx];
        };
        CompiledPolynomial symbolic(derivative(f, d));
        if (symbolic.nvars() != n * static_cast<std::size_t>(d + 1)) return false;
        std::vector<std::uint32_t> scratch(n);
        bool ok = true;
        for_each_point(p, n * static_cast<std::size_t>(d + 1), [&](std::span<const std::uint32_t> pt) {
          if (ok && symbolic(pt) != cube_difference(pt, n, d, p, scratch, lookup)) ok = false;
        });
        return ok;
      });

  add("identities", "formal-derivative-rules",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {5, 7});
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        Point pt = random_point(F, 2 * n + 2, rng);
        return Instance{{random_polynomial(F, n, 3, rng), random_polynomial(F, n, 3, rng)}, {}, pt};
      },
      [](const Instance& in) {
        const Polynomial &f = in.polys[0], &g = in.polys[1];
        const FieldSpec& F = f.field();
        const std::size_t n = f.nvars();
        const Point c = slice(in.point, 0, n), c2 = slice(in.point, n, n);
        const FieldElement a = in.point[2 * n], b = in.point[2 * n + 1];
        Point sum(n);
        for (std::size_t i = 0; i < n; ++i) sum[i] = F.add(F.mul(a, c[i]), F.mul(b, c2[i]));
        const bool product = formal_derivative(f * g, c) ==
                             f * formal_derivative(g, c) + formal_derivative(f, c) * g;
        const bool in_c = formal_derivative(f, sum) ==
                          formal_derivative(f, c).scaled(a) + formal_derivative(f, c2).scaled(b);
        const bool in_f = formal_derivative(f.scaled(a) + g.scaled(b), c) ==
                          formal_derivative(f, c).scaled(a) + formal_derivative(g, c).scaled(b);
        return product && in_c && in_f;
      });

  add("identities", "homogeneous-components-sum",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5, 7});
        return Instance{{random_polynomial(F, static_cast<std::size_t>(uniform_int(rng, 1, 3)),
                                           uniform_int(rng, 0, 4), rng)},
                        {}, {}};
      },
      [](const Instance& in) {
        const Polynomial& f = in.polys[0];
        Polynomial sum(f.field(), f.nvars());
        for (int i = 0; i <= f.degree().value_or(0); ++i) sum += homogeneous_component(f, i).poly();
        return sum == f;
      });

  add("identities", "polarization-symmetric",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {5, 7});
        return Instance{{random_nonzero_form(F, static_cast<std::size_t>(uniform_int(rng, 1, 3)),
                                     uniform_int(rng, 1, 4), rng)
                             .poly()},
                        {}, {}};
      },
      [](const Instance& in) {
        const HomogeneousForm g = HomogeneousForm::of(in.polys[0]);
        const MultilinearForm t = polarize(g);
        std::vector<int> perm(static_cast<std::size_t>(g.degree()));
        std::iota(perm.begin(), perm.end(), 0);
        do {
          if (!(permute_blocks(t, perm) == t)) return false;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return true;
      });

  add("identities", "diagonal-round-trip",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {5, 7});
        return Instance{{random_nonzero_form(F, static_cast<std::size_t>(uniform_int(rng, 1, 3)),
                                     uniform_int(rng, 1, 4), rng)
                             .poly()},
                        {}, {}};
      },
      [](const Instance& in) {
        const HomogeneousForm g = HomogeneousForm::of(in.polys[0]);
        const FieldSpec& F = g.field();
        return diagonal(polarize(g)) ==
               g.poly().scaled(F.factorial(static_cast<unsigned>(g.degree())));
      });

  add("identities", "delta-nabla",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {5, 7});
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        HomogeneousForm g = random_nonzero_form(F, n, uniform_int(rng, 1, 4), rng);
        return Instance{{g.poly()}, {}, random_point(F, n, rng)};
      },
      [](const Instance& in) {
        return check_delta_nabla(HomogeneousForm::of(in.polys[0]), in.point);
      });

  add("identities", "derivative-polarization",
      [](Rng& rng) {
        FieldSpec F(5);
        const int d = uniform_int(rng, 1, 2);
        return Instance{{random_nonzero_form(F, 2, d + 1, rng).poly()}, {d}, {}};
      },
      [](const Instance& in) {
        const HomogeneousForm g = HomogeneousForm::of(in.polys[0]);
        const int d = in.ints[0];
        if (g.degree() != d + 1) return true;
        const FieldSpec& F = g.field();
        const std::uint32_t p = F.p();
        const std::size_t n = g.nvars();
        const auto table = value_table(g.poly());
        auto lookup = [&](std::span<const std::uint32_t> y) {
          std::uint64_t idx = 0;
          for (auto c : y) idx = idx * p + c;
          return table[idx];
        };
        CompiledPolynomial tilde(polarize(g).poly());
        const std::uint64_t half = F.inv(F.element(2)).value;
        std::vector<std::uint32_t> scratch(n), args(n * static_cast<std::size_t>(d + 1));
        bool ok = true;
        for_each_point(p, n * static_cast<std::size_t>(d + 1), [&](std::span<const std::uint32_t> pt) {
          if (!ok) return;
          std::copy(pt.begin(), pt.end(), args.begin());
          for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t s = 0;
            for (int b = 0; b < d; ++b) s += pt[static_cast<std::size_t>(b) * n + i];
            args[static_cast<std::size_t>(d) * n + i] =
                static_cast<std::uint32_t>((pt[static_cast<std::size_t>(d) * n + i] + half * (s % p)) % p);
          }
          if (tilde(args) != cube_difference(pt, n, d, p, scratch, lookup)) ok = false;
        });
        return ok;
      });

  add("identities", "multilinearity",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {5, 7});
        const int n = uniform_int(rng, 1, 3), blocks = uniform_int(rng, 1, 3);
        const int b = uniform_int(rng, 0, blocks - 1);
        MultilinearForm t = random_multilinear(F, static_cast<std::size_t>(n),
                                               static_cast<std::size_t>(blocks), rng);
        return Instance{{t.poly()}, {n, blocks, b},
                        random_point(F, static_cast<std::size_t>(n * (blocks + 2) + 2), rng)};
      },
      [](const Instance& in) {
        const std::size_t n = static_cast<std::size_t>(in.ints[0]);
        const std::size_t blocks = static_cast<std::size_t>(in.ints[1]);
        const std::size_t b = static_cast<std::size_t>(in.ints[2]);
        const MultilinearForm t = MultilinearForm::on_all_blocks(in.polys[0], n, blocks);
        const FieldSpec& F = t.field();
        BlockPoint x;
        for (std::size_t j = 0; j < blocks; ++j) x.push_back(slice(in.point, j * n, n));
        const Point u = slice(in.point, blocks * n, n), w = slice(in.point, (blocks + 1) * n, n);
        const FieldElement a = in.point[(blocks + 2) * n], c = in.point[(blocks + 2) * n + 1];
        BlockPoint xu = x, xw = x, xs = x;
        xu[b] = u;
        xw[b] = w;
        for (std::size_t i = 0; i < n; ++i) xs[b][i] = F.add(F.mul(a, u[i]), F.mul(c, w[i]));
        return evaluate(t, xs) == F.add(F.mul(a, evaluate(t, xu)), F.mul(c, evaluate(t, xw)));
      });

  add("identities", "average-correlation",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5});
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const int m = uniform_int(rng, 0, 2);
        Instance in{{random_polynomial(F, n, 3, rng)}, {}, {}};
        for (int i = 0; i < m; ++i) in.polys.push_back(random_polynomial(F, n, uniform_int(rng, 1, 2), rng));
        return in;
      },
      [](const Instance& in) {
        std::vector<Polynomial> as(in.polys.begin() + 1, in.polys.end());
        return check_avg_correlation_identity(in.polys[0], as);
      });

  add("identities", "bias-chain-rule",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5});
        const int nx = uniform_int(rng, 1, 2), ny = uniform_int(rng, 1, 2);
        const auto n = static_cast<std::size_t>(nx + ny);
        Polynomial a(F, n);
        for (int i = 0; i < nx; ++i) {
          Polynomial coeff = embed(random_polynomial(F, static_cast<std::size_t>(ny), 2, rng), n,
                                   static_cast<std::size_t>(nx));
          Exponents e(n, 0);
          e[static_cast<std::size_t>(i)] = 1;
          a += Polynomial::monomial(F, e, F.one()) * coeff;
        }
        Polynomial b = embed(random_polynomial(F, static_cast<std::size_t>(ny), 3, rng), n,
                             static_cast<std::size_t>(nx));
        return Instance{{a, b}, {nx}, {}};
      },
      [](const Instance& in) {
        return check_bias_chain_rule(in.polys[0], in.polys[1], static_cast<std::size_t>(in.ints[0]));
      });

  add("identities", "histogram-pooling",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5, 7});
        return Instance{{random_polynomial(F, static_cast<std::size_t>(uniform_int(rng, 1, 3)),
                                           uniform_int(rng, 1, 3), rng)},
                        {}, {}};
      },
      [](const Instance& in) {
        const Polynomial& f = in.polys[0];
        const std::uint32_t p = f.field().p();
        const ValueHistogram whole = value_histogram(f);
        ValueHistogram pooled(p);
        std::complex<double> mix = 0;
        for (std::uint32_t v = 0; v < p; ++v) {
          std::vector<std::optional<Polynomial>> images(f.nvars());
          images[0] = Polynomial::constant(f.field(), f.nvars(), FieldElement(v));
          const ValueHistogram part = value_histogram(substitute(f, images, f.nvars()));
          // substitution keeps n variables with x1 unused, so each part counts p times
          ValueHistogram scaled(p);
          part.for_each_nonzero([&](FieldElement a, std::uint64_t c) { scaled.add(a, c / p); });
          pooled.merge(scaled);
          mix += histogram_to_bias(scaled).value / static_cast<double>(p);
        }
        return pooled == whole && std::abs(mix - histogram_to_bias(whole).value) <= 1e-9;
      });

  // ---- inequalities ----
  add("inequalities", "bias-bounded",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {2, 3, 5, 7, 11});
        return Instance{{random_polynomial(F, static_cast<std::size_t>(uniform_int(rng, 1, 3)),
                                           uniform_int(rng, 0, 3), rng)},
                        {uniform_int(rng, 1, 50)}, {}};
      },
      [](const Instance& in) {
        const BiasValue b = histogram_to_bias(value_histogram(in.polys[0]));
        ValueHistogram flat(in.polys[0].field().p());
        for (std::uint32_t a = 0; a < flat.p(); ++a)
          flat.add(FieldElement(a), static_cast<std::uint64_t>(in.ints[0]));
        return b.magnitude <= 1 + 1e-12 && histogram_is_flat(flat) &&
               histogram_to_bias(flat).magnitude <= 1e-12;
      });

  add("inequalities", "derive-bias-bounds",
      [](Rng& rng) {
        return Instance{{random_polynomial(FieldSpec(5), 2, 3, rng)}, {2}, {}};
      },
      [](const Instance& in) { return derive_bias_bounds(in.polys[0], in.ints[0]).ok(); });

  add("inequalities", "easy-direction",
      [](Rng& rng) { return Instance{{random_polynomial(FieldSpec(3), 2, 3, rng)}, {2}, {}}; },
      [](const Instance& in) { return check_easy_direction(in.polys[0], in.ints[0]); });

  add("inequalities", "fourier-fourth-moment",
      [](Rng& rng) { return Instance{{random_polynomial(FieldSpec(3), 2, 3, rng)}, {}, {}}; },
      [](const Instance& in) {
        double sum = 0;
        for (const auto& c : fourier_coefficients(in.polys[0])) sum += std::pow(std::abs(c), 4);
        return near(gowers_norm(in.polys[0], 2).derivative.magnitude, sum);
      });

  add("inequalities", "gowers-monotone",
      [](Rng& rng) {
        return Instance{{random_polynomial(FieldSpec(3), 2, 3, rng)}, {uniform_int(rng, 1, 2)}, {}};
      },
      [](const Instance& in) {
        const int d = in.ints[0];
        return gowers_norm(in.polys[0], d + 1).norm + kBiasTolerance >= gowers_norm(in.polys[0], d).norm;
      });

  add("inequalities", "gowers-two-path",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5});
        return Instance{{random_polynomial(F, 2, 3, rng)}, {uniform_int(rng, 1, 2)}, {}};
      },
      [derivative](const Instance& in) {
        return gowers_norm(in.polys[0], in.ints[0]).derivative.histogram ==
               value_histogram(derivative(in.polys[0], in.ints[0]));
      });

  add("inequalities", "analytic-rank-floor",
      [](Rng& rng) {
        FieldSpec F(3);
        const int n = uniform_int(rng, 1, 2), d = uniform_int(rng, 1, 3);
        MultilinearForm t = random_multilinear(F, static_cast<std::size_t>(n), static_cast<std::size_t>(d), rng);
        while (t.is_zero())
          t = random_multilinear(F, static_cast<std::size_t>(n), static_cast<std::size_t>(d), rng);
        return Instance{{t.poly()}, {n, d}, {}};
      },
      [](const Instance& in) {
        if (in.polys[0].is_zero()) return true;
        const MultilinearForm t = MultilinearForm::on_all_blocks(
            in.polys[0], static_cast<std::size_t>(in.ints[0]), static_cast<std::size_t>(in.ints[1]));
        const AnalyticRank ar = analytic_rank(t);
        return ar.infinite || ar.value + kBiasTolerance >= std::pow(2.0, -in.ints[1]);
      });

  add("inequalities", "warning-count",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5});
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        Instance in;
        for (int i = uniform_int(rng, 1, 3); i > 0; --i)
          in.polys.push_back(random_polynomial(F, n, uniform_int(rng, 1, 2), rng));
        return in;
      },
      [](const Instance& in) {
        return check_warning(in.polys, in.polys[0].nvars(), in.polys[0].field());
      });

  add("inequalities", "pipeline-never-overclaims",
      [](Rng& rng) { return Instance{{random_polynomial(FieldSpec(5), 2, 3, rng)}, {2}, {}}; },
      [](const Instance& in) {
        const Polynomial& f = in.polys[0];
        const CorrelationCert c = pipeline_degree_d_plus_1(f, in.ints[0]);
        const double delta = bias_exact(iterated_discrete_derivative(f, in.ints[0])).magnitude;
        return c.exact_bias <= cor_below(f, in.ints[0]).value + kBiasTolerance &&
               delta + kBiasTolerance >= std::pow(c.exact_bias, 4.0);
      });

  // ---- certificates ----
  add("certificates", "rank-search-verifies",
      [](Rng& rng) {
        FieldSpec F(5);
        const int k = uniform_int(rng, 2, 3);
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, k == 2 ? 3 : 2));
        return Instance{{random_nonzero_form(F, n, k, rng).poly()}, {}, {}};
      },
      [](const Instance& in) {
        const HomogeneousForm g = HomogeneousForm::of(in.polys[0]);
        const auto r = search_rank(g, g.nvars());
        return r.status == SearchStatus::found && r.cert->target == g &&
               static_cast<bool>(verify_decomposition(*r.cert)) && r.cert->length() <= g.nvars();
      });

  add("certificates", "compress-decomposition",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5, 7});
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const int kc = uniform_int(rng, 2, 4);
        const int rc = uniform_int(rng, 1, 4);
        const DecompositionCert c = random_decomposition(F, n, kc, rc, rng);
        Instance in{{c.target.poly()}, {c.target.degree()}, {}};
        for (const auto& pr : c.factors) {
          in.polys.push_back(pr.alpha.poly());
          in.polys.push_back(pr.beta.poly());
        }
        return in;
      },
      [](const Instance& in) {
        DecompositionCert c{HomogeneousForm(in.polys[0], in.ints[0]), {}};
        for (std::size_t i = 1; i + 1 < in.polys.size(); i += 2)
          c.factors.push_back({HomogeneousForm::of(in.polys[i]), HomogeneousForm::of(in.polys[i + 1])});
        if (!verify_decomposition(c)) return true;
        const DecompositionCert out = compress_decomposition(c);
        return out.target == c.target && static_cast<bool>(verify_decomposition(out)) &&
               out.length() <= c.length() && alphas_independent(out);
      });

  add("certificates", "bilinear-partition-rank",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {3, 5, 7});
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 6));
        return Instance{{random_multilinear(F, n, 2, rng).poly()}, {static_cast<int>(n)}, {}};
      },
      [](const Instance& in) {
        const auto n = static_cast<std::size_t>(in.ints[0]);
        const MultilinearForm t = MultilinearForm::on_all_blocks(in.polys[0], n, 2);
        Matrix m(n, n);
        for (const auto& [e, c] : t.poly().terms()) {
          std::size_t i = 0, j = 0;
          while (!e[i]) ++i;
          while (!e[n + j]) ++j;
          m.at(i, j) = c;
        }
        const auto r = search_partition_rank(t, n);
        return r.status == SearchStatus::found && r.cert->length() == rank(m, t.field()) &&
               static_cast<bool>(verify_decomposition(*r.cert));
      });

  add("certificates", "analytic-rank-below-partition-rank",
      [](Rng& rng) { return Instance{{random_multilinear(FieldSpec(3), 2, 3, rng).poly()}, {}, {}}; },
      [](const Instance& in) {
        const MultilinearForm t = MultilinearForm::on_all_blocks(in.polys[0], 2, 3);
        if (t.is_zero()) return true;
        const auto r = search_partition_rank(t, 2);
        return r.status == SearchStatus::found && check_ar_pr_inequality(t, *r.cert);
      });

  add("certificates", "derive-invariance",
      [](Rng& rng) {
        FieldSpec F = pick_field(rng, {5, 7});
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const int kc = uniform_int(rng, 2, 4);
        const int rc = uniform_int(rng, 1, 3);
        const DecompositionCert c = random_decomposition(F, n, kc, rc, rng);
        Instance in{{c.target.poly()}, {c.target.degree()}, random_point(F, n, rng)};
        for (const auto& pr : c.factors) {
          in.polys.push_back(pr.alpha.poly());
          in.polys.push_back(pr.beta.poly());
        }
        return in;
      },
      [](const Instance& in) {
        DecompositionCert c{HomogeneousForm(in.polys[0], in.ints[0]), {}};
        for (std::size_t i = 1; i + 1 < in.polys.size(); i += 2)
          c.factors.push_back({HomogeneousForm::of(in.polys[i]), HomogeneousForm::of(in.polys[i + 1])});
        if (!verify_decomposition(c)) return true;
        const DecompositionCert compressed = compress_decomposition(c);
        const RkStarCert out = derive_invariance_transform(compressed, in.point);
        const Polynomial& g = c.target.poly();
        return out.target == g + formal_derivative(g, in.point) &&
               out.length() <= 2 * compressed.length() && static_cast<bool>(validate_rkstar(out));
      });

  add("certificates", "subadditivity",
      [](Rng& rng) {
        FieldSpec F(5);
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const DecompositionCert a = random_decomposition(F, n, 2, uniform_int(rng, 1, 2), rng);
        const int kb = uniform_int(rng, 3, 4);
        const int rb = uniform_int(rng, 1, 2);
        const DecompositionCert b = random_decomposition(F, n, kb, rb, rng);
        Instance in{{}, {static_cast<int>(a.length())}, {}};
        for (const auto* c : {&a, &b})
          for (const auto& pr : c->factors) {
            in.polys.push_back(pr.alpha.poly());
            in.polys.push_back(pr.beta.poly());
          }
        return in;
      },
      [](const Instance& in) {
        RkStarCert c1, c2;
        c1.target = c2.target = Polynomial(in.polys[0].field(), in.polys[0].nvars());
        for (std::size_t i = 0; i + 1 < in.polys.size(); i += 2) {
          RkStarCert& c = i / 2 < static_cast<std::size_t>(in.ints[0]) ? c1 : c2;
          c.factors.push_back({in.polys[i], in.polys[i + 1]});
          c.target += in.polys[i] * in.polys[i + 1];
        }
        if (!validate_rkstar(c1) || !validate_rkstar(c2) || c1.target.degree() == c2.target.degree())
          return true;
        const RkStarCert out = combine_subadditive(c1, c2);
        return out.target == c1.target + c2.target && out.length() <= c1.length() + c2.length() &&
               static_cast<bool>(validate_rkstar(out));
      });

  add("certificates", "chain-rule",
      [](Rng& rng) {
        FieldSpec F(5);
        return Instance{{random_nonzero_form(F, 2, 3, rng).poly(), random_form(F, 2, 2, rng).poly()},
                        {}, random_point(F, 2, rng)};
      },
      [](const Instance& in) {
        const HomogeneousForm g = HomogeneousForm::of(in.polys[0]);
        const Polynomial& h = in.polys[1];
        const auto gs = search_rank(g, g.nvars());
        const HomogeneousForm hc(h - formal_derivative(g.poly(), in.point), 2);
        const auto hs = search_rank(hc, hc.nvars());
        if (gs.status != SearchStatus::found || hs.status != SearchStatus::found) return false;
        const RkStarCert hc_star = rkstar_from_decomposition(*hs.cert);
        const RkStarCert out = chain_rule_combine(*gs.cert, hc_star, in.point);
        return out.target == g.poly() + h && static_cast<bool>(validate_rkstar(out)) &&
               out.length() <= 2 * gs.cert->length() + hc_star.length();
      });

  add("certificates", "perturbation-density",
      [](Rng& rng) { return Instance{{random_nonzero_form(FieldSpec(5), 2, 3, rng).poly()}, {}, {}}; },
      [](const Instance& in) {
        const HomogeneousForm f = HomogeneousForm::of(in.polys[0]);
        const auto s = search_rank(f, f.nvars());
        if (s.status != SearchStatus::found) return false;
        const RkStarCert rk = rkstar_from_decomposition(*s.cert);
        const PerturbationCert pc = perturbation(rk);
        const std::uint32_t p = f.field().p();
        const double density = static_cast<double>(pc.zero_count) /
                               static_cast<double>(*checked_power(p, f.nvars()));
        return pc.m() <= 2 * rk.length() && static_cast<bool>(verify_perturbation(pc)) &&
               density + kBiasTolerance >= std::pow(static_cast<double>(p), -static_cast<double>(pc.m()));
      });

  add("certificates", "lower-degree-correlation",
      [](Rng& rng) {
        FieldSpec F(5);
        return Instance{{random_nonzero_form(F, 2, 3, rng).poly(), random_polynomial(F, 2, 2, rng)}, {}, {}};
      },
      [](const Instance& in) {
        const HomogeneousForm g = HomogeneousForm::of(in.polys[0]);
        const auto s = search_rank(g, g.nvars());
        if (s.status != SearchStatus::found) return false;
        const RkStarCert rk = rkstar_from_decomposition(*s.cert);
        const CorrelationCert c = lower_degree_correlation(perturbation(rk));
        const double floor = c.claimed_floor;
        return c.exact_bias + kBiasTolerance >= floor && c.P.degree() <= g.degree() - 2 &&
               static_cast<bool>(verify_correlation(c));
      });

  add("certificates", "rkstar-rejects-affine-split",
      [](Rng& rng) {
        FieldSpec F(5);
        const auto nx = static_cast<std::size_t>(uniform_int(rng, 1, 2));
        HomogeneousForm a = random_nonzero_form(F, nx, 2, rng);
        return Instance{{embed(a.poly(), nx + 1, 0)}, {static_cast<int>(nx)}, {}};
      },
      [](const Instance& in) {
        // f = A(x) + y with deg A = 2: every candidate built from a rank
        // certificate of A plus a way of writing y must be rejected
        const FieldSpec& F = in.polys[0].field();
        const std::size_t n = in.polys[0].nvars();
        const HomogeneousForm a = HomogeneousForm::of(in.polys[0]);
        Exponents ey(n, 0);
        ey[n - 1] = 1;
        const Polynomial y = Polynomial::monomial(F, ey, F.one());
        const Polynomial one = Polynomial::constant(F, n, F.one());
        const Polynomial f = a.poly() + y;
        if (!histogram_is_flat(value_histogram(f))) return false;
        const auto s = search_rank(a, n);
        if (s.status != SearchStatus::found) return false;
        std::vector<PolyPair> base;
        for (const auto& pr : s.cert->factors) base.push_back({pr.alpha.poly(), pr.beta.poly()});
        const FieldElement half = F.inv(F.element(2));
        const std::vector<std::vector<PolyPair>> ways = {
            {{one, y}},
            {{y, one}},
            {{(y + one).scaled(half), y + one}, {y.scaled(F.neg(half)), y}, {one.scaled(F.neg(half)), one}},
        };
        for (const auto& way : ways) {
          RkStarCert cand{f, base};
          cand.factors.insert(cand.factors.end(), way.begin(), way.end());
          if (validate_rkstar(cand)) return false;
        }
        return true;
      });

  add("certificates", "pipeline-degree-d1",
      [](Rng& rng) { return Instance{{random_polynomial(FieldSpec(5), 2, 3, rng)}, {2}, {}}; },
      [](const Instance& in) {
        const CorrelationCert c = pipeline_degree_d_plus_1(in.polys[0], in.ints[0]);
        return static_cast<bool>(verify_correlation(c)) && c.P.degree() <= in.ints[0] - 1;
      });

  add("certificates", "pipeline-homogeneous",
      [](Rng& rng) { return Instance{{random_nonzero_form(FieldSpec(5), 2, 3, rng).poly()}, {2}, {}}; },
      [](const Instance& in) {
        const CorrelationCert c = pipeline_homogeneous(HomogeneousForm::of(in.polys[0]), in.ints[0]);
        return static_cast<bool>(verify_correlation(c)) && c.P.degree() < in.ints[0];
      });

  add("certificates", "pipeline-degree-d",
      [](Rng& rng) { return Instance{{random_polynomial(FieldSpec(5), 2, 2, rng)}, {2}, {}}; },
      [](const Instance& in) {
        const Polynomial& f = in.polys[0];
        const int d = in.ints[0];
        const MultilinearForm D = detail::derivative_form(f, d);
        VarietyCert v{f.field(), f.nvars(), static_cast<std::size_t>(d - 1), {}};
        if (!D.is_zero()) {
          const auto s = search_partition_rank(D, f.nvars());
          if (s.status != SearchStatus::found) return false;
          v = variety_from_partition_rank(*s.cert);
        }
        const CorrelationCert c = pipeline_degree_d(f, d, v);
        return static_cast<bool>(verify_correlation(c)) && c.P.degree() <= d - 1;
      });

  return ps;
}

namespace detail {

/// Greedy shrink: delete single terms while the check still fails cleanly.
inline Instance shrink(const Property& prop, Instance inst) {
  auto fails = [&](const Instance& candidate) {
    try {
      return !prop.check(candidate);
    } catch (const std::exception&) {
      return false;
    }
  };
  bool progress = true;
  for (int rounds = 0; progress && rounds < 200; ++rounds) {
    progress = false;
    for (std::size_t i = 0; i < inst.polys.size() && !progress; ++i) {
      std::vector<Exponents> monos;
      for (const auto& [e, c] : inst.polys[i].terms()) monos.push_back(e);
      for (const auto& e : monos) {
        Instance candidate = inst;
        Polynomial& q = candidate.polys[i];
        q.add_term(e, q.field().neg(q.coefficient(e)));
        if (fails(candidate)) {
          inst = std::move(candidate);
          progress = true;
          break;
        }
      }
    }
  }
  return inst;
}

} // namespace detail

/// Runs `trials` instances of every property of the named suite ("all" for
/// every suite). Each property has its own generator seeded from `seed` and
/// its name, and stops at its first failure.
inline std::vector<PropertyResult> run_suite(const std::string& suite, std::uint64_t trials,
                                             std::uint64_t seed, const SuiteHooks& hooks = {}) {
  if (suite != "all" && suite != "identities" && suite != "inequalities" && suite != "certificates")
    throw PreconditionError("unknown suite '" + suite + "'");
  std::vector<PropertyResult> results;
  for (const Property& prop : all_properties(hooks)) {
    if (suite != "all" && prop.suite != suite) continue;
    PropertyResult r{prop.suite, prop.name, trials, 0, std::nullopt, {}};
    Rng rng(detail::splitmix64(seed ^ detail::fnv1a(prop.name)));
    for (std::uint64_t t = 0; t < trials; ++t) {
      Instance inst = prop.generate(rng);
      bool ok = false;
      try {
        ok = prop.check(inst);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      if (ok) {
        ++r.passed;
        continue;
      }
      if (r.error.empty()) inst = detail::shrink(prop, std::move(inst));
      r.counterexample = format_instance(prop.name, inst);
      break;
    }
    results.push_back(std::move(r));
  }
  return results;
}

/// Re-checks a serialized instance against the named property.
inline bool replay_instance(std::string_view text, const SuiteHooks& hooks = {}) {
  auto [name, inst] = parse_instance(text);
  for (const Property& prop : all_properties(hooks))
    if (prop.name == name) return prop.check(inst);
  throw PreconditionError("unknown property '" + name + "'");
}

inline std::string format_suite_csv(const std::vector<PropertyResult>& results) {
  std::ostringstream out;
  out << "suite,property,trials,passed,status\n";
  for (const auto& r : results)
    out << r.suite << ',' << r.name << ',' << r.trials << ',' << r.passed << ','
        << (r.counterexample ? "FAIL" : "PASS") << '\n';
  return out.str();
}

} // namespace hofa

#endif // HOFA_SUITES_HPP
