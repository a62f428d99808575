#ifndef HOFA_PIPELINES_HPP
#define HOFA_PIPELINES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hofa/bias.hpp"
#include "hofa/certificate_io.hpp"
#include "hofa/error.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/rank.hpp"
#include "hofa/rkstar.hpp"
#include "hofa/text_format.hpp"

namespace hofa {

/// Receives (file name, content) for every intermediate artifact.
using ArtifactSink = std::function<void(const std::string&, const std::string&)>;

struct PipelineOptions {
  Budget budget;
  std::optional<std::size_t> r_max;    // search bound; default n
  std::uint64_t max_nodes = 1'000'000;  // per search
  ArtifactSink sink;
};

namespace detail {

inline void emit(const PipelineOptions& opt, const std::string& name, const std::string& content) {
  if (opt.sink) opt.sink(name, content);
}

inline std::string format_point(const Point& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) out += (i ? "," : "") + std::to_string(x[i].value);
  return out;
}

inline double floor_power(std::uint32_t p, double exponent) {
  return std::pow(static_cast<double>(p), -exponent);
}

/// Fills histogram and exact_bias of f against P by enumeration and checks
/// them against the stage value.
inline void finish(CorrelationCert& cert, const PipelineOptions& opt, const char* stage) {
  const BiasReport b = bias_exact(cert.f - cert.P, opt.budget);
  cert.histogram = b.histogram;
  cert.exact_bias = b.magnitude;
  if (Verdict v = verify_correlation(cert, opt.budget); !v) throw StageError(stage, v.reason);
  emit(opt, "correlation.cert", format_certificate(cert));
  emit(opt, "summary.txt", render(correlation_report(cert), OutputFormat::text));
}

/// Delta^d f with its point block dropped, for deg f <= d.
inline MultilinearForm derivative_form(const Polynomial& f, int d) {
  const std::size_t n = f.nvars();
  const std::size_t nd = n * static_cast<std::size_t>(d);
  Polynomial full = iterated_discrete_derivative(f, d);
  Polynomial out = map_monomials(full, nd, [&](const Exponents& e) {
    for (std::size_t v = nd; v < e.size(); ++v)
      if (e[v] != 0) throw Error("Delta^d f depends on the base point");
    return Exponents(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(nd));
  });
  return MultilinearForm::on_all_blocks(std::move(out), n, static_cast<std::size_t>(d));
}

inline std::vector<Polynomial> polys_of(const std::vector<MultilinearForm>& forms) {
  std::vector<Polynomial> out;
  for (const auto& t : forms) out.push_back(t.poly());
  return out;
}

/// Decomposition of a form: the supplied certificate, else a rank search,
/// else a depolarized partition-rank search.
inline std::pair<DecompositionCert, std::string> obtain_decomposition(
    const HomogeneousForm& g, const std::optional<DecompositionCert>& supplied,
    const PipelineOptions& opt, const std::string& what) {
  if (g.is_zero()) return {DecompositionCert{g, {}}, "empty"};
  if (supplied) {
    if (!(supplied->target == g))
      throw PreconditionError(what + " certificate does not certify " + format_polynomial(g.poly()));
    if (Verdict v = verify_decomposition(*supplied); !v)
      throw PreconditionError("invalid " + what + " certificate: " + v.reason);
    return {*supplied, "supplied"};
  }
  const std::size_t r_max = opt.r_max.value_or(g.nvars());
  auto direct = search_rank(g, r_max, opt.max_nodes);
  if (direct.status == SearchStatus::found) return {*direct.cert, "rank-search"};
  if (g.field().p() > static_cast<std::uint32_t>(g.degree())) {
    auto pr = search_partition_rank(polarize(g), r_max, opt.max_nodes, opt.budget);
    if (pr.status == SearchStatus::found) return {decomposition_from_partition_rank(*pr.cert), "partition-rank-search"};
  }
  throw StageError(what, "no decomposition available");
}

} // namespace detail

/// Correlation for a homogeneous f of degree k with d <= k < 2d and k < p.
/// From f~ = sum R_i Q_i with deg Q_i <= deg R_i, the diagonals
/// A_i = Q_i(x, ..., x) have degree < d and Z(A) lies in Z(f); the span of
/// the A_i is swept for the best P. Floor p^(-d r).
inline CorrelationCert pipeline_homogeneous(const HomogeneousForm& f, int d,
                                            const std::optional<PartitionRankCert>& pr_cert = {},
                                            const PipelineOptions& opt = {}) {
  const int k = f.degree();
  const FieldSpec& F = f.field();
  const std::size_t n = f.nvars();
  if (d < 1) throw PreconditionError("order d must be at least 1");
  if (k < d || k >= 2 * d)
    throw PreconditionError("homogeneous pipeline needs d <= deg f < 2d (deg f = " +
                            std::to_string(k) + ", d = " + std::to_string(d) + ")");
  if (F.p() <= static_cast<std::uint32_t>(k))
    throw PreconditionError("characteristic too small for degree " + std::to_string(k));
  detail::emit(opt, "input.poly", format_polynomial_file(f.poly()) + "\n");

  const MultilinearForm f_tilde = polarize(f);
  const double top = bias_exact(f_tilde.poly(), opt.budget).magnitude;
  const double delta = bias_exact(iterated_discrete_derivative(f.poly(), d), opt.budget).magnitude;
  {
    std::ostringstream out;
    out << "bias_f_tilde=" << format_number(top) << "\nbias_delta_d=" << format_number(delta) << '\n';
    detail::emit(opt, "monotonicity.txt", out.str());
  }
  if (top + kBiasTolerance < std::pow(delta, static_cast<double>(1u << d)))
    throw StageError("monotonicity", "bias(f~) < bias(Delta^d f)^(2^d)");

  std::string source = "supplied";
  const PartitionRankCert cert = [&] {
    if (pr_cert) {
      if (!(pr_cert->target == f_tilde))
        throw PreconditionError("partition-rank certificate is not for the polarization of f");
      if (Verdict v = verify_decomposition(*pr_cert); !v)
        throw PreconditionError("invalid partition-rank certificate: " + v.reason);
      return *pr_cert;
    }
    auto found = search_partition_rank(f_tilde, opt.r_max.value_or(n), opt.max_nodes, opt.budget);
    if (found.status != SearchStatus::found)
      throw StageError("partition rank", "no decomposition available (search " +
                                             std::string(to_string(found.status)) + ")");
    source = "search";
    return *found.cert;
  }();
  detail::emit(opt, "partition-rank.cert", format_certificate(cert));

  std::vector<Polynomial> as;
  for (const auto& term : cert.terms) {
    const MultilinearForm& q = term.q.degree() < term.r.degree() ? term.q : term.r;
    as.push_back(diagonal(q));
  }
  if (auto w = find_outside(as, std::vector<Polynomial>{f.poly()}, F, n, opt.budget))
    throw StageError("diagonal", "Z(A) not contained in Z(f) at " + detail::format_point(*w));

  const std::vector<Polynomial> basis = span_basis(as);
  SweepResult s = sweep_combinations(f.poly(), basis, opt.budget, "homogeneous sweep");
  CorrelationCert out;
  out.f = f.poly();
  out.P = std::move(s.combination);
  out.degree_bound = d - 1;
  out.claimed_floor = detail::floor_power(F.p(), static_cast<double>(d) * static_cast<double>(cert.length()));
  out.provenance = {"pipeline=homogeneous",
                    "d=" + std::to_string(d),
                    "k=" + std::to_string(k),
                    "partition_rank_source=" + source,
                    "r=" + std::to_string(cert.length()),
                    "span=" + std::to_string(basis.size()),
                    "bias_f_tilde=" + format_number(top),
                    "bias_delta_d=" + format_number(delta)};
  detail::finish(out, opt, "homogeneous correlation");
  return out;
}

/// T_i = Delta^d f (., e_i) for deg f <= d: the coefficients of the last
/// direction in the expansion Delta^d f = sum_i x_i^(d) T_i.
inline std::vector<MultilinearForm> derivative_coefficient_forms(const Polynomial& f, int d) {
  detail::require(d >= 1, "order d must be at least 1");
  if (f.degree() > d) throw PreconditionError("polynomial degree exceeds d");
  return block_gradient(detail::derivative_form(f, d));
}

/// Checks the shape of a variety certificate against f and the containment
/// Z(S) in Z(T) by enumeration over F_p^(n(d-1)).
inline Verdict verify_variety(const VarietyCert& cert, const Polynomial& f, int d,
                              const Budget& budget = {}) {
  if (!(cert.field == f.field()) || cert.n != f.nvars())
    return Verdict::fail("variety certificate lives in a different space");
  if (cert.blocks + 1 != static_cast<std::size_t>(d))
    return Verdict::fail("variety certificate must use d-1 blocks");
  for (std::size_t i = 0; i < cert.forms.size(); ++i) {
    const auto& s = cert.forms[i];
    if (s.n() != cert.n || s.blocks() != cert.blocks || s.support().empty())
      return Verdict::fail("form " + std::to_string(i + 1) + " has the wrong shape");
  }
  const auto ts = derivative_coefficient_forms(f, d);
  const auto w = find_outside(detail::polys_of(cert.forms), detail::polys_of(ts), f.field(),
                              cert.n * cert.blocks, budget);
  if (w) return Verdict::fail("zero set not contained in Z(T) at " + detail::format_point(*w));
  return Verdict::pass();
}

/// From a partition-rank certificate of a d-linear form D, the side of each
/// term that avoids the last block; on their joint zeros every D(., c)
/// vanishes.
inline VarietyCert variety_from_partition_rank(const PartitionRankCert& cert) {
  const MultilinearForm& t = cert.target;
  const int last = static_cast<int>(t.blocks()) - 1;
  detail::require(t.blocks() >= 2 && t.in_support(last),
                  "partition-rank target must involve the last of at least two blocks");
  VarietyCert out{t.field(), t.n(), t.blocks() - 1, {}};
  const std::size_t kept = t.n() * out.blocks;
  for (const auto& term : cert.terms) {
    const MultilinearForm& s = term.r.in_support(last) ? term.q : term.r;
    Polynomial body = map_monomials(s.poly(), kept, [&](const Exponents& e) {
      return Exponents(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(kept));
    });
    out.forms.emplace_back(std::move(body), t.n(), out.blocks, s.support());
  }
  return out;
}

/// Correlation for deg f <= d < p from a variety certificate: A_i =
/// S_i(x, ..., x) has degree <= d-1 and Z(A) lies in Z(f_d); the span of the
/// A_i is swept for P maximizing bias(f_d - P), and f correlates with
/// P + f_{<d} equally. Floor p^(-d m).
inline CorrelationCert pipeline_degree_d(const Polynomial& f, int d, const VarietyCert& variety,
                                         const PipelineOptions& opt = {}) {
  const FieldSpec& F = f.field();
  const std::size_t n = f.nvars();
  if (d < 1) throw PreconditionError("order d must be at least 1");
  if (f.degree() > d) throw PreconditionError("polynomial degree exceeds d");
  if (F.p() <= static_cast<std::uint32_t>(d))
    throw PreconditionError("characteristic too small for degree " + std::to_string(d));
  detail::emit(opt, "input.poly", format_polynomial_file(f) + "\n");

  const Polynomial f_d = homogeneous_component(f, d).poly();
  const Polynomial f_low = lower_part(f, d);
  CorrelationCert out;
  out.f = f;
  out.degree_bound = d - 1;

  if (f_d.is_zero()) {
    // Delta^d f = 0: bias 1 and f itself has degree below d.
    out.P = f;
    out.claimed_floor = 1;
    out.provenance = {"pipeline=degree-d", "d=" + std::to_string(d), "branch=delta-one"};
    detail::finish(out, opt, "degree-d correlation");
    return out;
  }

  if (Verdict v = verify_variety(variety, f, d, opt.budget); !v)
    throw PreconditionError("invalid variety certificate: " + v.reason);
  detail::emit(opt, "variety.cert", format_certificate(variety));

  std::vector<Polynomial> as;
  for (const auto& s : variety.forms) as.push_back(diagonal(s));
  if (auto w = find_outside(as, std::vector<Polynomial>{f_d}, F, n, opt.budget))
    throw StageError("diagonal", "Z(A) not contained in Z(f_d) at " + detail::format_point(*w));

  const std::vector<Polynomial> basis = span_basis(as);
  SweepResult s = sweep_combinations(f_d, basis, opt.budget, "degree-d sweep");
  out.P = s.combination + f_low;
  const std::size_t m = variety.forms.size();
  out.claimed_floor = detail::floor_power(F.p(), static_cast<double>(d) * static_cast<double>(m));
  out.provenance = {"pipeline=degree-d", "d=" + std::to_string(d), "m=" + std::to_string(m),
                    "span=" + std::to_string(basis.size()),
                    "bias_top_part=" + format_number(s.bias.magnitude)};
  if (!(s.bias.histogram == value_histogram(f - out.P, opt.budget)))
    throw StageError("degree-d correlation", "bias(f - P - f_<d) differs from bias(f_d - P)");
  detail::finish(out, opt, "degree-d correlation");
  return out;
}

/// Correlation for deg f <= d+1: splits f = g + h + f_{<d}, picks c* from
/// the derivative bias bounds, certifies rk*(g + h) through the chain rule,
/// perturbs to a variety of m <= 2r lower-degree generators and sweeps their
/// span. The correlator is P + f_{<d}; floor p^(-m). For d = 1 the answer
/// is P = 0 with bias(f)^2 = bias(Delta f).
inline CorrelationCert pipeline_degree_d_plus_1(const Polynomial& f, int d,
                                                const std::optional<DecompositionCert>& g_cert = {},
                                                const std::optional<DecompositionCert>& hc_cert = {},
                                                const PipelineOptions& opt = {}) {
  const FieldSpec& F = f.field();
  const std::size_t n = f.nvars();
  if (d < 1) throw PreconditionError("order d must be at least 1");
  if (f.degree() > d + 1) throw PreconditionError("polynomial degree exceeds d+1");
  detail::emit(opt, "input.poly", format_polynomial_file(f) + "\n");
  CorrelationCert out;
  out.f = f;
  out.degree_bound = d - 1;

  if (d == 1) {
    const double b = bias_exact(f, opt.budget).magnitude;
    const double db = bias_exact(iterated_discrete_derivative(f, 1), opt.budget).magnitude;
    if (std::abs(b * b - db) > kBiasTolerance)
      throw StageError("degree-1 identity", "bias(f)^2 != bias(Delta f)");
    out.P = Polynomial(F, n);
    out.claimed_floor = std::sqrt(db);
    out.provenance = {"pipeline=degree-d1", "d=1", "branch=square-identity",
                      "bias_delta=" + format_number(db)};
    detail::finish(out, opt, "degree-d1 correlation");
    return out;
  }
  if (F.p() <= static_cast<std::uint32_t>(d + 1))
    throw PreconditionError("characteristic too small for degree " + std::to_string(d + 1));

  const HomogeneousForm g = homogeneous_component(f, d + 1);
  const HomogeneousForm h = homogeneous_component(f, d);
  const Polynomial f_low = lower_part(f, d);
  if (g.is_zero() && h.is_zero()) {
    out.P = f;
    out.claimed_floor = 1;
    out.provenance = {"pipeline=degree-d1", "d=" + std::to_string(d), "branch=low-degree"};
    detail::finish(out, opt, "degree-d1 correlation");
    return out;
  }

  const DeriveBiasResult db = derive_bias_bounds(f, d, opt.budget);
  {
    std::ostringstream s;
    s << "c_star=" << detail::format_point(db.c_star)
      << "\nderivative_bias=" << format_number(db.derivative_bias)
      << "\nmean_bias=" << format_number(db.mean_bias)
      << "\nbest_bias=" << format_number(db.best_bias)
      << "\ng_tilde_bias=" << format_number(db.g_tilde_bias)
      << "\naverage_bound=" << db.average_bound << "\ntop_bound=" << db.top_bound
      << "\nhistogram_identity=" << db.histogram_identity << '\n';
    detail::emit(opt, "derive-bias.txt", s.str());
  }
  if (!db.histogram_identity)
    throw StageError("derive-bias", "pooled histograms do not reproduce Delta^d f");
  if (!db.average_bound) throw StageError("derive-bias", "bias(Delta^d f) exceeds the average bound");
  if (!db.top_bound) throw StageError("derive-bias", "bias(Delta^d f) exceeds bias(g~)");

  auto [gc, g_source] = detail::obtain_decomposition(g, g_cert, opt, "g");
  detail::emit(opt, "g.cert", format_certificate(gc));

  const HomogeneousForm hc(h.poly() - formal_derivative(g.poly(), db.c_star), d);
  std::optional<DecompositionCert> hc_supplied = hc_cert;
  if (hc_supplied && !(hc_supplied->target == hc))
    throw PreconditionError("hc certificate must certify h - d_c g with c* = (" +
                            detail::format_point(db.c_star) + ")");
  auto [hcc, hc_source] = detail::obtain_decomposition(hc, hc_supplied, opt, "hc");
  detail::emit(opt, "hc.cert", format_certificate(hcc));

  const RkStarCert rk = chain_rule_combine(gc, rkstar_from_decomposition(hcc), db.c_star);
  detail::emit(opt, "rkstar.cert", format_certificate(rk));
  if (rk.length() > 2 * gc.length() + hcc.length())
    throw StageError("chain rule", "rk* certificate longer than 2 rk(g) + rk(h - d_c g)");

  const PerturbationCert pc = perturbation(rk, d + 1, opt.budget);
  detail::emit(opt, "perturbation.cert", format_certificate(pc));

  CorrelationCert low = lower_degree_correlation(pc, opt.budget);
  out.P = low.P + f_low;
  out.claimed_floor = low.claimed_floor;
  out.provenance = {"pipeline=degree-d1",
                    "d=" + std::to_string(d),
                    "c_star=" + detail::format_point(db.c_star),
                    "g_source=" + g_source,
                    "g_rank=" + std::to_string(gc.length()),
                    "hc_source=" + hc_source,
                    "hc_rank=" + std::to_string(hcc.length()),
                    "r=" + std::to_string(rk.length()),
                    "t=" + std::to_string(pc.rest_group.size()),
                    "m=" + std::to_string(pc.m()),
                    "bias_delta_d=" + format_number(db.derivative_bias)};
  if (!(low.histogram == value_histogram(f - out.P, opt.budget)))
    throw StageError("degree-d1 correlation", "bias(f - P - f_<d) differs from bias(g + h - P)");
  detail::finish(out, opt, "degree-d1 correlation");
  return out;
}

/// Checks any certificate kind on its own terms. Variety certificates need
/// the polynomial f they were issued for.
inline Verdict verify_certificate(const Certificate& cert, const std::optional<Polynomial>& f = {},
                                  const Budget& budget = {}) {
  struct Visitor {
    const std::optional<Polynomial>& f;
    const Budget& budget;
    Verdict operator()(const DecompositionCert& c) const { return verify_decomposition(c); }
    Verdict operator()(const PartitionRankCert& c) const { return verify_decomposition(c); }
    Verdict operator()(const RkStarCert& c) const { return validate_rkstar(c); }
    Verdict operator()(const PerturbationCert& c) const {
      if (Verdict v = validate_rkstar(c.source); !v) return Verdict::fail("source: " + v.reason);
      return verify_perturbation(c, budget);
    }
    Verdict operator()(const VarietyCert& c) const {
      if (!f) throw PreconditionError("variety certificates need --poly");
      return verify_variety(c, *f, static_cast<int>(c.blocks) + 1, budget);
    }
    Verdict operator()(const CorrelationCert& c) const { return verify_correlation(c, budget); }
  };
  return std::visit(Visitor{f, budget}, cert);
}

} // namespace hofa

#endif // HOFA_PIPELINES_HPP
