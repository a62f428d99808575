#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hofa/hofa.hpp"

namespace fs = std::filesystem;
using namespace hofa;

namespace {

struct Options {
  std::string poly, cert, hc_cert, form, out, point;
  std::string format = "text";
  std::string suite = "all";
  std::string method = "semisurjection";
  std::optional<std::uint64_t> p, n, samples;
  int d = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = Budget{}.max_points;
  std::uint64_t trials = 100;
  std::uint64_t max_nodes = 1'000'000;
  std::optional<std::size_t> r_max;
  unsigned threads = 0;
  bool exact = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

/// Parse errors are reported as "<file>: line L, column C: reason".
template <class Parse>
auto parse_file(const std::string& path, Parse&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

Polynomial load_poly(const Options& o) {
  if (o.poly.empty()) throw PreconditionError("--poly is required");
  Polynomial f = parse_file(o.poly, [](const std::string& t) { return parse_polynomial(t); });
  if (o.p && *o.p != f.field().p())
    throw PreconditionError("--p " + std::to_string(*o.p) + " does not match the file's p=" +
                            std::to_string(f.field().p()));
  if (o.n && *o.n != f.nvars())
    throw PreconditionError("--n " + std::to_string(*o.n) + " does not match the file's n=" +
                            std::to_string(f.nvars()));
  return f;
}

Certificate load_cert(const std::string& path) {
  return parse_file(path, [](const std::string& t) { return parse_certificate(t); });
}

template <class Cert>
Cert cert_as(const Certificate& c, const std::string& path) {
  if (const Cert* x = std::get_if<Cert>(&c)) return *x;
  throw PreconditionError(path + ": unexpected certificate kind '" + certificate_kind(c) + "'");
}

OutputFormat output_format(const Options& o) {
  if (o.format == "text") return OutputFormat::text;
  if (o.format == "csv") return OutputFormat::csv;
  throw PreconditionError("unknown --format '" + o.format + "'");
}

Budget budget_of(const Options& o) {
  if (o.budget == 0) throw PreconditionError("--budget must be positive");
  return Budget{o.budget};
}

/// Prints a report and, with --out, stores it as <out>/<name>.
void emit_report(const Options& o, const std::string& name, const std::string& text) {
  std::cout << text;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / name, text);
  }
}

void emit_report(const Options& o, const std::string& name, const Report& r) {
  emit_report(o, name + (o.format == "csv" ? ".csv" : ".txt"), render(r, output_format(o)));
}

int cmd_eval(const Options& o) {
  const Polynomial f = load_poly(o);
  Point x;
  if (!o.point.empty()) {
    for (auto v : detail::uint_list(o.point, 1, 1)) x.push_back(f.field().element(static_cast<std::int64_t>(v % f.field().p())));
  }
  if (x.size() != f.nvars())
    throw PreconditionError("--point needs " + std::to_string(f.nvars()) + " comma-separated values");
  const FieldElement v = evaluate(f, x);
  emit_report(o, "eval", Report{{"p", std::to_string(f.field().p())}, {"value", std::to_string(v.value)}});
  return 0;
}

int cmd_bias(const Options& o) {
  const Polynomial f = load_poly(o);
  const BiasReport b = o.samples ? bias_sampled(f, *o.samples, o.seed) : bias_exact(f, budget_of(o));
  emit_report(o, "bias", bias_report(b, f.nvars()));
  return 0;
}

int cmd_gowers(const Options& o) {
  const Polynomial f = load_poly(o);
  if (o.d < 1) throw PreconditionError("--d must be at least 1");
  const GowersReport g =
      o.samples ? gowers_norm_sampled(f, o.d, *o.samples, o.seed) : gowers_norm(f, o.d, budget_of(o));
  emit_report(o, "gowers", gowers_report(g, o.d, f.nvars()));
  return 0;
}

int cmd_derive(const Options& o) {
  const Polynomial f = load_poly(o);
  if (o.d < 0) throw PreconditionError("--d must be nonnegative");
  Polynomial dd(f.field(), 0);
  if (o.method == "semisurjection")
    dd = iterated_discrete_derivative_semisurjection(f, o.d);
  else if (o.method == "recursive")
    dd = iterated_discrete_derivative_recursive(f, o.d);
  else
    throw PreconditionError("unknown --method '" + o.method + "'");
  std::ostringstream s;
  s << "p=" << f.field().p() << "; n=" << f.nvars() << "; blocks=" << o.d + 1 << "; "
    << format_polynomial(dd, f.nvars()) << '\n';
  emit_report(o, "derivative.poly", s.str());
  return 0;
}

int cmd_polarize(const Options& o) {
  const Polynomial f = load_poly(o);
  if (f.is_zero() || !f.is_homogeneous()) throw PreconditionError("polarize needs a nonzero form");
  emit_report(o, "polarization.poly", format_multilinear(polarize(HomogeneousForm::of(f))) + "\n");
  return 0;
}

int cmd_search(const Options& o, const std::string& what) {
  const std::size_t r_default = [&]() -> std::size_t {
    if (!o.form.empty()) return 0;
    return load_poly(o).nvars();
  }();
  if (what == "rank") {
    const Polynomial f = load_poly(o);
    if (f.is_zero() || !f.is_homogeneous()) throw PreconditionError("rank search needs a nonzero homogeneous polynomial");
    const auto r = search_rank(HomogeneousForm::of(f), o.r_max.value_or(r_default), o.max_nodes);
    std::cerr << "status=" << to_string(r.status) << " nodes=" << r.nodes << '\n';
    if (!r.cert) return 1;
    emit_report(o, "rank.cert", format_certificate(*r.cert));
    return 0;
  }
  if (what == "partition-rank") {
    if (o.form.empty()) throw PreconditionError("--form is required");
    const MultilinearForm t = parse_file(o.form, [](const std::string& s) { return parse_multilinear(s); });
    const auto r = search_partition_rank(t, o.r_max.value_or(t.n()), o.max_nodes, budget_of(o));
    std::cerr << "status=" << to_string(r.status) << " nodes=" << r.nodes << '\n';
    if (!r.cert) return 1;
    emit_report(o, "partition-rank.cert", format_certificate(*r.cert));
    return 0;
  }
  // variety for the degree-d pipeline, from a partition-rank search on Delta^d f
  const Polynomial f = load_poly(o);
  if (o.d < 2) throw PreconditionError("variety search needs --d >= 2");
  const auto ts = derivative_coefficient_forms(f, o.d);
  const MultilinearForm D = detail::derivative_form(f, o.d);
  VarietyCert v{f.field(), f.nvars(), static_cast<std::size_t>(o.d - 1), {}};
  if (!D.is_zero()) {
    const auto r = search_partition_rank(D, o.r_max.value_or(f.nvars()), o.max_nodes, budget_of(o));
    std::cerr << "status=" << to_string(r.status) << " nodes=" << r.nodes << '\n';
    if (!r.cert) return 1;
    v = variety_from_partition_rank(*r.cert);
  }
  emit_report(o, "variety.cert", format_certificate(v));
  return 0;
}

int cmd_pipeline(const Options& o, const std::string& name) {
  const Polynomial f = load_poly(o);
  PipelineOptions opt;
  opt.budget = budget_of(o);
  opt.r_max = o.r_max;
  opt.max_nodes = o.max_nodes;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    opt.sink = [dir = fs::path(o.out)](const std::string& file, const std::string& content) {
      write_file(dir / file, content);
    };
  }
  CorrelationCert c;
  if (name == "homogeneous") {
    if (f.is_zero() || !f.is_homogeneous())
      throw PreconditionError("homogeneous pipeline needs a nonzero form");
    std::optional<PartitionRankCert> pr;
    if (!o.cert.empty()) pr = cert_as<PartitionRankCert>(load_cert(o.cert), o.cert);
    c = pipeline_homogeneous(HomogeneousForm::of(f), o.d, pr, opt);
  } else if (name == "degree-d") {
    if (o.cert.empty()) throw PreconditionError("degree-d pipeline needs --cert with a variety certificate");
    c = pipeline_degree_d(f, o.d, cert_as<VarietyCert>(load_cert(o.cert), o.cert), opt);
  } else if (name == "degree-d1") {
    std::optional<DecompositionCert> g, hc;
    if (!o.cert.empty()) g = cert_as<DecompositionCert>(load_cert(o.cert), o.cert);
    if (!o.hc_cert.empty()) hc = cert_as<DecompositionCert>(load_cert(o.hc_cert), o.hc_cert);
    c = pipeline_degree_d_plus_1(f, o.d, g, hc, opt);
  } else {
    throw PreconditionError("unknown pipeline '" + name + "'");
  }
  std::cout << "cor=" << format_number(c.exact_bias) << " floor=" << format_number(c.claimed_floor)
            << " degP=" << (c.P.degree() ? std::to_string(*c.P.degree()) : std::string("-inf"))
            << '\n';
  return 0;
}

int cmd_check(const Options& o) {
  if (o.trials == 0) std::cerr << "warning: --trials 0 checks nothing; reporting a vacuous pass\n";
  const auto results = run_suite(o.suite, o.trials, o.seed);
  const std::string csv = format_suite_csv(results);
  std::cout << csv;
  bool failed = false;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "check.csv", csv);
  }
  for (const auto& r : results) {
    if (!r.counterexample) continue;
    failed = true;
    std::cerr << "FAIL " << r.suite << '/' << r.name;
    if (!r.error.empty()) std::cerr << " (" << r.error << ")";
    std::cerr << "\n" << *r.counterexample;
    if (!o.out.empty()) write_file(fs::path(o.out) / (r.name + ".instance"), *r.counterexample);
  }
  return failed ? 1 : 0;
}

int cmd_replay(const Options& o) {
  if (o.cert.empty()) throw PreconditionError("--cert must name a serialized instance");
  const bool ok = parse_file(o.cert, [](const std::string& t) { return replay_instance(t); });
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_verify(const Options& o) {
  if (o.cert.empty()) throw PreconditionError("--cert is required");
  const Certificate c = load_cert(o.cert);
  std::optional<Polynomial> f;
  if (!o.poly.empty()) f = load_poly(o);
  const Verdict v = verify_certificate(c, f, budget_of(o));
  Report r{{"kind", certificate_kind(c)}, {"valid", v.ok ? "true" : "false"}};
  if (!v.ok) r.push_back({"reason", v.reason});
  std::cout << render(r, output_format(o));
  return v.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hofa: exact higher-order Fourier analysis over prime fields"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--poly", o.poly, "polynomial file");
    sub->add_option("--p", o.p, "expected field size");
    sub->add_option("--n", o.n, "expected variable count");
    sub->add_option("--budget", o.budget, "cap on exhaustively evaluated points");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "text or csv");
    sub->add_option("--threads", o.threads, "worker threads (default HOFA_THREADS or hardware)");
    sub->add_option("--seed", o.seed, "random seed");
  };

  auto* eval = app.add_subcommand("eval", "evaluate a polynomial at a point");
  common(eval);
  eval->add_option("--point", o.point, "comma-separated coordinates")->required();

  auto* bias = app.add_subcommand("bias", "bias of a polynomial");
  common(bias);
  auto* exact_flag = bias->add_flag("--exact", o.exact, "exhaustive (default)");
  bias->add_option("--samples", o.samples, "Monte Carlo sample count")->excludes(exact_flag);

  auto* gowers = app.add_subcommand("gowers", "Gowers U^d norm of e(f)");
  common(gowers);
  gowers->add_option("--d", o.d, "order")->required();
  auto* gexact = gowers->add_flag("--exact", o.exact, "exhaustive (default)");
  gowers->add_option("--samples", o.samples, "Monte Carlo sample count")->excludes(gexact);

  auto* derive = app.add_subcommand("derive", "symbolic iterated discrete derivative");
  common(derive);
  derive->add_option("--d", o.d, "order")->required();
  derive->add_option("--method", o.method, "semisurjection or recursive");

  auto* polar = app.add_subcommand("polarize", "polarization of a form");
  common(polar);

  auto* search = app.add_subcommand("search", "bounded certificate search");
  common(search);
  std::string search_kind;
  search->add_option("kind", search_kind, "rank | partition-rank | variety")
      ->required()
      ->check(CLI::IsMember({"rank", "partition-rank", "variety"}));
  search->add_option("--form", o.form, "multilinear form file (partition-rank)");
  search->add_option("--d", o.d, "order (variety)");
  search->add_option("--r-max", o.r_max, "largest length tried (default n)");
  search->add_option("--max-nodes", o.max_nodes, "search node budget");

  auto* pipeline = app.add_subcommand("pipeline", "run a correlation pipeline");
  common(pipeline);
  std::string pipeline_name;
  pipeline->add_option("name", pipeline_name, "homogeneous | degree-d | degree-d1")
      ->required()
      ->check(CLI::IsMember({"homogeneous", "degree-d", "degree-d1"}));
  pipeline->add_option("--d", o.d, "order")->required();
  pipeline->add_option("--cert", o.cert, "partition-rank, variety or g decomposition certificate");
  pipeline->add_option("--hc-cert", o.hc_cert, "decomposition certificate for h - d_c g");
  pipeline->add_option("--r-max", o.r_max, "search bound (default n)");
  pipeline->add_option("--max-nodes", o.max_nodes, "search node budget");

  auto* check = app.add_subcommand("check", "run the property suites");
  common(check);
  check->add_option("--suite", o.suite, "identities | inequalities | certificates | all")
      ->check(CLI::IsMember({"identities", "inequalities", "certificates", "all"}));
  check->add_option("--trials", o.trials, "instances per property");

  auto* replay = app.add_subcommand("replay", "re-check a serialized failing instance");
  common(replay);
  replay->add_option("--cert", o.cert, "instance file")->required();

  auto* verify = app.add_subcommand("verify", "verify a certificate file");
  common(verify);
  verify->add_option("--cert", o.cert, "certificate file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (o.threads) set_thread_count(o.threads);
    if (*eval) return cmd_eval(o);
    if (*bias) return cmd_bias(o);
    if (*gowers) return cmd_gowers(o);
    if (*derive) return cmd_derive(o);
    if (*polar) return cmd_polarize(o);
    if (*search) return cmd_search(o, search_kind);
    if (*pipeline) return cmd_pipeline(o, pipeline_name);
    if (*check) return cmd_check(o);
    if (*replay) return cmd_replay(o);
    if (*verify) return cmd_verify(o);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
