#ifndef HOFA_CERTIFICATE_IO_HPP
#define HOFA_CERTIFICATE_IO_HPP

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hofa/bias.hpp"
#include "hofa/error.hpp"
#include "hofa/field.hpp"
#include "hofa/multilinear.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/rank.hpp"
#include "hofa/rkstar.hpp"
#include "hofa/text_format.hpp"

// Certificate files are `key=value` lines; '#' starts a comment line and
// repeated keys (factor, term, generator, form, provenance) form lists.
// Polynomial values use the body syntax of the polynomial text format, and
// factor pairs are written `alpha | beta`.

namespace hofa {

enum class OutputFormat { text, csv };

/// 12 significant digits; "inf" for infinity.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

/// Ordered key/value pairs rendered as `key=value` lines or as a CSV header
/// plus one row.
using Report = std::vector<std::pair<std::string, std::string>>;

inline std::string render(const Report& report, OutputFormat format) {
  std::ostringstream out;
  if (format == OutputFormat::text) {
    for (const auto& [k, v] : report) out << k << '=' << v << '\n';
    return out.str();
  }
  auto csv_field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  };
  for (std::size_t i = 0; i < report.size(); ++i) out << (i ? "," : "") << csv_field(report[i].first);
  out << '\n';
  for (std::size_t i = 0; i < report.size(); ++i) out << (i ? "," : "") << csv_field(report[i].second);
  out << '\n';
  return out.str();
}

/// `value:count` for every nonzero count, comma separated.
inline std::string format_histogram(const ValueHistogram& h) {
  std::ostringstream out;
  bool first = true;
  h.for_each_nonzero([&](FieldElement a, std::uint64_t c) {
    out << (first ? "" : ",") << a.value << ':' << c;
    first = false;
  });
  return out.str();
}

/// One `key=value` line of a certificate file.
struct CertLine {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;  // of the first character of value
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<CertLine> split_lines(std::string_view text) {
  std::vector<CertLine> out;
  std::size_t start = 0, number = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string t = trim(line);
    if (!t.empty() && t[0] != '#') {
      std::size_t eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ParseError("expected key=value", number, 1);
      std::size_t vstart = eq + 1;
      while (vstart < line.size() && std::isspace(static_cast<unsigned char>(line[vstart]))) ++vstart;
      out.push_back({trim(line.substr(0, eq)), trim(line.substr(vstart)), number, vstart + 1});
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

class CertRecord {
public:
  explicit CertRecord(std::string_view text) : lines_(split_lines(text)) {}

  const CertLine* find(const std::string& key) const {
    const CertLine* hit = nullptr;
    for (const auto& l : lines_)
      if (l.key == key) {
        if (hit) throw ParseError("duplicate key '" + key + "'", l.line, 1);
        hit = &l;
      }
    return hit;
  }
  const CertLine& get(const std::string& key) const {
    if (const CertLine* l = find(key)) return *l;
    throw ParseError("missing key '" + key + "'", lines_.empty() ? 1 : lines_.back().line + 1, 1);
  }
  std::vector<const CertLine*> all(const std::string& key) const {
    std::vector<const CertLine*> out;
    for (const auto& l : lines_)
      if (l.key == key) out.push_back(&l);
    return out;
  }
  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& l : lines_) {
      bool ok = false;
      for (auto k : keys) ok = ok || l.key == k;
      if (!ok) throw ParseError("unknown key '" + l.key + "'", l.line, 1);
    }
  }

private:
  std::vector<CertLine> lines_;
};

inline std::uint64_t parse_uint(const std::string& s, std::size_t line, std::size_t column) {
  if (s.empty()) throw ParseError("expected an integer", line, column);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw ParseError("expected an integer", line, column + i);
    if (v > (UINT64_MAX - 9) / 10) throw ParseError("number too large", line, column);
    v = v * 10 + static_cast<std::uint64_t>(s[i] - '0');
  }
  return v;
}

inline std::uint64_t uint_of(const CertLine& l) { return parse_uint(l.value, l.line, l.column); }

inline double double_of(const CertLine& l) {
  if (l.value == "inf") return std::numeric_limits<double>::infinity();
  std::istringstream in(l.value);
  double v = 0;
  if (!(in >> v) || !(in >> std::ws).eof()) throw ParseError("expected a number", l.line, l.column);
  return v;
}

/// Comma-separated unsigned integers; empty text gives an empty list.
inline std::vector<std::uint64_t> uint_list(const std::string& s, std::size_t line,
                                            std::size_t column) {
  std::vector<std::uint64_t> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = s.find(',', start);
    std::string_view piece = std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t lead = 0;
    while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
    out.push_back(parse_uint(trim(piece), line, column + start + lead));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

inline std::vector<std::uint64_t> uint_list(const CertLine& l) {
  return uint_list(l.value, l.line, l.column);
}

/// Segments of a value split at '|', each with its column.
inline std::vector<std::pair<std::string, std::size_t>> bars(const CertLine& l, std::size_t expected) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = l.value.find('|', start);
    std::size_t end = bar == std::string::npos ? l.value.size() : bar;
    out.emplace_back(l.value.substr(start, end - start), l.column + start);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  if (out.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " fields separated by '|'", l.line,
                     l.column);
  return out;
}

/// Parses a body that sits at (line, column) of a certificate file.
inline Polynomial body_at(const std::string& text, std::size_t line, std::size_t column,
                          const FieldSpec& F, std::size_t n,
                          std::optional<std::size_t> blocks = std::nullopt) {
  try {
    return parse_polynomial_body(text, F, n, blocks);
  } catch (const ParseError& e) {
    throw ParseError(e.reason(), line, column + e.column() - 1);
  }
}

inline Polynomial body_of(const CertLine& l, const FieldSpec& F, std::size_t n,
                          std::optional<std::size_t> blocks = std::nullopt) {
  return body_at(l.value, l.line, l.column, F, n, blocks);
}

/// Wraps a failing semantic constructor so the error points at the line.
template <class Make>
auto at_line(const CertLine& l, Make&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ParseError&) {
    throw;
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), l.line, l.column);
  }
}

inline FieldSpec field_of(const CertRecord& rec) {
  const CertLine& l = rec.get("p");
  return at_line(l, [&] { return FieldSpec(uint_of(l)); });
}

inline std::string join(const std::vector<std::size_t>& xs, std::size_t offset = 0) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i] + offset);
  return out;
}

inline std::string join_blocks(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i] + 1);
  return out;
}

inline std::string join_elements(const std::vector<FieldElement>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i].value);
  return out;
}

/// 1-based block list to 0-based, range checked.
inline std::vector<int> blocks_of(const std::string& s, std::size_t line, std::size_t column,
                                  std::size_t blocks) {
  std::vector<int> out;
  for (auto b : uint_list(s, line, column)) {
    if (b < 1 || b > blocks)
      throw ParseError("block " + std::to_string(b) + " outside [1, " + std::to_string(blocks) + "]",
                       line, column);
    out.push_back(static_cast<int>(b - 1));
  }
  return out;
}

inline std::vector<FieldElement> elements_of(const CertLine& l, const FieldSpec& F) {
  std::vector<FieldElement> out;
  for (auto v : uint_list(l)) {
    if (v >= F.p()) throw ParseError("field element outside [0, p)", l.line, l.column);
    out.emplace_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

inline void expect_kind(const CertRecord& rec, std::string_view kind) {
  const CertLine& l = rec.get("kind");
  if (l.value != kind)
    throw ParseError("expected kind=" + std::string(kind) + ", found '" + l.value + "'", l.line,
                     l.column);
}

inline std::vector<PolyPair> pairs_of(const CertRecord& rec, const FieldSpec& F, std::size_t n) {
  std::vector<PolyPair> out;
  for (const CertLine* l : rec.all("factor")) {
    auto seg = bars(*l, 2);
    out.push_back({body_at(seg[0].first, l->line, seg[0].second, F, n),
                   body_at(seg[1].first, l->line, seg[1].second, F, n)});
  }
  return out;
}

inline void write_pairs(std::ostringstream& out, const std::vector<PolyPair>& pairs) {
  for (const auto& [a, b] : pairs)
    out << "factor=" << format_polynomial(a) << " | " << format_polynomial(b) << '\n';
}

} // namespace detail

inline ValueHistogram parse_histogram(const std::string& s, std::uint32_t p) {
  ValueHistogram h(p);
  if (detail::trim(s).empty()) return h;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = s.find(',', start);
    std::string piece = detail::trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    std::size_t colon = piece.find(':');
    if (colon == std::string::npos) throw ParseError("expected value:count", 1, start + 1);
    auto a = detail::parse_uint(detail::trim(piece.substr(0, colon)), 1, start + 1);
    auto c = detail::parse_uint(detail::trim(piece.substr(colon + 1)), 1, start + colon + 2);
    if (a >= p) throw ParseError("histogram value outside [0, p)", 1, start + 1);
    h.add(FieldElement(static_cast<std::uint32_t>(a)), c);
    if (comma == std::string::npos) return h;
    start = comma + 1;
  }
}

// Multilinear form text:  p=5; n=2; blocks=3; support=1,2,3; x1_1*x2_2*x3_1 + ...
// support lists 1-based blocks and defaults to all of them.

inline MultilinearForm parse_multilinear(std::string_view raw) {
  const std::string text = detail::blank_comments(raw);
  auto split = detail::split_header(text);
  detail::TextCursor at_start(text, 0, text.size());
  if (!split.header.p) at_start.fail("missing header entry 'p'");
  if (!split.header.n) at_start.fail("missing header entry 'n'");
  if (!split.header.blocks) at_start.fail("missing header entry 'blocks'");
  FieldSpec field = [&] {
    try {
      return FieldSpec(*split.header.p);
    } catch (const PreconditionError& e) {
      at_start.fail(e.what());
    }
  }();
  const std::size_t n = *split.header.n, blocks = *split.header.blocks;
  std::vector<int> support;
  if (split.header.support) {
    for (int b : *split.header.support) {
      if (b < 1 || static_cast<std::size_t>(b) > blocks) at_start.fail("support block out of range");
      support.push_back(b - 1);
    }
  } else {
    for (std::size_t b = 0; b < blocks; ++b) support.push_back(static_cast<int>(b));
  }
  Polynomial body =
      detail::parse_body(text, split.body_begin, split.body_end, field, n, blocks);
  try {
    return MultilinearForm(std::move(body), n, blocks, std::move(support));
  } catch (const ParseError&) {
    throw;
  } catch (const PreconditionError& e) {
    at_start.fail_at(e.what(), split.body_begin);
  }
}

inline std::string format_multilinear(const MultilinearForm& t) {
  std::ostringstream out;
  out << "p=" << t.field().p() << "; n=" << t.n() << "; blocks=" << t.blocks()
      << "; support=" << detail::join_blocks(t.support()) << "; "
      << format_polynomial(t.poly(), t.n());
  return out.str();
}

// ---- writers ----

inline std::string format_certificate(const DecompositionCert& c) {
  std::ostringstream out;
  out << "kind=decomposition\np=" << c.target.field().p() << "\nn=" << c.target.nvars()
      << "\ndegree=" << c.target.degree() << "\nbound=" << c.length()
      << "\ntarget=" << format_polynomial(c.target.poly()) << '\n';
  for (const auto& [a, b] : c.factors)
    out << "factor=" << format_polynomial(a.poly()) << " | " << format_polynomial(b.poly()) << '\n';
  return out.str();
}

inline std::string format_certificate(const PartitionRankCert& c) {
  const MultilinearForm& t = c.target;
  std::ostringstream out;
  out << "kind=partition-rank\np=" << t.field().p() << "\nn=" << t.n() << "\nblocks=" << t.blocks()
      << "\nsupport=" << detail::join_blocks(t.support()) << "\nnormalization=rref-span"
      << "\nbound=" << c.length() << "\ntarget=" << format_polynomial(t.poly(), t.n()) << '\n';
  for (const auto& term : c.terms)
    out << "term=" << detail::join_blocks(term.part) << " | "
        << format_polynomial(term.r.poly(), t.n()) << " | "
        << format_polynomial(term.q.poly(), t.n()) << '\n';
  return out.str();
}

inline std::string format_certificate(const RkStarCert& c) {
  std::ostringstream out;
  out << "kind=rkstar\np=" << c.target.field().p() << "\nn=" << c.target.nvars()
      << "\nbound=" << c.length() << "\ntarget=" << format_polynomial(c.target) << '\n';
  detail::write_pairs(out, c.factors);
  return out.str();
}

inline std::string format_certificate(const PerturbationCert& c) {
  const Polynomial& f = c.source.target;
  std::ostringstream out;
  out << "kind=perturbation\np=" << f.field().p() << "\nn=" << f.nvars() << "\nk=" << c.k
      << "\ntarget=" << format_polynomial(f) << '\n';
  detail::write_pairs(out, c.source.factors);
  out << "affine=" << detail::join(c.affine_group, 1) << "\nrest=" << detail::join(c.rest_group, 1)
      << "\ny=" << detail::join_elements(c.y) << "\nz=" << detail::join_elements(c.z)
      << "\nc0=" << c.c0.value << "\nm=" << c.m() << "\nzero_count=" << c.zero_count << '\n';
  for (std::size_t i = 0; i < c.m(); ++i)
    out << "generator=" << format_polynomial(c.generators[i]) << " | "
        << format_polynomial(c.multipliers[i]) << '\n';
  return out.str();
}

inline std::string format_certificate(const VarietyCert& c) {
  std::ostringstream out;
  out << "kind=variety\np=" << c.field.p() << "\nn=" << c.n << "\nblocks=" << c.blocks
      << "\nm=" << c.forms.size() << '\n';
  for (const auto& s : c.forms)
    out << "form=" << detail::join_blocks(s.support()) << " | " << format_polynomial(s.poly(), c.n)
        << '\n';
  return out.str();
}

inline std::string format_certificate(const CorrelationCert& c) {
  std::ostringstream out;
  out << "kind=correlation\np=" << c.f.field().p() << "\nn=" << c.f.nvars()
      << "\nf=" << format_polynomial(c.f) << "\nP=" << format_polynomial(c.P)
      << "\ndegree_bound=" << c.degree_bound << "\nexact_bias=" << format_number(c.exact_bias)
      << "\nclaimed_floor=" << format_number(c.claimed_floor)
      << "\nhistogram=" << format_histogram(c.histogram) << '\n';
  for (const auto& line : c.provenance) out << "provenance=" << line << '\n';
  return out.str();
}

// ---- readers ----

inline DecompositionCert parse_decomposition_cert(std::string_view text) {
  detail::CertRecord rec(text);
  rec.allow_only({"kind", "p", "n", "degree", "bound", "target", "factor"});
  detail::expect_kind(rec, "decomposition");
  const FieldSpec F = detail::field_of(rec);
  const std::size_t n = detail::uint_of(rec.get("n"));
  const CertLine& dl = rec.get("degree");
  const int k = static_cast<int>(detail::uint_of(dl));
  DecompositionCert c;
  const CertLine& tl = rec.get("target");
  c.target = detail::at_line(tl, [&] { return HomogeneousForm(detail::body_of(tl, F, n), k); });
  for (const CertLine* l : rec.all("factor")) {
    auto seg = detail::bars(*l, 2);
    Polynomial a = detail::body_at(seg[0].first, l->line, seg[0].second, F, n);
    Polynomial b = detail::body_at(seg[1].first, l->line, seg[1].second, F, n);
    c.factors.push_back(detail::at_line(*l, [&] {
      return FactorPair{HomogeneousForm::of(std::move(a)), HomogeneousForm::of(std::move(b))};
    }));
  }
  if (const CertLine* b = rec.find("bound"); b && detail::uint_of(*b) != c.length())
    throw ParseError("bound does not match the number of factors", b->line, b->column);
  return c;
}

inline PartitionRankCert parse_partition_rank_cert(std::string_view text) {
  detail::CertRecord rec(text);
  rec.allow_only({"kind", "p", "n", "blocks", "support", "normalization", "bound", "target", "term"});
  detail::expect_kind(rec, "partition-rank");
  const FieldSpec F = detail::field_of(rec);
  const std::size_t n = detail::uint_of(rec.get("n"));
  const std::size_t blocks = detail::uint_of(rec.get("blocks"));
  std::vector<int> support;
  if (const CertLine* s = rec.find("support"))
    support = detail::blocks_of(s->value, s->line, s->column, blocks);
  else
    for (std::size_t b = 0; b < blocks; ++b) support.push_back(static_cast<int>(b));
  if (const CertLine* nl = rec.find("normalization"); nl && nl->value != "rref-span")
    throw ParseError("unknown normalization '" + nl->value + "'", nl->line, nl->column);
  const CertLine& tl = rec.get("target");
  PartitionRankCert c{detail::at_line(tl, [&] {
    return MultilinearForm(detail::body_of(tl, F, n, blocks), n, blocks, support);
  }), {}};
  for (const CertLine* l : rec.all("term")) {
    auto seg = detail::bars(*l, 3);
    std::vector<int> part = detail::blocks_of(seg[0].first, l->line, seg[0].second, blocks);
    std::sort(part.begin(), part.end());
    std::vector<int> rest;
    std::set_difference(c.target.support().begin(), c.target.support().end(), part.begin(),
                        part.end(), std::back_inserter(rest));
    Polynomial r = detail::body_at(seg[1].first, l->line, seg[1].second, F, n, blocks);
    Polynomial q = detail::body_at(seg[2].first, l->line, seg[2].second, F, n, blocks);
    c.terms.push_back(detail::at_line(*l, [&] {
      return PartitionTerm{part, MultilinearForm(std::move(r), n, blocks, part),
                           MultilinearForm(std::move(q), n, blocks, rest)};
    }));
  }
  if (const CertLine* b = rec.find("bound"); b && detail::uint_of(*b) != c.length())
    throw ParseError("bound does not match the number of terms", b->line, b->column);
  return c;
}

inline RkStarCert parse_rkstar_cert(std::string_view text) {
  detail::CertRecord rec(text);
  rec.allow_only({"kind", "p", "n", "bound", "target", "factor"});
  detail::expect_kind(rec, "rkstar");
  const FieldSpec F = detail::field_of(rec);
  const std::size_t n = detail::uint_of(rec.get("n"));
  RkStarCert c{detail::body_of(rec.get("target"), F, n), detail::pairs_of(rec, F, n)};
  if (const CertLine* b = rec.find("bound"); b && detail::uint_of(*b) != c.length())
    throw ParseError("bound does not match the number of factors", b->line, b->column);
  return c;
}

inline PerturbationCert parse_perturbation_cert(std::string_view text) {
  detail::CertRecord rec(text);
  rec.allow_only({"kind", "p", "n", "k", "target", "factor", "affine", "rest", "y", "z", "c0", "m",
                  "zero_count", "generator"});
  detail::expect_kind(rec, "perturbation");
  const FieldSpec F = detail::field_of(rec);
  const std::size_t n = detail::uint_of(rec.get("n"));
  PerturbationCert c;
  c.source = RkStarCert{detail::body_of(rec.get("target"), F, n), detail::pairs_of(rec, F, n)};
  c.k = static_cast<int>(detail::uint_of(rec.get("k")));
  auto indices = [&](const char* key) {
    const CertLine& l = rec.get(key);
    std::vector<std::size_t> out;
    for (auto v : detail::uint_list(l)) {
      if (v < 1 || v > c.source.length()) throw ParseError("factor index out of range", l.line, l.column);
      out.push_back(static_cast<std::size_t>(v - 1));
    }
    return out;
  };
  c.affine_group = indices("affine");
  c.rest_group = indices("rest");
  c.y = detail::elements_of(rec.get("y"), F);
  c.z = detail::elements_of(rec.get("z"), F);
  const CertLine& c0 = rec.get("c0");
  const auto c0v = detail::uint_of(c0);
  if (c0v >= F.p()) throw ParseError("field element outside [0, p)", c0.line, c0.column);
  c.c0 = FieldElement(static_cast<std::uint32_t>(c0v));
  c.zero_count = detail::uint_of(rec.get("zero_count"));
  for (const CertLine* l : rec.all("generator")) {
    auto seg = detail::bars(*l, 2);
    c.generators.push_back(detail::body_at(seg[0].first, l->line, seg[0].second, F, n));
    c.multipliers.push_back(detail::body_at(seg[1].first, l->line, seg[1].second, F, n));
  }
  if (const CertLine* m = rec.find("m"); m && detail::uint_of(*m) != c.m())
    throw ParseError("m does not match the number of generators", m->line, m->column);
  return c;
}

inline VarietyCert parse_variety_cert(std::string_view text) {
  detail::CertRecord rec(text);
  rec.allow_only({"kind", "p", "n", "blocks", "m", "form"});
  detail::expect_kind(rec, "variety");
  VarietyCert c;
  c.field = detail::field_of(rec);
  c.n = detail::uint_of(rec.get("n"));
  c.blocks = detail::uint_of(rec.get("blocks"));
  for (const CertLine* l : rec.all("form")) {
    auto seg = detail::bars(*l, 2);
    std::vector<int> support = detail::blocks_of(seg[0].first, l->line, seg[0].second, c.blocks);
    Polynomial body = detail::body_at(seg[1].first, l->line, seg[1].second, c.field, c.n, c.blocks);
    c.forms.push_back(detail::at_line(
        *l, [&] { return MultilinearForm(std::move(body), c.n, c.blocks, std::move(support)); }));
  }
  if (const CertLine* m = rec.find("m"); m && detail::uint_of(*m) != c.forms.size())
    throw ParseError("m does not match the number of forms", m->line, m->column);
  return c;
}

inline CorrelationCert parse_correlation_cert(std::string_view text) {
  detail::CertRecord rec(text);
  rec.allow_only({"kind", "p", "n", "f", "P", "degree_bound", "exact_bias", "claimed_floor",
                  "histogram", "provenance"});
  detail::expect_kind(rec, "correlation");
  const FieldSpec F = detail::field_of(rec);
  const std::size_t n = detail::uint_of(rec.get("n"));
  CorrelationCert c;
  c.f = detail::body_of(rec.get("f"), F, n);
  c.P = detail::body_of(rec.get("P"), F, n);
  c.degree_bound = static_cast<int>(detail::uint_of(rec.get("degree_bound")));
  c.exact_bias = detail::double_of(rec.get("exact_bias"));
  c.claimed_floor = detail::double_of(rec.get("claimed_floor"));
  const CertLine& hl = rec.get("histogram");
  try {
    c.histogram = parse_histogram(hl.value, F.p());
  } catch (const ParseError& e) {
    throw ParseError(e.reason(), hl.line, hl.column + e.column() - 1);
  }
  for (const CertLine* l : rec.all("provenance")) c.provenance.push_back(l->value);
  return c;
}

using Certificate = std::variant<DecompositionCert, PartitionRankCert, RkStarCert,
                                 PerturbationCert, VarietyCert, CorrelationCert>;

inline const char* certificate_kind(const Certificate& c) {
  static const char* const names[] = {"decomposition", "partition-rank", "rkstar",
                                      "perturbation",  "variety",        "correlation"};
  return names[c.index()];
}

/// Dispatches on the `kind` line.
inline Certificate parse_certificate(std::string_view text) {
  detail::CertRecord rec(text);
  const CertLine& k = rec.get("kind");
  if (k.value == "decomposition") return parse_decomposition_cert(text);
  if (k.value == "partition-rank") return parse_partition_rank_cert(text);
  if (k.value == "rkstar") return parse_rkstar_cert(text);
  if (k.value == "perturbation") return parse_perturbation_cert(text);
  if (k.value == "variety") return parse_variety_cert(text);
  if (k.value == "correlation") return parse_correlation_cert(text);
  throw ParseError("unknown certificate kind '" + k.value + "'", k.line, k.column);
}

inline std::string format_certificate(const Certificate& c) {
  return std::visit([](const auto& x) { return format_certificate(x); }, c);
}

// ---- reports ----

inline Report bias_report(const BiasReport& b, std::size_t nvars) {
  Report r{{"method", b.method == BiasMethod::exact ? "exact" : "sampled"},
           {"p", std::to_string(b.histogram.p())},
           {"n", std::to_string(nvars)}};
  if (b.method == BiasMethod::exact) {
    r.push_back({"points", std::to_string(b.histogram.total())});
  } else {
    r.push_back({"samples", std::to_string(b.samples)});
    r.push_back({"half_width", format_number(b.half_width)});
  }
  r.push_back({"bias", format_number(b.magnitude)});
  r.push_back({"bias_re", format_number(b.bias_complex.real())});
  r.push_back({"bias_im", format_number(b.bias_complex.imag())});
  r.push_back({"histogram", format_histogram(b.histogram)});
  return r;
}

inline Report gowers_report(const GowersReport& g, int d, std::size_t nvars) {
  Report r{{"d", std::to_string(d)}, {"norm", format_number(g.norm)}};
  for (auto& kv : bias_report(g.derivative, nvars * static_cast<std::size_t>(d + 1))) {
    if (kv.first == "bias") kv.first = "derivative_bias";
    r.push_back(std::move(kv));
  }
  return r;
}

inline Report zero_set_report(const ZeroSetReport& z) {
  return {{"count", std::to_string(z.count)},
          {"density", format_number(z.density)},
          {"conditional_histogram", format_histogram(z.conditional_histogram)}};
}

inline Report analytic_rank_report(const AnalyticRank& a) {
  return {{"analytic_rank", a.infinite ? std::string("inf") : format_number(a.value)},
          {"bias", format_number(a.bias.magnitude)},
          {"histogram", format_histogram(a.bias.histogram)}};
}

inline Report correlation_report(const CorrelationCert& c) {
  Report r{{"cor", format_number(c.exact_bias)},
           {"floor", format_number(c.claimed_floor)},
           {"degP", c.P.degree() ? std::to_string(*c.P.degree()) : std::string("-inf")},
           {"histogram", format_histogram(c.histogram)}};
  return r;
}

} // namespace hofa

#endif // HOFA_CERTIFICATE_IO_HPP
