#ifndef HOFA_TEXT_FORMAT_HPP
#define HOFA_TEXT_FORMAT_HPP

#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hofa/error.hpp"
#include "hofa/polynomial.hpp"

// Polynomial text format:
//
//   p=5; n=3; 3*x1*x2^2 + 4*x3 + 1
//
// Header entries are `key=value` segments separated by ';'; the final
// segment is the body. Block-structured polynomials add `blocks=<d>` and
// name variables x<block>_<index>. Lines starting with '#' are comments.

namespace hofa {

struct TextHeader {
  std::optional<std::uint64_t> p;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> blocks;
  std::optional<std::vector<int>> support; // 1-based block numbers
};

namespace detail {

class TextCursor {
public:
  TextCursor(std::string_view text, std::size_t begin, std::size_t end)
      : text_(text), pos_(begin), end_(end) {}

  void skip_space() {
    while (pos_ < end_ && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= end_;
  }
  char peek() {
    skip_space();
    return pos_ < end_ ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  /// Reads an unsigned decimal with no leading whitespace skipped inside.
  std::optional<std::uint64_t> number(bool skip = true) {
    if (skip) skip_space();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (v > (UINT64_MAX - 9) / 10) fail("number too large");
      v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) return std::nullopt;
    return v;
  }
  bool raw_accept(char c) {
    if (pos_ < end_ && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::size_t position() const { return pos_; }

  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(what, line, column);
  }

private:
  std::string_view text_;
  std::size_t pos_;
  std::size_t end_;
};

/// Comments become blanks so positions in error messages stay accurate.
inline std::string blank_comments(std::string_view text) {
  std::string out(text);
  bool line_start = true;
  bool in_comment = false;
  for (char& ch : out) {
    if (ch == '\n') {
      line_start = true;
      in_comment = false;
      continue;
    }
    if (line_start && !std::isspace(static_cast<unsigned char>(ch))) {
      if (ch == '#') in_comment = true;
      line_start = false;
    }
    if (in_comment) ch = ' ';
  }
  return out;
}

/// Parses a body in [begin, end) of `text`. With `blocks`, variables are
/// x<b>_<i> and the result has n * blocks variables.
inline Polynomial parse_body(std::string_view text, std::size_t begin, std::size_t end,
                             FieldSpec field, std::size_t n,
                             std::optional<std::size_t> blocks) {
  const std::size_t total = blocks ? n * *blocks : n;
  TextCursor cur(text, begin, end);
  Polynomial result(field, total);
  if (cur.at_end()) cur.fail("empty polynomial");

  bool first = true;
  while (!cur.at_end()) {
    bool negative = false;
    if (cur.accept('+')) {
      negative = false;
    } else if (cur.accept('-')) {
      negative = true;
    } else if (!first) {
      cur.fail("expected '+' or '-' between terms");
    }
    first = false;

    FieldElement coeff = field.one();
    Exponents exps(total, 0);
    bool need_factor = true;
    while (need_factor) {
      char c = cur.peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t at = cur.position();
        auto v = cur.number();
        if (*v >= field.p()) cur.fail_at("coefficient " + std::to_string(*v) +
                                             " outside [0, " + std::to_string(field.p()) + ")",
                                         at);
        FieldElement value(static_cast<std::uint32_t>(*v));
        if (cur.accept('^')) {
          auto e = cur.number();
          if (!e) cur.fail("expected exponent after '^'");
          value = field.pow(value, *e);
        }
        coeff = field.mul(coeff, value);
      } else if (c == 'x') {
        cur.accept('x');
        std::size_t at = cur.position();
        auto first_index = cur.number(false);
        if (!first_index) cur.fail("expected variable index after 'x'");
        std::size_t var = 0;
        if (blocks) {
          if (!cur.raw_accept('_')) cur.fail("expected x<block>_<index> variable");
          auto index = cur.number(false);
          if (!index) cur.fail("expected variable index after '_'");
          if (*first_index < 1 || *first_index > *blocks)
            cur.fail_at("block " + std::to_string(*first_index) + " outside [1, " +
                            std::to_string(*blocks) + "]",
                        at);
          if (*index < 1 || *index > n)
            cur.fail_at("variable index " + std::to_string(*index) + " outside [1, " +
                            std::to_string(n) + "]",
                        at);
          var = block_variable(n, *first_index - 1, *index - 1);
        } else {
          if (*first_index < 1 || *first_index > n)
            cur.fail_at("variable x" + std::to_string(*first_index) + " outside [1, " +
                            std::to_string(n) + "]",
                        at);
          var = *first_index - 1;
        }
        std::uint64_t e = 1;
        if (cur.accept('^')) {
          auto ev = cur.number();
          if (!ev) cur.fail("expected exponent after '^'");
          e = *ev;
        }
        if (exps[var] + e > UINT16_MAX) cur.fail("exponent too large");
        exps[var] = static_cast<std::uint16_t>(exps[var] + e);
      } else {
        cur.fail(c == '\0' ? "unexpected end of input" : std::string("unexpected character '") + c + "'");
      }
      need_factor = cur.accept('*');
    }
    result.add_term(exps, negative ? field.neg(coeff) : coeff);
  }
  return result;
}

struct SplitText {
  TextHeader header;
  std::size_t body_begin = 0;
  std::size_t body_end = 0;
};

inline std::vector<int> parse_index_list(TextCursor& cur) {
  std::vector<int> out;
  if (cur.at_end()) return out;
  do {
    auto v = cur.number();
    if (!v) cur.fail("expected a block number");
    out.push_back(static_cast<int>(*v));
  } while (cur.accept(','));
  return out;
}

inline SplitText split_header(std::string_view text) {
  SplitText out;
  std::size_t start = 0;
  while (true) {
    std::size_t semi = text.find(';', start);
    std::size_t end = semi == std::string_view::npos ? text.size() : semi;
    std::string_view segment = text.substr(start, end - start);
    std::size_t eq = segment.find('=');
    if (eq == std::string_view::npos) {
      if (semi != std::string_view::npos)
        TextCursor(text, start, end).fail("expected key=value header entry");
      out.body_begin = start;
      out.body_end = end;
      return out;
    }
    std::string key;
    for (char c : segment.substr(0, eq))
      if (!std::isspace(static_cast<unsigned char>(c))) key.push_back(c);
    TextCursor value(text, start + eq + 1, end);
    auto read_number = [&]() {
      auto v = value.number();
      if (!v || !value.at_end()) value.fail("expected an integer value for '" + key + "'");
      return *v;
    };
    if (key == "p") {
      out.header.p = read_number();
    } else if (key == "n") {
      out.header.n = read_number();
    } else if (key == "blocks") {
      out.header.blocks = read_number();
    } else if (key == "support") {
      out.header.support = parse_index_list(value);
      if (!value.at_end()) value.fail("malformed support list");
    } else {
      TextCursor(text, start, end).fail("unknown header key '" + key + "'");
    }
    if (semi == std::string_view::npos) {
      out.body_begin = out.body_end = text.size();
      return out;
    }
    start = semi + 1;
  }
}

} // namespace detail

/// Parses a full polynomial text (`p=..; n=..; body`).
inline Polynomial parse_polynomial(std::string_view raw) {
  const std::string text = detail::blank_comments(raw);
  auto split = detail::split_header(text);
  detail::TextCursor at_start(text, 0, text.size());
  if (!split.header.p) at_start.fail("missing header entry 'p'");
  if (!split.header.n) at_start.fail("missing header entry 'n'");
  if (split.header.blocks) at_start.fail("block header in a plain polynomial; use a form parser");
  FieldSpec field = [&] {
    try {
      return FieldSpec(*split.header.p);
    } catch (const PreconditionError& e) {
      at_start.fail(e.what());
    }
  }();
  return detail::parse_body(text, split.body_begin, split.body_end, field, *split.header.n,
                            std::nullopt);
}

/// Parses only a body against a known field and variable count.
inline Polynomial parse_polynomial_body(std::string_view raw, FieldSpec field, std::size_t n,
                                        std::optional<std::size_t> blocks = std::nullopt) {
  const std::string text = detail::blank_comments(raw);
  return detail::parse_body(text, 0, text.size(), field, n, blocks);
}

/// Canonical body text: terms in decreasing graded-lex order, coefficients in
/// [0, p). With `block_size`, variables print as x<block>_<index>.
inline std::string format_polynomial(const Polynomial& f,
                                     std::optional<std::size_t> block_size = std::nullopt) {
  if (f.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = f.terms().rbegin(); it != f.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) out << " + ";
    first = false;
    bool wrote = false;
    const bool is_constant = total_degree(e) == 0;
    if (c.value != 1 || is_constant) {
      out << c.value;
      wrote = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i]) continue;
      if (wrote) out << '*';
      if (block_size && *block_size > 0)
        out << 'x' << (i / *block_size + 1) << '_' << (i % *block_size + 1);
      else
        out << 'x' << (i + 1);
      if (e[i] > 1) out << '^' << e[i];
      wrote = true;
    }
  }
  return out.str();
}

/// Full text with header, the input format of every CLI command.
inline std::string format_polynomial_file(const Polynomial& f) {
  std::ostringstream out;
  out << "p=" << f.field().p() << "; n=" << f.nvars() << "; " << format_polynomial(f);
  return out.str();
}

} // namespace hofa

#endif // HOFA_TEXT_FORMAT_HPP
