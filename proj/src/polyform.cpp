#include "anticonc/polyform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "anticonc/error.hpp"

namespace anticonc {

double Poly2::operator()(std::span<const double> x) const {
  if (x.size() != n) throw InputError("Poly2: dimension mismatch");
  double v = c0;
  for (std::size_t i = 0; i < n; ++i) {
    v += lin[i] * x[i];
    for (std::size_t j = 0; j < n; ++j) v += quad(i, j) * x[i] * x[j];
  }
  return v;
}

QForm::QForm(double corner, Vector cross, SymMat block)
    : n(block.dim()), q11(corner), q12(std::move(cross)), q22(std::move(block)) {
  if (q12.size() != n) throw InputError("QForm: q12 and Q22 sizes differ");
}

SymMat QForm::assembled() const {
  SymMat q(n + 1);
  q.set(0, 0, q11);
  for (std::size_t i = 0; i < n; ++i) {
    q.set(0, i + 1, q12[i]);
    for (std::size_t j = i; j < n; ++j) q.set(i + 1, j + 1, q22(i, j));
  }
  return q;
}

QForm QForm::from_assembled(const SymMat& q) {
  if (q.dim() == 0) throw InputError("QForm: assembled matrix is empty");
  QForm out(q.dim() - 1);
  out.q11 = q(0, 0);
  for (std::size_t i = 0; i < out.n; ++i) {
    out.q12[i] = q(0, i + 1);
    for (std::size_t j = i; j < out.n; ++j) out.q22.set(i, j, q(i + 1, j + 1));
  }
  return out;
}

QForm QForm::scaled(double factor) const {
  QForm out = *this;
  out.q11 *= factor;
  for (double& v : out.q12) v *= factor;
  out.q22 = q22.scaled(factor);
  return out;
}

double QForm::scale() const noexcept {
  double m = std::max(std::abs(q11), q22.max_abs());
  for (double v : q12) m = std::max(m, std::abs(v));
  return m;
}

namespace {

struct Monomials {
  double constant = 0.0;
  std::map<std::size_t, double> linear;
  std::map<std::pair<std::size_t, std::size_t>, double> quadratic;
  std::size_t max_var = 0;
};

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : text_(text) {}

  Monomials parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty input", pos_);
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
    }
    term(sign);
    for (;;) {
      skip_ws();
      if (at_end()) break;
      const char c = peek();
      if (c != '+' && c != '-') throw ParseError(unexpected(), pos_);
      ++pos_;
      term(c == '-' ? -1.0 : 1.0);
    }
    return std::move(out_);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                         peek() == '\r'))
      ++pos_;
  }

  std::string unexpected() const {
    if (at_end()) return "unexpected end of input";
    return std::string("unexpected token '") + peek() + "'";
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void term(double sign) {
    skip_ws();
    if (at_end()) throw ParseError("expected term", pos_);
    const std::size_t start = pos_;
    double coeff = sign;
    std::vector<std::size_t> vars;
    if (is_digit(peek()) || peek() == '.') {
      coeff *= number();
    } else if (peek() == 'x') {
      factor(vars, start);
    } else {
      throw ParseError(unexpected(), pos_);
    }
    for (;;) {
      skip_ws();
      if (at_end() || peek() != '*') break;
      ++pos_;
      skip_ws();
      if (at_end() || peek() != 'x') throw ParseError("expected variable", pos_);
      factor(vars, start);
    }
    switch (vars.size()) {
      case 0:
        out_.constant += coeff;
        break;
      case 1:
        out_.linear[vars[0]] += coeff;
        break;
      default: {
        const auto key = std::minmax(vars[0], vars[1]);
        out_.quadratic[{key.first, key.second}] += coeff;
        break;
      }
    }
  }

  void factor(std::vector<std::size_t>& vars, std::size_t term_start) {
    ++pos_;  // 'x'
    const std::size_t idx_pos = pos_;
    const std::size_t index = integer("expected variable index");
    if (index == 0) throw ParseError("variable indices start at x1", idx_pos);
    std::size_t power = 1;
    skip_ws();
    if (!at_end() && peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t exp_pos = pos_;
      power = integer("expected exponent");
      if (power == 0) throw ParseError("exponent must be 1 or 2", exp_pos);
      if (power > 2)
        throw DegreeError("degree exceeds 2 in term at position " +
                          std::to_string(term_start));
    }
    for (std::size_t k = 0; k < power; ++k) vars.push_back(index - 1);
    if (vars.size() > 2)
      throw DegreeError("degree exceeds 2 in term at position " +
                        std::to_string(term_start));
    out_.max_var = std::max(out_.max_var, index);
  }

  std::size_t integer(const char* what) {
    const std::size_t start = pos_;
    while (!at_end() && is_digit(peek())) ++pos_;
    if (pos_ == start) throw ParseError(what, start);
    std::size_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc()) throw ParseError("integer out of range", start);
    (void)ptr;
    return value;
  }

  double number() {
    const std::size_t start = pos_;
    while (!at_end() && is_digit(peek())) ++pos_;
    if (!at_end() && peek() == '.') {
      ++pos_;
      while (!at_end() && is_digit(peek())) ++pos_;
    }
    if (pos_ == start + 1 && text_[start] == '.')
      throw ParseError("malformed number", start);
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      ++pos_;
      if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
      const std::size_t digits = pos_;
      while (!at_end() && is_digit(peek())) ++pos_;
      if (pos_ == digits) throw ParseError("malformed exponent", digits);
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value))
      throw ParseError("malformed number", start);
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Monomials out_;
};

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Poly2 parse_poly(std::string_view text) {
  Monomials m = PolyParser(text).parse();
  Poly2 p(m.max_var);
  p.c0 = m.constant;
  for (const auto& [i, a] : m.linear) p.lin[i] += a;
  for (const auto& [ij, a] : m.quadratic) {
    const auto [i, j] = ij;
    p.quad.add(i, j, i == j ? a : 0.5 * a);
  }
  return p;
}

std::string format_poly(const Poly2& p) {
  std::string out;
  bool highest_seen = p.n == 0;
  auto emit = [&](double coeff, const std::string& monomial) {
    if (coeff == 0.0) return;
    const bool neg = coeff < 0.0;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    out += shortest(std::abs(coeff));
    out += monomial;
  };
  auto var = [](std::size_t i) { return "x" + std::to_string(i + 1); };

  emit(p.c0, "");
  for (std::size_t i = 0; i < p.n; ++i) {
    if (p.lin[i] != 0.0 && i + 1 == p.n) highest_seen = true;
    emit(p.lin[i], "*" + var(i));
  }
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = i; j < p.n; ++j) {
      const double a = i == j ? p.quad(i, i) : 2.0 * p.quad(i, j);
      if (a != 0.0 && j + 1 == p.n) highest_seen = true;
      emit(a, i == j ? "*" + var(i) + "^2" : "*" + var(i) + "*" + var(j));
    }
  }
  // Keep the dimension when the last variable has only zero coefficients.
  if (!highest_seen) out += (out.empty() ? "0*" : " + 0*") + var(p.n - 1);
  if (out.empty()) out = "0";
  return out;
}

QForm to_qform(const Poly2& p) {
  QForm q(p.n);
  q.q11 = p.c0;
  for (std::size_t i = 0; i < p.n; ++i) q.q12[i] = 0.5 * p.lin[i];
  q.q22 = p.quad;
  return q;
}

Poly2 to_poly(const QForm& q) {
  Poly2 p(q.n);
  p.c0 = q.q11;
  for (std::size_t i = 0; i < q.n; ++i) p.lin[i] = 2.0 * q.q12[i];
  p.quad = q.q22;
  return p;
}

NonnegCertificate validate_nonneg(const QForm& q, double tol) {
  const PsdCertificate c = is_psd(q.assembled(), tol);
  return {c.psd, c.min_eigenvalue};
}

void require_nonneg(const QForm& q, double tol) {
  const NonnegCertificate c = validate_nonneg(q, tol);
  if (!c.passed)
    throw NotPsdError("quadratic form is not PSD (min eigenvalue " +
                          shortest(c.min_eigenvalue) + ")",
                      c.min_eigenvalue);
}

double evaluate(const QForm& q, std::span<const double> x) {
  if (x.size() != q.n) throw InputError("evaluate: dimension mismatch");
  return q.q11 + 2.0 * dot(q.q12, x) + q.q22.quadratic(x);
}

double expectation(const QForm& q) { return q.q11 + q.q22.trace(); }

}  // namespace anticonc
