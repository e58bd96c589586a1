#include "ywsym/scalar.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <vector>

namespace ywsym {

namespace {

const std::array<std::string, n_params> kParamNames{"h", "e", "alpha", "e1",
                                                    "e2"};

void add_term(std::map<Monomial, mpq_class>& terms, const Monomial& m,
              const mpq_class& q) {
  if (q == 0) return;
  auto it = terms.find(m);
  if (it == terms.end()) {
    terms.emplace(m, q);
    return;
  }
  it->second += q;
  if (it->second == 0) terms.erase(it);
}

}  // namespace

const std::string& param_name(Param p) {
  return kParamNames.at(static_cast<size_t>(p));
}

Scalar::Scalar(long value) {
  if (value != 0) terms_.emplace(unit_monomial, mpq_class(value));
}

Scalar::Scalar(const mpq_class& value) {
  if (value != 0) terms_.emplace(unit_monomial, value);
}

Scalar Scalar::rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::variable(Param p) {
  Scalar s;
  Monomial m = unit_monomial;
  m[static_cast<size_t>(p)] = 1;
  s.terms_.emplace(m, mpq_class(1));
  return s;
}

bool Scalar::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first == unit_monomial);
}

mpq_class Scalar::constant_value() const {
  auto it = terms_.find(unit_monomial);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

Scalar& Scalar::operator+=(const Scalar& rhs) {
  for (const auto& [m, q] : rhs.terms_) add_term(terms_, m, q);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& rhs) {
  for (const auto& [m, q] : rhs.terms_) add_term(terms_, m, mpq_class(-q));
  return *this;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar out;
  for (const auto& [ma, qa] : a.terms_) {
    for (const auto& [mb, qb] : b.terms_) {
      Monomial m;
      for (int i = 0; i < n_params; ++i) m[i] = ma[i] + mb[i];
      add_term(out.terms_, m, mpq_class(qa * qb));
    }
  }
  return out;
}

Scalar& Scalar::operator*=(const Scalar& rhs) {
  *this = *this * rhs;
  return *this;
}

Scalar Scalar::operator-() const {
  Scalar out;
  for (const auto& [m, q] : terms_) out.terms_.emplace(m, mpq_class(-q));
  return out;
}

bool Scalar::operator<(const Scalar& rhs) const {
  auto a = terms_.begin();
  auto b = rhs.terms_.begin();
  for (; a != terms_.end() && b != rhs.terms_.end(); ++a, ++b) {
    if (a->first != b->first) return a->first < b->first;
    int c = cmp(a->second, b->second);
    if (c != 0) return c < 0;
  }
  return a == terms_.end() && b != rhs.terms_.end();
}

Scalar Scalar::substituted(const std::map<Param, Scalar>& bindings) const {
  // Reject cyclic bindings: parameter -> parameters mentioned in its
  // replacement that are themselves bound.
  {
    std::set<Param> done;
    std::set<Param> in_progress;
    // Iterative DFS would be overkill for five nodes; recurse via lambda.
    auto visit = [&](auto&& self, Param p) -> void {
      if (done.count(p)) return;
      if (in_progress.count(p))
        throw std::invalid_argument("cyclic parameter binding");
      in_progress.insert(p);
      auto it = bindings.find(p);
      if (it != bindings.end()) {
        for (const auto& [m, q] : it->second.terms()) {
          for (int i = 0; i < n_params; ++i) {
            if (m[i] > 0) self(self, static_cast<Param>(i));
          }
        }
      }
      in_progress.erase(p);
      done.insert(p);
    };
    for (const auto& [p, unused] : bindings) visit(visit, p);
  }

  std::array<Scalar, n_params> values;
  for (int i = 0; i < n_params; ++i) {
    auto p = static_cast<Param>(i);
    auto it = bindings.find(p);
    values[i] = it == bindings.end() ? variable(p) : it->second;
  }

  Scalar out;
  for (const auto& [m, q] : terms_) {
    Scalar term{Scalar(mpq_class(q))};
    for (int i = 0; i < n_params; ++i) {
      for (int k = 0; k < m[i]; ++k) term *= values[i];
    }
    out += term;
  }
  return out;
}

std::string Scalar::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, q] : terms_) {
    mpq_class coef = q;
    bool negative = coef < 0;
    if (negative) coef = -coef;
    if (first) {
      if (negative) os << "-";
      first = false;
    } else {
      os << (negative ? " - " : " + ");
    }
    bool trivial = (m == unit_monomial);
    if (coef != 1 || trivial) {
      os << coef.get_str();
      if (!trivial) os << " * ";
    }
    if (!trivial) {
      bool first_factor = true;
      for (int i = 0; i < n_params; ++i) {
        if (m[i] == 0) continue;
        if (!first_factor) os << " ";
        first_factor = false;
        os << kParamNames[i];
        if (m[i] > 1) os << "^" << m[i];
      }
    }
  }
  return os.str();
}

namespace {

struct Cursor {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("scalar parse error at offset " +
                                std::to_string(pos) + ": " + what);
  }
};

bool read_unsigned(Cursor& c, std::string& digits) {
  c.skip_ws();
  size_t start = c.pos;
  while (c.pos < c.text.size() &&
         std::isdigit(static_cast<unsigned char>(c.text[c.pos])))
    ++c.pos;
  if (c.pos == start) return false;
  digits.assign(c.text.substr(start, c.pos - start));
  return true;
}

bool read_name(Cursor& c, std::string& name) {
  c.skip_ws();
  size_t start = c.pos;
  while (c.pos < c.text.size() &&
         (std::isalnum(static_cast<unsigned char>(c.text[c.pos])))) {
    // Names are alphabetic with an optional trailing digit (e1, e2).
    ++c.pos;
  }
  if (c.pos == start) return false;
  name.assign(c.text.substr(start, c.pos - start));
  return true;
}

int param_index(const std::string& name) {
  for (int i = 0; i < n_params; ++i) {
    if (kParamNames[i] == name) return i;
  }
  return -1;
}

}  // namespace

Scalar Scalar::from_string(std::string_view text) {
  Cursor c{text};
  Scalar out;
  bool first_term = true;
  while (!c.done()) {
    bool negative = false;
    if (first_term) {
      if (c.consume('-'))
        negative = true;
      else
        c.consume('+');
    } else {
      if (c.consume('-'))
        negative = true;
      else if (!c.consume('+'))
        c.fail("expected '+' or '-' between terms");
    }
    first_term = false;

    mpq_class coef(1);
    bool have_coef = false;
    std::string digits;
    if (read_unsigned(c, digits)) {
      have_coef = true;
      if (c.consume('/')) {
        std::string den;
        if (!read_unsigned(c, den)) c.fail("expected denominator");
        coef = mpq_class(digits + "/" + den);
        coef.canonicalize();
      } else {
        coef = mpq_class(digits);
      }
    }
    if (have_coef) c.consume('*');

    Monomial m = unit_monomial;
    bool have_factor = false;
    while (true) {
      size_t save = c.pos;
      std::string name;
      if (!read_name(c, name)) break;
      int idx = param_index(name);
      if (idx < 0) {
        c.pos = save;
        c.fail("unknown parameter '" + name + "'");
      }
      int exp = 1;
      if (c.consume('^')) {
        std::string ed;
        if (!read_unsigned(c, ed)) c.fail("expected exponent");
        exp = std::stoi(ed);
      }
      m[idx] += exp;
      have_factor = true;
    }
    if (!have_coef && !have_factor) c.fail("empty term");
    if (coef == 0) continue;

    Scalar term;
    term.terms_.emplace(m, negative ? mpq_class(-coef) : coef);
    out += term;
  }
  return out;
}

Scalar s_h() { return Scalar::variable(Param::h); }
Scalar s_e() { return Scalar::variable(Param::e); }
Scalar s_alpha() { return Scalar::variable(Param::alpha); }
Scalar s_e1() { return Scalar::variable(Param::e1); }
Scalar s_e2() { return Scalar::variable(Param::e2); }

}  // namespace ywsym
