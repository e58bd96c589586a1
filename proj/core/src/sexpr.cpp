#include "ywsym/sexpr.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace ywsym {

SExpr SExpr::make_atom(std::string text, bool quote) {
  SExpr s;
  s.is_atom = true;
  s.quoted = quote;
  s.atom = std::move(text);
  return s;
}

SExpr SExpr::make_list(std::vector<SExpr> items) {
  SExpr s;
  s.is_atom = false;
  s.items = std::move(items);
  return s;
}

const SExpr& SExpr::at(size_t i) const {
  if (is_atom || i >= items.size())
    throw std::out_of_range("s-expression index out of range");
  return items[i];
}

std::string SExpr::head() const {
  if (is_atom || items.empty() || !items.front().is_atom) return "";
  return items.front().atom;
}

long SExpr::as_int() const {
  if (!is_atom) throw std::invalid_argument("expected integer atom");
  size_t used = 0;
  long v = std::stol(atom, &used);
  if (used != atom.size()) throw std::invalid_argument("bad integer: " + atom);
  return v;
}

std::string SExpr::to_string() const {
  std::ostringstream os;
  if (is_atom) {
    if (quoted) {
      os << '"';
      for (char ch : atom) {
        if (ch == '"' || ch == '\\') os << '\\';
        os << ch;
      }
      os << '"';
    } else {
      os << atom;
    }
    return os.str();
  }
  os << '(';
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) os << ' ';
    os << items[i].to_string();
  }
  os << ')';
  return os.str();
}

namespace {

struct Cursor {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("s-expression parse error at offset " +
                                std::to_string(pos) + ": " + what);
  }

  SExpr parse_one() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    char ch = text[pos];
    if (ch == '(') {
      ++pos;
      SExpr list = SExpr::make_list();
      while (true) {
        skip_ws();
        if (pos >= text.size()) fail("unterminated list");
        if (text[pos] == ')') {
          ++pos;
          return list;
        }
        list.items.push_back(parse_one());
      }
    }
    if (ch == ')') fail("unexpected ')'");
    if (ch == '"') {
      ++pos;
      std::string out;
      while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
        out.push_back(text[pos]);
        ++pos;
      }
      if (pos >= text.size()) fail("unterminated string");
      ++pos;
      return SExpr::make_atom(std::move(out), true);
    }
    size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')' && text[pos] != '"')
      ++pos;
    return SExpr::make_atom(std::string(text.substr(start, pos - start)));
  }
};

}  // namespace

SExpr SExpr::parse(std::string_view text) {
  Cursor c{text};
  SExpr out = c.parse_one();
  c.skip_ws();
  if (c.pos != text.size()) c.fail("trailing input");
  return out;
}

}  // namespace ywsym
