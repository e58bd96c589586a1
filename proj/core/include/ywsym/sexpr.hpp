#pragma once

// Minimal S-expression reader/writer used by the text interfaces of the
// algebra modules.  Atoms are bare tokens or double-quoted strings; lists are
// parenthesized.  Round-trips are exact.

#include <string>
#include <string_view>
#include <vector>

namespace ywsym {

struct SExpr {
  bool is_atom = false;
  bool quoted = false;       // atom was written as "..."
  std::string atom;          // valid when is_atom
  std::vector<SExpr> items;  // valid when !is_atom

  static SExpr make_atom(std::string text, bool quote = false);
  static SExpr make_list(std::vector<SExpr> items = {});

  const SExpr& at(size_t i) const;
  size_t size() const { return items.size(); }
  // Head symbol of a list, or empty string.
  std::string head() const;
  long as_int() const;

  std::string to_string() const;
  static SExpr parse(std::string_view text);
};

}  // namespace ywsym
