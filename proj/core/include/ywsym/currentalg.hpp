#pragma once

// The centrally extended current Lie algebra on gl(N) — matrix units times
// integer powers of the loop variable t — together with PBW-ordered words in
// its enveloping algebra, grading by total t-degree, and window truncation.
//
// The central 2-cocycle is configurable: the default instance pairs letters
// with the trace form and multiplies a formal central letter; other modules
// reuse the same straightening engine with a shifted pairing and a plain
// scalar central value (free-field and mode-algebra brackets).

#include <compare>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ywsym/scalar.hpp"
#include "ywsym/sexpr.hpp"

namespace ywsym {

// Matrix unit E_{row,col} t^{tdeg}.  The comparison order (tdeg, row, col) is
// the canonical PBW letter order.
struct LoopGen {
  int row = 1;
  int col = 1;
  int tdeg = 0;

  friend bool operator==(const LoopGen&, const LoopGen&) = default;
  friend std::strong_ordering operator<=>(const LoopGen& a, const LoopGen& b) {
    if (auto c = a.tdeg <=> b.tdeg; c != 0) return c;
    if (auto c = a.row <=> b.row; c != 0) return c;
    return a.col <=> b.col;
  }
};

// The formal central letter; commutes with everything and sorts first.
struct CentralLetter {
  friend bool operator==(const CentralLetter&, const CentralLetter&) = default;
  friend std::strong_ordering operator<=>(const CentralLetter&,
                                          const CentralLetter&) = default;
};

using Letter = std::variant<CentralLetter, LoopGen>;
using Word = std::vector<Letter>;

inline Letter letter_E(int row, int col, int tdeg) {
  return LoopGen{row, col, tdeg};
}
inline Letter letter_c() { return CentralLetter{}; }

// Finite linear combination of noncommutative words with Scalar coefficients.
// Canonical sparse form: no zero coefficient is stored.  The empty word is
// the algebra unit.
struct Element {
  std::map<Word, Scalar> terms;

  static Element zero() { return {}; }
  static Element unit(Scalar coef = Scalar(1));
  static Element single(Letter l, Scalar coef = Scalar(1));
  static Element word(Word w, Scalar coef = Scalar(1));

  bool is_zero() const { return terms.empty(); }
  void add(const Word& w, const Scalar& coef);

  Element& operator+=(const Element& rhs);
  Element& operator-=(const Element& rhs);
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  Element operator-() const;
  friend Element operator*(const Scalar& s, const Element& e);
  bool operator==(const Element& rhs) const { return terms == rhs.terms; }

  // Free (concatenation) product; no reordering.
  friend Element concat(const Element& a, const Element& b);

  std::string to_string() const;
};

// Total t-degree of a word (central letters contribute 0).
int grade(const Word& w);
// Common grade of a grade-homogeneous element; throws if mixed.
int grade(const Element& e);
bool is_grade_homogeneous(const Element& e);

// Bracket configuration.  [E_{ab}t^r, E_{cd}t^s] always carries the
// matrix-unit part; when r+s = 0 it additionally carries
//   r * ( tr_coef * δ_{bc}δ_{ad} + trtr_coef * δ_{ab}δ_{cd} ) * central
// where central is the formal letter c (central_formal) or the unit word.
// With pairing_block = B > 0 the pairing vanishes unless both letters lie in
// the same contiguous B-block of row/column indices.
struct BracketOptions {
  Scalar tr_coef = Scalar(1);
  Scalar trtr_coef = Scalar(0);
  int pairing_block = 0;
  bool central_formal = true;
};

class CurrentAlgebra {
 public:
  explicit CurrentAlgebra(int rank, BracketOptions options = {});

  int rank() const { return rank_; }
  const BracketOptions& options() const { return options_; }

  // Lie bracket of two letters.
  Element bracket_letters(const Letter& x, const Letter& y) const;
  // Bilinear extension to elements whose words have length <= 1.
  Element bracket_linear(const Element& a, const Element& b) const;

  // Canonical PBW normal form: central letters first, then letters ascending
  // by (tdeg, row, col), with bracket corrections.  Idempotent and linear.
  Element pbw_normal_form(const Element& e) const;

  // Product and commutator in the enveloping algebra, in normal form.
  Element mul(const Element& a, const Element& b) const;
  Element commutator(const Element& a, const Element& b) const;

 private:
  int rank_;
  BracketOptions options_;
  void check_letter(const Letter& l) const;
};

// Drops every word containing a loop letter with |tdeg| > window.
Element truncate(const Element& e, int window);

// S-expression text forms:
//   (E row col tdeg)   (c)   (word l1 l2 ...)   (lin (coef "<scalar>" w) ...)
SExpr to_sexpr(const Letter& l);
SExpr to_sexpr(const Word& w);
SExpr to_sexpr(const Element& e);
Letter letter_from_sexpr(const SExpr& s);
Word word_from_sexpr(const SExpr& s);
Element element_from_sexpr(const SExpr& s);

}  // namespace ywsym
