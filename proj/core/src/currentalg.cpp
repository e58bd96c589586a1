#include "ywsym/currentalg.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

namespace ywsym {

Element Element::unit(Scalar coef) {
  Element e;
  e.add({}, coef);
  return e;
}

Element Element::single(Letter l, Scalar coef) {
  Element e;
  e.add({std::move(l)}, coef);
  return e;
}

Element Element::word(Word w, Scalar coef) {
  Element e;
  e.add(w, coef);
  return e;
}

void Element::add(const Word& w, const Scalar& coef) {
  if (coef.is_zero()) return;
  auto it = terms.find(w);
  if (it == terms.end()) {
    terms.emplace(w, coef);
    return;
  }
  it->second += coef;
  if (it->second.is_zero()) terms.erase(it);
}

Element& Element::operator+=(const Element& rhs) {
  for (const auto& [w, q] : rhs.terms) add(w, q);
  return *this;
}

Element& Element::operator-=(const Element& rhs) {
  for (const auto& [w, q] : rhs.terms) add(w, -q);
  return *this;
}

Element Element::operator-() const {
  Element out;
  for (const auto& [w, q] : terms) out.terms.emplace(w, -q);
  return out;
}

Element operator*(const Scalar& s, const Element& e) {
  Element out;
  for (const auto& [w, q] : e.terms) out.add(w, s * q);
  return out;
}

Element concat(const Element& a, const Element& b) {
  Element out;
  for (const auto& [wa, qa] : a.terms) {
    for (const auto& [wb, qb] : b.terms) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add(w, qa * qb);
    }
  }
  return out;
}

std::string Element::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, q] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << q.to_string() << ")";
    for (const auto& l : w) {
      if (std::holds_alternative<CentralLetter>(l)) {
        os << " c";
      } else {
        const auto& g = std::get<LoopGen>(l);
        os << " E[" << g.row << "," << g.col << "]t^" << g.tdeg;
      }
    }
  }
  return os.str();
}

int grade(const Word& w) {
  int total = 0;
  for (const auto& l : w) {
    if (const auto* g = std::get_if<LoopGen>(&l)) total += g->tdeg;
  }
  return total;
}

bool is_grade_homogeneous(const Element& e) {
  bool have = false;
  int g0 = 0;
  for (const auto& [w, q] : e.terms) {
    int g = grade(w);
    if (!have) {
      g0 = g;
      have = true;
    } else if (g != g0) {
      return false;
    }
  }
  return true;
}

int grade(const Element& e) {
  if (e.terms.empty()) return 0;
  if (!is_grade_homogeneous(e))
    throw std::invalid_argument("element is not grade-homogeneous");
  return grade(e.terms.begin()->first);
}

CurrentAlgebra::CurrentAlgebra(int rank, BracketOptions options)
    : rank_(rank), options_(std::move(options)) {
  if (rank < 1) throw std::invalid_argument("rank must be positive");
}

void CurrentAlgebra::check_letter(const Letter& l) const {
  if (const auto* g = std::get_if<LoopGen>(&l)) {
    if (g->row < 1 || g->row > rank_ || g->col < 1 || g->col > rank_)
      throw std::invalid_argument("matrix-unit index out of range");
  }
}

Element CurrentAlgebra::bracket_letters(const Letter& x, const Letter& y) const {
  if (std::holds_alternative<CentralLetter>(x) ||
      std::holds_alternative<CentralLetter>(y))
    return Element::zero();
  check_letter(x);
  check_letter(y);
  const auto& a = std::get<LoopGen>(x);
  const auto& b = std::get<LoopGen>(y);
  Element out;
  if (a.col == b.row)
    out += Element::single(letter_E(a.row, b.col, a.tdeg + b.tdeg));
  if (b.col == a.row)
    out -= Element::single(letter_E(b.row, a.col, a.tdeg + b.tdeg));
  if (a.tdeg + b.tdeg == 0) {
    bool block_ok = true;
    if (options_.pairing_block > 0) {
      int ba = (a.row - 1) / options_.pairing_block;
      int bb = (b.row - 1) / options_.pairing_block;
      int bac = (a.col - 1) / options_.pairing_block;
      int bbc = (b.col - 1) / options_.pairing_block;
      block_ok = (ba == bac) && (bb == bbc) && (ba == bb);
    }
    if (block_ok) {
      Scalar pair;
      if (a.col == b.row && a.row == b.col) pair += options_.tr_coef;
      if (a.row == a.col && b.row == b.col) pair += options_.trtr_coef;
      if (!pair.is_zero()) {
        Scalar coef = Scalar(a.tdeg) * pair;
        if (options_.central_formal)
          out += Element::single(letter_c(), coef);
        else
          out += Element::unit(coef);
      }
    }
  }
  return out;
}

Element CurrentAlgebra::bracket_linear(const Element& a, const Element& b) const {
  Element out;
  for (const auto& [wa, qa] : a.terms) {
    if (wa.size() > 1)
      throw std::invalid_argument("bracket_linear expects single letters");
    for (const auto& [wb, qb] : b.terms) {
      if (wb.size() > 1)
        throw std::invalid_argument("bracket_linear expects single letters");
      if (wa.empty() || wb.empty()) continue;
      out += (qa * qb) * bracket_letters(wa[0], wb[0]);
    }
  }
  return out;
}

Element CurrentAlgebra::pbw_normal_form(const Element& e) const {
  Element out;
  std::deque<std::pair<Word, Scalar>> queue(e.terms.begin(), e.terms.end());
  while (!queue.empty()) {
    auto [w, coef] = std::move(queue.front());
    queue.pop_front();
    if (coef.is_zero()) continue;
    size_t bad = w.size();
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i + 1] < w[i]) {
        bad = i;
        break;
      }
    }
    if (bad == w.size()) {
      out.add(w, coef);
      continue;
    }
    // w = u · x y · v with x > y: replace by u · y x · v + u · [x,y] · v.
    Word swapped = w;
    std::swap(swapped[bad], swapped[bad + 1]);
    queue.emplace_back(std::move(swapped), coef);
    Element corr = bracket_letters(w[bad], w[bad + 1]);
    for (const auto& [bw, bq] : corr.terms) {
      Word nw(w.begin(), w.begin() + bad);
      nw.insert(nw.end(), bw.begin(), bw.end());
      nw.insert(nw.end(), w.begin() + bad + 2, w.end());
      queue.emplace_back(std::move(nw), coef * bq);
    }
  }
  return out;
}

Element CurrentAlgebra::mul(const Element& a, const Element& b) const {
  return pbw_normal_form(concat(a, b));
}

Element CurrentAlgebra::commutator(const Element& a, const Element& b) const {
  return pbw_normal_form(concat(a, b) - concat(b, a));
}

Element truncate(const Element& e, int window) {
  if (window < 0) throw std::invalid_argument("window must be non-negative");
  Element out;
  for (const auto& [w, q] : e.terms) {
    bool keep = true;
    for (const auto& l : w) {
      if (const auto* g = std::get_if<LoopGen>(&l)) {
        if (g->tdeg > window || g->tdeg < -window) {
          keep = false;
          break;
        }
      }
    }
    if (keep) out.add(w, q);
  }
  return out;
}

SExpr to_sexpr(const Letter& l) {
  if (std::holds_alternative<CentralLetter>(l))
    return SExpr::make_list({SExpr::make_atom("c")});
  const auto& g = std::get<LoopGen>(l);
  return SExpr::make_list(
      {SExpr::make_atom("E"), SExpr::make_atom(std::to_string(g.row)),
       SExpr::make_atom(std::to_string(g.col)),
       SExpr::make_atom(std::to_string(g.tdeg))});
}

SExpr to_sexpr(const Word& w) {
  std::vector<SExpr> items{SExpr::make_atom("word")};
  for (const auto& l : w) items.push_back(to_sexpr(l));
  return SExpr::make_list(std::move(items));
}

SExpr to_sexpr(const Element& e) {
  std::vector<SExpr> items{SExpr::make_atom("lin")};
  for (const auto& [w, q] : e.terms) {
    items.push_back(SExpr::make_list({SExpr::make_atom("coef"),
                                      SExpr::make_atom(q.to_string(), true),
                                      to_sexpr(w)}));
  }
  return SExpr::make_list(std::move(items));
}

Letter letter_from_sexpr(const SExpr& s) {
  if (s.head() == "c") return letter_c();
  if (s.head() == "E" && s.size() == 4) {
    return letter_E(static_cast<int>(s.at(1).as_int()),
                    static_cast<int>(s.at(2).as_int()),
                    static_cast<int>(s.at(3).as_int()));
  }
  throw std::invalid_argument("expected (E row col tdeg) or (c)");
}

Word word_from_sexpr(const SExpr& s) {
  if (s.head() != "word")
    throw std::invalid_argument("expected (word ...)");
  Word w;
  for (size_t i = 1; i < s.size(); ++i) w.push_back(letter_from_sexpr(s.at(i)));
  return w;
}

Element element_from_sexpr(const SExpr& s) {
  if (s.head() != "lin")
    throw std::invalid_argument("expected (lin ...)");
  Element out;
  for (size_t i = 1; i < s.size(); ++i) {
    const SExpr& term = s.at(i);
    if (term.head() != "coef" || term.size() != 3)
      throw std::invalid_argument("expected (coef \"scalar\" (word ...))");
    out.add(word_from_sexpr(term.at(2)),
            Scalar::from_string(term.at(1).atom));
  }
  return out;
}

}  // namespace ywsym
