#include "ywsym/sumcalc.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <tuple>

namespace ywsym {

namespace {

long long ipow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Label-free sort key: classifies a factor by the asymptotic sign of its
// exponent and its shape, ignoring which summation variable is which, so that
// atoms differing only by a relabeling of variables sort identically.
// Class 0: exponents eventually negative; 1: identically zero; 2: mixed sign;
// 3: eventually positive.
int factor_class(const SumFactor& f) {
  int neg = 0, pos = 0;
  for (int c : f.coef) {
    if (c < 0) ++neg;
    if (c > 0) ++pos;
  }
  if (neg == 0 && pos == 0) return f.c0 < 0 ? 0 : (f.c0 == 0 ? 1 : 3);
  if (pos == 0) return f.c0 <= 0 ? 0 : 2;
  if (neg == 0) return f.c0 >= 0 ? 3 : 2;
  return 2;
}

using FactorKey = std::tuple<int, int, int, int, int, int>;

FactorKey label_free_key(const SumFactor& f) {
  int lo = std::min(f.coef[0], f.coef[1]);
  int hi = std::max(f.coef[0], f.coef[1]);
  return {factor_class(f), lo, hi, f.c0, f.row, f.col};
}

bool coef_in_range(const std::array<int, 2>& c) {
  return c[0] >= -1 && c[0] <= 1 && c[1] >= -1 && c[1] <= 1;
}

std::array<int, 2> coef_sum(const std::array<int, 2>& a,
                            const std::array<int, 2>& b) {
  return {a[0] + b[0], a[1] + b[1]};
}

void weight_add(std::map<WeightKey, Scalar>& w, const WeightKey& k,
                const Scalar& c) {
  auto it = w.find(k);
  if (it == w.end()) {
    if (!c.is_zero()) w.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) w.erase(it);
}

void trim_weight(std::map<WeightKey, Scalar>& w) {
  for (auto it = w.begin(); it != w.end();) {
    if (it->second.is_zero())
      it = w.erase(it);
    else
      ++it;
  }
}

// (q0*x0 + q1*x1 + qc) * weight
std::map<WeightKey, Scalar> weight_mul_affine(
    const std::map<WeightKey, Scalar>& w, int q0, int q1, int qc) {
  std::map<WeightKey, Scalar> out;
  for (const auto& [key, c] : w) {
    if (q0 != 0) weight_add(out, {key[0] + 1, key[1]}, Scalar(q0) * c);
    if (q1 != 0) weight_add(out, {key[0], key[1] + 1}, Scalar(q1) * c);
    if (qc != 0) weight_add(out, key, Scalar(qc) * c);
  }
  return out;
}

// weight(x0 + d0, x1 + d1), expanded back into monomials.
std::map<WeightKey, Scalar> weight_shift(const std::map<WeightKey, Scalar>& w,
                                         int d0, int d1) {
  std::map<WeightKey, Scalar> out;
  for (const auto& [key, c] : w) {
    for (int j0 = 0; j0 <= key[0]; ++j0) {
      long long b0 = binom(key[0], j0) * ipow(d0, key[0] - j0);
      if (b0 == 0) continue;
      for (int j1 = 0; j1 <= key[1]; ++j1) {
        long long b1 = binom(key[1], j1) * ipow(d1, key[1] - j1);
        if (b1 == 0) continue;
        weight_add(out, {j0, j1}, Scalar(b0 * b1) * c);
      }
    }
  }
  return out;
}

bool factor_uses(const SumFactor& f, int var) { return f.coef[var] != 0; }

bool weight_uses(const std::map<WeightKey, Scalar>& w, int var) {
  for (const auto& [key, c] : w)
    if (key[var] != 0) return true;
  return false;
}

std::string exponent_string(const std::array<int, 2>& coef, int c0) {
  static const char* names[2] = {"s", "v"};
  std::string out;
  for (int i = 0; i < 2; ++i) {
    if (coef[i] == 1) out += out.empty() ? std::string(names[i]) : "+" + std::string(names[i]);
    if (coef[i] == -1) out += "-" + std::string(names[i]);
  }
  if (c0 != 0 || out.empty()) {
    if (c0 > 0 && !out.empty()) out += "+";
    out += std::to_string(c0);
  }
  return out;
}

}  // namespace

SumAtom SumAtom::single(const Scalar& coef, int r1, int c1, int r2, int c2,
                        int m) {
  SumAtom a;
  a.nvars = 1;
  a.factors = {SumFactor{r1, c1, {-1, 0}, 0}, SumFactor{r2, c2, {1, 0}, m}};
  if (!coef.is_zero()) a.weight.emplace(WeightKey{0, 0}, coef);
  return a;
}

SumAtom SumAtom::general(const Scalar& coef, int nvars,
                         std::vector<SumFactor> factors, int cpow) {
  SumAtom a;
  a.nvars = nvars;
  a.factors = std::move(factors);
  a.cpow = cpow;
  if (!coef.is_zero()) a.weight.emplace(WeightKey{0, 0}, coef);
  return a;
}

bool SumAtom::weight_is_constant() const {
  return weight.size() == 1 && weight.begin()->first == WeightKey{0, 0};
}

SumAtom to_atom(const SingleSum& s) {
  return SumAtom::single(s.coef, s.first_row, s.first_col, s.second_row,
                         s.second_col, s.m);
}

SumAtom to_atom(const DoubleSum& d) {
  return SumAtom::general(d.coef, 2,
                          {d.factors[0], d.factors[1], d.factors[2]});
}

CompletionElement CompletionElement::zero() { return {}; }

CompletionElement CompletionElement::from_words(Element e) {
  CompletionElement out;
  out.words = std::move(e);
  return out;
}

CompletionElement CompletionElement::from_atom(SumAtom a) {
  CompletionElement out;
  out.sums.push_back(std::move(a));
  return out;
}

CompletionElement& CompletionElement::operator+=(const CompletionElement& o) {
  words += o.words;
  sums.insert(sums.end(), o.sums.begin(), o.sums.end());
  return *this;
}

CompletionElement& CompletionElement::operator-=(const CompletionElement& o) {
  *this += -o;
  return *this;
}

CompletionElement operator+(CompletionElement a, const CompletionElement& b) {
  return a += b;
}

CompletionElement operator-(CompletionElement a, const CompletionElement& b) {
  return a -= b;
}

CompletionElement operator*(const Scalar& c, CompletionElement e) {
  e.words = c * e.words;
  for (auto& atom : e.sums) {
    std::map<WeightKey, Scalar> w;
    for (const auto& [key, coef] : atom.weight) weight_add(w, key, c * coef);
    atom.weight = std::move(w);
  }
  return e;
}

CompletionElement CompletionElement::operator-() const {
  return Scalar(-1) * *this;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::optional<SingleSum> as_single(const SumAtom& a) {
  if (a.nvars != 1 || a.cpow != 0 || a.factors.size() != 2 ||
      !a.weight_is_constant())
    return std::nullopt;
  const SumFactor& f = a.factors[0];
  const SumFactor& g = a.factors[1];
  if (f.coef != std::array<int, 2>{-1, 0} || f.c0 != 0 ||
      g.coef != std::array<int, 2>{1, 0})
    return std::nullopt;
  return SingleSum{a.weight.begin()->second, f.row, f.col, g.row, g.col, g.c0};
}

std::optional<DoubleSum> as_double(const SumAtom& a) {
  if (a.nvars != 2 || a.cpow != 0 || a.factors.size() != 3 ||
      !a.weight_is_constant())
    return std::nullopt;
  return DoubleSum{a.weight.begin()->second,
                   {a.factors[0], a.factors[1], a.factors[2]}};
}

SExpr factor_sexpr(const SumFactor& f) {
  return SExpr::make_list({SExpr::make_atom("factor"),
                           SExpr::make_atom(std::to_string(f.row)),
                           SExpr::make_atom(std::to_string(f.col)),
                           SExpr::make_atom(std::to_string(f.coef[0])),
                           SExpr::make_atom(std::to_string(f.coef[1])),
                           SExpr::make_atom(std::to_string(f.c0))});
}

SumFactor factor_from_sexpr(const SExpr& e) {
  if (e.is_atom || e.size() != 6 || e.head() != "factor")
    throw std::invalid_argument("expected (factor row col c1 c2 c0)");
  SumFactor f;
  f.row = static_cast<int>(e.at(1).as_int());
  f.col = static_cast<int>(e.at(2).as_int());
  f.coef[0] = static_cast<int>(e.at(3).as_int());
  f.coef[1] = static_cast<int>(e.at(4).as_int());
  f.c0 = static_cast<int>(e.at(5).as_int());
  return f;
}

}  // namespace

SExpr to_sexpr(const SumAtom& a) {
  if (auto s = as_single(a)) {
    return SExpr::make_list(
        {SExpr::make_atom("sum1"),
         SExpr::make_atom(s->coef.to_string(), /*quoted=*/true),
         SExpr::make_list({SExpr::make_atom("E"),
                           SExpr::make_atom(std::to_string(s->first_row)),
                           SExpr::make_atom(std::to_string(s->first_col))}),
         SExpr::make_list({SExpr::make_atom("E"),
                           SExpr::make_atom(std::to_string(s->second_row)),
                           SExpr::make_atom(std::to_string(s->second_col))}),
         SExpr::make_atom(std::to_string(s->m))});
  }
  if (auto d = as_double(a)) {
    std::vector<SExpr> items{
        SExpr::make_atom("sum2"),
        SExpr::make_atom(d->coef.to_string(), /*quoted=*/true)};
    for (const SumFactor& f : d->factors) {
      items.push_back(SExpr::make_list(
          {SExpr::make_atom("factor"),
           SExpr::make_list({SExpr::make_atom("E"),
                             SExpr::make_atom(std::to_string(f.row)),
                             SExpr::make_atom(std::to_string(f.col))}),
           SExpr::make_atom(std::to_string(f.coef[0])),
           SExpr::make_atom(std::to_string(f.coef[1])),
           SExpr::make_atom(std::to_string(f.c0))}));
    }
    return SExpr::make_list(items);
  }
  std::vector<SExpr> weights{SExpr::make_atom("weights")};
  for (const auto& [key, c] : a.weight) {
    weights.push_back(
        SExpr::make_list({SExpr::make_atom("w"),
                          SExpr::make_atom(c.to_string(), /*quoted=*/true),
                          SExpr::make_atom(std::to_string(key[0])),
                          SExpr::make_atom(std::to_string(key[1]))}));
  }
  std::vector<SExpr> factors{SExpr::make_atom("factors")};
  for (const SumFactor& f : a.factors) factors.push_back(factor_sexpr(f));
  return SExpr::make_list({SExpr::make_atom("sumg"),
                           SExpr::make_atom(std::to_string(a.nvars)),
                           SExpr::make_atom(std::to_string(a.cpow)),
                           SExpr::make_list(weights),
                           SExpr::make_list(factors)});
}

SumAtom atom_from_sexpr(const SExpr& e) {
  if (e.is_atom || e.size() == 0)
    throw std::invalid_argument("expected a sum atom list");
  const std::string& head = e.head();
  if (head == "sum1") {
    if (e.size() != 5) throw std::invalid_argument("malformed sum1");
    const SExpr& f = e.at(2);
    const SExpr& g = e.at(3);
    if (f.is_atom || g.is_atom || f.size() != 3 || g.size() != 3)
      throw std::invalid_argument("malformed sum1 factors");
    return SumAtom::single(Scalar::from_string(e.at(1).atom),
                           static_cast<int>(f.at(1).as_int()),
                           static_cast<int>(f.at(2).as_int()),
                           static_cast<int>(g.at(1).as_int()),
                           static_cast<int>(g.at(2).as_int()),
                           static_cast<int>(e.at(4).as_int()));
  }
  if (head == "sum2") {
    if (e.size() != 5) throw std::invalid_argument("malformed sum2");
    std::vector<SumFactor> fs;
    for (int i = 2; i < 5; ++i) {
      const SExpr& fe = e.at(i);
      if (fe.is_atom || fe.size() != 5 || fe.head() != "factor")
        throw std::invalid_argument("malformed sum2 factor");
      const SExpr& unit = fe.at(1);
      SumFactor f;
      f.row = static_cast<int>(unit.at(1).as_int());
      f.col = static_cast<int>(unit.at(2).as_int());
      f.coef[0] = static_cast<int>(fe.at(2).as_int());
      f.coef[1] = static_cast<int>(fe.at(3).as_int());
      f.c0 = static_cast<int>(fe.at(4).as_int());
      fs.push_back(f);
    }
    return SumAtom::general(Scalar::from_string(e.at(1).atom), 2,
                            std::move(fs));
  }
  if (head == "sumg") {
    if (e.size() != 5) throw std::invalid_argument("malformed sumg");
    SumAtom a;
    a.nvars = static_cast<int>(e.at(1).as_int());
    a.cpow = static_cast<int>(e.at(2).as_int());
    const SExpr& ws = e.at(3);
    for (size_t i = 1; i < ws.size(); ++i) {
      const SExpr& we = ws.at(i);
      weight_add(a.weight,
                 {static_cast<int>(we.at(2).as_int()),
                  static_cast<int>(we.at(3).as_int())},
                 Scalar::from_string(we.at(1).atom));
    }
    const SExpr& fs = e.at(4);
    for (size_t i = 1; i < fs.size(); ++i)
      a.factors.push_back(factor_from_sexpr(fs.at(i)));
    return a;
  }
  throw std::invalid_argument("unknown sum atom head: " + head);
}

SExpr to_sexpr(const CompletionElement& e) {
  std::vector<SExpr> sums{SExpr::make_atom("sums")};
  for (const SumAtom& a : e.sums) sums.push_back(to_sexpr(a));
  return SExpr::make_list(
      {SExpr::make_atom("compl"),
       SExpr::make_list({SExpr::make_atom("words"), to_sexpr(e.words)}),
       SExpr::make_list(sums)});
}

CompletionElement completion_from_sexpr(const SExpr& e) {
  if (e.is_atom || e.size() != 3 || e.head() != "compl")
    throw std::invalid_argument("expected (compl (words ...) (sums ...))");
  CompletionElement out;
  out.words = element_from_sexpr(e.at(1).at(1));
  const SExpr& sums = e.at(2);
  for (size_t i = 1; i < sums.size(); ++i)
    out.sums.push_back(atom_from_sexpr(sums.at(i)));
  return out;
}

std::string to_string(const SumAtom& a) {
  std::ostringstream os;
  os << (a.nvars == 2 ? "sum{s,v>=0}" : "sum{s>=0}");
  os << " (";
  bool first = true;
  for (const auto& [key, c] : a.weight) {
    std::string cs = c.to_string();
    if (!first) os << " + ";
    first = false;
    bool wrap = cs.find(' ') != std::string::npos && (key[0] || key[1]);
    os << (wrap ? "(" + cs + ")" : cs);
    if (key[0]) os << " s" << (key[0] > 1 ? "^" + std::to_string(key[0]) : "");
    if (key[1]) os << " v" << (key[1] > 1 ? "^" + std::to_string(key[1]) : "");
  }
  os << ")";
  for (int i = 0; i < a.cpow; ++i) os << " c";
  for (const SumFactor& f : a.factors)
    os << " E[" << f.row << "," << f.col << "]t^{"
       << exponent_string(f.coef, f.c0) << "}";
  return os.str();
}

std::string to_string(const CompletionElement& e) {
  std::ostringstream os;
  os << "words: " << e.words.to_string();
  for (const SumAtom& a : e.sums) os << "\n  + " << to_string(a);
  return os.str();
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

SumAtom SumCalculus::substitute_var(const SumAtom& a, int var,
                                    int value) const {
  SumAtom out;
  out.nvars = a.nvars - 1;
  out.cpow = a.cpow;
  for (const SumFactor& f : a.factors) {
    SumFactor g = f;
    g.c0 += f.coef[var] * value;
    if (var == 0)
      g.coef = {f.coef[1], 0};
    else
      g.coef = {f.coef[0], 0};
    out.factors.push_back(g);
  }
  for (const auto& [key, c] : a.weight) {
    long long mult = ipow(value, key[var]);
    if (mult == 0) continue;
    WeightKey nk{var == 0 ? key[1] : key[0], 0};
    weight_add(out.weight, nk, Scalar(mult) * c);
  }
  return out;
}

SumAtom SumCalculus::substitute_line(const SumAtom& a, int var, int slope,
                                     int intercept, int other) const {
  SumAtom out;
  out.nvars = a.nvars - 1;
  out.cpow = a.cpow;
  for (const SumFactor& f : a.factors) {
    SumFactor g = f;
    int merged = f.coef[other] + f.coef[var] * slope;
    if (merged < -1 || merged > 1)
      throw SumStuck("line substitution leaves the representable class");
    g.coef = {merged, 0};
    g.c0 = f.c0 + f.coef[var] * intercept;
    out.factors.push_back(g);
  }
  for (const auto& [key, c] : a.weight) {
    int dv = key[var];
    int dk = key[other];
    for (int j = 0; j <= dv; ++j) {
      long long b = binom(dv, j) * ipow(slope, j) * ipow(intercept, dv - j);
      if (b == 0) continue;
      weight_add(out.weight, {dk + j, 0}, Scalar(b) * c);
    }
  }
  return out;
}

// Applies the delta constraint c1*x0 + c2*x1 + c0 = 0 to atom a (the
// constraint's support has already been multiplied into the weight), emitting
// the restricted sums.
void SumCalculus::collapse_delta(const SumAtom& a, int c1, int c2, int c0,
                                 const Scalar& coef,
                                 CompletionElement& out) const {
  if (coef.is_zero()) return;
  SumAtom scaled = a;
  {
    std::map<WeightKey, Scalar> w;
    for (const auto& [key, c] : scaled.weight) weight_add(w, key, coef * c);
    scaled.weight = std::move(w);
  }
  if (c1 == 0 && c2 == 0) {
    if (c0 == 0) canonicalize_atom(scaled, out);
    return;
  }
  if (c2 == 0 || c1 == 0) {
    int cc = (c2 == 0) ? c1 : c2;
    int var = (c2 == 0) ? 0 : 1;
    if ((-c0) % cc != 0) return;
    int value = -c0 / cc;
    if (value < 0) return;
    canonicalize_atom(substitute_var(scaled, var, value), out);
    return;
  }
  // Both variables appear.  Reduce common factors of 2 when possible.
  if (c1 % 2 == 0 && c2 % 2 == 0) {
    if (c0 % 2 != 0) return;
    collapse_delta(a, c1 / 2, c2 / 2, c0 / 2, coef, out);
    return;
  }
  int var = (std::abs(c2) == 1) ? 1 : 0;  // variable to eliminate
  int other = 1 - var;
  int cv = (var == 1) ? c2 : c1;
  int co = (var == 1) ? c1 : c2;
  // x_var = slope * x_other + intercept on the constraint line.
  int slope = -co * cv;
  int intercept = -c0 * cv;
  if (slope > 0) {
    SumAtom line = substitute_line(scaled, var, slope, intercept, other);
    // Domain: slope*x + intercept >= 0, x >= 0.
    int lo = 0;
    while (slope * lo + intercept < 0) ++lo;
    emit_with_domain(line, {lo, 0}, 1, out);
    return;
  }
  // slope < 0: finitely many lattice points.
  for (int k = 0;; ++k) {
    int vv = slope * k + intercept;
    if (vv < 0) break;
    // After eliminating `var`, the remaining variable sits in slot 0.
    SumAtom point = substitute_var(scaled, var, vv);
    canonicalize_atom(substitute_var(point, 0, k), out);
  }
}

namespace {

// Pairing coefficient of two factors under the algebra's bracket options,
// mirroring the central term of the letter bracket.
Scalar pairing_coef(const BracketOptions& opts, const SumFactor& f,
                    const SumFactor& g) {
  if (opts.pairing_block > 0) {
    int b1 = (f.row - 1) / opts.pairing_block;
    int b2 = (f.col - 1) / opts.pairing_block;
    int b3 = (g.row - 1) / opts.pairing_block;
    int b4 = (g.col - 1) / opts.pairing_block;
    if (!(b1 == b2 && b3 == b4 && b1 == b3)) return Scalar(0);
  }
  Scalar pair;
  if (f.col == g.row && f.row == g.col) pair += opts.tr_coef;
  if (f.row == f.col && g.row == g.col) pair += opts.trtr_coef;
  return pair;
}

}  // namespace

void SumCalculus::emit_with_domain(SumAtom a, std::array<int, 2> lo, int sign,
                                   CompletionElement& out) const {
  for (int x = 0; x < a.nvars; ++x) {
    if (lo[x] == 0) continue;
    if (lo[x] > 0) {
      // sum_{x >= lo} = sum_{x >= 0} - sum_{k=0}^{lo-1}
      for (int k = 0; k < lo[x]; ++k) {
        std::array<int, 2> rest{x == 0 ? lo[1] : lo[0], 0};
        emit_with_domain(substitute_var(a, x, k), rest, -sign, out);
      }
    } else {
      // sum_{x >= lo} = sum_{x >= 0} + sum_{k=lo}^{-1}
      for (int k = lo[x]; k < 0; ++k) {
        std::array<int, 2> rest{x == 0 ? lo[1] : lo[0], 0};
        emit_with_domain(substitute_var(a, x, k), rest, sign, out);
      }
    }
    lo[x] = 0;
  }
  if (sign < 0) {
    std::map<WeightKey, Scalar> w;
    for (const auto& [key, c] : a.weight) weight_add(w, key, Scalar(-1) * c);
    a.weight = std::move(w);
  }
  canonicalize_atom(a, out);
}

bool SumCalculus::try_swap(SumAtom& a, size_t k, CompletionElement& out) const {
  const SumFactor f = a.factors[k];
  const SumFactor g = a.factors[k + 1];
  // Matrix-unit parts of [f, g].
  struct MatTerm {
    SumFactor merged;
    int sign;
  };
  std::vector<MatTerm> mats;
  if (f.col == g.row) {
    SumFactor m{f.row, g.col, coef_sum(f.coef, g.coef), f.c0 + g.c0};
    if (!coef_in_range(m.coef)) return false;
    mats.push_back({m, 1});
  }
  if (g.col == f.row) {
    SumFactor m{g.row, f.col, coef_sum(f.coef, g.coef), f.c0 + g.c0};
    if (!coef_in_range(m.coef)) return false;
    mats.push_back({m, -1});
  }
  Scalar pair = pairing_coef(alg_.options(), f, g);

  std::vector<SumFactor> prefix(a.factors.begin(), a.factors.begin() + k);
  std::vector<SumFactor> suffix(a.factors.begin() + k + 2, a.factors.end());
  for (const MatTerm& mt : mats) {
    SumAtom corr;
    corr.nvars = a.nvars;
    corr.cpow = a.cpow;
    corr.factors = prefix;
    corr.factors.push_back(mt.merged);
    corr.factors.insert(corr.factors.end(), suffix.begin(), suffix.end());
    corr.weight = a.weight;
    if (mt.sign < 0) {
      std::map<WeightKey, Scalar> w;
      for (const auto& [key, c] : corr.weight)
        weight_add(w, key, Scalar(-1) * c);
      corr.weight = std::move(w);
    }
    canonicalize_atom(corr, out);
  }
  if (!pair.is_zero()) {
    // Central part: supported on the line exponent(f) + exponent(g) = 0, with
    // coefficient exponent(f) there.
    SumAtom cent;
    cent.nvars = a.nvars;
    cent.cpow = a.cpow + (alg_.options().central_formal ? 1 : 0);
    cent.factors = prefix;
    cent.factors.insert(cent.factors.end(), suffix.begin(), suffix.end());
    cent.weight = weight_mul_affine(a.weight, f.coef[0], f.coef[1], f.c0);
    collapse_delta(cent, f.coef[0] + g.coef[0], f.coef[1] + g.coef[1],
                   f.c0 + g.c0, pair, out);
  }
  std::swap(a.factors[k], a.factors[k + 1]);
  return true;
}

std::array<int, 2> SumCalculus::solve_gauge(const SumAtom& a) const {
  std::array<int, 2> shift{0, 0};
  std::array<int, 2> anchor{-1, -1};
  for (int x = 0; x < a.nvars; ++x) {
    for (size_t k = 0; k < a.factors.size(); ++k) {
      if (factor_uses(a.factors[k], x)) {
        anchor[x] = static_cast<int>(k);
        break;
      }
    }
    if (anchor[x] < 0)
      throw SumStuck("divergent sum: variable absent from every factor");
  }
  if (a.nvars == 1) {
    const SumFactor& f = a.factors[anchor[0]];
    shift[0] = -f.c0 / f.coef[0];
    return shift;
  }
  const SumFactor& f0 = a.factors[anchor[0]];
  const SumFactor& f1 = a.factors[anchor[1]];
  if (anchor[0] == anchor[1]) {
    shift[0] = -f0.c0 / f0.coef[0];
    return shift;
  }
  long det = static_cast<long>(f0.coef[0]) * f1.coef[1] -
             static_cast<long>(f0.coef[1]) * f1.coef[0];
  long r0 = -f0.c0;
  long r1 = -f1.c0;
  if (det != 0) {
    long n0 = r0 * f1.coef[1] - r1 * f0.coef[1];
    long n1 = f0.coef[0] * r1 - f1.coef[0] * r0;
    if (n0 % det == 0 && n1 % det == 0) {
      shift[0] = static_cast<int>(n0 / det);
      shift[1] = static_cast<int>(n1 / det);
      return shift;
    }
  }
  // Degenerate system: zero the first anchor only (deterministic fallback).
  shift[0] = -f0.c0 / f0.coef[0];
  return shift;
}

void SumCalculus::canonicalize_atom(const SumAtom& input,
                                    CompletionElement& out) const {
  SumAtom a = input;
  trim_weight(a.weight);
  if (a.weight.empty()) return;

  // Collapse fully evaluated atoms to words.
  if (a.nvars == 0) {
    auto it = a.weight.find(WeightKey{0, 0});
    if (it == a.weight.end() || a.weight.size() != 1)
      throw SumStuck("variable-free atom with nontrivial weight");
    Word w;
    for (int i = 0; i < a.cpow; ++i) w.push_back(letter_c());
    for (const SumFactor& f : a.factors)
      w.push_back(letter_E(f.row, f.col, f.c0));
    out.words.add(w, it->second);
    return;
  }

  // Drop variables that occur nowhere; reject genuinely divergent sums.
  for (int x = a.nvars - 1; x >= 0; --x) {
    bool used = weight_uses(a.weight, x);
    for (const SumFactor& f : a.factors) used = used || factor_uses(f, x);
    if (!used) {
      canonicalize_atom(substitute_var(a, x, 0), out);
      return;
    }
    bool in_factors = false;
    for (const SumFactor& f : a.factors)
      in_factors = in_factors || factor_uses(f, x);
    if (!in_factors)
      throw SumStuck("divergent sum: variable appears only in the weight");
  }

  constexpr int kMaxRounds = 12;
  for (int round = 0;; ++round) {
    if (round == kMaxRounds)
      throw SumStuck("canonicalization did not stabilize");
    // Sort factors by the label-free key, with bracket corrections.
    bool any_swap = false;
    bool pass_swap = true;
    while (pass_swap) {
      pass_swap = false;
      for (size_t k = 0; k + 1 < a.factors.size(); ++k) {
        if (label_free_key(a.factors[k + 1]) < label_free_key(a.factors[k])) {
          if (try_swap(a, k, out)) {
            pass_swap = true;
            any_swap = true;
          }
        }
      }
    }
    // Gauge the leading offset of each variable to zero.
    std::array<int, 2> shift = solve_gauge(a);
    if (shift[0] == 0 && shift[1] == 0) {
      if (!any_swap) break;
      continue;
    }
    SumAtom shifted = a;
    for (size_t k = 0; k < shifted.factors.size(); ++k) {
      shifted.factors[k].c0 += a.factors[k].coef[0] * shift[0] +
                               a.factors[k].coef[1] * shift[1];
    }
    shifted.weight = weight_shift(a.weight, shift[0], shift[1]);
    std::array<int, 2> lo{-shift[0], -shift[1]};
    // Peel boundary strips so the main atom ranges over the full quadrant.
    for (int x = 0; x < shifted.nvars; ++x) {
      if (lo[x] == 0) continue;
      std::array<int, 2> rest{x == 0 ? lo[1] : lo[0], 0};
      if (lo[x] > 0) {
        for (int k = 0; k < lo[x]; ++k)
          emit_with_domain(substitute_var(shifted, x, k), rest, -1, out);
      } else {
        for (int k = lo[x]; k < 0; ++k)
          emit_with_domain(substitute_var(shifted, x, k), rest, 1, out);
      }
      lo[x] = 0;
    }
    a = std::move(shifted);
  }

  // Canonical variable labels: pick the lexicographically smaller of the two
  // labelings (they describe the same sum).
  if (a.nvars == 2) {
    SumAtom b = a;
    for (SumFactor& f : b.factors) std::swap(f.coef[0], f.coef[1]);
    std::map<WeightKey, Scalar> w;
    for (const auto& [key, c] : b.weight)
      weight_add(w, {key[1], key[0]}, c);
    b.weight = std::move(w);
    if (b.factors < a.factors ||
        (b.factors == a.factors && b.weight < a.weight))
      a = std::move(b);
  }

  // Deterministic order among factors tied under the label-free key (such
  // factors share the matrix unit, hence commute).
  bool tie_pass = true;
  while (tie_pass) {
    tie_pass = false;
    for (size_t k = 0; k + 1 < a.factors.size(); ++k) {
      if (label_free_key(a.factors[k]) == label_free_key(a.factors[k + 1]) &&
          a.factors[k + 1] < a.factors[k]) {
        std::swap(a.factors[k], a.factors[k + 1]);
        tie_pass = true;
      }
    }
  }

  trim_weight(a.weight);
  if (a.weight.empty()) return;
  out.sums.push_back(std::move(a));
}

CompletionElement SumCalculus::canonicalize(const CompletionElement& e) const {
  CompletionElement acc;
  acc.words = e.words;
  for (const SumAtom& a : e.sums) canonicalize_atom(a, acc);
  acc.words = alg_.pbw_normal_form(acc.words);
  // Merge structurally identical atoms.
  using AtomKey = std::tuple<int, std::vector<SumFactor>, int>;
  std::map<AtomKey, std::map<WeightKey, Scalar>> merged;
  for (const SumAtom& a : acc.sums) {
    auto& w = merged[AtomKey{a.nvars, a.factors, a.cpow}];
    for (const auto& [key, c] : a.weight) weight_add(w, key, c);
  }
  CompletionElement out;
  out.words = std::move(acc.words);
  for (auto& [key, w] : merged) {
    trim_weight(w);
    if (w.empty()) continue;
    SumAtom a;
    a.nvars = std::get<0>(key);
    a.factors = std::get<1>(key);
    a.cpow = std::get<2>(key);
    a.weight = std::move(w);
    out.sums.push_back(std::move(a));
  }
  return out;
}

CompletionElement SumCalculus::reindex_canonical(const SumAtom& a) const {
  return canonicalize(CompletionElement::from_atom(a));
}

bool SumCalculus::is_zero(const CompletionElement& e) const {
  CompletionElement c = canonicalize(e);
  return c.words.is_zero() && c.sums.empty();
}

bool SumCalculus::equal(const CompletionElement& a,
                        const CompletionElement& b) const {
  return is_zero(a - b);
}

// ---------------------------------------------------------------------------
// Generating elements
// ---------------------------------------------------------------------------

std::vector<SumAtom> SumCalculus::a_family_atoms(int i) const {
  const int N = alg_.rank();
  if (i < 1 || i > N) throw std::invalid_argument("build_A: index out of range");
  Scalar half_h = Scalar::rational(1, 2) * s_h();
  std::vector<SumAtom> fams;
  for (int u = i + 1; u <= N; ++u)
    fams.push_back(SumAtom::general(
        half_h, 1, {SumFactor{u, i, {-1, 0}, 0}, SumFactor{i, u, {1, 0}, 0}}));
  for (int v = 1; v < i; ++v)
    fams.push_back(SumAtom::general(
        -half_h, 1, {SumFactor{i, v, {-1, 0}, 0}, SumFactor{v, i, {1, 0}, 0}}));
  for (int u = 1; u < i; ++u)
    fams.push_back(SumAtom::general(
        half_h, 1, {SumFactor{u, i, {-1, 0}, -1}, SumFactor{i, u, {1, 0}, 1}}));
  for (int v = i + 1; v <= N; ++v)
    fams.push_back(SumAtom::general(
        -half_h, 1,
        {SumFactor{i, v, {-1, 0}, -1}, SumFactor{v, i, {1, 0}, 1}}));
  return fams;
}

SumAtom SumCalculus::p_atom(int i) const {
  const int N = alg_.rank();
  if (i < 1 || i >= N) throw std::invalid_argument("build_P: index out of range");
  return SumAtom::general(
      s_h(), 1, {SumFactor{i, N, {-1, 0}, -1}, SumFactor{N, i, {1, 0}, 1}});
}

CompletionElement SumCalculus::build_A(int i) const {
  CompletionElement raw;
  for (SumAtom& a : a_family_atoms(i)) raw.sums.push_back(std::move(a));
  return canonicalize(raw);
}

CompletionElement SumCalculus::build_P(int i) const {
  return reindex_canonical(p_atom(i));
}

// ---------------------------------------------------------------------------
// Commutators
// ---------------------------------------------------------------------------

CompletionElement SumCalculus::commutator_sum_word(const SumAtom& a,
                                                   const Word& w) const {
  CompletionElement out;
  int w_central = 0;
  for (const Letter& l : w)
    if (std::holds_alternative<CentralLetter>(l)) ++w_central;
  for (size_t l = 0; l < w.size(); ++l) {
    if (std::holds_alternative<CentralLetter>(w[l])) continue;
    const LoopGen& y = std::get<LoopGen>(w[l]);
    SumFactor yf{y.row, y.col, {0, 0}, y.tdeg};
    for (size_t k = 0; k < a.factors.size(); ++k) {
      const SumFactor& xf = a.factors[k];
      // Word letters of the term X_{<k} Y_{<l} [X_k, Y_l] Y_{>l} X_{>k}.
      auto assemble = [&](const std::vector<SumFactor>& middle) {
        std::vector<SumFactor> fs(a.factors.begin(), a.factors.begin() + k);
        for (size_t j = 0; j < l; ++j) {
          if (std::holds_alternative<CentralLetter>(w[j])) continue;
          const LoopGen& g = std::get<LoopGen>(w[j]);
          fs.push_back(SumFactor{g.row, g.col, {0, 0}, g.tdeg});
        }
        fs.insert(fs.end(), middle.begin(), middle.end());
        for (size_t j = l + 1; j < w.size(); ++j) {
          if (std::holds_alternative<CentralLetter>(w[j])) continue;
          const LoopGen& g = std::get<LoopGen>(w[j]);
          fs.push_back(SumFactor{g.row, g.col, {0, 0}, g.tdeg});
        }
        fs.insert(fs.end(), a.factors.begin() + k + 1, a.factors.end());
        return fs;
      };
      if (xf.col == yf.row) {
        SumAtom t;
        t.nvars = a.nvars;
        t.cpow = a.cpow + w_central;
        t.factors =
            assemble({SumFactor{xf.row, yf.col, xf.coef, xf.c0 + yf.c0}});
        t.weight = a.weight;
        canonicalize_atom(t, out);
      }
      if (yf.col == xf.row) {
        SumAtom t;
        t.nvars = a.nvars;
        t.cpow = a.cpow + w_central;
        t.factors =
            assemble({SumFactor{yf.row, xf.col, xf.coef, xf.c0 + yf.c0}});
        std::map<WeightKey, Scalar> neg;
        for (const auto& [key, c] : a.weight)
          weight_add(neg, key, Scalar(-1) * c);
        t.weight = std::move(neg);
        canonicalize_atom(t, out);
      }
      Scalar pair = pairing_coef(alg_.options(), xf, yf);
      if (!pair.is_zero()) {
        SumAtom cent;
        cent.nvars = a.nvars;
        cent.cpow = a.cpow + w_central +
                    (alg_.options().central_formal ? 1 : 0);
        cent.factors = assemble({});
        cent.weight =
            weight_mul_affine(a.weight, xf.coef[0], xf.coef[1], xf.c0);
        collapse_delta(cent, xf.coef[0], xf.coef[1], xf.c0 + yf.c0, pair, out);
      }
    }
  }
  return canonicalize(out);
}

CompletionElement SumCalculus::commutator_sum_sum(const SumAtom& a,
                                                  const SumAtom& b) const {
  if (a.nvars != 1 || b.nvars != 1)
    throw SumStuck("commutator of multi-variable sums is not supported");
  // Relabel b's variable to the second slot.
  std::vector<SumFactor> bf = b.factors;
  for (SumFactor& f : bf) f.coef = {0, f.coef[0]};
  std::map<WeightKey, Scalar> product_weight;
  for (const auto& [ka, ca] : a.weight)
    for (const auto& [kb, cb] : b.weight)
      weight_add(product_weight, {ka[0], kb[0]}, ca * cb);

  CompletionElement out;
  for (size_t k = 0; k < a.factors.size(); ++k) {
    const SumFactor& xf = a.factors[k];
    for (size_t l = 0; l < bf.size(); ++l) {
      const SumFactor& yf = bf[l];
      auto assemble = [&](const std::vector<SumFactor>& middle) {
        std::vector<SumFactor> fs(a.factors.begin(), a.factors.begin() + k);
        fs.insert(fs.end(), bf.begin(), bf.begin() + l);
        fs.insert(fs.end(), middle.begin(), middle.end());
        fs.insert(fs.end(), bf.begin() + l + 1, bf.end());
        fs.insert(fs.end(), a.factors.begin() + k + 1, a.factors.end());
        return fs;
      };
      if (xf.col == yf.row) {
        SumAtom t;
        t.nvars = 2;
        t.cpow = a.cpow + b.cpow;
        t.factors = assemble(
            {SumFactor{xf.row, yf.col, coef_sum(xf.coef, yf.coef),
                       xf.c0 + yf.c0}});
        t.weight = product_weight;
        canonicalize_atom(t, out);
      }
      if (yf.col == xf.row) {
        SumAtom t;
        t.nvars = 2;
        t.cpow = a.cpow + b.cpow;
        t.factors = assemble(
            {SumFactor{yf.row, xf.col, coef_sum(xf.coef, yf.coef),
                       xf.c0 + yf.c0}});
        std::map<WeightKey, Scalar> neg;
        for (const auto& [key, c] : product_weight)
          weight_add(neg, key, Scalar(-1) * c);
        t.weight = std::move(neg);
        canonicalize_atom(t, out);
      }
      Scalar pair = pairing_coef(alg_.options(), xf, yf);
      if (!pair.is_zero()) {
        SumAtom cent;
        cent.nvars = 2;
        cent.cpow = a.cpow + b.cpow +
                    (alg_.options().central_formal ? 1 : 0);
        cent.factors = assemble({});
        cent.weight =
            weight_mul_affine(product_weight, xf.coef[0], xf.coef[1], xf.c0);
        collapse_delta(cent, xf.coef[0] + yf.coef[0], xf.coef[1] + yf.coef[1],
                       xf.c0 + yf.c0, pair, out);
      }
    }
  }
  return canonicalize(out);
}

CompletionElement SumCalculus::commutator(const CompletionElement& a,
                                          const CompletionElement& b) const {
  CompletionElement acc;
  acc.words = alg_.commutator(a.words, b.words);
  for (const SumAtom& atom : a.sums)
    for (const auto& [w, c] : b.words.terms)
      acc += c * commutator_sum_word(atom, w);
  for (const SumAtom& atom : b.sums)
    for (const auto& [w, c] : a.words.terms)
      acc -= c * commutator_sum_word(atom, w);
  for (const SumAtom& x : a.sums)
    for (const SumAtom& y : b.sums) acc += commutator_sum_sum(x, y);
  return canonicalize(acc);
}

// ---------------------------------------------------------------------------
// Truncation oracle
// ---------------------------------------------------------------------------

Element SumCalculus::materialize(const CompletionElement& e,
                                 int window) const {
  if (window < 0) throw std::invalid_argument("materialize: negative window");
  Element out = e.words;
  for (const SumAtom& a : e.sums) {
    auto emit_point = [&](int s, int v) {
      Scalar coef;
      for (const auto& [key, c] : a.weight) {
        long long mult = ipow(s, key[0]) * ipow(v, key[1]);
        if (mult != 0) coef += Scalar(mult) * c;
      }
      if (coef.is_zero()) return;
      Word w;
      for (int i = 0; i < a.cpow; ++i) w.push_back(letter_c());
      for (const SumFactor& f : a.factors)
        w.push_back(
            letter_E(f.row, f.col, f.coef[0] * s + f.coef[1] * v + f.c0));
      out.add(w, coef);
    };
    if (a.nvars == 1) {
      for (int s = 0; s <= window; ++s) emit_point(s, 0);
    } else {
      for (int s = 0; s <= window; ++s)
        for (int v = 0; v <= window; ++v) emit_point(s, v);
    }
  }
  return out;
}

Report SumCalculus::verify_closure(int i, int j,
                                   const std::vector<int>& windows) const {
  const int N = alg_.rank();
  Report rep;
  {
    std::ostringstream id;
    id << "completion-closure(" << i << "," << j << ",N=" << N << ")";
    rep.id = id.str();
  }
  if (i < 1 || i >= N || j < 1 || j >= N)
    throw std::invalid_argument("verify_closure: index out of range");
  std::ostringstream detail;
  try {
    CompletionElement Ai = build_A(i), Aj = build_A(j);
    CompletionElement Pi = build_P(i), Pj = build_P(j);
    CompletionElement exact = commutator(Ai, Pj) - commutator(Aj, Pi) +
                              commutator(Pi, Pj);
    exact = canonicalize(exact);
    bool exact_zero = exact.words.is_zero() && exact.sums.empty();
    if (!exact_zero) {
      rep.status = Status::failed;
      rep.residual = to_string(exact);
      rep.detail = "exact canonical form does not vanish";
      return rep;
    }
    detail << "exact canonical form vanishes";

    // Independent truncation oracle: expand the raw (uncanonicalized)
    // defining sums over a finite variable box, bracket in the enveloping
    // algebra, and require the residual to sit at the truncation boundary.
    bool oracle_ok = true;
    for (int S : windows) {
      rep.window = S;
      CompletionElement rawAi, rawAj, rawPi, rawPj;
      for (SumAtom& t : a_family_atoms(i)) rawAi.sums.push_back(std::move(t));
      for (SumAtom& t : a_family_atoms(j)) rawAj.sums.push_back(std::move(t));
      rawPi.sums.push_back(p_atom(i));
      rawPj.sums.push_back(p_atom(j));
      Element mAi = materialize(rawAi, S), mAj = materialize(rawAj, S);
      Element mPi = materialize(rawPi, S), mPj = materialize(rawPj, S);
      Element res = alg_.commutator(mAi, mPj) - alg_.commutator(mAj, mPi) +
                    alg_.commutator(mPi, mPj);
      res = alg_.pbw_normal_form(res);
      int interior = 0;
      for (const auto& [w, c] : res.terms) {
        int maxdeg = 0;
        for (const Letter& l : w)
          if (const LoopGen* g = std::get_if<LoopGen>(&l))
            maxdeg = std::max(maxdeg, std::abs(g->tdeg));
        if (maxdeg < S - 1) ++interior;
      }
      detail << "; window " << S << ": " << res.terms.size()
             << " boundary words, " << interior << " interior";
      if (interior != 0) oracle_ok = false;
    }
    if (!oracle_ok) {
      rep.status = Status::discrepancy;
      rep.detail = detail.str() +
                   "; truncation oracle found interior residual words";
      return rep;
    }
    rep.status = Status::verified;
    rep.detail = detail.str();
  } catch (const SumStuck& ex) {
    rep.status = Status::stuck;
    rep.detail = ex.what();
  }
  return rep;
}

}  // namespace ywsym
