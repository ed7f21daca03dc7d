#pragma once

// Formal meromorphic forms on polydisc coordinates: sums of c * z^a dz_I with integer
// exponents (negative allowed on boundary variables), the log condition, the Hodge
// filtration F and the Q-filtration.

#include "charclass/qi.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <climits>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace charclass {

inline constexpr int infinite_level = INT_MAX;

struct CoordSystem {
  std::vector<std::string> boundary;
  std::vector<std::string> interior;

  int size() const { return static_cast<int>(boundary.size() + interior.size()); }
  bool is_boundary(int v) const { return v < static_cast<int>(boundary.size()); }
  const std::string& name(int v) const {
    return is_boundary(v) ? boundary[v] : interior[v - boundary.size()];
  }
  int index(const std::string& s) const {
    for (int v = 0; v < size(); ++v)
      if (name(v) == s) return v;
    return -1;
  }
  void validate() const {
    for (int a = 0; a < size(); ++a)
      for (int b = a + 1; b < size(); ++b)
        if (name(a) == name(b)) throw std::invalid_argument("coordinate names must be distinct: " + name(a));
  }
  friend bool operator==(const CoordSystem& a, const CoordSystem& b) {
    return a.boundary == b.boundary && a.interior == b.interior;
  }
};

class LogMeroForm {
 public:
  struct Key {
    std::vector<int> exps;
    std::uint32_t wedge = 0;
    friend bool operator<(const Key& a, const Key& b) {
      if (a.wedge != b.wedge) {
        int da = std::popcount(a.wedge), db = std::popcount(b.wedge);
        if (da != db) return da < db;
        return a.wedge < b.wedge;
      }
      return a.exps < b.exps;
    }
    friend bool operator==(const Key& a, const Key& b) { return a.wedge == b.wedge && a.exps == b.exps; }
  };

  LogMeroForm() = default;
  explicit LogMeroForm(CoordSystem cs) : cs_(std::move(cs)) {
    cs_.validate();
    if (cs_.size() > 31) throw std::invalid_argument("too many coordinates");
  }

  const CoordSystem& coords() const { return cs_; }
  const std::map<Key, QI>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Key& k, const QI& c) {
    if (c.is_zero()) return;
    for (int v = 0; v < cs_.size(); ++v)
      if (!cs_.is_boundary(v) && k.exps[v] < 0) throw std::invalid_argument("pole along interior variable " + cs_.name(v));
    auto [it, fresh] = terms_.try_emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  LogMeroForm& operator+=(const LogMeroForm& o) {
    same(o);
    for (auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  LogMeroForm& operator-=(const LogMeroForm& o) {
    same(o);
    for (auto& [k, c] : o.terms_) add(k, -c);
    return *this;
  }
  friend LogMeroForm operator+(LogMeroForm a, const LogMeroForm& b) { return a += b; }
  friend LogMeroForm operator-(LogMeroForm a, const LogMeroForm& b) { return a -= b; }
  friend bool operator==(const LogMeroForm& a, const LogMeroForm& b) {
    return a.cs_ == b.cs_ && a.terms_ == b.terms_;
  }

  friend LogMeroForm wedge(const LogMeroForm& a, const LogMeroForm& b) {
    a.same(b);
    LogMeroForm out(a.cs_);
    for (auto& [ka, ca] : a.terms_)
      for (auto& [kb, cb] : b.terms_) {
        if (ka.wedge & kb.wedge) continue;
        int inv = 0;
        for (std::uint32_t bb = kb.wedge; bb; bb &= bb - 1) {
          int j = std::countr_zero(bb);
          inv += std::popcount(ka.wedge >> (j + 1));
        }
        Key k{ka.exps, ka.wedge | kb.wedge};
        for (std::size_t v = 0; v < k.exps.size(); ++v) k.exps[v] += kb.exps[v];
        QI c = ca * cb;
        out.add(k, inv % 2 ? -c : c);
      }
    return out;
  }

  LogMeroForm d() const {
    LogMeroForm out(cs_);
    for (auto& [k, c] : terms_)
      for (int v = 0; v < cs_.size(); ++v) {
        std::uint32_t bit = std::uint32_t{1} << v;
        if (k.exps[v] == 0 || (k.wedge & bit)) continue;
        Key nk{k.exps, k.wedge | bit};
        nk.exps[v] -= 1;
        int below = std::popcount(k.wedge & (bit - 1));
        QI nc = c * QI(k.exps[v]);
        out.add(nk, below % 2 ? -nc : nc);
      }
    return out;
  }

  std::string str() const;

 private:
  void same(const LogMeroForm& o) const {
    if (!(o.cs_ == cs_)) throw std::invalid_argument("forms use different coordinate systems");
  }

  CoordSystem cs_;
  std::map<Key, QI> terms_;
};

// ---------------------------------------------------------------------------
// Levels

// Q-level of a single term: boundary v counts when dv is present with at worst a log pole;
// interior differentials count one each.
inline int term_q_level(const CoordSystem& cs, const LogMeroForm::Key& k) {
  int q = 0;
  for (int v = 0; v < cs.size(); ++v) {
    bool has_d = k.wedge & (std::uint32_t{1} << v);
    if (!has_d) continue;
    if (!cs.is_boundary(v) || k.exps[v] >= -1) ++q;
  }
  return q;
}

inline bool term_is_log(const CoordSystem& cs, const LogMeroForm::Key& k) {
  for (int v = 0; v < cs.size(); ++v) {
    if (!cs.is_boundary(v)) continue;
    if (k.exps[v] < -1) return false;
    if (k.exps[v] == -1 && !(k.wedge & (std::uint32_t{1} << v))) return false;
  }
  return true;
}

inline int q_level(const LogMeroForm& f) {
  int q = infinite_level;
  for (auto& [k, c] : f.terms()) q = std::min(q, term_q_level(f.coords(), k));
  return q;
}

inline bool is_log(const LogMeroForm& f) {
  for (auto& [k, c] : f.terms())
    if (!term_is_log(f.coords(), k)) return false;
  return true;
}

// Largest p with f in F^p Omega(log D), -1 if f is not log.
inline int f_level(const LogMeroForm& f) {
  if (!is_log(f)) return -1;
  int p = infinite_level;
  for (auto& [k, c] : f.terms()) p = std::min(p, std::popcount(k.wedge));
  return p;
}

// ---------------------------------------------------------------------------
// Printing and parsing

inline std::string LogMeroForm::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto& [k, c] : terms_) {
    std::string num, den, wed;
    for (int v = 0; v < cs_.size(); ++v) {
      int e = k.exps[v];
      if (e > 0) num += (num.empty() ? "" : " ") + cs_.name(v) + (e > 1 ? "^" + std::to_string(e) : "");
      if (e < 0) den += "/" + cs_.name(v) + (e < -1 ? "^" + std::to_string(-e) : "");
    }
    for (int v = 0; v < cs_.size(); ++v)
      if (k.wedge & (std::uint32_t{1} << v)) wed += (wed.empty() ? "d" : "^d") + cs_.name(v);
    // coefficient: rational or Gaussian rational
    QI cc = c;
    bool neg = false;
    if (cc.im() == 0 && cc.re() < 0) {
      neg = true;
      cc = -cc;
    }
    std::string coeff;
    if (cc.im() == 0) {
      coeff = to_string(cc.re());
    } else {
      coeff = "(" + cc.str() + ")";
    }
    bool unit = cc.im() == 0 && cc.re() == 1;
    std::string body = num;
    if (!wed.empty()) body += (body.empty() ? "" : " ") + wed;
    std::string t;
    if (unit && !body.empty()) t = body;
    else t = coeff + (body.empty() ? "" : " " + body);
    t += den;
    if (first) out += neg ? "-" + t : t;
    else out += neg ? " - " + t : " + " + t;
    first = false;
  }
  return out;
}

class FormParseError : public std::invalid_argument {
 public:
  FormParseError(const std::string& msg, std::size_t pos)
      : std::invalid_argument(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

namespace detail {

class FormParser {
 public:
  FormParser(const std::string& text, const CoordSystem& cs) : s_(text), cs_(cs) {}

  LogMeroForm parse() {
    LogMeroForm out(cs_);
    skip();
    if (at_end()) throw FormParseError("empty expression", pos_);
    bool first = true;
    while (true) {
      skip();
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
      } else if (!first) {
        throw FormParseError("expected '+' or '-'", pos_);
      }
      first = false;
      term(out, sign);
      skip();
      if (at_end()) break;
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek(std::size_t off = 0) const { return pos_ + off < s_.size() ? s_[pos_ + off] : '\0'; }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool var_start(std::size_t off = 0) const {
    char c = peek(off);
    return std::isalpha(static_cast<unsigned char>(c)) && c != 'd';
  }

  long long integer() {
    skip();
    bool neg = false;
    if (peek() == '-') {
      neg = true;
      ++pos_;
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) throw FormParseError("expected integer", pos_);
    long long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      ++pos_;
      if (v > 1000000000LL) throw FormParseError("integer too large", pos_);
    }
    return neg ? -v : v;
  }

  int variable() {
    std::size_t start = pos_;
    if (!var_start()) throw FormParseError("expected variable", pos_);
    std::string name(1, peek());
    ++pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) name += s_[pos_++];
    int v = cs_.index(name);
    if (v < 0) throw FormParseError("unknown variable '" + name + "'", start);
    return v;
  }

  // var ['^' int]
  void factor(std::vector<int>& exps, int sign) {
    int v = variable();
    long long e = 1;
    if (peek() == '^' && peek(1) != 'd') {
      ++pos_;
      e = integer();
    }
    exps[v] += sign * static_cast<int>(e);
  }

  void term(LogMeroForm& out, int sign) {
    skip();
    std::size_t start = pos_;
    Rational coeff = sign;
    std::vector<int> exps(cs_.size(), 0);
    std::uint32_t wedge = 0;
    int wsign = 1;
    bool any = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      Rational c = integer();
      if (peek() == '/' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        ++pos_;
        long long den = integer();
        if (den == 0) throw FormParseError("division by zero", pos_);
        c /= den;
      }
      coeff *= c;
      any = true;
      skip();
      if (peek() == '*') {
        ++pos_;
        skip();
      }
    }
    // monomial factors
    while (var_start()) {
      factor(exps, 1);
      any = true;
      skip();
      if (peek() == '*') {
        ++pos_;
        skip();
      }
    }
    // differentials
    if (peek() == 'd' && var_start(1)) {
      while (true) {
        ++pos_;  // 'd'
        std::size_t at = pos_;
        int v = variable();
        std::uint32_t bit = std::uint32_t{1} << v;
        if (wedge & bit) throw FormParseError("repeated differential", at);
        if (std::popcount(wedge & ~((bit << 1) - 1)) % 2) wsign = -wsign;
        wedge |= bit;
        any = true;
        if (peek() == '^' && peek(1) == 'd') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    skip();
    while (peek() == '/') {
      ++pos_;
      skip();
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        long long den = integer();
        if (den == 0) throw FormParseError("division by zero", pos_);
        coeff /= den;
      } else {
        factor(exps, -1);
      }
      skip();
    }
    if (!any) throw FormParseError("expected a term", start);
    out.add(LogMeroForm::Key{exps, wedge}, QI(coeff * wsign));
  }

  const std::string& s_;
  const CoordSystem& cs_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline LogMeroForm parse_form(const std::string& text, const CoordSystem& cs) {
  return detail::FormParser(text, cs).parse();
}

// Variable names occurring in an expression, in order of first appearance.
inline std::vector<std::string> variables_in(const std::string& text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (c == 'd' && i + 1 < text.size() && std::isalpha(static_cast<unsigned char>(text[i + 1]))) {
        ++i;
        continue;
      }
      if (c == 'd') throw FormParseError("'d' is reserved for differentials", i);
      std::string name(1, c);
      ++i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) name += text[i++];
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    } else {
      ++i;
    }
  }
  return out;
}

// Substitute v1 = v2 = new_var (and dv1 = dv2 = d new_var).
inline LogMeroForm restrict_diagonal(const LogMeroForm& f, const std::string& v1, const std::string& v2,
                                     const std::string& new_var) {
  const CoordSystem& cs = f.coords();
  int a = cs.index(v1), b = cs.index(v2);
  if (a < 0 || b < 0) throw std::invalid_argument("restrict_diagonal: unknown variable");
  if (a == b) throw std::invalid_argument("restrict_diagonal: variables must differ");
  if (!cs.is_boundary(a) || !cs.is_boundary(b)) throw std::invalid_argument("restrict_diagonal: variables must be boundary");
  int clash = cs.index(new_var);
  if (clash >= 0 && clash != a && clash != b) throw std::invalid_argument("restrict_diagonal: name clash with " + new_var);

  CoordSystem out_cs;
  std::vector<int> target(cs.size());
  int nv = -1;
  for (int v = 0; v < static_cast<int>(cs.boundary.size()); ++v) {
    if (v == a || v == b) {
      if (nv < 0) {
        nv = static_cast<int>(out_cs.boundary.size());
        out_cs.boundary.push_back(new_var);
      }
      target[v] = nv;
    } else {
      target[v] = static_cast<int>(out_cs.boundary.size());
      out_cs.boundary.push_back(cs.boundary[v]);
    }
  }
  int nb = static_cast<int>(out_cs.boundary.size());
  for (std::size_t v = 0; v < cs.interior.size(); ++v) {
    target[cs.boundary.size() + v] = nb + static_cast<int>(v);
    out_cs.interior.push_back(cs.interior[v]);
  }
  LogMeroForm out(out_cs);
  for (auto& [k, c] : f.terms()) {
    LogMeroForm::Key nk{std::vector<int>(out_cs.size(), 0), 0};
    for (int v = 0; v < cs.size(); ++v) nk.exps[target[v]] += k.exps[v];
    // rebuild the wedge in the new order, tracking the permutation sign
    std::vector<int> order;
    for (int v = 0; v < cs.size(); ++v)
      if (k.wedge & (std::uint32_t{1} << v)) order.push_back(target[v]);
    bool zero = false;
    int inv = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t j = i + 1; j < order.size(); ++j) {
        if (order[i] == order[j]) zero = true;
        if (order[i] > order[j]) ++inv;
      }
    if (zero) continue;
    for (int t : order) nk.wedge |= std::uint32_t{1} << t;
    out.add(nk, inv % 2 ? -c : c);
  }
  return out;
}

inline std::string level_str(int q) { return q == infinite_level ? std::string("inf") : std::to_string(q); }

// "<form> ∈ Q^q \ Q^{q+1}, F-level f, log: yes/no"
inline std::string classification_line(const LogMeroForm& f) {
  int q = q_level(f);
  std::string next = q == infinite_level ? "inf" : std::to_string(q + 1);
  return f.str() + " ∈ Q^" + level_str(q) + " \\ Q^" + next + ", F-level " + level_str(f_level(f)) +
         ", log: " + (is_log(f) ? "yes" : "no");
}

// Short summary, e.g. "log, F^1, Q^1" or "meromorphic, Q^0, not log".
inline std::string classification_summary(const LogMeroForm& f) {
  int q = q_level(f);
  if (is_log(f)) return "log, F^" + level_str(f_level(f)) + ", Q^" + level_str(q);
  return "meromorphic, Q^" + level_str(q) + ", not log";
}

inline std::string q_membership(const LogMeroForm& f) {
  int q = q_level(f);
  if (q == infinite_level) return "Q^inf";
  return "Q^" + std::to_string(q) + ", not Q^" + std::to_string(q + 1);
}

}  // namespace charclass
