#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace randcrn {

using Species = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Term {
  Species species;
  std::uint32_t coeff;
  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

// A nonnegative integer combination of species, stored sparsely and sorted by
// species. The empty combination is the zero complex.
class Complex {
 public:
  using Terms = boost::container::small_vector<Term, 2>;

  Complex() = default;

  // Terms may arrive unsorted and with repeated species; zero coefficients
  // are dropped.
  explicit Complex(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end());
    for (const auto& t : terms) {
      if (t.coeff == 0) continue;
      if (!terms_.empty() && terms_.back().species == t.species) {
        auto sum = static_cast<std::uint64_t>(terms_.back().coeff) + t.coeff;
        if (sum > std::numeric_limits<std::uint32_t>::max())
          throw Error("stoichiometric coefficient overflow");
        terms_.back().coeff = static_cast<std::uint32_t>(sum);
      } else {
        terms_.push_back(t);
      }
    }
  }

  static Complex zero() { return {}; }
  static Complex single(Species s, std::uint32_t a = 1) {
    Complex c;
    c.terms_.push_back({s, a});
    return c;
  }
  static Complex pair(Species s, Species t) {
    if (s == t) return single(s, 2);
    Complex c;
    c.terms_.push_back({std::min(s, t), 1});
    c.terms_.push_back({std::max(s, t), 1});
    return c;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::uint32_t coeff(Species s) const {
    for (const auto& t : terms_)
      if (t.species == s) return t.coeff;
    return 0;
  }

  std::uint64_t molecularity() const {
    std::uint64_t m = 0;
    for (const auto& t : terms_) m += t.coeff;
    return m;
  }

  Species max_species() const { return terms_.empty() ? 0 : terms_.back().species; }

  friend bool operator==(const Complex& a, const Complex& b) {
    return std::equal(a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end());
  }
  friend bool operator<(const Complex& a, const Complex& b) {
    return std::lexicographical_compare(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                                        b.terms_.end());
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& t : terms_) {
      h ^= (static_cast<std::size_t>(t.species) << 8 | t.coeff) + 0x9e3779b97f4a7c15ULL + (h << 6) +
           (h >> 2);
    }
    return h;
  }

 private:
  Terms terms_;
};

// Unordered pair of distinct complexes; left() < right() in the canonical order.
class ReversibleReaction {
 public:
  ReversibleReaction(Complex a, Complex b) {
    if (a == b) throw Error("reaction has identical sides");
    if (b < a) std::swap(a, b);
    left_ = std::move(a);
    right_ = std::move(b);
  }

  const Complex& left() const { return left_; }
  const Complex& right() const { return right_; }

  // Coefficient of s on the right minus on the left.
  std::int64_t delta(Species s) const {
    return static_cast<std::int64_t>(right_.coeff(s)) - static_cast<std::int64_t>(left_.coeff(s));
  }

  friend bool operator==(const ReversibleReaction& a, const ReversibleReaction& b) {
    return a.left_ == b.left_ && a.right_ == b.right_;
  }
  friend bool operator<(const ReversibleReaction& a, const ReversibleReaction& b) {
    if (a.left_ == b.left_) return a.right_ < b.right_;
    return a.left_ < b.left_;
  }

  std::size_t hash() const { return left_.hash() * 1000003ULL ^ right_.hash(); }

 private:
  Complex left_;
  Complex right_;
};

struct ReactionHash {
  std::size_t operator()(const ReversibleReaction& r) const { return r.hash(); }
};
struct ComplexHash {
  std::size_t operator()(const Complex& c) const { return c.hash(); }
};

class ReactionNetwork {
 public:
  ReactionNetwork() = default;

  // Reactions are deduplicated and sorted. Throws if any species index is >= n.
  ReactionNetwork(std::size_t n, std::vector<ReversibleReaction> reactions,
                  std::vector<std::string> names = {})
      : n_(n), reactions_(std::move(reactions)), names_(std::move(names)) {
    if (n_ == 0) throw Error("species count must be positive");
    if (!names_.empty() && names_.size() != n_) throw Error("species name count does not match n");
    std::sort(reactions_.begin(), reactions_.end());
    reactions_.erase(std::unique(reactions_.begin(), reactions_.end()), reactions_.end());
    for (const auto& r : reactions_) {
      for (const auto* c : {&r.left(), &r.right()}) {
        if (!c->is_zero() && c->max_species() >= n_)
          throw Error("species index " + std::to_string(c->max_species() + 1) +
                      " exceeds declared species count " + std::to_string(n_));
      }
    }
    lookup_.reserve(reactions_.size());
    for (const auto& r : reactions_) lookup_.insert(r);
  }

  std::size_t n() const { return n_; }
  const std::vector<ReversibleReaction>& reactions() const { return reactions_; }
  std::size_t size() const { return reactions_.size(); }
  bool contains(const ReversibleReaction& r) const { return lookup_.count(r) != 0; }
  bool contains(const Complex& a, const Complex& b) const {
    return a != b && contains(ReversibleReaction(a, b));
  }

  std::string species_name(Species s) const {
    if (!names_.empty()) return names_[s];
    return "X" + std::to_string(s + 1);
  }
  const std::vector<std::string>& names() const { return names_; }

  ReactionNetwork with_reaction(const ReversibleReaction& r) const {
    auto rs = reactions_;
    rs.push_back(r);
    return ReactionNetwork(n_, std::move(rs), names_);
  }

  // Species s is renamed to perm[s].
  ReactionNetwork relabeled(const std::vector<Species>& perm) const {
    std::vector<ReversibleReaction> rs;
    rs.reserve(reactions_.size());
    auto map = [&](const Complex& c) {
      std::vector<Term> ts;
      for (const auto& t : c.terms()) ts.push_back({perm.at(t.species), t.coeff});
      return Complex(std::move(ts));
    };
    for (const auto& r : reactions_) rs.emplace_back(map(r.left()), map(r.right()));
    return ReactionNetwork(n_, std::move(rs));
  }

 private:
  std::size_t n_ = 1;
  std::vector<ReversibleReaction> reactions_;
  std::vector<std::string> names_;
  std::unordered_set<ReversibleReaction, ReactionHash> lookup_;
};

struct RatePair {
  double forward = 1.0;   // left -> right in the canonical orientation
  double backward = 1.0;  // right -> left
};

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

struct ParsedNetwork {
  ReactionNetwork network;
  // Rates keyed by reaction, already oriented to the canonical left/right.
  std::vector<std::pair<ReversibleReaction, RatePair>> rates;
  std::vector<std::string> warnings;
  bool all_rated = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool valid_species_name(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

// X<k> with k >= 1 and no leading zero.
inline std::optional<std::uint64_t> indexed_name(std::string_view s) {
  if (s.size() < 2 || s[0] != 'X' || s[1] == '0') return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

struct RawTerm {
  std::string name;
  std::uint32_t coeff;
};

inline std::vector<RawTerm> parse_complex(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.empty()) throw ParseError(line, "empty complex");
  if (s == "0") return {};
  std::vector<RawTerm> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto plus = s.find('+', start);
    auto tok = trim(s.substr(start, plus == std::string_view::npos ? s.npos : plus - start));
    if (tok.empty()) throw ParseError(line, "empty term in complex '" + std::string(s) + "'");
    std::size_t i = 0;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
    std::uint32_t k = 1;
    if (i > 0) {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + i, v);
      if (ec == std::errc::result_out_of_range || v > std::numeric_limits<std::uint32_t>::max())
        throw ParseError(line, "coefficient overflow in '" + std::string(tok) + "'");
      if (v == 0) throw ParseError(line, "zero coefficient in '" + std::string(tok) + "'");
      k = static_cast<std::uint32_t>(v);
    }
    auto name = trim(tok.substr(i));
    if (!valid_species_name(name))
      throw ParseError(line, "invalid species name '" + std::string(name) + "'");
    out.push_back({std::string(name), k});
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return out;
}

inline double parse_rate(std::string_view tok, std::size_t line) {
  std::string t(tok);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "invalid rate constant '" + t + "'");
  }
  if (used != t.size() || !(v >= 0) || !std::isfinite(v))
    throw ParseError(line, "invalid rate constant '" + t + "'");
  return v;
}

}  // namespace detail

// Parses "LHS <-> RHS [| kf kr]" lines. A comment containing "n=<int>" that
// precedes the first reaction declares the species count (used by emitted
// samples, which may have unused species). Species named X1..Xk map to
// indices 0..k-1 when every name has that form; otherwise names are interned
// in order of first appearance.
inline ParsedNetwork parse_network_text(std::string_view text) {
  struct RawReaction {
    std::vector<detail::RawTerm> lhs, rhs;
    std::optional<RatePair> rates;
    std::size_t line;
  };
  std::vector<RawReaction> raw;
  std::optional<std::size_t> declared_n;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    std::string_view comment;
    if (auto h = line.find('#'); h != std::string_view::npos) {
      comment = line.substr(h + 1);
      line = line.substr(0, h);
    }
    line = detail::trim(line);
    if (line.empty()) {
      if (raw.empty() && !declared_n) {
        std::string c(comment);
        for (char& ch : c)
          if (ch == ',') ch = ' ';
        std::istringstream is(c);
        std::string tok;
        while (is >> tok) {
          if (tok.rfind("n=", 0) == 0) {
            try {
              auto v = std::stoull(tok.substr(2));
              if (v > 0) declared_n = v;
            } catch (const std::exception&) {
            }
          }
        }
      }
      continue;
    }
    RawReaction r;
    r.line = lineno;
    auto bar = line.find('|');
    auto body = line.substr(0, bar);
    if (bar != std::string_view::npos) {
      std::istringstream is{std::string(line.substr(bar + 1))};
      std::string a, b, extra;
      if (!(is >> a >> b) || (is >> extra))
        throw ParseError(lineno, "rate suffix must be '| kf kr'");
      RatePair rp{detail::parse_rate(a, lineno), detail::parse_rate(b, lineno)};
      if (rp.forward == 0 && rp.backward == 0)
        throw ParseError(lineno, "at least one rate constant must be positive");
      r.rates = rp;
    }
    auto arrow = body.find("<->");
    if (arrow == std::string_view::npos) throw ParseError(lineno, "expected '<->'");
    r.lhs = detail::parse_complex(body.substr(0, arrow), lineno);
    r.rhs = detail::parse_complex(body.substr(arrow + 3), lineno);
    raw.push_back(std::move(r));
  }

  bool indexed = true;
  std::uint64_t max_index = 0;
  for (const auto& r : raw)
    for (const auto* side : {&r.lhs, &r.rhs})
      for (const auto& t : *side) {
        auto k = detail::indexed_name(t.name);
        if (!k) indexed = false;
        else max_index = std::max(max_index, *k);
      }

  std::unordered_map<std::string, Species> ids;
  std::vector<std::string> names;
  auto id_of = [&](const std::string& name) -> Species {
    if (indexed) return static_cast<Species>(*detail::indexed_name(name) - 1);
    auto [it, inserted] = ids.emplace(name, static_cast<Species>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  };
  auto build = [&](const std::vector<detail::RawTerm>& ts, std::size_t line) {
    std::vector<Term> out;
    for (const auto& t : ts) out.push_back({id_of(t.name), t.coeff});
    try {
      return Complex(std::move(out));
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
  };

  ParsedNetwork result;
  std::vector<ReversibleReaction> reactions;
  std::unordered_set<ReversibleReaction, ReactionHash> seen;
  for (const auto& r : raw) {
    auto a = build(r.lhs, r.line);
    auto b = build(r.rhs, r.line);
    if (a == b) throw ParseError(r.line, "left and right complexes are identical");
    ReversibleReaction rr(a, b);
    if (!seen.insert(rr).second) {
      result.warnings.push_back("line " + std::to_string(r.line) +
                                ": duplicate reversible reaction ignored");
      continue;
    }
    if (r.rates) {
      RatePair rp = *r.rates;
      if (!(rr.left() == a)) std::swap(rp.forward, rp.backward);
      result.rates.emplace_back(rr, rp);
    }
    reactions.push_back(std::move(rr));
  }

  std::size_t n = indexed ? static_cast<std::size_t>(max_index) : names.size();
  if (declared_n) {
    if (*declared_n < n)
      throw ParseError(1, "declared n=" + std::to_string(*declared_n) + " is below the species used");
    n = *declared_n;
    if (!indexed) names.resize(n);  // padded names for unused species
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i].empty()) names[i] = "_unused" + std::to_string(i + 1);
  }
  if (n == 0) throw ParseError(lineno, "network declares no species");
  result.all_rated = !reactions.empty() && result.rates.size() == reactions.size();
  result.network = ReactionNetwork(n, std::move(reactions), indexed ? std::vector<std::string>{}
                                                                    : std::move(names));
  return result;
}

inline ReactionNetwork parse_network(std::string_view text) {
  return parse_network_text(text).network;
}

inline std::string format_complex(const Complex& c, const ReactionNetwork& net) {
  if (c.is_zero()) return "0";
  std::string out;
  for (const auto& t : c.terms()) {
    if (!out.empty()) out += " + ";
    if (t.coeff != 1) out += std::to_string(t.coeff);
    out += net.species_name(t.species);
  }
  return out;
}

inline std::string format_reaction(const ReversibleReaction& r, const ReactionNetwork& net) {
  return format_complex(r.left(), net) + " <-> " + format_complex(r.right(), net);
}

// Emits the text format; the header comment carries n so unused species
// survive a round trip.
inline std::string format_network(const ReactionNetwork& net, const std::string& header = {}) {
  std::ostringstream os;
  os << "# n=" << net.n();
  if (!header.empty()) os << ", " << header;
  os << '\n';
  for (const auto& r : net.reactions()) os << format_reaction(r, net) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Stoichiometry
// ---------------------------------------------------------------------------

// Dense reaction-vector rows (right - left), one per reaction.
inline std::vector<std::vector<std::int64_t>> stoichiometric_rows(const ReactionNetwork& net) {
  std::vector<std::vector<std::int64_t>> rows;
  rows.reserve(net.size());
  for (const auto& r : net.reactions()) {
    std::vector<std::int64_t> row(net.n(), 0);
    for (const auto& t : r.right().terms()) row[t.species] += t.coeff;
    for (const auto& t : r.left().terms()) row[t.species] -= t.coeff;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

struct Overflow {};

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
  return r;
}

template <typename Int, typename Mul, typename Sub>
std::size_t bareiss_rank(std::vector<std::vector<Int>> m, Mul mul, Sub sub) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t rank = 0;
  Int prev = 1;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t k = c + 1; k < cols; ++k) {
        // Exact division: Bareiss guarantees prev divides the 2x2 minor.
        m[r][k] = sub(mul(m[rank][c], m[r][k]), mul(m[r][c], m[rank][k])) / prev;
      }
      m[r][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return rank;
}

}  // namespace detail

// Exact rank over the rationals of a small integer matrix (fraction-free
// elimination). Uses checked 64-bit arithmetic and switches to arbitrary
// precision on overflow.
inline std::size_t exact_rank(const std::vector<std::vector<std::int64_t>>& rows) {
  try {
    return detail::bareiss_rank<std::int64_t>(rows, detail::checked_mul, detail::checked_sub);
  } catch (const detail::Overflow&) {
    using boost::multiprecision::cpp_int;
    std::vector<std::vector<cpp_int>> big;
    big.reserve(rows.size());
    for (const auto& r : rows) big.emplace_back(r.begin(), r.end());
    return detail::bareiss_rank<cpp_int>(
        std::move(big), [](const cpp_int& a, const cpp_int& b) { return cpp_int(a * b); },
        [](const cpp_int& a, const cpp_int& b) { return cpp_int(a - b); });
  }
}

inline std::size_t stoich_dimension(const ReactionNetwork& net) {
  return exact_rank(stoichiometric_rows(net));
}

inline bool is_full_dimensional(const ReactionNetwork& net) {
  return stoich_dimension(net) == net.n();
}

// Basis of the left null space of the stoichiometric matrix (vectors w with
// w . (y' - y) = 0 for every reaction), computed exactly over the rationals and
// scaled to primitive integer vectors.
inline std::vector<std::vector<std::int64_t>> conservation_laws(const ReactionNetwork& net) {
  using boost::multiprecision::cpp_rational;
  using boost::multiprecision::cpp_int;
  const std::size_t n = net.n();
  auto rows = stoichiometric_rows(net);
  std::vector<std::vector<cpp_rational>> m;
  for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    cpp_rational inv = 1 / m[rank][c];
    for (auto& v : m[rank]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      cpp_rational f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) m[r][k] -= f * m[rank][k];
    }
    pivots.push_back(c);
    ++rank;
  }
  std::vector<std::vector<std::int64_t>> basis;
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<cpp_rational> w(n, 0);
    w[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) w[pivots[r]] = -m[r][free];
    cpp_int l = 1;
    for (const auto& v : w) l = boost::multiprecision::lcm(l, denominator(v));
    std::vector<cpp_int> iv;
    cpp_int g = 0;
    for (const auto& v : w) {
      iv.push_back(numerator(v) * (l / denominator(v)));
      g = boost::multiprecision::gcd(g, boost::multiprecision::abs(iv.back()));
    }
    std::vector<std::int64_t> out;
    for (auto& v : iv) out.push_back(static_cast<std::int64_t>(v / g));
    basis.push_back(std::move(out));
  }
  return basis;
}

struct DeficiencyReport {
  std::size_t v = 0;
  std::size_t ell = 0;
  std::size_t dim_s = 0;
  std::int64_t deficiency = 0;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

inline DeficiencyReport deficiency(const ReactionNetwork& net) {
  DeficiencyReport rep;
  std::unordered_map<Complex, std::size_t, ComplexHash> ids;
  auto id = [&](const Complex& c) {
    return ids.emplace(c, ids.size()).first->second;
  };
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(net.size());
  for (const auto& r : net.reactions()) {
    auto a = id(r.left());
    auto b = id(r.right());
    edges.emplace_back(a, b);
  }
  rep.v = ids.size();
  UnionFind uf(rep.v);
  std::size_t merges = 0;
  for (auto [a, b] : edges) merges += uf.unite(a, b) ? 1 : 0;
  rep.ell = rep.v - merges;
  rep.dim_s = stoich_dimension(net);
  rep.deficiency = static_cast<std::int64_t>(rep.v) - static_cast<std::int64_t>(rep.ell) -
                   static_cast<std::int64_t>(rep.dim_s);
  return rep;
}

}  // namespace randcrn
