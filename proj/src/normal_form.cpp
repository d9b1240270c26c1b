#include "srqe/normal_form.hpp"

#include <algorithm>
#include <sstream>

#include "srqe/errors.hpp"

namespace srqe::nf {

namespace {
const Rational kZero(0);
const Rational kOne(1);
}  // namespace

HomPoly HomPoly::zero(int degree) {
  HomPoly p;
  p.degree = degree;
  p.coeffs.assign(degree + 1, kZero);
  return p;
}

HomPoly HomPoly::radial(int degree) {
  if (degree % 2 != 0) throw Error(ErrorKind::domain, "radial: degree must be even");
  HomPoly p = zero(degree);
  int half = degree / 2;
  // (u^2+v^2)^half = sum_j C(half, j) u^{2(half-j)} v^{2j}
  Rational c(1);
  for (int j = 0; j <= half; ++j) {
    p.coeffs[2 * j] = c;
    c *= half - j;
    c /= j + 1;
  }
  return p;
}

bool HomPoly::is_zero() const {
  for (const auto& c : coeffs)
    if (c != 0) return false;
  return true;
}

bool HomPoly::is_radial() const {
  if (is_zero()) return true;
  if (degree % 2 != 0) return false;
  HomPoly r = radial(degree);
  // p = c * r with c from the first nonzero radial coefficient.
  Rational c = coeffs[0];  // r.coeffs[0] == 1
  for (int i = 0; i <= degree; ++i)
    if (coeffs[i] != c * r.coeffs[i]) return false;
  return true;
}

HomPoly add(const HomPoly& a, const HomPoly& b) {
  if (a.degree != b.degree) throw Error(ErrorKind::domain, "HomPoly add: degree mismatch");
  HomPoly out = a;
  for (int i = 0; i <= a.degree; ++i) out.coeffs[i] += b.coeffs[i];
  return out;
}

HomPoly scale(const HomPoly& a, const Rational& c) {
  HomPoly out = a;
  for (auto& x : out.coeffs) x *= c;
  return out;
}

HomPoly mul(const HomPoly& a, const HomPoly& b) {
  HomPoly out = HomPoly::zero(a.degree + b.degree);
  for (int i = 0; i <= a.degree; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (int j = 0; j <= b.degree; ++j) {
      if (b.coeffs[j] == 0) continue;
      // u^{(ka-i)+(kb-j)} v^{i+j}
      out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    }
  }
  return out;
}

HomPoly du(const HomPoly& a) {
  if (a.degree == 0) return HomPoly::zero(0);
  HomPoly out = HomPoly::zero(a.degree - 1);
  for (int i = 0; i < a.degree; ++i) out.coeffs[i] = a.coeffs[i] * (a.degree - i);
  return out;
}

HomPoly dv(const HomPoly& a) {
  if (a.degree == 0) return HomPoly::zero(0);
  HomPoly out = HomPoly::zero(a.degree - 1);
  for (int i = 1; i <= a.degree; ++i) out.coeffs[i - 1] = a.coeffs[i] * i;
  return out;
}

HomPoly angular(const HomPoly& a) {
  // A e_i = i e_{i-1} - (k-i) e_{i+1} on e_i = u^{k-i} v^i.
  HomPoly out = HomPoly::zero(a.degree);
  for (int i = 0; i <= a.degree; ++i) {
    if (a.coeffs[i] == 0) continue;
    if (i >= 1) out.coeffs[i - 1] += a.coeffs[i] * i;
    if (i < a.degree) out.coeffs[i + 1] -= a.coeffs[i] * (a.degree - i);
  }
  return out;
}

namespace {

// Circle moment 1/(2 pi) Integral cos^a sin^b = (a-1)!!(b-1)!!/(a+b)!!
// for even a, b; zero otherwise.
Rational circle_moment(int a, int b) {
  if (a % 2 != 0 || b % 2 != 0) return kZero;
  Rational num(1);
  for (int i = a - 1; i >= 1; i -= 2) num *= i;
  for (int i = b - 1; i >= 1; i -= 2) num *= i;
  Rational den(1);
  for (int i = a + b; i >= 2; i -= 2) den *= i;
  return num / den;
}

}  // namespace

HomPoly circle_average(const HomPoly& p) {
  if (p.degree % 2 != 0) return HomPoly::zero(p.degree);
  Rational avg(0);
  for (int i = 0; i <= p.degree; ++i)
    if (p.coeffs[i] != 0) avg += p.coeffs[i] * circle_moment(p.degree - i, i);
  // Projection onto span{radial}: <p, r>/<r, r> * r reduces to avg * r
  // because the radial part of p contributes avg directly and the
  // average-zero part contributes nothing; radial(k) has average
  // moment m_k = circle_moment sum, so normalize accordingly.
  HomPoly r = HomPoly::radial(p.degree);
  Rational mr(0);
  for (int i = 0; i <= p.degree; ++i)
    if (r.coeffs[i] != 0) mr += r.coeffs[i] * circle_moment(p.degree - i, i);
  return scale(r, avg / mr);
}

HomPoly solve_angular(const HomPoly& r) {
  if (!circle_average(r).is_zero())
    throw Error(ErrorKind::domain, "solve_angular: input must have zero circle average");
  const int k = r.degree;
  const int n = k + 1;

  // Dense rational Gaussian elimination on A q = r with column-major A.
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, kZero));
  for (int i = 0; i <= k; ++i) {
    // A e_i = i e_{i-1} - (k-i) e_{i+1}
    if (i >= 1) A[i - 1][i] = Rational(i);
    if (i < k) A[i + 1][i] = Rational(-(k - i));
  }
  std::vector<Rational> rhs = r.coeffs;

  std::vector<int> piv_col(n, -1);
  int rank = 0;
  for (int col = 0; col < n && rank < n; ++col) {
    int piv = -1;
    for (int row = rank; row < n; ++row)
      if (A[row][col] != 0) {
        piv = row;
        break;
      }
    if (piv < 0) continue;
    std::swap(A[piv], A[rank]);
    std::swap(rhs[piv], rhs[rank]);
    Rational d = A[rank][col];
    for (int c2 = 0; c2 < n; ++c2) A[rank][c2] /= d;
    rhs[rank] /= d;
    for (int row = 0; row < n; ++row) {
      if (row == rank || A[row][col] == 0) continue;
      Rational f = A[row][col];
      for (int c2 = 0; c2 < n; ++c2) A[row][c2] -= f * A[rank][c2];
      rhs[row] -= f * rhs[rank];
    }
    piv_col[rank] = col;
    ++rank;
  }
  for (int row = rank; row < n; ++row)
    if (rhs[row] != 0) throw Error(ErrorKind::domain, "solve_angular: target outside the range of A");

  HomPoly q = HomPoly::zero(k);
  for (int row = 0; row < rank; ++row) q.coeffs[piv_col[row]] = rhs[row];
  // Remove the kernel component: the solution orthogonal to ker A is the
  // one with zero circle average.
  HomPoly proj = circle_average(q);
  for (int i = 0; i <= k; ++i) q.coeffs[i] -= proj.coeffs[i];
  return q;
}

void GradedSymbol::add_term(int j, int k, int t_degree, const HomPoly& p) {
  if (p.degree != k) throw Error(ErrorKind::domain, "add_term: polynomial degree != k");
  if (k > truncation) return;
  auto& term = terms[{j, k}];
  if (static_cast<int>(term.by_t.size()) <= t_degree)
    term.by_t.resize(t_degree + 1, HomPoly::zero(k));
  term.by_t[t_degree] = add(term.by_t[t_degree], p);
}

void GradedSymbol::normalize() {
  for (auto it = terms.begin(); it != terms.end();) {
    auto& bt = it->second.by_t;
    while (!bt.empty() && bt.back().is_zero()) bt.pop_back();
    bool all_zero = true;
    for (const auto& p : bt)
      if (!p.is_zero()) all_zero = false;
    if (all_zero || it->first.k > truncation)
      it = terms.erase(it);
    else
      ++it;
  }
}

bool GradedSymbol::operator==(const GradedSymbol& o) const {
  GradedSymbol a = *this, b = o;
  a.normalize();
  b.normalize();
  if (a.terms.size() != b.terms.size()) return false;
  auto ia = a.terms.begin(), ib = b.terms.begin();
  for (; ia != a.terms.end(); ++ia, ++ib) {
    if (!(ia->first == ib->first)) return false;
    if (ia->second.by_t.size() != ib->second.by_t.size()) return false;
    for (std::size_t n = 0; n < ia->second.by_t.size(); ++n) {
      const auto& pa = ia->second.by_t[n];
      const auto& pb = ib->second.by_t[n];
      for (int i = 0; i <= pa.degree; ++i)
        if (pa.coeffs[i] != pb.coeffs[i]) return false;
    }
  }
  return true;
}

GradedSymbol h2(int truncation) {
  GradedSymbol s;
  s.truncation = truncation;
  s.add_term(2, 2, 0, HomPoly::radial(2));
  return s;
}

GradedSymbol add(const GradedSymbol& a, const GradedSymbol& b) {
  GradedSymbol out = a;
  out.truncation = std::min(a.truncation, b.truncation);
  for (const auto& [key, term] : b.terms)
    for (std::size_t n = 0; n < term.by_t.size(); ++n)
      out.add_term(key.j, key.k, static_cast<int>(n), term.by_t[n]);
  out.normalize();
  return out;
}

GradedSymbol scale(const GradedSymbol& a, const Rational& c) {
  GradedSymbol out = a;
  for (auto& [key, term] : out.terms)
    for (auto& p : term.by_t) p = scale(p, c);
  out.normalize();
  return out;
}

GradedSymbol poisson(const GradedSymbol& f, const GradedSymbol& g) {
  GradedSymbol out;
  out.truncation = std::min(f.truncation, g.truncation);
  for (const auto& [kf, tf] : f.terms) {
    // twice the s-exponent: 2 j - k
    int tgf = 2 * kf.j - kf.k;
    for (const auto& [kg, tg] : g.terms) {
      int tgg = 2 * kg.j - kg.k;
      for (int n1 = 0; n1 < static_cast<int>(tf.by_t.size()); ++n1) {
        const HomPoly& P = tf.by_t[n1];
        if (P.is_zero()) continue;
        for (int n2 = 0; n2 < static_cast<int>(tg.by_t.size()); ++n2) {
          const HomPoly& Q = tg.by_t[n2];
          if (Q.is_zero()) continue;

          // Base part {a,b} = (gamma_f n2 - gamma_g n1) t^{n1+n2-1} s^{...}
          Rational base_coef = frac(static_cast<long>(tgf) * n2 - static_cast<long>(tgg) * n1, 2);
          if (base_coef != 0 && kf.k + kg.k <= out.truncation)
            out.add_term(kf.j + kg.j - 1, kf.k + kg.k, n1 + n2 - 1, scale(mul(P, Q), base_coef));

          // Fiber part a b (P_u Q_v - P_v Q_u) at degree k+k'-2.
          if (kf.k + kg.k >= 2 && kf.k + kg.k - 2 <= out.truncation) {
            HomPoly fiber = add(mul(du(P), dv(Q)), scale(mul(dv(P), du(Q)), Rational(-1)));
            if (!fiber.is_zero())
              out.add_term(kf.j + kg.j - 1, kf.k + kg.k - 2, n1 + n2, fiber);
          }
        }
      }
    }
  }
  out.normalize();
  return out;
}

GradedSymbol solve_cohomological(const GradedSymbol& target, CohomSpace space) {
  GradedSymbol gen;
  gen.truncation = target.truncation;
  GradedSymbol t = target;
  t.normalize();
  if (t.terms.empty()) return gen;
  if (t.terms.size() != 1)
    throw Error(ErrorKind::domain, "solve_cohomological: target must occupy a single grade");
  const auto& [key, term] = *t.terms.begin();

  if (space == CohomSpace::zero_average) {
    // target = c t^n s^delta R, R average-zero of degree k; generator
    // (c/2) t^n s^{delta-1} solve_angular(R) in F0_{j-1,k}.
    for (int n = 0; n < static_cast<int>(term.by_t.size()); ++n) {
      const HomPoly& R = term.by_t[n];
      if (R.is_zero()) continue;
      if (!circle_average(R).is_zero())
        throw Error(ErrorKind::domain,
                    "solve_cohomological(zero): target has a nonzero circle average");
      gen.add_term(key.j - 1, key.k, n, scale(solve_angular(R), Rational(1, 2)));
    }
  } else {
    if (key.k % 2 != 0)
      throw Error(ErrorKind::domain,
                  "solve_cohomological(invariant): odd fiber degree (the invariant space is {0})");
    if (key.k < 2)
      throw Error(ErrorKind::domain, "solve_cohomological(invariant): fiber degree must be >= 2");
    for (int n = 0; n < static_cast<int>(term.by_t.size()); ++n) {
      const HomPoly& R = term.by_t[n];
      if (R.is_zero()) continue;
      if (!R.is_radial())
        throw Error(ErrorKind::domain, "solve_cohomological(invariant): target is not radial");
      // c (u^2+v^2)^{k/2} t^n -> (c/(n+1)) t^{n+1} (u^2+v^2)^{k/2-1}
      Rational c = R.coeffs[0];  // leading u^k coefficient equals the radial multiple
      HomPoly q = scale(HomPoly::radial(key.k - 2), c / (n + 1));
      gen.add_term(key.j - 1, key.k - 2, n + 1, q);
    }
  }
  gen.normalize();
  return gen;
}

GradedSymbol lie_transform(const GradedSymbol& h, const GradedSymbol& generator,
                           int max_applications) {
  GradedSymbol acc = h;
  acc.truncation = std::min(h.truncation, generator.truncation);
  GradedSymbol term = h;
  term.truncation = acc.truncation;
  Rational factorial(1);
  for (int n = 1; n <= max_applications; ++n) {
    term = poisson(generator, term);
    if (term.is_zero()) return acc;
    factorial *= n;
    acc = add(acc, scale(term, kOne / factorial));
  }
  throw Error(ErrorKind::resource,
              "lie_transform: series did not terminate within the application cap "
              "(rotation-type generator?)");
}

namespace {

// Splits the (j,k) component of s into (average-zero part, radial part).
std::pair<GradedSymbol, GradedSymbol> split_component(const GradedSymbol& s, int j, int k) {
  GradedSymbol zero_part, inv_part;
  zero_part.truncation = inv_part.truncation = s.truncation;
  auto it = s.terms.find({j, k});
  if (it == s.terms.end()) return {zero_part, inv_part};
  for (int n = 0; n < static_cast<int>(it->second.by_t.size()); ++n) {
    const HomPoly& P = it->second.by_t[n];
    if (P.is_zero()) continue;
    HomPoly avg = (k % 2 == 0) ? circle_average(P) : HomPoly::zero(k);
    HomPoly rest = add(P, scale(avg, Rational(-1)));
    if (!avg.is_zero()) inv_part.add_term(j, k, n, avg);
    if (!rest.is_zero()) zero_part.add_term(j, k, n, rest);
  }
  zero_part.normalize();
  inv_part.normalize();
  return {zero_part, inv_part};
}

}  // namespace

NormalFormResult birkhoff_normalize(const GradedSymbol& h, int order, NormalFormMode mode) {
  GradedSymbol cur = h;
  cur.truncation = std::min(h.truncation, order);
  cur.normalize();

  // Input must be H2 + grades (2, k >= 3).
  for (const auto& [key, term] : cur.terms) {
    if (key.j != 2)
      throw Error(ErrorKind::domain, "birkhoff_normalize: input has a component of conic order != 2");
    if (key.k < 2)
      throw Error(ErrorKind::domain, "birkhoff_normalize: input has a fiber degree < 2 component");
    if (key.k == 2) {
      GradedSymbol just_h2 = h2(cur.truncation);
      GradedSymbol comp;
      comp.truncation = cur.truncation;
      for (int n = 0; n < static_cast<int>(term.by_t.size()); ++n)
        comp.add_term(2, 2, n, term.by_t[n]);
      if (!(comp == just_h2))
        throw Error(ErrorKind::domain, "birkhoff_normalize: the (2,2) component must equal H2 exactly");
    }
  }
  if (cur.terms.find({2, 2}) == cur.terms.end())
    throw Error(ErrorKind::domain, "birkhoff_normalize: input lacks the H2 component");

  NormalFormResult out;

  // Step 1: remove average-zero components, k = 3..order.
  for (int k = 3; k <= order; ++k) {
    auto [zero_part, inv_part] = split_component(cur, 2, k);
    (void)inv_part;
    if (zero_part.is_zero()) continue;
    GradedSymbol gen = solve_cohomological(zero_part, CohomSpace::zero_average);
    cur = lie_transform(cur, gen);
    out.generators.push_back(std::move(gen));
    auto check = split_component(cur, 2, k);
    if (!check.first.is_zero())
      throw Error(ErrorKind::numeric, "birkhoff_normalize: average-zero component survived");
  }

  // Step 2 (local mode): remove the invariant tail, k = 4, 6, ...
  if (mode == NormalFormMode::local) {
    for (int k = 4; k <= order; k += 2) {
      auto [zero_part, inv_part] = split_component(cur, 2, k);
      if (!zero_part.is_zero())
        throw Error(ErrorKind::numeric, "birkhoff_normalize: unexpected average-zero component");
      if (inv_part.is_zero()) continue;
      GradedSymbol gen = solve_cohomological(inv_part, CohomSpace::invariant);
      cur = lie_transform(cur, gen);
      out.generators.push_back(std::move(gen));
      auto check = split_component(cur, 2, k);
      if (!check.second.is_zero())
        throw Error(ErrorKind::numeric, "birkhoff_normalize: invariant component survived");
    }
  }

  cur.normalize();
  out.normal_form = cur;
  out.residual.truncation = cur.truncation;  // grades above `order` are not computed
  return out;
}

// ---------------------------------------------------------------------------
// Canonical text form and parser.

namespace {

void format_spow(std::ostringstream& os, int twice_gamma) {
  if (twice_gamma == 0) return;
  os << " * s^";
  if (twice_gamma % 2 == 0)
    os << twice_gamma / 2;
  else
    os << '(' << twice_gamma << "/2)";
}

}  // namespace

std::string GradedSymbol::canonical_text() const {
  GradedSymbol s = *this;
  s.normalize();
  if (s.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, term] : s.terms) {
    int tg = 2 * key.j - key.k;
    for (int n = 0; n < static_cast<int>(term.by_t.size()); ++n) {
      const HomPoly& P = term.by_t[n];
      for (int i = 0; i <= P.degree; ++i) {
        if (P.coeffs[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << P.coeffs[i].get_str();
        if (n > 0) os << " * t^" << n;
        format_spow(os, tg);
        int up = P.degree - i, vp = i;
        if (up > 0 || vp > 0) {
          os << " * ";
          if (up > 0) os << "u^" << up;
          if (up > 0 && vp > 0) os << ' ';
          if (vp > 0) os << "v^" << vp;
        }
      }
    }
  }
  return os.str();
}

namespace {

struct ParsedTerm {
  Rational coeff = Rational(1);
  int t_deg = 0;
  bool has_s = false;
  int twice_gamma = 0;
  int up = 0, vp = 0;
  bool is_h2 = false;
};

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::config, std::string("symbol parse: bad integer in ") + what + ": " + s);
  }
}

ParsedTerm parse_term(const std::string& term_text) {
  ParsedTerm out;
  std::string tok;
  std::vector<std::string> tokens;
  for (char c : term_text) {
    if (c == ' ' || c == '*' || c == '\t') {
      if (!tok.empty()) tokens.push_back(tok);
      tok.clear();
    } else {
      tok += c;
    }
  }
  if (!tok.empty()) tokens.push_back(tok);
  if (tokens.empty()) throw Error(ErrorKind::config, "symbol parse: empty term");

  for (const auto& t : tokens) {
    if (t == "H2") {
      out.is_h2 = true;
    } else if (t[0] == 'u' || t[0] == 'v') {
      std::string rest = t.substr(1);
      if (!rest.empty() && rest[0] == '^') rest = rest.substr(1);
      int p = rest.empty() ? 1 : parse_int(rest, "monomial power");
      (t[0] == 'u' ? out.up : out.vp) += p;
    } else if (t[0] == 't' && (t.size() == 1 || t[1] == '^')) {
      out.t_deg += (t.size() == 1) ? 1 : parse_int(t.substr(2), "t power");
    } else if (t[0] == 's' && (t.size() == 1 || t[1] == '^')) {
      out.has_s = true;
      if (t.size() == 1) {
        out.twice_gamma += 2;
      } else {
        std::string e = t.substr(2);
        if (!e.empty() && e.front() == '(' && e.back() == ')') e = e.substr(1, e.size() - 2);
        auto slash = e.find('/');
        if (slash == std::string::npos) {
          out.twice_gamma += 2 * parse_int(e, "s power");
        } else {
          int num = parse_int(e.substr(0, slash), "s power numerator");
          int den = parse_int(e.substr(slash + 1), "s power denominator");
          if (den != 2) throw Error(ErrorKind::config, "symbol parse: s powers must be half-integral");
          out.twice_gamma += num;
        }
      }
    } else {
      // rational coefficient
      try {
        out.coeff *= Rational(t);
      } catch (const std::exception&) {
        throw Error(ErrorKind::config, "symbol parse: unrecognized token: " + t);
      }
    }
  }
  out.coeff.canonicalize();
  return out;
}

}  // namespace

GradedSymbol GradedSymbol::parse(const std::string& text, int truncation) {
  GradedSymbol out;
  out.truncation = truncation;
  std::string term_text;
  std::vector<std::string> term_texts;
  for (char c : text) {
    if (c == '+') {
      term_texts.push_back(term_text);
      term_text.clear();
    } else {
      term_text += c;
    }
  }
  term_texts.push_back(term_text);

  for (const auto& tt : term_texts) {
    if (tt.find_first_not_of(" \t") == std::string::npos) continue;
    ParsedTerm p = parse_term(tt);
    if (p.is_h2) {
      if (p.up || p.vp || p.has_s || p.t_deg)
        throw Error(ErrorKind::config, "symbol parse: H2 cannot carry extra factors");
      out = add(out, scale(h2(truncation), p.coeff));
      continue;
    }
    int k = p.up + p.vp;
    int tg = p.has_s ? p.twice_gamma : 4 - k;  // default: conic order j = 2
    if ((tg + k) % 2 != 0)
      throw Error(ErrorKind::config,
                  "symbol parse: s-power " + std::to_string(tg) + "/2 with fiber degree " +
                      std::to_string(k) + " gives a non-integer conic order");
    int j = (tg + k) / 2;
    HomPoly mono = HomPoly::zero(k);
    mono.coeffs[p.vp] = p.coeff;
    out.add_term(j, k, p.t_deg, mono);
  }
  out.normalize();
  return out;
}

}  // namespace srqe::nf
