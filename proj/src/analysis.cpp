#include "kakeya/analysis.hpp"

#include <algorithm>
#include <random>

#include "kakeya/errors.hpp"

namespace kakeya {

namespace {

// x^(m): digits of degree >= alpha(m) cleared, working depth kept.
ElementVector prefix_sum(const ElementVector& x, int m) {
  const int cut = static_cast<int>(alpha(m));
  ElementVector out;
  out.reserve(x.size());
  for (const auto& e : x) out.push_back(e.truncate(cut).with_depth(e.depth()));
  return out;
}

ElementVector exact_to(const ElementVector& v, int D, const char* what) {
  const int have = min_depth(v);
  if (have < D) throw InsufficientDepth(what, D, have);
  return truncate(v, D);
}

// floor(log_ell k) for k in [0, limit], built by counting powers.
std::vector<std::uint8_t> lambda_table(std::int64_t limit, std::uint32_t ell) {
  std::vector<std::uint8_t> table(static_cast<std::size_t>(limit) + 1, 0);
  std::int64_t next = ell;
  std::uint8_t value = 0;
  for (std::int64_t k = 1; k <= limit; ++k) {
    if (k == next) {
      ++value;
      next = next > limit / static_cast<std::int64_t>(ell) ? limit + 1 : next * ell;
    }
    table[static_cast<std::size_t>(k)] = value;
  }
  return table;
}

// ceil(log_ell s) for s >= 1.
int ceil_log(std::int64_t s, std::uint32_t ell) {
  int c = 0;
  std::int64_t power = 1;
  while (power < s) {
    power *= ell;
    ++c;
  }
  return c;
}

// ceil(log_ell s) >= m without computing the logarithm: s > ell^{m-1}.
bool ceil_log_at_least(std::int64_t s, int m, const std::vector<std::int64_t>& powers) {
  if (m <= 0) return true;
  return s > powers[static_cast<std::size_t>(m - 1)];
}

std::vector<std::int64_t> power_table(std::uint32_t ell) {
  std::vector<std::int64_t> powers{1};
  while (powers.back() <= INT64_MAX / static_cast<std::int64_t>(ell)) {
    powers.push_back(powers.back() * ell);
  }
  return powers;
}

struct Predicates {
  const std::vector<std::uint8_t>& lambda;
  const std::vector<std::int64_t>& powers;
  std::uint32_t ell;

  int lam(std::int64_t k) const { return lambda[static_cast<std::size_t>(k)]; }

  bool holds(Lemma lemma, int A, int B, std::int64_t N) const {
    const std::int64_t a = alpha(N);
    switch (lemma) {
      case Lemma::kI:
        return a >= N;
      case Lemma::kII: {
        const std::int64_t s = a - lam(N);
        return s > N && ceil_log_at_least(s, lam(N), powers);
      }
      case Lemma::kIII:
        return ceil_log_at_least(a - lam(N), lam(N), powers);
      case Lemma::kIV:
        return N >= lam(N + 1) + static_cast<std::int64_t>(A) + B;
      case Lemma::kV:
        return -static_cast<std::int64_t>(B) + (A + B) + a >= a + A;
    }
    return false;
  }

  bool iv_conclusion(int A, int B, std::int64_t N) const {
    // g(j) = alpha(N+j) - lambda(N+j) - alpha(N) - A - B; g(j+1) - g(j) >=
    // N + j >= 1 because lambda grows by at most one per step, so a
    // non-negative value at the end of the window persists for every larger j.
    constexpr std::int64_t kWindow = 4;
    const std::int64_t base = alpha(N) + A + B;
    for (std::int64_t j = 1; j <= kWindow; ++j) {
      if (alpha(N + j) - lam(N + j) < base) return false;
    }
    return true;
  }
};

std::string inequality_text(Lemma lemma, int A, int B, std::int64_t N, std::uint32_t ell) {
  const std::int64_t a = alpha(N);
  const int lam = lambda_floor(N, ell);
  const std::string n = std::to_string(N);
  const std::string base = std::to_string(ell);
  switch (lemma) {
    case Lemma::kI:
      return "alpha(" + n + ") = " + std::to_string(a) + " >= " + n;
    case Lemma::kII: {
      const std::int64_t s = a - lam;
      return "alpha(" + n + ")-lambda(" + n + ") = " + std::to_string(s) + " > " + n +
             " and ceil(log_" + base + " " + std::to_string(s) + ") = " +
             std::to_string(ceil_log(s, ell)) + " >= lambda(" + n + ") = " + std::to_string(lam);
    }
    case Lemma::kIII: {
      const std::int64_t s = a - lam;
      return "ceil(log_" + base + " " + std::to_string(s) + ") = " +
             std::to_string(ceil_log(s, ell)) + " >= lambda(" + n + ") = " + std::to_string(lam);
    }
    case Lemma::kIV: {
      const int lam1 = lambda_floor(N + 1, ell);
      return n + " >= lambda(" + std::to_string(N + 1) + ")+A+B = " + std::to_string(lam1) + "+" +
             std::to_string(A) + "+" + std::to_string(B) + " = " +
             std::to_string(lam1 + static_cast<std::int64_t>(A) + B);
    }
    case Lemma::kV:
      return "-B+(A+B)+alpha(" + n + ") = " + std::to_string(a + A) + " >= alpha(" + n +
             ")+A = " + std::to_string(a + A);
  }
  return {};
}

void check_certificate_args(int A, int B, std::int64_t n_min, std::int64_t n_max,
                            std::uint32_t ell) {
  RingSpec::make(ell, RingMode::kPadic);
  if (A < 0 || B < 0) throw BadIndex("A and B must be non-negative");
  if (n_min < 1 || n_max < n_min) throw BadIndex("N range must satisfy 1 <= nmin <= nmax");
  // alpha(N + window) must stay within 63 bits
  if (n_max > 2'000'000'000) throw BadIndex("N range too large");
}

Element random_element(std::minstd_rand& rng, const RingSpec& ring, int lowest, int depth,
                       bool unit_lead) {
  std::vector<std::int64_t> digits(static_cast<std::size_t>(std::max(depth - lowest, 0)));
  for (std::size_t i = 0; i < digits.size(); ++i) {
    digits[i] = static_cast<std::int64_t>(rng() % ring.ell());
    if (i == 0 && unit_lead) digits[i] = 1 + static_cast<std::int64_t>(rng() % (ring.ell() - 1));
  }
  if (digits.empty()) return Element::zero(ring, depth);
  return Element::from_digits(digits, lowest, ring, depth);
}

template <typename Defect>
DefectReport scan_defects(const RingSpec& ring, const Rational& exponent, const Rational& alpha,
                          const SampleSpec& spec, Defect defect) {
  if (spec.s_min < 0 || spec.s_max < spec.s_min || spec.samples_per_scale < 1) {
    throw BadDepth("invalid sample specification");
  }
  const int lowest_x_max = spec.s_max + spec.x_offset.value_or(0);
  if (spec.depth <= std::max(spec.s_max, lowest_x_max)) {
    throw BadDepth("sample depth must exceed every sampled valuation");
  }
  std::minstd_rand rng(spec.seed);
  DefectReport report{alpha, {}};
  for (int s = spec.s_min; s <= spec.s_max; ++s) {
    int worst = kInfiniteValuation;
    for (int i = 0; i < spec.samples_per_scale; ++i) {
      const int x_low = spec.x_offset ? s + *spec.x_offset : 0;
      const Element x = random_element(rng, ring, x_low, spec.depth, false);
      const Element h = random_element(rng, ring, s, spec.depth, true);
      worst = std::min(worst, defect(x, h).valuation());
    }
    std::optional<Rational> margin;
    if (worst != kInfiniteValuation) margin = Rational(worst) - exponent * s;
    report.rows.push_back(DefectRow{s, worst, margin});
  }
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------

ElementVector TermDecomposition::sum() const {
  ElementVector total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total = total + terms[i];
  return truncate(total, D);
}

int decomposition_input_depth(const SawyerPhi& phi, int N, int D) {
  return std::max({D, phi.required_input_depth(D), static_cast<int>(alpha(N + 1))});
}

TermDecomposition term_decomposition(const FamilyDescriptor& fam, const SawyerPhi& phi,
                                     const ElementVector& x, const ElementVector& w, int N, int D) {
  validate_family(fam);
  const PhiConfig& cfg = phi.config();
  if (cfg.p_dim != fam.p || cfg.q_dim != fam.q) throw KakeyaError("phi does not match family");
  if (static_cast<int>(x.size()) != fam.p || static_cast<int>(w.size()) != fam.d) {
    throw KakeyaError("decomposition inputs have the wrong dimension");
  }
  if (N < 1) throw BadIndex("decomposition needs N >= 1");
  if (D < 1) throw BadDepth("decomposition depth must be at least 1");
  if (valuation(x) < 0 || valuation(w) < 0) {
    throw NegativeValuation("decomposition inputs must lie in R");
  }
  const int need = decomposition_input_depth(phi, N, D);
  if (min_depth(x) < need) throw InsufficientDepth("decomposition input x", need, min_depth(x));
  if (min_depth(w) < D) throw InsufficientDepth("decomposition input w", D, min_depth(w));

  const ElementVector y = phi.eval(x, D);
  const ElementVector yN = phi.partial_sum(x, N, D);
  const ElementVector yN1 = phi.partial_sum(x, N + 1, D);
  const ElementVector xN = prefix_sum(x, N);
  const ElementVector xN1 = prefix_sum(x, N + 1);
  const ElementVector pN = projection(x, N);
  const ElementMatrix rN = matrix_fn_eval(phi.r(N), x, D);

  const ElementMatrix fx = fam.dfdx(x, y, w);
  const ElementMatrix fy = fam.dfdy(x, y, w);
  const ElementMatrix fy_N = fam.dfdy(xN, y, w);
  const ElementVector f_x_y = fam.eval(x, y, w);
  const ElementVector f_xN_y = fam.eval(xN, y, w);
  const ElementVector f_xN_yN = fam.eval(xN, yN, w);

  TermDecomposition out{N, D, x, w, {}, exact_to(f_x_y, D, "f(x, phi(x), w)")};
  out.terms[0] = exact_to(f_x_y - f_xN_y - fx * (x - xN), D, "term I");
  out.terms[1] = exact_to(f_xN_y - f_xN_yN - fy_N * (y - yN), D, "term II");
  out.terms[2] = exact_to(fy_N * (y - yN) - fy * (y - yN), D, "term III");
  out.terms[3] = exact_to(fy * (y - yN1) + fx * (x - xN1), D, "term IV");
  out.terms[4] = exact_to(fy * (rN * pN) + fx * pN, D, "term V");
  out.terms[5] = exact_to(f_xN_yN, D, "term VI");
  return out;
}

// ---------------------------------------------------------------------------

std::string_view lemma_name(Lemma lemma) {
  switch (lemma) {
    case Lemma::kI:
      return "I";
    case Lemma::kII:
      return "II";
    case Lemma::kIII:
      return "III";
    case Lemma::kIV:
      return "IV";
    case Lemma::kV:
      return "V";
  }
  return "?";
}

CertificateRow certificate_row(Lemma lemma, int A, int B, std::int64_t N, std::uint32_t ell) {
  check_certificate_args(A, B, N, N, ell);
  const auto table = lambda_table(N + 8, ell);
  const auto powers = power_table(ell);
  const Predicates pred{table, powers, ell};
  return CertificateRow{lemma, A, B, N, pred.holds(lemma, A, B, N),
                        inequality_text(lemma, A, B, N, ell)};
}

bool lemma_iv_conclusion(int A, int B, std::int64_t N, std::uint32_t ell) {
  check_certificate_args(A, B, N, N, ell);
  const auto table = lambda_table(N + 8, ell);
  const auto powers = power_table(ell);
  return Predicates{table, powers, ell}.iv_conclusion(A, B, N);
}

CertificateReport certify_lemma_bounds(int A, int B, std::int64_t n_min, std::int64_t n_max,
                                       std::uint32_t ell) {
  check_certificate_args(A, B, n_min, n_max, ell);
  const auto table = lambda_table(n_max + 8, ell);
  const auto powers = power_table(ell);
  const Predicates pred{table, powers, ell};

  CertificateReport report{A, B, ell, n_min, n_max, {}, {}};
  for (Lemma lemma : kAllLemmas) {
    LemmaSummary summary{lemma, std::nullopt, true, 0};
    for (std::int64_t N = n_min; N <= n_max; ++N) {
      const bool ok = pred.holds(lemma, A, B, N);
      if (ok && !summary.minimal_N) summary.minimal_N = N;
      if (!ok && summary.minimal_N) summary.monotone = false;
      if (lemma == Lemma::kIV && ok && !pred.iv_conclusion(A, B, N)) {
        ++summary.implication_failures;
      }
    }
    const std::int64_t at = summary.minimal_N.value_or(n_max);
    report.rows.push_back(CertificateRow{lemma, A, B, at, summary.minimal_N.has_value(),
                                         inequality_text(lemma, A, B, at, ell)});
    report.lemmas.push_back(summary);
  }
  return report;
}

// ---------------------------------------------------------------------------

DefectReport vsd_defect(const RingSpec& ring, const ElementFn& fn, const ElementFn& dfn,
                        const Rational& alpha, const SampleSpec& spec) {
  return scan_defects(ring, 1 + alpha, alpha, spec, [&](const Element& x, const Element& h) {
    return fn(x + h) - fn(x) - dfn(x) * h;
  });
}

DefectReport holder_defect(const RingSpec& ring, const ElementFn& dfn, const Rational& alpha,
                           const SampleSpec& spec) {
  return scan_defects(ring, alpha, alpha, spec,
                      [&](const Element& x, const Element& h) { return dfn(x + h) - dfn(x); });
}

int example_g(std::int64_t k, std::uint32_t p) {
  if (k < 0) throw BadIndex("g needs k >= 0");
  return k == 0 ? 1 : lambda_floor(k, p) + 1;
}

Element valuation_jump_function(const Element& x) {
  if (x.valuation() < 0) throw NegativeValuation("valuation_jump_function is defined on R");
  if (x.is_zero()) return Element::zero(x.ring(), x.depth());
  const std::int64_t exponent = x.valuation() + example_g(x.valuation(), x.ring().ell());
  if (exponent >= x.depth()) return Element::zero(x.ring(), x.depth());
  return Element::from_digits({1}, static_cast<int>(exponent), x.ring(), x.depth());
}

DefectReport example_defect_scan(std::uint32_t p, std::int64_t k_max, const Rational& alpha) {
  RingSpec::make(p, RingMode::kPadic);
  if (k_max < 2) throw BadIndex("k_max must be at least 2");
  if (k_max > 100'000'000) throw BadIndex("k_max too large");
  DefectReport report{alpha, {}};
  report.rows.reserve(static_cast<std::size_t>(k_max));
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const int g = example_g(k, p);
    report.rows.push_back(DefectRow{static_cast<int>(k), static_cast<int>(k) + g,
                                    Rational(g) - alpha * k});
  }
  return report;
}

std::optional<std::int64_t> negative_margin_crossover(const DefectReport& report) {
  std::optional<std::int64_t> start;
  for (auto it = report.rows.rbegin(); it != report.rows.rend(); ++it) {
    if (!it->margin || *it->margin >= 0) break;
    start = it->scale;
  }
  return start;
}

}  // namespace kakeya
