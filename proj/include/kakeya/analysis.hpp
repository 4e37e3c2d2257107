#pragma once

// Checks of the smallness argument behind the construction: the six-term
// decomposition of f(x, phi(x), w), integer certificates for the bounds on
// terms I-V, and differentiability defect scans.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kakeya/families.hpp"
#include "kakeya/numeric.hpp"

namespace kakeya {

// ---------------------------------------------------------------------------
// Decomposition

// With x^(m) = sum_{j<m} p_j(x) and phi^(m) = sum_{j<m} r_j p_j, all
// Jacobians taken at (x, phi(x)) unless noted:
//   I   = f(x, phi) - f(x^(N), phi) - fx (x - x^(N))
//   II  = f(x^(N), phi) - f(x^(N), phi^(N)) - fy|(x^(N), phi) (phi - phi^(N))
//   III = fy|(x^(N), phi) (phi - phi^(N)) - fy (phi - phi^(N))
//   IV  = fy (phi - phi^(N+1)) + fx (x - x^(N+1))
//   V   = fy r_N p_N + fx p_N
//   VI  = f(x^(N), phi^(N))
struct TermDecomposition {
  int N;
  int D;
  ElementVector x;
  ElementVector w;
  std::array<ElementVector, 6> terms;
  // f(x, phi(x), w) to D digits.
  ElementVector value;

  ElementVector sum() const;
};

// Depth x needs for term_decomposition at (N, D).
int decomposition_input_depth(const SawyerPhi& phi, int N, int D);

// x in R^p known to decomposition_input_depth(N, D) digits, w in R^d known
// to D digits, N >= 1. Every term is exact to D digits.
TermDecomposition term_decomposition(const FamilyDescriptor& fam, const SawyerPhi& phi,
                                     const ElementVector& x, const ElementVector& w, int N, int D);

// ---------------------------------------------------------------------------
// Integer certificates

enum class Lemma { kI, kII, kIII, kIV, kV };

inline constexpr std::array<Lemma, 5> kAllLemmas = {Lemma::kI, Lemma::kII, Lemma::kIII,
                                                    Lemma::kIV, Lemma::kV};

std::string_view lemma_name(Lemma lemma);

struct CertificateRow {
  Lemma lemma;
  int A;
  int B;
  std::int64_t N;
  bool holds;
  // The instantiated integer inequality, e.g. "2 >= lambda(3)+A+B = 1+1+0".
  std::string inequality;
};

// The predicate each bound reduces to, with lambda = floor(log_ell):
//   I    alpha(N) >= N  (x - x^(N) lies inside the linearization radius)
//   II   alpha(N) - lambda(N) > N  and  ceil(log_ell s) >= lambda(N),
//        s = alpha(N) - lambda(N)
//   III  ceil(log_ell s) >= lambda(N)
//   IV   N >= lambda(N+1) + A + B
//   V    -B + (A + B) + alpha(N) >= alpha(N) + A  (valuation bookkeeping)
CertificateRow certificate_row(Lemma lemma, int A, int B, std::int64_t N, std::uint32_t ell);

// For IV: whether alpha(N+j) - lambda(N+j) >= alpha(N) + A + B for every
// j >= 1. Checked on a window of j, and beyond it by the growth argument:
// the left side gains N + j + 1 per step while lambda gains at most 1.
bool lemma_iv_conclusion(int A, int B, std::int64_t N, std::uint32_t ell);

struct LemmaSummary {
  Lemma lemma;
  std::optional<std::int64_t> minimal_N;
  // No N in the range fails after minimal_N.
  bool monotone = true;
  // Lemma IV only: N in the range where the hypothesis holds but the
  // conclusion does not.
  std::int64_t implication_failures = 0;
};

struct CertificateReport {
  int A;
  int B;
  std::uint32_t ell;
  std::int64_t n_min;
  std::int64_t n_max;
  std::vector<LemmaSummary> lemmas;
  // One row per lemma at its minimal N (or at n_max with holds = false when
  // the predicate never holds in range).
  std::vector<CertificateRow> rows;
};

CertificateReport certify_lemma_bounds(int A, int B, std::int64_t n_min, std::int64_t n_max,
                                       std::uint32_t ell);

// ---------------------------------------------------------------------------
// Differentiability defects

using ElementFn = std::function<Element(const Element&)>;

struct SampleSpec {
  std::uint32_t seed = 1;
  // Working depth of every sampled x and h.
  int depth = 64;
  int s_min = 1;
  int s_max = 20;
  int samples_per_scale = 32;
  // Sampled x have valuation >= s + x_offset when set, any valuation otherwise.
  std::optional<int> x_offset;
};

struct DefectRow {
  int scale;
  // Smallest defect valuation seen at this scale; kInfiniteValuation when
  // every defect vanished to working depth.
  int defect_valuation;
  // defect_valuation - exponent * scale; empty for an infinite valuation.
  std::optional<Rational> margin;
};

struct DefectReport {
  Rational alpha;
  std::vector<DefectRow> rows;
};

// Per scale s = v(h): min over samples of v(f(x+h) - f(x) - f'(x) h), with
// margin against (1 + alpha) s.
DefectReport vsd_defect(const RingSpec& ring, const ElementFn& fn, const ElementFn& dfn,
                        const Rational& alpha, const SampleSpec& spec);

// Per scale: min over samples of v(f'(x+h) - f'(x)), margin against alpha s.
DefectReport holder_defect(const RingSpec& ring, const ElementFn& dfn, const Rational& alpha,
                           const SampleSpec& spec);

// g(k) = floor(log_p k) + 1, and g(0) = 1.
int example_g(std::int64_t k, std::uint32_t p);

// f(x) = p^{v(x) + g(v(x))} (f(0) = 0), a strictly differentiable function
// with derivative 0 that is not very strongly differentiable. Defined on R,
// with the result known to the depth of x.
Element valuation_jump_function(const Element& x);

// Closed-form scan for k = 1..k_max with h of valuation k and x of larger
// valuation: defect valuation k + g(k), strict quotient g(k), and margin
// g(k) - alpha k against the very strong exponent.
DefectReport example_defect_scan(std::uint32_t p, std::int64_t k_max, const Rational& alpha);

// Smallest k such that every row from k on has a negative margin.
std::optional<std::int64_t> negative_margin_crossover(const DefectReport& report);

}  // namespace kakeya
