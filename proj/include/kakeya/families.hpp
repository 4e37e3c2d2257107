#pragma once

// Surface families f(x, y, w) : K^p x K^q x K^d -> K^{n-d} with analytic
// Jacobians, and the map x -> (w, f(x, phi(x), w)) that sweeps out the
// constructed set.

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "kakeya/phi.hpp"
#include "kakeya/ring.hpp"

namespace kakeya {

struct FamilyDescriptor {
  using ValueFn = std::function<ElementVector(const ElementVector& x, const ElementVector& y,
                                              const ElementVector& w)>;
  using JacobianFn = std::function<ElementMatrix(const ElementVector& x, const ElementVector& y,
                                                 const ElementVector& w)>;

  std::string name;
  int p = 1;
  int q = 1;
  int d = 1;
  int n = 2;
  ValueFn eval;
  JacobianFn dfdx;                // (n-d) x p
  JacobianFn dfdy;                // (n-d) x q
  JacobianFn dfdy_right_inverse;  // q x (n-d); throws RankDeficient where rank drops
  // f has coefficients in R and is polynomial, so for inputs in R the value
  // mod t^D depends only on the inputs mod t^D.
  bool polynomial = false;

  int codim() const noexcept { return n - d; }
};

// Checks p <= n-d <= q, positive dims and that every callable is set.
void validate_family(const FamilyDescriptor& fam);

// z = x w - y.
FamilyDescriptor kakeya_line_family(const RingSpec& ring);
// z = y w - x; the right inverse of dfdy = w is 1/w and does not exist at w = 0.
FamilyDescriptor nikodym_line_family(const RingSpec& ring);
// "kakeya" or "nikodym"; KakeyaError otherwise.
FamilyDescriptor family_by_name(std::string_view name, const RingSpec& ring);

enum class PhiVariant { kSawyer, kDH };

PhiVariant parse_phi_variant(std::string_view name);
std::string_view phi_variant_name(PhiVariant v);

// Either construction behind one interface. The digit-shift variant acts
// componentwise and needs p == q.
class PhiMap {
 public:
  PhiMap(PhiVariant variant, const PhiConfig& cfg);

  PhiVariant variant() const noexcept { return variant_; }
  const PhiConfig& config() const noexcept { return cfg_; }

  // Input depth at which phi mod t^D is determined (never less than D).
  int input_depth(int D) const;

  // phi(x) to D digits; x may lie in K^p.
  ElementVector eval(const ElementVector& x, int D) const;

  // The underlying universal function; KakeyaError for the digit-shift variant.
  const SawyerPhi& sawyer() const;

 private:
  PhiVariant variant_;
  PhiConfig cfg_;
  std::shared_ptr<const SawyerPhi> sawyer_;
};

// fam.eval(x, y, w) truncated to D digits; InsufficientDepth when the
// propagated depth of a component falls short of D.
ElementVector family_value(const FamilyDescriptor& fam, const ElementVector& x,
                           const ElementVector& y, const ElementVector& w, int D);

struct FamilyPoint {
  ElementVector w;
  ElementVector z;
};

// (w, z) with z = f(x, phi(x), w) exact to D digits. x needs depth
// phi.input_depth(D); w must lie in R^d with depth >= D.
FamilyPoint family_point(const FamilyDescriptor& fam, const PhiMap& phi, const ElementVector& x,
                         const ElementVector& w, int D);

}  // namespace kakeya
