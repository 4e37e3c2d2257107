#include "kakeya/families.hpp"

#include <algorithm>

#include "kakeya/errors.hpp"

namespace kakeya {

namespace {

// Depth used for the exact constants a Jacobian needs: as deep as the
// deepest input, so constants never limit the propagated depth.
int constant_depth(const ElementVector& x, const ElementVector& y, const ElementVector& w) {
  int depth = 1;
  for (const auto* v : {&x, &y, &w}) {
    for (const auto& e : *v) depth = std::max(depth, e.depth());
  }
  return depth;
}

void require_sizes(const ElementVector& x, const ElementVector& y, const ElementVector& w,
                   const char* family) {
  if (x.size() != 1 || y.size() != 1 || w.size() != 1) {
    throw KakeyaError(std::string(family) + " family expects scalar x, y and w");
  }
}

}  // namespace

void validate_family(const FamilyDescriptor& fam) {
  if (fam.p < 1 || fam.q < 1 || fam.d < 1 || fam.n <= fam.d) {
    throw KakeyaError("family " + fam.name + ": dimensions must be positive with n > d");
  }
  if (fam.p > fam.codim() || fam.codim() > fam.q) {
    throw KakeyaError("family " + fam.name + ": requires p <= n-d <= q");
  }
  if (!fam.eval || !fam.dfdx || !fam.dfdy || !fam.dfdy_right_inverse) {
    throw KakeyaError("family " + fam.name + ": missing evaluation or Jacobian");
  }
}

FamilyDescriptor kakeya_line_family(const RingSpec& ring) {
  FamilyDescriptor fam;
  fam.name = "kakeya";
  fam.polynomial = true;
  fam.eval = [](const ElementVector& x, const ElementVector& y, const ElementVector& w) {
    require_sizes(x, y, w, "kakeya");
    return ElementVector{x[0] * w[0] - y[0]};
  };
  fam.dfdx = [](const ElementVector& x, const ElementVector& y, const ElementVector& w) {
    require_sizes(x, y, w, "kakeya");
    return ElementMatrix(1, 1, {w[0]});
  };
  const auto minus_one = [ring](const ElementVector& x, const ElementVector& y,
                                const ElementVector& w) {
    require_sizes(x, y, w, "kakeya");
    return ElementMatrix(1, 1, {Element::from_integer(-1, ring, constant_depth(x, y, w))});
  };
  fam.dfdy = minus_one;
  fam.dfdy_right_inverse = minus_one;
  return fam;
}

FamilyDescriptor nikodym_line_family(const RingSpec& ring) {
  FamilyDescriptor fam;
  fam.name = "nikodym";
  fam.polynomial = true;
  fam.eval = [](const ElementVector& x, const ElementVector& y, const ElementVector& w) {
    require_sizes(x, y, w, "nikodym");
    return ElementVector{y[0] * w[0] - x[0]};
  };
  fam.dfdx = [ring](const ElementVector& x, const ElementVector& y, const ElementVector& w) {
    require_sizes(x, y, w, "nikodym");
    return ElementMatrix(1, 1, {Element::from_integer(-1, ring, constant_depth(x, y, w))});
  };
  fam.dfdy = [](const ElementVector& x, const ElementVector& y, const ElementVector& w) {
    require_sizes(x, y, w, "nikodym");
    return ElementMatrix(1, 1, {w[0]});
  };
  fam.dfdy_right_inverse = [](const ElementVector& x, const ElementVector& y,
                              const ElementVector& w) {
    require_sizes(x, y, w, "nikodym");
    if (w[0].is_zero()) {
      throw RankDeficient("nikodym family: dfdy = w has no inverse at w = 0 (to depth " +
                          std::to_string(w[0].depth()) + ")");
    }
    return ElementMatrix(1, 1, {reciprocal(w[0])});
  };
  return fam;
}

FamilyDescriptor family_by_name(std::string_view name, const RingSpec& ring) {
  if (name == "kakeya") return kakeya_line_family(ring);
  if (name == "nikodym") return nikodym_line_family(ring);
  throw KakeyaError("unknown family '" + std::string(name) + "' (expected kakeya or nikodym)");
}

PhiVariant parse_phi_variant(std::string_view name) {
  if (name == "sawyer") return PhiVariant::kSawyer;
  if (name == "dh") return PhiVariant::kDH;
  throw KakeyaError("unknown phi variant '" + std::string(name) + "' (expected sawyer or dh)");
}

std::string_view phi_variant_name(PhiVariant v) {
  return v == PhiVariant::kSawyer ? "sawyer" : "dh";
}

PhiMap::PhiMap(PhiVariant variant, const PhiConfig& cfg) : variant_(variant), cfg_(cfg) {
  if (cfg.p_dim < 1 || cfg.q_dim < 1) throw KakeyaError("phi dimensions must be positive");
  if (variant == PhiVariant::kSawyer) {
    sawyer_ = std::make_shared<const SawyerPhi>(cfg);
  } else if (cfg.p_dim != cfg.q_dim) {
    throw KakeyaError("the dh variant acts componentwise and needs p == q");
  }
}

int PhiMap::input_depth(int D) const {
  if (variant_ == PhiVariant::kDH) return D + 1;
  return std::max(D, sawyer_->required_input_depth(D));
}

ElementVector PhiMap::eval(const ElementVector& x, int D) const {
  if (variant_ == PhiVariant::kSawyer) return sawyer_->eval(x, D);
  if (static_cast<int>(x.size()) != cfg_.p_dim) throw KakeyaError("phi input dimension mismatch");
  ElementVector out;
  out.reserve(x.size());
  for (const auto& e : x) out.push_back(phi_dh_eval(e.reduce_to_R(), D));
  return out;
}

const SawyerPhi& PhiMap::sawyer() const {
  if (!sawyer_) throw KakeyaError("the dh variant has no matrix-function expansion");
  return *sawyer_;
}

ElementVector family_value(const FamilyDescriptor& fam, const ElementVector& x,
                           const ElementVector& y, const ElementVector& w, int D) {
  ElementVector z = fam.eval(x, y, w);
  if (static_cast<int>(z.size()) != fam.codim()) {
    throw KakeyaError("family " + fam.name + " returned a value of the wrong dimension");
  }
  const int have = min_depth(z);
  if (have < D) throw InsufficientDepth("family " + fam.name + " evaluation", D, have);
  return truncate(z, D);
}

FamilyPoint family_point(const FamilyDescriptor& fam, const PhiMap& phi, const ElementVector& x,
                         const ElementVector& w, int D) {
  if (static_cast<int>(x.size()) != fam.p || static_cast<int>(w.size()) != fam.d ||
      phi.config().p_dim != fam.p || phi.config().q_dim != fam.q) {
    throw KakeyaError("family " + fam.name + ": dimension mismatch with phi or inputs");
  }
  if (valuation(w) < 0) throw NegativeValuation("family_point: w must lie in R^d");
  const int have = min_depth(w);
  if (have < D) throw InsufficientDepth("family_point: w", D, have);
  const ElementVector y = phi.eval(x, D);
  return FamilyPoint{truncate(w, D), family_value(fam, x, y, w, D)};
}

}  // namespace kakeya
