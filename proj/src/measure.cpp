#include "kakeya/measure.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <thread>
#include <unordered_set>

#include "kakeya/errors.hpp"

namespace kakeya {

namespace {

std::uint64_t pow_u64(std::uint32_t ell, std::int64_t e) {
  return checked_pow(ell, e);
}

// The vector in R^dims whose component c has depth-`depth` cell
// (code / ell^{cell_depth c}) mod ell^{cell_depth}, known to `depth` digits.
ElementVector vector_from_code(std::uint64_t code, int dims, const RingSpec& ring, int cell_depth,
                               int depth) {
  const std::uint64_t radix = pow_u64(ring.ell(), cell_depth);
  ElementVector v;
  v.reserve(static_cast<std::size_t>(dims));
  for (int c = 0; c < dims; ++c) {
    v.push_back(Element::from_cell_index(code % radix, ring, depth));
    code /= radix;
  }
  return v;
}

void check_shapes(const FamilyDescriptor& fam, const PhiMap& phi, int D) {
  validate_family(fam);
  if (phi.config().p_dim != fam.p || phi.config().q_dim != fam.q) {
    throw KakeyaError("phi dimensions do not match family " + fam.name);
  }
  if (D < 1) throw BadDepth("measure depth must be at least 1, got " + std::to_string(D));
}

void check_counts(std::uint32_t ell, int D, int X, int p, int w_dims, int z_dims,
                  const MeasureOptions& opts) {
  const BigInt cells = big_pow(ell, static_cast<std::uint64_t>(w_dims + z_dims) * D);
  const BigInt pairs = big_pow(ell, static_cast<std::uint64_t>(p) * X + static_cast<std::uint64_t>(w_dims) * D);
  if (cells > opts.cell_budget || pairs > opts.pair_budget) {
    throw BudgetExceeded("depth " + std::to_string(D) + " needs " + cells.str() +
                         " cells (budget " + std::to_string(opts.cell_budget) + ") and " +
                         pairs.str() + " enumerated (x, w) pairs at input depth " +
                         std::to_string(X) + " (budget " + std::to_string(opts.pair_budget) + ")");
  }
}

// Enumerates x over [lo, hi) of the input-depth codes and marks the cells of
// (w, f(x, phi(x), w)) for every w in `ws` (a single empty-dims w for cross
// sections). Polynomial families are evaluated once per distinct
// (x mod t^D, phi(x) mod t^D), which determines z mod t^D exactly.
void sweep(const FamilyDescriptor& fam, const PhiMap& phi, int D, int X,
           const std::vector<ElementVector>& ws, const std::vector<std::uint64_t>& w_cells,
           bool w_is_coordinate, const std::optional<XRestriction>& restrict_x, std::uint64_t lo,
           std::uint64_t hi, CellSet& out) {
  const RingSpec& ring = phi.config().ring;
  const std::uint64_t y_radix = pow_u64(ring.ell(), static_cast<std::int64_t>(fam.q) * D);
  const bool dedupe = fam.polynomial &&
                      static_cast<double>(fam.p + fam.q) * D * std::log2(ring.ell()) < 63.0;
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t code = lo; code < hi; ++code) {
    const ElementVector x = vector_from_code(code, fam.p, ring, X, X);
    if (restrict_x && CellSet::vector_cell(x, restrict_x->depth) != restrict_x->code) continue;
    const ElementVector y = phi.eval(x, D);
    ElementVector x_eval = x;
    if (dedupe) {
      x_eval = truncate(x, D);
      const std::uint64_t key = CellSet::vector_cell(x_eval, D) * y_radix + CellSet::vector_cell(y, D);
      if (!seen.insert(key).second) continue;
    }
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const ElementVector z = family_value(fam, x_eval, y, ws[i], D);
      out.insert(out.index(w_is_coordinate ? w_cells[i] : 0, CellSet::vector_cell(z, D)));
    }
  }
}

CellSet run_sweep(const FamilyDescriptor& fam, const PhiMap& phi, int D, int X,
                  const std::vector<ElementVector>& ws, const std::vector<std::uint64_t>& w_cells,
                  bool w_is_coordinate, const MeasureOptions& opts) {
  const std::uint32_t ell = phi.config().ring.ell();
  CellSet result(ell, D, w_is_coordinate ? fam.d : 0, fam.codim());
  const std::uint64_t total = pow_u64(ell, static_cast<std::int64_t>(fam.p) * X);
  const auto workers = static_cast<std::uint64_t>(std::clamp(opts.threads, 1, 256));
  if (workers == 1 || total < workers * 64) {
    sweep(fam, phi, D, X, ws, w_cells, w_is_coordinate, opts.restrict_x, 0, total, result);
    return result;
  }
  std::vector<CellSet> parts(workers, result);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (total + workers - 1) / workers;
  for (std::uint64_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        const std::uint64_t lo = std::min(total, t * chunk);
        const std::uint64_t hi = std::min(total, lo + chunk);
        sweep(fam, phi, D, X, ws, w_cells, w_is_coordinate, opts.restrict_x, lo, hi, parts[t]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& part : parts) result.merge(part);
  return result;
}

void all_w(const FamilyDescriptor& fam, const RingSpec& ring, int D,
           std::vector<ElementVector>& ws, std::vector<std::uint64_t>& cells) {
  const std::uint64_t count = pow_u64(ring.ell(), static_cast<std::int64_t>(fam.d) * D);
  ws.reserve(count);
  cells.reserve(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    ws.push_back(vector_from_code(code, fam.d, ring, D, D));
    cells.push_back(code);
  }
}

}  // namespace

CellSet::CellSet(std::uint32_t ell, int depth, int w_dims, int z_dims)
    : ell_(ell), depth_(depth), w_dims_(w_dims), z_dims_(z_dims) {
  if (depth < 1 || w_dims < 0 || z_dims < 1) throw BadDepth("invalid cell set shape");
  z_cells_ = pow_u64(ell, static_cast<std::int64_t>(z_dims) * depth);
  cells_ = pow_u64(ell, static_cast<std::int64_t>(w_dims + z_dims) * depth);
  bits_.assign((cells_ + 63) / 64, 0);
}

std::uint64_t CellSet::hit_count() const noexcept {
  std::uint64_t n = 0;
  for (std::uint64_t word : bits_) n += static_cast<std::uint64_t>(std::popcount(word));
  return n;
}

std::uint64_t CellSet::vector_cell(const ElementVector& v, int D) {
  if (v.empty()) return 0;
  const std::uint64_t radix = pow_u64(v.front().ring().ell(), D);
  std::uint64_t code = 0;
  for (std::size_t c = v.size(); c-- > 0;) code = code * radix + v[c].cell_index(D);
  return code;
}

std::uint64_t CellSet::index(std::uint64_t w_cell, std::uint64_t z_cell) const {
  const std::uint64_t idx = w_cell * z_cells_ + z_cell;
  if (z_cell >= z_cells_ || idx >= cells_) throw BadIndex("cell outside the cell set");
  return idx;
}

std::uint64_t CellSet::point_index(const ElementVector& w, const ElementVector& z) const {
  if (static_cast<int>(w.size()) != w_dims_ || static_cast<int>(z.size()) != z_dims_) {
    throw KakeyaError("point dimensions do not match the cell set");
  }
  return index(vector_cell(w, depth_), vector_cell(z, depth_));
}

bool CellSet::contains(std::uint64_t index) const {
  if (index >= cells_) throw BadIndex("cell outside the cell set");
  return (bits_[index / 64] >> (index % 64)) & 1U;
}

void CellSet::insert(std::uint64_t index) {
  if (index >= cells_) throw BadIndex("cell outside the cell set");
  bits_[index / 64] |= std::uint64_t{1} << (index % 64);
}

void CellSet::erase(std::uint64_t index) {
  if (index >= cells_) throw BadIndex("cell outside the cell set");
  bits_[index / 64] &= ~(std::uint64_t{1} << (index % 64));
}

void CellSet::merge(const CellSet& other) {
  if (other.ell_ != ell_ || other.depth_ != depth_ || other.w_dims_ != w_dims_ ||
      other.z_dims_ != z_dims_) {
    throw KakeyaError("cannot merge cell sets of different shapes");
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
}

Rational covering_estimate(const CellSet& cs) {
  return Rational(BigInt(cs.hit_count()), BigInt(cs.cell_count()));
}

int enumeration_depth(const PhiMap& phi, int D, const MeasureOptions& opts) {
  if (opts.extra_input_depth < 0) throw BadDepth("extra input depth must be non-negative");
  return phi.input_depth(D) + opts.extra_input_depth;
}

void check_budget(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                  const MeasureOptions& opts) {
  check_shapes(fam, phi, D);
  check_counts(phi.config().ring.ell(), D, enumeration_depth(phi, D, opts), fam.p, fam.d,
               fam.codim(), opts);
}

CellSet build_set_cells(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                        const MeasureOptions& opts) {
  check_budget(fam, phi, D, opts);
  const int X = enumeration_depth(phi, D, opts);
  if (opts.restrict_x && (opts.restrict_x->depth < 1 || opts.restrict_x->depth > X)) {
    throw BadDepth("x restriction depth must lie in [1, " + std::to_string(X) + "]");
  }
  std::vector<ElementVector> ws;
  std::vector<std::uint64_t> w_cells;
  all_w(fam, phi.config().ring, D, ws, w_cells);
  return run_sweep(fam, phi, D, X, ws, w_cells, true, opts);
}

CellSet cross_section_cells(const FamilyDescriptor& fam, const PhiMap& phi,
                            const ElementVector& w, int D, const MeasureOptions& opts) {
  check_shapes(fam, phi, D);
  const RingSpec& ring = phi.config().ring;
  if (static_cast<int>(w.size()) != fam.d) throw KakeyaError("w has the wrong dimension");
  if (valuation(w) < 0) throw NegativeValuation("cross section: w must lie in R^d");
  if (min_depth(w) < D) throw InsufficientDepth("cross section: w", D, min_depth(w));
  const ElementVector zero_x(static_cast<std::size_t>(fam.p), Element::zero(ring, D));
  const ElementVector zero_y(static_cast<std::size_t>(fam.q), Element::zero(ring, D));
  fam.dfdy_right_inverse(zero_x, zero_y, w);
  const int X = enumeration_depth(phi, D, opts);
  check_counts(ring.ell(), D, X, fam.p, 0, fam.codim(), opts);
  return run_sweep(fam, phi, D, X, {truncate(w, D)}, {0}, false, opts);
}

DecayReport decay_report(const FamilyDescriptor& fam, const PhiMap& phi, int D_min, int D_max,
                         const MeasureOptions& opts) {
  if (D_min < 1 || D_min > D_max) {
    throw BadDepth("depth range must satisfy 1 <= dmin <= dmax, got " + std::to_string(D_min) +
                   ".." + std::to_string(D_max));
  }
  for (int D = D_max; D >= D_min; --D) check_budget(fam, phi, D, opts);
  DecayReport report;
  for (int D = D_min; D <= D_max; ++D) {
    const auto start = std::chrono::steady_clock::now();
    const CellSet cs = build_set_cells(fam, phi, D, opts);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.rows.push_back(DecayRow{D, cs.hit_count(), cs.cell_count(), covering_estimate(cs),
                                   enumeration_depth(phi, D, opts), elapsed.count()});
  }
  return report;
}

bool estimates_non_increasing(const DecayReport& report) {
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].estimate > report.rows[i - 1].estimate) return false;
  }
  return true;
}

std::vector<std::uint64_t> direction_line_cells(const FamilyDescriptor& fam, const PhiMap& phi,
                                                int D, std::uint64_t direction) {
  check_shapes(fam, phi, D);
  const RingSpec& ring = phi.config().ring;
  const int X = phi.input_depth(D);
  if (direction >= pow_u64(ring.ell(), static_cast<std::int64_t>(fam.p) * D)) {
    throw BadIndex("direction cell out of range");
  }
  const ElementVector x = vector_from_code(direction, fam.p, ring, D, X);
  const ElementVector y = phi.eval(x, D);
  const CellSet shape(ring.ell(), D, fam.d, fam.codim());
  std::vector<ElementVector> ws;
  std::vector<std::uint64_t> w_cells;
  all_w(fam, ring, D, ws, w_cells);
  std::vector<std::uint64_t> out;
  out.reserve(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    out.push_back(shape.index(w_cells[i], CellSet::vector_cell(family_value(fam, x, y, ws[i], D), D)));
  }
  return out;
}

CoverageReport direction_coverage(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                                  const CellSet& set) {
  check_shapes(fam, phi, D);
  const std::uint32_t ell = phi.config().ring.ell();
  if (set.depth() != D || set.ell() != ell || set.w_dims() != fam.d ||
      set.z_dims() != fam.codim()) {
    throw KakeyaError("cell set shape does not match the audited family and depth");
  }
  CoverageReport report{D, pow_u64(ell, static_cast<std::int64_t>(fam.p) * D),
                        pow_u64(ell, static_cast<std::int64_t>(fam.d) * D), {}, true};
  for (std::uint64_t dir = 0; dir < report.directions; ++dir) {
    const auto cells = direction_line_cells(fam, phi, D, dir);
    for (std::uint64_t w = 0; w < cells.size(); ++w) {
      if (!set.contains(cells[w])) report.missing.push_back(MissingPair{dir, w});
    }
  }
  return report;
}

CoverageReport direction_coverage(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                                  const MeasureOptions& opts) {
  return direction_coverage(fam, phi, D, build_set_cells(fam, phi, D, opts));
}

}  // namespace kakeya
