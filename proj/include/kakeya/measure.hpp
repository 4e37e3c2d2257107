#pragma once

// Exact finite-depth hit sets of the constructed sets inside the unit cell
// R^d x R^{n-d}, their covering estimates, decay tables and the
// direction-coverage audit.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kakeya/families.hpp"
#include "kakeya/numeric.hpp"

namespace kakeya {

// Membership bits over the ell^{(w_dims + z_dims) D} residue cells of
// R^{w_dims} x R^{z_dims}. Cell index = w_cell * ell^{z_dims D} + z_cell,
// where a vector's cell is sum_c cell_index(v_c, D) ell^{D c}.
class CellSet {
 public:
  CellSet(std::uint32_t ell, int depth, int w_dims, int z_dims);

  std::uint32_t ell() const noexcept { return ell_; }
  int depth() const noexcept { return depth_; }
  int w_dims() const noexcept { return w_dims_; }
  int z_dims() const noexcept { return z_dims_; }
  std::uint64_t cell_count() const noexcept { return cells_; }
  std::uint64_t z_cell_count() const noexcept { return z_cells_; }
  std::uint64_t hit_count() const noexcept;

  static std::uint64_t vector_cell(const ElementVector& v, int D);
  std::uint64_t index(std::uint64_t w_cell, std::uint64_t z_cell) const;
  std::uint64_t point_index(const ElementVector& w, const ElementVector& z) const;

  bool contains(std::uint64_t index) const;
  void insert(std::uint64_t index);
  void erase(std::uint64_t index);
  // Bitwise union; shapes must match.
  void merge(const CellSet& other);

  friend bool operator==(const CellSet& a, const CellSet& b) = default;

 private:
  std::uint32_t ell_;
  int depth_;
  int w_dims_;
  int z_dims_;
  std::uint64_t z_cells_;
  std::uint64_t cells_;
  std::vector<std::uint64_t> bits_;
};

// hit_count * ell^{-(total dims) D}.
Rational covering_estimate(const CellSet& cs);

inline constexpr std::uint64_t kDefaultCellBudget = 1ULL << 28;
inline constexpr std::uint64_t kDefaultPairBudget = 1ULL << 28;

// Diagnostic restriction of the enumerated x to the vectors whose depth-
// `depth` cell equals `code`.
struct XRestriction {
  int depth;
  std::uint64_t code;
};

struct MeasureOptions {
  std::uint64_t cell_budget = kDefaultCellBudget;
  std::uint64_t pair_budget = kDefaultPairBudget;
  int threads = 1;
  // Added to the sufficient input depth (used to re-check sufficiency).
  int extra_input_depth = 0;
  std::optional<XRestriction> restrict_x;
};

// Depth at which x is enumerated for output depth D.
int enumeration_depth(const PhiMap& phi, int D, const MeasureOptions& opts);

// Throws BudgetExceeded when the set at depth D (or its enumeration) is
// larger than the budgets allow.
void check_budget(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                  const MeasureOptions& opts);

// Every (w-cell, z-cell) attained by z = f(x, phi(x), w) for x over all of
// R^p at the enumeration depth and w over all depth-D cells of R^d.
CellSet build_set_cells(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                        const MeasureOptions& opts = {});

// The z-cells attained with w fixed. Surfaces RankDeficient from the family
// before enumerating.
CellSet cross_section_cells(const FamilyDescriptor& fam, const PhiMap& phi,
                            const ElementVector& w, int D, const MeasureOptions& opts = {});

struct DecayRow {
  int D;
  std::uint64_t hit_cells;
  std::uint64_t total_cells;
  Rational estimate;
  int input_depth;
  double seconds;
};

struct DecayReport {
  std::vector<DecayRow> rows;
};

// One exact hit set per D in [D_min, D_max]. Budgets are checked for every
// depth before any enumeration starts.
DecayReport decay_report(const FamilyDescriptor& fam, const PhiMap& phi, int D_min, int D_max,
                         const MeasureOptions& opts = {});

// True when estimates never increase from one row to the next.
bool estimates_non_increasing(const DecayReport& report);

struct MissingPair {
  std::uint64_t direction;  // depth-D cell of x
  std::uint64_t w_cell;
  friend bool operator==(const MissingPair&, const MissingPair&) = default;
};

struct CoverageReport {
  int D;
  std::uint64_t directions;
  std::uint64_t w_cells;
  std::vector<MissingPair> missing;
  // The directions are parametrized by x in R^p; the vertical direction is
  // not of that form and is left out by design.
  bool vertical_excluded = true;
};

// For every depth-D direction cell (represented by its zero-extended x) and
// every w-cell, checks that the line's (w, z) cell is present in `set`.
CoverageReport direction_coverage(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                                  const CellSet& set);
// Builds the set first.
CoverageReport direction_coverage(const FamilyDescriptor& fam, const PhiMap& phi, int D,
                                  const MeasureOptions& opts = {});

// The cells of the line over one direction cell, as point indices of a set
// with depth D. Used for fault injection and by the audit.
std::vector<std::uint64_t> direction_line_cells(const FamilyDescriptor& fam, const PhiMap& phi,
                                                int D, std::uint64_t direction);

}  // namespace kakeya
