#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "kakeya/errors.hpp"
#include "kakeya/phi.hpp"
#include "oracles.hpp"

using namespace kakeya;

namespace {

const RingSpec kZ2 = RingSpec::padic(2);
const RingSpec kF2 = RingSpec::power_series(2);
const RingSpec kZ3 = RingSpec::padic(3);

PhiConfig scalar(const RingSpec& ring) { return PhiConfig{ring, 1, 1}; }

ElementVector vec1(const Element& e) { return ElementVector{e}; }

}  // namespace

TEST_CASE("alpha") {
  CHECK(alpha(0) == 0);
  CHECK(alpha(3) == 6);
  for (int n = 0; n <= 100; ++n) CHECK(alpha(n + 1) - alpha(n) == n + 1);
}

TEST_CASE("lambda_floor matches repeated division") {
  CHECK(lambda_floor(1, 2) == 0);
  CHECK(lambda_floor(2, 2) == 1);
  CHECK(lambda_floor(9, 3) == 2);
  for (std::uint32_t ell : {2U, 3U, 5U, 7U}) {
    for (std::int64_t k = 1; k < 20000; ++k) {
      CHECK(lambda_floor(k, ell) == oracle::log_floor(static_cast<std::uint64_t>(k), ell));
    }
  }
  CHECK_THROWS_AS(lambda_floor(0, 2), BadIndex);
}

TEST_CASE("projection") {
  const Element x = Element::from_digits({1, 1, 0, 1, 1, 1}, 0, kZ2, 6);
  const ElementVector p1 = projection(vec1(x), 1);
  CHECK(p1[0] == Element::from_digits({0, 1, 0}, 0, kZ2, 6));
  CHECK(p1[0].valuation() >= alpha(1));
  CHECK(projection(vec1(Element::zero(kZ2, 10)), 3)[0].is_zero());
  CHECK_THROWS_AS(projection(vec1(x), 3), InsufficientDepth);

  // sum_{j<=m} p_j(x) = truncate(x, alpha(m + 1)), exhaustive over depth 15
  const int W = 15;
  for (const Element& e : enumerate_residues(kZ2, W)) {
    const ElementVector v = vec1(e);
    Element acc = Element::zero(kZ2, W);
    for (int m = 0; m <= 4; ++m) {
      acc = acc + projection(v, m)[0];
      const int cut = static_cast<int>(alpha(m + 1));
      CHECK(acc.truncate(cut) == e.truncate(cut));
      CHECK(acc.agrees_with(e.truncate(cut).with_depth(W), W));
    }
  }
}

TEST_CASE("S_k enumeration") {
  // oracle: all digit patterns on degrees [-lambda(k), k]
  const auto brute = [](int k, const RingSpec& ring) {
    const int lam = oracle::log_floor(static_cast<std::uint64_t>(k), ring.ell());
    const int width = k + lam + 1;
    std::set<std::vector<std::int64_t>> out;
    for (std::uint64_t code = 0; code < oracle::ipow(ring.ell(), width); ++code) {
      auto digits = oracle::base_digits(code, ring.ell(), width);
      out.insert(digits);
    }
    return std::make_pair(out.size(), lam);
  };
  for (int k = 1; k <= 3; ++k) {
    const auto [count, lam] = brute(k, kF2);
    CHECK(sk_size(k, 2) == count);
    const auto elems = sk_elements(k, kF2, k + 1);
    CHECK(elems.size() == count);
    std::set<std::string> distinct;
    for (const auto& e : elems) {
      distinct.insert(to_digit_string(e));
      CHECK(e.valuation() >= -lam);
    }
    CHECK(distinct.size() == count);
    CHECK(elems.front().is_zero());
  }
  const auto s1 = sk_elements(1, kF2, 4);
  REQUIRE(s1.size() == 4);
  CHECK(s1[1] == Element::from_integer(1, kF2, 4));
  CHECK(s1[2] == Element::from_digits({0, 1}, 0, kF2, 4));
  CHECK(s1[3] == Element::from_digits({1, 1}, 0, kF2, 4));
  CHECK(sk_size(2, 2) == 16);

  for (std::uint64_t i = 0; i < 16; ++i) CHECK(sk_index(2, sk_element(2, i, kZ2, 5)) == i);
  CHECK_THROWS_AS(sk_index(1, Element::from_digits({0, 0, 1}, 0, kZ2, 5)), NotInSk);
  CHECK_THROWS_AS(sk_index(1, Element::from_digits({1}, -1, kZ2, 5)), NotInSk);
}

TEST_CASE("omega block sizes") {
  CHECK(omega_block_size(1, 2, 1, 1) == 16);
  CHECK(omega_block_size(2, 2, 1, 1) == 65536);
  CHECK(omega_block_size(1, 2, 1, 2) == 256);
  // |S_k|^(ell^{kp} q p)
  CHECK(omega_block_size(1, 3, 1, 1) == BigInt(9) * 9 * 9);
  CHECK(omega_block_size(3, 2, 1, 1) == big_pow(32, 8));
}

TEST_CASE("decode_matrix_fn") {
  const PhiConfig cfg = scalar(kZ2);
  const MatrixFn r0 = decode_matrix_fn(0, cfg);
  CHECK(r0.k_block() == 1);
  CHECK(r0.inner_index() == 0);
  for (std::uint64_t code = 0; code < 4; ++code) {
    const ElementMatrix m = matrix_fn_eval(r0, vec1(Element::from_cell_index(code, kZ2, 2)));
    CHECK(m.at(0, 0).is_zero());
  }
  const MatrixFn r16 = decode_matrix_fn(16, cfg);
  CHECK(r16.k_block() == 2);
  CHECK(r16.inner_index() == 0);
  CHECK(decode_matrix_fn(15, cfg).k_block() == 1);
  CHECK(decode_matrix_fn(16 + 65535, cfg).k_block() == 2);
  CHECK(decode_matrix_fn(16 + 65536, cfg).k_block() == 3);

  // slot 0 (cell 0) is the most significant digit: index 1 sets cell 1 to S_1[1]
  const auto t1 = matrix_fn_table(decode_matrix_fn(1, cfg));
  CHECK(t1 == std::vector<std::uint64_t>{0, 1});
  const auto t4 = matrix_fn_table(decode_matrix_fn(4, cfg));
  CHECK(t4 == std::vector<std::uint64_t>{1, 0});

  // lazily decoded tables agree with the eager path
  const PhiConfig wide{kZ2, 2, 2};
  const MatrixFn big = decode_matrix_fn(omega_block_offset(5, wide) + 123456789, wide);
  CHECK(big.k_block() == 5);
  const BigInt inner = big.inner_index();
  CHECK(big.value_index(1, 1, big.cell_count() - 1) == static_cast<std::uint64_t>(inner % sk_size(5, 2)));
}

TEST_CASE("index_of_constant_matrix round trip") {
  const PhiConfig cfg = scalar(kZ2);
  const auto s1 = sk_elements(1, kZ2, 3);
  CHECK(index_of_constant_matrix(ElementMatrix(1, 1, {s1[0]}), 1, cfg) == 0);
  for (const auto& value : s1) {
    const BigInt j = index_of_constant_matrix(ElementMatrix(1, 1, {value}), 1, cfg);
    const MatrixFn r = decode_matrix_fn(j, cfg);
    for (const Element& x : enumerate_residues(kZ2, 3)) {
      CHECK(matrix_fn_eval(r, vec1(x)).at(0, 0) == value);
    }
  }
  // constants of Omega_1 are exactly the tables with equal slots
  int constants = 0;
  for (int j = 0; j < 16; ++j) {
    const auto table = matrix_fn_table(decode_matrix_fn(j, cfg));
    if (table[0] == table[1]) {
      ++constants;
      const ElementMatrix m(1, 1, {sk_element(1, table[0], kZ2, 3)});
      CHECK(index_of_constant_matrix(m, 1, cfg) == j);
    }
  }
  CHECK(constants == 4);

  // a 2 x 2 constant in block 2 over F_3
  const PhiConfig cfg2{RingSpec::power_series(3), 2, 2};
  const ElementMatrix m2(2, 2,
                         {sk_element(2, 5, cfg2.ring, 4), sk_element(2, 0, cfg2.ring, 4),
                          sk_element(2, 17, cfg2.ring, 4), sk_element(2, 26, cfg2.ring, 4)});
  const MatrixFn r2 = decode_matrix_fn(index_of_constant_matrix(m2, 2, cfg2), cfg2);
  CHECK(r2.k_block() == 2);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ElementVector x{Element::from_cell_index(rng() % 81, cfg2.ring, 4),
                          Element::from_cell_index(rng() % 81, cfg2.ring, 4)};
    const ElementMatrix got = matrix_fn_eval(r2, x, 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(got.entries()[i] == m2.entries()[i]);
  }
  CHECK_THROWS_AS(index_of_constant_matrix(ElementMatrix(1, 1, {Element::from_digits({0, 0, 1}, 0, kZ2, 4)}),
                                           1, cfg),
                  NotInSk);
}

TEST_CASE("matrix_fn_eval") {
  const PhiConfig cfg = scalar(kZ2);
  // every Omega_1 table: values respect the S_1 valuation floor and are
  // constant on depth-1 cells
  for (int j = 0; j < 16; ++j) {
    const MatrixFn r = decode_matrix_fn(j, cfg);
    for (const Element& x : enumerate_residues(kZ2, 4)) {
      const Element v = matrix_fn_eval(r, vec1(x)).at(0, 0);
      CHECK(v.valuation() >= -lambda_floor(1, 2));
      const Element h = Element::from_digits({0, 1, 1, 1}, 0, kZ2, 4);
      CHECK(matrix_fn_eval(r, vec1(x + h)).at(0, 0) == v);
    }
  }
  const MatrixFn r = decode_matrix_fn(16 + 77, cfg);
  CHECK_THROWS_AS(matrix_fn_eval(r, vec1(Element::from_integer(1, kZ2, 1))), InsufficientDepth);
  // block-2 values can reach degree -1
  bool negative_seen = false;
  for (int j = 16; j < 16 + 4096; j += 17) {
    const MatrixFn rj = decode_matrix_fn(j, cfg);
    for (const Element& x : enumerate_residues(kZ2, 2)) {
      const Element v = matrix_fn_eval(rj, vec1(x), 4).at(0, 0);
      CHECK(v.valuation() >= -1);
      negative_seen = negative_seen || v.valuation() == -1;
    }
  }
  CHECK(negative_seen);
}

TEST_CASE("enumeration recurrence: every Omega_1 table reappears in Omega_2") {
  const PhiConfig cfg = scalar(kZ2);
  // Omega_2 tables as functions on depth-2 cells with values as digit strings
  std::set<std::vector<std::string>> block2;
  for (int inner = 0; inner < 65536; ++inner) {
    const MatrixFn r = decode_matrix_fn(16 + inner, cfg);
    std::vector<std::string> values;
    for (const Element& x : enumerate_residues(kZ2, 2)) {
      values.push_back(to_digit_string(matrix_fn_eval(r, vec1(x), 4).at(0, 0)));
    }
    block2.insert(values);
  }
  for (int j = 0; j < 16; ++j) {
    const MatrixFn r = decode_matrix_fn(j, cfg);
    std::vector<std::string> extended;
    for (const Element& x : enumerate_residues(kZ2, 2)) {
      extended.push_back(to_digit_string(matrix_fn_eval(r, vec1(x), 4).at(0, 0)));
    }
    CHECK(block2.count(extended) == 1);
  }
}

TEST_CASE("depth discipline: k_block(j) <= max(j, 1)") {
  for (const PhiConfig& cfg : {scalar(kZ2), scalar(kZ3), PhiConfig{kZ2, 2, 1}}) {
    for (int j = 0; j < 200; ++j) {
      CHECK(decode_matrix_fn(j, cfg).k_block() <= std::max(j, 1));
    }
    const BigInt start2 = omega_block_offset(2, cfg);
    CHECK(decode_matrix_fn(start2, cfg).k_block() == 2);
    CHECK(start2 >= 2);
  }
}

TEST_CASE("required_phi_input_depth and last summand") {
  CHECK(required_phi_input_depth(12, 2) == alpha(5));
  CHECK(required_phi_input_depth(1, 2) == alpha(1));
  CHECK(required_phi_input_depth(8, 2) == alpha(4));
  CHECK(required_phi_input_depth(11, 2) == alpha(5));
  int prev = 0;
  for (int D = 1; D < 200; ++D) {
    const int need = required_phi_input_depth(D, 3);
    CHECK(need >= prev);
    CHECK(need >= D);
    prev = need;
  }

  // oracle: phi mod t^D, computed from inputs at the sufficient depth, must
  // be a function of the input's depth-X prefix for X = required depth
  const SawyerPhi phi(scalar(kZ2));
  for (int D = 1; D <= 6; ++D) {
    const int X = required_phi_input_depth(D, 2);
    const int full = X + 3;
    std::map<std::uint64_t, std::string> by_prefix;
    for (const Element& x : enumerate_residues(kZ2, full)) {
      const std::string out = to_digit_string(phi.eval(vec1(x), D)[0]);
      const auto [it, fresh] = by_prefix.emplace(x.cell_index(X), out);
      if (!fresh) CHECK(it->second == out);
    }
  }
}

TEST_CASE("phi_eval basics") {
  const SawyerPhi phi(scalar(kZ2));
  CHECK(phi.eval(vec1(Element::zero(kZ2, 20)), 8)[0] == Element::zero(kZ2, 8));

  // range in R at D_out = 8 for every depth-10 input
  for (const Element& x : enumerate_residues(kZ2, required_phi_input_depth(8, 2))) {
    const ElementVector y = phi.eval(vec1(x), 8);
    CHECK(y[0].valuation() >= 0);
    CHECK(y[0].depth() == 8);
  }

  CHECK_THROWS_AS(phi.eval(vec1(Element::from_integer(5, kZ2, 9)), 8), InsufficientDepth);

  // prefix consistency for random inputs
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int D = 1 + static_cast<int>(rng() % 8);
    const int X = required_phi_input_depth(D + 3, 2);
    const Element x = Element::from_cell_index(rng() % (1ULL << X), kZ2, X);
    CHECK(phi.eval(vec1(x), D + 3)[0].truncate(D) == phi.eval(vec1(x), D)[0]);
  }

  // inputs in K are reduced to R first
  const Element k = Element::from_digits({1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0, 1}, -3, kZ2, 10);
  CHECK(phi.eval(vec1(k), 8) == phi.eval(vec1(k.reduce_to_R()), 8));
}

TEST_CASE("summand valuations") {
  for (const RingSpec& ring : {kZ2, kF2, kZ3}) {
    const SawyerPhi phi(scalar(ring));
    const int W = static_cast<int>(alpha(6));
    std::mt19937_64 rng(ring.ell());
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::int64_t> digits(static_cast<std::size_t>(W));
      for (auto& d : digits) d = static_cast<std::int64_t>(rng() % ring.ell());
      const ElementVector x{Element::from_digits(digits, 0, ring, W)};
      for (int k = 0; k <= 5; ++k) {
        const Element s = phi.summand(x, k, 40)[0];
        CHECK(s.valuation() >= alpha(k) - summand_lambda(k, ring.ell()));
        CHECK(s.valuation() >= 0);
      }
    }
  }
}

TEST_CASE("phi in higher dimensions") {
  const PhiConfig cfg{RingSpec::power_series(3), 2, 2};
  const SawyerPhi phi(cfg);
  const int X = phi.required_input_depth(5);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const ElementVector x{Element::from_cell_index(rng() % oracle::ipow(3, X), cfg.ring, X),
                          Element::from_cell_index(rng() % oracle::ipow(3, X), cfg.ring, X)};
    const ElementVector y = phi.eval(x, 5);
    REQUIRE(y.size() == 2);
    CHECK(valuation(y) >= 0);
    CHECK(truncate(phi.eval(x, 5), 3) == phi.eval(x, 3));
  }
  CHECK_THROWS_AS(phi.eval(ElementVector{Element::zero(cfg.ring, X)}, 5), KakeyaError);
}

TEST_CASE("continuity modulus") {
  CHECK(continuity_modulus(1, 2) == 1);
  int prev = 0;
  for (int A = 1; A <= 60; ++A) {
    const int m = continuity_modulus(A, 2);
    CHECK(m >= prev);
    prev = m;
  }
  // contract, exhaustively: inputs agreeing to the modulus give outputs
  // agreeing to A digits
  const SawyerPhi phi(scalar(kZ2));
  for (int A = 1; A <= 4; ++A) {
    const int modulus = continuity_modulus(A, 2);
    const int W = required_phi_input_depth(A, 2) + modulus;
    std::map<std::uint64_t, std::vector<Element>> groups;
    for (const Element& x : enumerate_residues(kZ2, W)) {
      groups[x.cell_index(modulus)].push_back(phi.eval(vec1(x), A)[0]);
    }
    for (const auto& [prefix, outs] : groups) {
      for (const auto& a : outs) {
        for (const auto& b : outs) CHECK((a - b).valuation() >= A);
      }
    }
  }
}

TEST_CASE("phi_dh_eval") {
  const Element ones = Element::from_digits(std::vector<std::int64_t>(9, 1), 0, kF2, 9);
  const Element out = phi_dh_eval(ones, 8);
  CHECK(out == Element::from_digits({0, 1, 0, 1, 1, 1, 0, 1}, 0, kF2, 8));
  CHECK(phi_dh_eval(Element::zero(kZ2, 9), 8).is_zero());
  CHECK_THROWS_AS(phi_dh_eval(ones, 9), InsufficientDepth);

  // digit rule against a direct oracle
  for (const Element& a : enumerate_residues(kZ3, 7)) {
    const Element o = phi_dh_eval(a, 6);
    for (int j = 0; j < 6; ++j) {
      const bool zero_slot = j == 0 || j == 2;
      CHECK(o.digit(j) == (zero_slot ? 0U : a.digit(j + 1)));
    }
  }
}

TEST_CASE("phi_dh additivity") {
  const int D = 8;
  for (const Element& a : enumerate_residues(kF2, D + 1)) {
    for (const Element& b : enumerate_residues(kF2, D + 1)) {
      CHECK(phi_dh_eval(a + b, D) == phi_dh_eval(a, D) + phi_dh_eval(b, D));
    }
  }
}
