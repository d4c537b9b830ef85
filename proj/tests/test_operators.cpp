// test_operators.cpp — ladder matrix elements, embedding conventions, algebra.
//
// Expected values are either direct definitions (sqrt(n) elements), hand-derived
// small matrices frozen below, or dense recomputations used as an independent
// check of the sparse path.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "phonlat/operators.hpp"

using namespace phonlat::ops;

namespace {

constexpr double kExactTol = 1e-15;
constexpr double kAlgebraTol = 1e-12;

SparseOperator random_sparse(int dim, std::mt19937_64& rng, double fill = 0.4) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(fill);
  std::vector<Entry> e;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (keep(rng)) e.push_back({r, c, Complex(u(rng), u(rng))});
  return SparseOperator(dim, std::move(e));
}

double dense_max_abs_diff(const Dense& a, const Dense& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("annihilation has <n-1|a|n> = sqrt(n) for dims 2..16") {
  for (int dim = 2; dim <= 16; ++dim) {
    const SparseOperator a = annihilation(dim);
    REQUIRE(a.nnz() == static_cast<std::size_t>(dim - 1));
    for (int n = 1; n < dim; ++n) {
      const Entry& e = a.entries()[static_cast<std::size_t>(n - 1)];
      CHECK(e.row == n - 1);
      CHECK(e.col == n);
      CHECK(std::abs(e.value - Complex(std::sqrt(double(n)), 0.0)) <= kExactTol);
    }
  }
}

TEST_CASE("number equals creation*annihilation and creation is the adjoint") {
  for (int dim : {2, 3, 5, 9}) {
    CHECK(adjoint(annihilation(dim)) == creation(dim));
    const Dense n1 = to_dense(number(dim));
    const Dense n2 = to_dense(matmul(creation(dim), annihilation(dim)));
    CHECK(dense_max_abs_diff(n1, n2) <= kAlgebraTol);
  }
}

TEST_CASE("commutator [a, a+] is diag(1,...,1,-(d-1)) — truncation boundary defect") {
  for (int dim : {2, 3, 4, 8, 16}) {
    const SparseOperator c = commutator(annihilation(dim), creation(dim));
    const Dense d = to_dense(c);
    for (int i = 0; i < dim; ++i) {
      const double expected = (i < dim - 1) ? 1.0 : -(double(dim) - 1.0);
      CHECK(std::abs(d(i, i) - Complex(expected, 0.0)) <= kAlgebraTol);
    }
    CHECK((d - d.diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() <= kAlgebraTol);
  }
}

TEST_CASE("embed places number(2) in slot 0 of a 2x2 space as diag(0,0,1,1)") {
  CompositeSpace space({{"m0", ModeKind::mechanical, 1.0, 0.0, 2},
                        {"m1", ModeKind::mechanical, 1.0, 0.0, 2}});
  const SparseOperator n0 = embed(number(2), space, 0);
  const Dense d = to_dense(n0);
  Dense want = Dense::Zero(4, 4);
  want(2, 2) = 1.0;
  want(3, 3) = 1.0;
  CHECK(dense_max_abs_diff(d, want) == 0.0);

  // Slot 1 (least significant) interleaves instead: diag(0,1,0,1).
  const Dense d1 = to_dense(embed(number(2), space, 1));
  Dense want1 = Dense::Zero(4, 4);
  want1(1, 1) = 1.0;
  want1(3, 3) = 1.0;
  CHECK(dense_max_abs_diff(d1, want1) == 0.0);
}

TEST_CASE("embedding is an algebra homomorphism per slot") {
  std::mt19937_64 rng(0x5eed0001);
  CompositeSpace space({{"a", ModeKind::mechanical, 1.0, 0.0, 3},
                        {"b", ModeKind::auxiliary, 2.0, 0.0, 4},
                        {"c", ModeKind::auxiliary, 3.0, 0.0, 2}});
  for (int slot = 0; slot < space.slot_count(); ++slot) {
    const int d = space.mode(slot).truncation_dim;
    for (int rep = 0; rep < 4; ++rep) {
      const SparseOperator A = random_sparse(d, rng);
      const SparseOperator B = random_sparse(d, rng);
      const Dense lhs = to_dense(embed(matmul(A, B), space, slot));
      const Dense rhs = to_dense(matmul(embed(A, space, slot), embed(B, space, slot)));
      CHECK(dense_max_abs_diff(lhs, rhs) <= kAlgebraTol);
    }
  }
}

TEST_CASE("operators embedded on distinct slots commute") {
  std::mt19937_64 rng(0x5eed0002);
  CompositeSpace space({{"a", ModeKind::mechanical, 1.0, 0.0, 3},
                        {"b", ModeKind::auxiliary, 2.0, 0.0, 3},
                        {"c", ModeKind::auxiliary, 3.0, 0.0, 2}});
  for (int s1 = 0; s1 < space.slot_count(); ++s1) {
    for (int s2 = s1 + 1; s2 < space.slot_count(); ++s2) {
      const SparseOperator A = random_sparse(space.mode(s1).truncation_dim, rng);
      const SparseOperator B = random_sparse(space.mode(s2).truncation_dim, rng);
      const SparseOperator comm =
          commutator(embed(A, space, s1), embed(B, space, s2));
      CHECK(max_abs(comm) <= kAlgebraTol);
    }
  }
}

TEST_CASE("canonical form: sorted, deduplicated, zero-free; equality is entrywise") {
  SparseOperator a(3, {{2, 1, {1.0, 0.0}}, {0, 0, {0.5, 0.0}}, {2, 1, {-1.0, 0.0}}, {1, 2, {0.0, 2.0}}});
  // (2,1) cancels exactly; remaining sorted entries: (0,0), (1,2).
  REQUIRE(a.nnz() == 2);
  CHECK(a.entries()[0] == Entry{0, 0, {0.5, 0.0}});
  CHECK(a.entries()[1] == Entry{1, 2, {0.0, 2.0}});

  SparseOperator b(3, {{1, 2, {0.0, 2.0}}, {0, 0, {0.25, 0.0}}, {0, 0, {0.25, 0.0}}});
  CHECK(a == b);
  CHECK(SparseOperator::zero(3) == scale(Complex{}, a));
}

TEST_CASE("hermiticity detector agrees with a dense adjoint check on random matrices") {
  std::mt19937_64 rng(0x5eed0003);
  for (int rep = 0; rep < 20; ++rep) {
    const SparseOperator m = random_sparse(6, rng);
    const SparseOperator h = add(m, adjoint(m));  // Hermitian by construction
    const Dense hd = to_dense(h);
    const bool dense_says = dense_max_abs_diff(hd, hd.adjoint()) <= 1e-12 * hd.cwiseAbs().maxCoeff();
    CHECK(is_hermitian(h) == dense_says);
    CHECK(is_hermitian(h));
    // A generic random matrix should not pass.
    if (max_abs(sub(m, adjoint(m))) > 1e-6) CHECK_FALSE(is_hermitian(m));
  }
}

TEST_CASE("matmul matches dense multiplication on random operators") {
  std::mt19937_64 rng(0x5eed0004);
  for (int rep = 0; rep < 10; ++rep) {
    const SparseOperator A = random_sparse(7, rng);
    const SparseOperator B = random_sparse(7, rng);
    CHECK(dense_max_abs_diff(to_dense(matmul(A, B)), to_dense(A) * to_dense(B)) <= kAlgebraTol);
  }
}

TEST_CASE("error paths: bad dimensions, bad slots, mismatches, bad modes") {
  CHECK_THROWS_AS(annihilation(1), std::invalid_argument);
  CHECK_THROWS_AS(annihilation(0), std::invalid_argument);
  CHECK_THROWS_AS(SparseOperator(2, {{2, 0, {1.0, 0.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(add(annihilation(2), annihilation(3)), std::invalid_argument);
  CHECK_THROWS_AS(matmul(annihilation(2), annihilation(3)), std::invalid_argument);

  CompositeSpace space({{"a", ModeKind::mechanical, 1.0, 0.0, 3}});
  CHECK_THROWS_AS(embed(annihilation(3), space, 1), std::invalid_argument);
  CHECK_THROWS_AS(embed(annihilation(2), space, 0), std::invalid_argument);
  CHECK_THROWS_AS(space.slot_of("nope"), std::invalid_argument);

  CHECK_THROWS_AS(CompositeSpace(std::vector<ModeSpec>{}), std::invalid_argument);
  CHECK_THROWS_AS(CompositeSpace({{"a", ModeKind::mechanical, -1.0, 0.0, 3}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeSpace({{"a", ModeKind::mechanical, 1.0, -0.1, 3}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeSpace({{"a", ModeKind::mechanical, 1.0, 0.0, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeSpace({{"a", ModeKind::mechanical, 1.0, 0.0, 3},
                                  {"a", ModeKind::auxiliary, 2.0, 0.0, 2}}),
                  std::invalid_argument);
}

TEST_CASE("composite index convention: slot 0 most significant") {
  CompositeSpace space({{"x", ModeKind::mechanical, 1.0, 0.0, 2},
                        {"y", ModeKind::mechanical, 1.0, 0.0, 3},
                        {"z", ModeKind::mechanical, 1.0, 0.0, 2}});
  CHECK(space.total_dim() == 12);
  CHECK(space.left_dim(0) == 1);
  CHECK(space.right_dim(0) == 6);
  CHECK(space.left_dim(1) == 2);
  CHECK(space.right_dim(1) == 2);
  CHECK(space.left_dim(2) == 6);
  CHECK(space.right_dim(2) == 1);
  // a on slot 1 must connect |x, n, z> -> |x, n-1, z| at index distance right_dim = 2.
  const SparseOperator a1 = embed(annihilation(3), space, 1);
  for (const Entry& e : a1.entries()) CHECK(e.col - e.row == 2);
}
