#pragma once

#include <string>
#include <vector>

#include "phonlat/operators.hpp"

namespace phonlat::terms {

using ops::Complex;
using ops::CompositeSpace;
using ops::SparseOperator;

// One tensor-slot factor of a product term: (a†)^create_pow · n^number_pow · a^annihilate_pow.
struct SlotFactor {
  int slot = 0;
  int create_pow = 0;
  int number_pow = 0;
  int annihilate_pow = 0;

  friend bool operator==(const SlotFactor&, const SlotFactor&) = default;
};

bool slot_factor_less(const SlotFactor& a, const SlotFactor& b);

// A single labeled product term: coeff · exp(-i·rotation·t) · Π factors.
// Factors are sorted by slot with at most one entry per slot; identity factors
// (all powers zero) are dropped, so an empty factor list is a scalar multiple
// of the identity.
struct Monomial {
  Complex coeff{0.0, 0.0};
  double rotation = 0.0;
  std::vector<SlotFactor> factors;
  std::string label;
};

// Conjugate-transpose partner: conjugated coefficient, negated rotation,
// create/annihilate powers swapped per slot. Involutive.
Monomial monomial_adjoint(const Monomial& m);

// Net ladder excess (creations minus annihilations) of the factor on `slot`,
// 0 if the monomial does not touch it.
int net_excess(const Monomial& m, int slot);

// Operator part of the monomial (coefficient and rotation excluded), embedded
// on the full composite space. Exact truncated-ladder matrix elements.
SparseOperator monomial_operator(const CompositeSpace& space, const Monomial& m);

// Expands every n^w factor via n^w = Σ_j S2(w,j)·(a†)^j a^j (Stirling numbers
// of the second kind), producing an equivalent sum of monomials whose factors
// have number_pow == 0. Exact on truncated spaces.
std::vector<Monomial> to_ladder_normal(const Monomial& m);

// Sum of labeled monomials over one composite space.
//
// value(t) = Σ_k coeff_k · exp(-i·rotation_k·t) · op_k.
//
// add() never merges terms: distinct physical origins keep distinct entries
// (labels preserved); only exactly-zero coefficients are dropped. Use merged()
// to combine structurally identical terms for kernel assembly or comparisons.
class TermSum {
 public:
  explicit TermSum(CompositeSpace space);

  const CompositeSpace& space() const { return space_; }
  const std::vector<Monomial>& monomials() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Validates slots and powers against the space, sorts factors by slot,
  // drops identity factors and exactly-zero coefficients, normalizes -0.0
  // rotation to 0.0. Throws std::invalid_argument on malformed input.
  void add(Monomial m);
  void add_all(const std::vector<Monomial>& ms);

  // Adds m and, when m is not self-adjoint, monomial_adjoint(m) (label gets a
  // "+hc" suffix). Convenience for Hermitian model assembly.
  void add_with_adjoint(Monomial m);

  SparseOperator value(double t) const;
  // Sum of the rotation == 0 terms only.
  SparseOperator static_value() const;

  bool is_static() const;
  double max_abs_rotation() const;

  // Combines monomials with identical (rotation, factors); drops coefficients
  // that cancel below `drop_tol` relative to the largest coefficient. Labels
  // of combined groups are joined with '|'.
  TermSum merged(double drop_tol = 0.0) const;

  // True when every monomial's conjugate-transpose partner is present with the
  // conjugate coefficient (tolerance relative to the largest coefficient).
  // Self-adjoint structures require a real total coefficient.
  bool hermitian_pairing_ok(double tol = 1e-10) const;

  TermSum adjoint() const;
  TermSum scaled(const Complex& factor) const;
  // Term-list concatenation; spaces must match.
  TermSum plus(const TermSum& other) const;

 private:
  CompositeSpace space_;
  std::vector<Monomial> terms_;
};

// Canonical ladder-normal merged form, for structural comparisons.
TermSum merged_ladder_normal(const TermSum& sum, double drop_tol = 1e-14);

// Structural equality of the two sums as ladder-normal term multisets:
// identical (rotation, factors) keys with coefficients equal within
// tol·max|coeff|. Ignores labels.
bool same_term_set(const TermSum& a, const TermSum& b, double tol = 1e-12);

}  // namespace phonlat::terms
