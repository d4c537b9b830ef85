// operators.hpp — truncated Fock-space mode registry and sparse operator algebra.
//
// Conventions used throughout the library:
//   * Each bosonic mode is truncated to `truncation_dim` Fock levels |0..d-1>.
//   * Annihilation acts as <n-1|a|n> = sqrt(n); everything else is built from it.
//   * Composite indices are row-major with slot 0 most significant:
//     idx = ((i_0 * d_1 + i_1) * d_2 + i_2) * ...
//   * Truncation makes [a, a†] = diag(1, ..., 1, -(d-1)); the defective corner
//     only matters when the top Fock level is populated, which simulations
//     monitor (see dynamics diagnostics).
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace phonlat::ops {

using Complex = std::complex<double>;
using Dense = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

enum class ModeKind { mechanical, auxiliary, auxiliary_pair_member };

std::string to_string(ModeKind kind);
ModeKind mode_kind_from_string(const std::string& s);

// One bosonic mode of the hardware. `damping_rate` is the Lindblad rate of the
// mode's annihilation dissipator: rho' += damping_rate * D[a]rho, so <n> of an
// otherwise free mode decays as exp(-damping_rate * t).
struct ModeSpec {
  std::string label;
  ModeKind kind = ModeKind::mechanical;
  double frequency = 1.0;     // rad/s, > 0
  double damping_rate = 0.0;  // rad/s, >= 0
  int truncation_dim = 2;     // Fock levels kept, >= 2

  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

// Ordered list of modes spanning a tensor-product space, slot 0 most
// significant. Labels must be unique; they are the stable way other layers
// refer to slots.
class CompositeSpace {
 public:
  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<ModeSpec> modes);

  int slot_count() const { return static_cast<int>(modes_.size()); }
  std::int64_t total_dim() const { return total_dim_; }
  const ModeSpec& mode(int slot) const;
  const std::vector<ModeSpec>& modes() const { return modes_; }
  int slot_of(const std::string& label) const;  // throws std::invalid_argument
  bool has_label(const std::string& label) const;

  // Dimension products strictly before / strictly after a slot.
  std::int64_t left_dim(int slot) const;
  std::int64_t right_dim(int slot) const;

  friend bool operator==(const CompositeSpace&, const CompositeSpace&) = default;

 private:
  std::vector<ModeSpec> modes_;
  std::int64_t total_dim_ = 1;
};

struct Entry {
  int row = 0;
  int col = 0;
  Complex value{};

  friend bool operator==(const Entry&, const Entry&) = default;
};

// COO sparse matrix kept in canonical form: entries sorted by (row, col),
// duplicates summed, exact zeros dropped. Equality is entrywise equality of
// the canonical form.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(int dim, std::vector<Entry> entries);

  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  static SparseOperator zero(int dim);
  static SparseOperator identity(int dim);

  friend bool operator==(const SparseOperator&, const SparseOperator&) = default;

 private:
  int dim_ = 0;
  std::vector<Entry> entries_;
};

// --- elementary single-mode operators --------------------------------------

SparseOperator annihilation(int dim);  // <n-1|a|n> = sqrt(n)
SparseOperator creation(int dim);
SparseOperator number(int dim);              // diag(0, 1, ..., dim-1)
SparseOperator number_power(int dim, int p);  // diag(n^p)

// --- algebra ----------------------------------------------------------------

SparseOperator adjoint(const SparseOperator& op);
SparseOperator scale(Complex factor, const SparseOperator& op);
SparseOperator add(const SparseOperator& a, const SparseOperator& b);
SparseOperator sub(const SparseOperator& a, const SparseOperator& b);
SparseOperator matmul(const SparseOperator& a, const SparseOperator& b);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

inline SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return add(a, b); }
inline SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return sub(a, b); }
inline SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) { return matmul(a, b); }
inline SparseOperator operator*(Complex f, const SparseOperator& op) { return scale(f, op); }
inline SparseOperator operator*(double f, const SparseOperator& op) { return scale(Complex(f, 0.0), op); }

// Largest entry magnitude (0 for the zero operator).
double max_abs(const SparseOperator& op);

// max|M - M†| <= tol_rel * max|M| (the zero operator is Hermitian).
bool is_hermitian(const SparseOperator& op, double tol_rel = 1e-12);

// Lift a single-slot operator into the composite space:
// I ⊗ ... ⊗ op ⊗ ... ⊗ I with slot-0-most-significant indexing.
SparseOperator embed(const SparseOperator& op, const CompositeSpace& space, int slot);

Dense to_dense(const SparseOperator& op);
SparseOperator from_dense(const Dense& m, double drop_tol = 0.0);

}  // namespace phonlat::ops
