#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "phonlat/operators.hpp"
#include "phonlat/terms.hpp"

namespace phonlat::kernels {

using ops::Complex;
using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Backend { serial, openmp };

bool openmp_compiled();
int openmp_max_threads();

// Compressed sparse row form of a square operator.
struct CsrMatrix {
  int dim = 0;
  std::vector<int> row_ptr;  // size dim + 1
  std::vector<int> col;
  std::vector<Complex> val;

  static CsrMatrix from_sparse(const ops::SparseOperator& op);
  ops::SparseOperator to_sparse() const;
  std::size_t nnz() const { return val.size(); }
};

// out += alpha · A · X
void spmm_left_acc(const Complex& alpha, const CsrMatrix& A, const RowMajor& X, RowMajor& out,
                   Backend backend);
// out += alpha · X · B
void spmm_right_acc(const Complex& alpha, const RowMajor& X, const CsrMatrix& B, RowMajor& out,
                    Backend backend);

// Master-equation right-hand side in factored form:
//   dρ/dt = M ρ + ρ M† + Σ_c rate_c A_c ρ A_c†
//           − i Σ_g e^{−i·ν_g·t} (G_g ρ − ρ G_g)
// with M = −i·H_static − ½ Σ_c rate_c A_c†A_c and the G_g the rotating
// Hamiltonian groups (coefficients included).
struct LindbladKernel {
  int dim = 0;

  CsrMatrix drift;
  CsrMatrix drift_dag;

  struct Channel {
    double rate = 0.0;
    CsrMatrix A;
    CsrMatrix Adag;
  };
  std::vector<Channel> channels;

  struct Rotating {
    double rotation = 0.0;
    CsrMatrix op;
  };
  std::vector<Rotating> rotating;

  bool is_static() const { return rotating.empty(); }
};

LindbladKernel build_kernel(const terms::TermSum& hamiltonian,
                            const std::vector<std::pair<double, ops::SparseOperator>>& channels);

// Evaluates the right-hand side at time t into `out` (overwritten). `scratch`
// is resized as needed and holds channel intermediates.
void apply_kernel(const LindbladKernel& kernel, double t, const RowMajor& rho, RowMajor& out,
                  RowMajor& scratch, Backend backend);

}  // namespace phonlat::kernels
