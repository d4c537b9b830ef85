#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phonlat/kernels.hpp"
#include "phonlat/models.hpp"
#include "phonlat/operators.hpp"

namespace phonlat::dynamics {

using kernels::Backend;
using kernels::RowMajor;
using ops::Complex;

// Thrown when the adaptive stepper cannot meet its per-step tolerance within
// the refinement budget.
struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Stepper { rk4_fixed, adaptive };

// Named expectation value tr(op·ρ) recorded at every grid time.
struct Observable {
  std::string name;
  ops::SparseOperator op;
};

struct SimulationOptions {
  Stepper stepper = Stepper::adaptive;
  double dt = 0.0;    // fixed step (rk4_fixed) / initial step (adaptive); 0 picks one
  double tol = 1e-9;  // adaptive per-step bound on max(embedded error, trace drift)
  int max_refine = 20;  // consecutive halvings allowed before ToleranceError
  bool store_states = false;
  Backend backend = Backend::serial;
};

struct Diagnostics {
  double max_trace_drift = 0.0;         // max |tr ρ − 1| over the grid
  double max_hermiticity_defect = 0.0;  // max‖ρ − ρ†‖_max over the grid
  double min_eigenvalue = 0.0;          // most negative ρ eigenvalue seen
  std::vector<double> top_fock_population;  // per slot, max over the grid
  bool truncation_flagged = false;          // any slot exceeded 1e-3
  long long rhs_evaluations = 0;
  long long steps_taken = 0;
  long long steps_rejected = 0;
};

struct SimulationResult {
  std::vector<double> times;
  std::vector<std::string> observable_names;
  std::vector<std::vector<Complex>> observables;  // [time index][observable index]
  std::vector<RowMajor> states;                   // filled when store_states
  Diagnostics diagnostics;

  std::string to_csv() const;   // header "time,<names>"; real parts, %.17g
  std::string to_json() const;  // complex observables plus diagnostics
};

// Basis vector |levels[0], levels[1], ...⟩ on the composite space.
Eigen::VectorXcd fock_state(const ops::CompositeSpace& space, const std::vector<int>& levels);

// ψψ†/‖ψ‖²; throws on a zero vector.
RowMajor pure_state(const Eigen::VectorXcd& psi);

// Trace 1 ± 1e-9, Hermitian to 1e-10 (relative), eigenvalues ≥ −1e-8.
void validate_density_matrix(const RowMajor& rho);

Complex expectation(const ops::SparseOperator& op, const RowMajor& rho);

// −i[H(t), ρ] + Σ rate·(AρA† − ½{A†A, ρ}).
RowMajor lindblad_rhs(const models::MasterEquationModel& model, const RowMajor& rho, double t);

// Evolves ρ₀ over the strictly increasing grid, recording observables and
// state-health diagnostics at every grid time. Time-dependent terms are
// evaluated at the RK4 stage times, never held piecewise constant.
SimulationResult integrate(const models::MasterEquationModel& model, const RowMajor& rho0,
                           const std::vector<double>& t_grid,
                           const std::vector<Observable>& observables,
                           const SimulationOptions& opts = {});

// ψ(t) = exp(−iHt)ψ₀ by dense eigendecomposition; H must be Hermitian.
Eigen::VectorXcd propagate_closed_oracle(const ops::SparseOperator& h,
                                         const Eigen::VectorXcd& psi0, double t);

double trace_distance(const RowMajor& a, const RowMajor& b);  // ½‖a − b‖₁
double fidelity(const RowMajor& a, const RowMajor& b);        // Uhlmann, in [0, 1]

// Reduced state over keep_slots (strictly increasing); slot order preserved.
RowMajor partial_trace(const RowMajor& rho, const ops::CompositeSpace& space,
                       const std::vector<int>& keep_slots);

}  // namespace phonlat::dynamics
