#include "phonlat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include <json.hpp>

namespace phonlat::dynamics {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("phonlat::dynamics: " + what);
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double one_norm(const kernels::CsrMatrix& m) {
  std::vector<double> col(static_cast<std::size_t>(m.dim), 0.0);
  for (std::size_t i = 0; i < m.val.size(); ++i)
    col[static_cast<std::size_t>(m.col[i])] += std::abs(m.val[i]);
  double best = 0.0;
  for (double c : col) best = std::max(best, c);
  return best;
}

// Rough rate scale of the generator, used only to pick a default step.
double kernel_scale(const kernels::LindbladKernel& kernel) {
  double scale = one_norm(kernel.drift);
  for (const auto& c : kernel.channels) {
    const double a = one_norm(c.A);
    scale += c.rate * a * a;
  }
  for (const auto& g : kernel.rotating) scale += one_norm(g.op) + std::abs(g.rotation);
  return scale;
}

struct Rk4Workspace {
  RowMajor k1, k2, k3, k4, stage, scratch;

  explicit Rk4Workspace(int dim)
      : k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim) {}
};

// One classical RK4 step from (t, rho) with width h into out (out ≠ rho).
void rk4_step(const kernels::LindbladKernel& kernel, double t, double h, const RowMajor& rho,
              RowMajor& out, Rk4Workspace& ws, Backend backend) {
  kernels::apply_kernel(kernel, t, rho, ws.k1, ws.scratch, backend);
  ws.stage = rho + (0.5 * h) * ws.k1;
  kernels::apply_kernel(kernel, t + 0.5 * h, ws.stage, ws.k2, ws.scratch, backend);
  ws.stage = rho + (0.5 * h) * ws.k2;
  kernels::apply_kernel(kernel, t + 0.5 * h, ws.stage, ws.k3, ws.scratch, backend);
  ws.stage = rho + h * ws.k3;
  kernels::apply_kernel(kernel, t + h, ws.stage, ws.k4, ws.scratch, backend);
  out = rho + (h / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

double max_abs(const RowMajor& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::VectorXcd fock_state(const ops::CompositeSpace& space, const std::vector<int>& levels) {
  require(static_cast<int>(levels.size()) == space.slot_count(),
          "fock_state needs one level per mode");
  std::int64_t idx = 0;
  for (int s = 0; s < space.slot_count(); ++s) {
    require(levels[static_cast<std::size_t>(s)] >= 0 &&
                levels[static_cast<std::size_t>(s)] < space.mode(s).truncation_dim,
            "fock_state level out of range for mode '" + space.mode(s).label + "'");
    idx = idx * space.mode(s).truncation_dim + levels[static_cast<std::size_t>(s)];
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.total_dim());
  psi(idx) = Complex(1.0, 0.0);
  return psi;
}

RowMajor pure_state(const Eigen::VectorXcd& psi) {
  const double n2 = psi.squaredNorm();
  require(n2 > 0.0, "pure_state needs a nonzero vector");
  return (psi * psi.adjoint()) / n2;
}

void validate_density_matrix(const RowMajor& rho) {
  require(rho.rows() == rho.cols() && rho.rows() > 0, "density matrix must be square");
  const double scale = std::max(1.0, max_abs(rho));
  require(std::abs(rho.trace() - Complex(1.0, 0.0)) <= 1e-9, "density matrix trace must be 1");
  require(max_abs(RowMajor(rho - rho.adjoint())) <= 1e-10 * scale,
          "density matrix must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -1e-8, "density matrix must be positive semidefinite");
}

Complex expectation(const ops::SparseOperator& op, const RowMajor& rho) {
  require(op.dim() == rho.rows() && rho.rows() == rho.cols(),
          "expectation: operator and state dimensions differ");
  Complex sum(0.0, 0.0);
  for (const auto& e : op.entries()) sum += e.value * rho(e.col, e.row);
  return sum;
}

RowMajor lindblad_rhs(const models::MasterEquationModel& model, const RowMajor& rho, double t) {
  const auto dim = model.space().total_dim();
  require(rho.rows() == dim && rho.cols() == dim, "lindblad_rhs: state dimension mismatch");
  std::vector<std::pair<double, ops::SparseOperator>> channels;
  for (const auto& d : model.dissipators) channels.emplace_back(d.rate, d.op);
  const auto kernel = kernels::build_kernel(model.hamiltonian, channels);
  RowMajor out(dim, dim), scratch;
  kernels::apply_kernel(kernel, t, rho, out, scratch, Backend::serial);
  return out;
}

SimulationResult integrate(const models::MasterEquationModel& model, const RowMajor& rho0,
                           const std::vector<double>& t_grid,
                           const std::vector<Observable>& observables,
                           const SimulationOptions& opts) {
  const ops::CompositeSpace& space = model.space();
  const int dim = static_cast<int>(space.total_dim());
  require(!t_grid.empty(), "time grid must be non-empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    require(t_grid[i] > t_grid[i - 1], "time grid must be strictly increasing");
  require(rho0.rows() == dim && rho0.cols() == dim, "initial state dimension mismatch");
  validate_density_matrix(rho0);
  for (const auto& o : observables)
    require(o.op.dim() == dim, "observable '" + o.name + "' dimension mismatch");
  require(opts.tol > 0.0, "tolerance must be > 0");
  require(opts.dt >= 0.0, "step size must be >= 0");

  std::vector<std::pair<double, ops::SparseOperator>> channels;
  for (const auto& d : model.dissipators) channels.emplace_back(d.rate, d.op);
  const auto kernel = kernels::build_kernel(model.hamiltonian, channels);

  SimulationResult result;
  result.observable_names.reserve(observables.size());
  for (const auto& o : observables) result.observable_names.push_back(o.name);
  result.diagnostics.min_eigenvalue = std::numeric_limits<double>::infinity();
  result.diagnostics.top_fock_population.assign(static_cast<std::size_t>(space.slot_count()), 0.0);

  const auto record = [&](double t, const RowMajor& rho) {
    result.times.push_back(t);
    std::vector<Complex> row;
    row.reserve(observables.size());
    for (const auto& o : observables) row.push_back(expectation(o.op, rho));
    result.observables.push_back(std::move(row));
    if (opts.store_states) result.states.push_back(rho);

    auto& diag = result.diagnostics;
    diag.max_trace_drift =
        std::max(diag.max_trace_drift, std::abs(rho.trace() - Complex(1.0, 0.0)));
    diag.max_hermiticity_defect =
        std::max(diag.max_hermiticity_defect, max_abs(RowMajor(rho - rho.adjoint())));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues().minCoeff());
    for (int s = 0; s < space.slot_count(); ++s) {
      const std::int64_t d = space.mode(s).truncation_dim;
      const std::int64_t right = space.right_dim(s);
      double pop = 0.0;
      for (int idx = 0; idx < dim; ++idx)
        if ((idx / right) % d == d - 1) pop += rho(idx, idx).real();
      auto& top = diag.top_fock_population[static_cast<std::size_t>(s)];
      top = std::max(top, pop);
      if (top > 1e-3) diag.truncation_flagged = true;
    }
  };

  const double default_dt = [&] {
    if (opts.dt > 0.0) return opts.dt;
    double min_seg = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t_grid.size(); ++i)
      min_seg = std::min(min_seg, t_grid[i] - t_grid[i - 1]);
    double dt = 0.05 / std::max(kernel_scale(kernel), 1e-12);
    if (std::isfinite(min_seg)) dt = std::min(dt, min_seg);
    return dt;
  }();

  Rk4Workspace ws(dim);
  RowMajor rho = rho0, next(dim, dim), full(dim, dim), half(dim, dim);
  record(t_grid.front(), rho);
  double h_adaptive = default_dt;

  for (std::size_t seg = 1; seg < t_grid.size(); ++seg) {
    const double ta = t_grid[seg - 1], tb = t_grid[seg];
    if (opts.stepper == Stepper::rk4_fixed) {
      const auto n = static_cast<long long>(std::ceil((tb - ta) / default_dt - 1e-12));
      const long long steps = std::max(1LL, n);
      const double h = (tb - ta) / static_cast<double>(steps);
      for (long long j = 0; j < steps; ++j) {
        rk4_step(kernel, ta + static_cast<double>(j) * h, h, rho, next, ws, opts.backend);
        rho.swap(next);
        ++result.diagnostics.steps_taken;
        result.diagnostics.rhs_evaluations += 4;
      }
    } else {
      double t = ta;
      int halvings = 0;
      while (t < tb - 1e-15 * std::max(1.0, std::abs(tb))) {
        const double h = std::min(h_adaptive, tb - t);
        rk4_step(kernel, t, h, rho, full, ws, opts.backend);
        rk4_step(kernel, t, 0.5 * h, rho, half, ws, opts.backend);
        rk4_step(kernel, t + 0.5 * h, 0.5 * h, half, next, ws, opts.backend);
        result.diagnostics.rhs_evaluations += 12;
        const double err = max_abs(RowMajor(next - full)) / 15.0;
        const double drift = std::abs(next.trace() - rho.trace());
        if (std::max(err, drift) <= opts.tol) {
          rho.swap(next);
          t += h;
          ++result.diagnostics.steps_taken;
          halvings = 0;
          if (std::max(err, drift) < opts.tol / 32.0) h_adaptive = 2.0 * h;
        } else {
          ++result.diagnostics.steps_rejected;
          h_adaptive = 0.5 * h;
          if (++halvings > opts.max_refine)
            throw ToleranceError("phonlat::dynamics: adaptive stepper exhausted " +
                                 std::to_string(opts.max_refine) + " refinements at t = " +
                                 fmt17(t));
        }
      }
    }
    record(tb, rho);
  }
  return result;
}

Eigen::VectorXcd propagate_closed_oracle(const ops::SparseOperator& h,
                                         const Eigen::VectorXcd& psi0, double t) {
  require(h.dim() == psi0.size(), "propagate_closed_oracle: dimension mismatch");
  require(ops::is_hermitian(h), "propagate_closed_oracle needs a Hermitian generator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops::to_dense(h));
  const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * psi0;
  Eigen::VectorXcd phased(coeffs.size());
  for (Eigen::Index j = 0; j < coeffs.size(); ++j)
    phased(j) = std::exp(Complex(0.0, -es.eigenvalues()(j) * t)) * coeffs(j);
  return es.eigenvectors() * phased;
}

double trace_distance(const RowMajor& a, const RowMajor& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() == a.cols(),
          "trace_distance: dimension mismatch");
  const Eigen::MatrixXcd d = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity(const RowMajor& a, const RowMajor& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols() && a.rows() == a.cols(),
          "fidelity: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd clamped = ea.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd sqrt_a = ea.eigenvectors() *
                                  clamped.cwiseSqrt().asDiagonal() *
                                  ea.eigenvectors().adjoint();
  const Eigen::MatrixXcd m = sqrt_a * (0.5 * (b + b.adjoint())) * sqrt_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(0.5 * (m + m.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  const double root = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root * root, 0.0, 1.0);
}

RowMajor partial_trace(const RowMajor& rho, const ops::CompositeSpace& space,
                       const std::vector<int>& keep_slots) {
  const int dim = static_cast<int>(space.total_dim());
  require(rho.rows() == dim && rho.cols() == dim, "partial_trace: state dimension mismatch");
  require(!keep_slots.empty(), "partial_trace: keep at least one mode");
  for (std::size_t i = 0; i < keep_slots.size(); ++i) {
    require(keep_slots[i] >= 0 && keep_slots[i] < space.slot_count(),
            "partial_trace: slot out of range");
    require(i == 0 || keep_slots[i] > keep_slots[i - 1],
            "partial_trace: slots must be strictly increasing");
  }

  std::vector<bool> keep(static_cast<std::size_t>(space.slot_count()), false);
  for (int s : keep_slots) keep[static_cast<std::size_t>(s)] = true;
  std::int64_t red_dim = 1;
  for (int s : keep_slots) red_dim *= space.mode(s).truncation_dim;

  // Split each composite index into (kept digits, traced digits), both row-major.
  std::vector<std::int64_t> red_of(static_cast<std::size_t>(dim)),
      env_of(static_cast<std::size_t>(dim));
  for (int idx = 0; idx < dim; ++idx) {
    std::int64_t red = 0, env = 0;
    for (int s = 0; s < space.slot_count(); ++s) {
      const std::int64_t d = space.mode(s).truncation_dim;
      const std::int64_t digit = (idx / space.right_dim(s)) % d;
      if (keep[static_cast<std::size_t>(s)])
        red = red * d + digit;
      else
        env = env * d + digit;
    }
    red_of[static_cast<std::size_t>(idx)] = red;
    env_of[static_cast<std::size_t>(idx)] = env;
  }

  RowMajor out = RowMajor::Zero(red_dim, red_dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      if (env_of[static_cast<std::size_t>(r)] == env_of[static_cast<std::size_t>(c)])
        out(red_of[static_cast<std::size_t>(r)], red_of[static_cast<std::size_t>(c)]) += rho(r, c);
  return out;
}

std::string SimulationResult::to_csv() const {
  std::string out = "time";
  for (const auto& n : observable_names) out += "," + n;
  out += "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out += fmt17(times[i]);
    for (std::size_t j = 0; j < observable_names.size(); ++j)
      out += "," + fmt17(observables[i][j].real());
    out += "\n";
  }
  return out;
}

std::string SimulationResult::to_json() const {
  nlohmann::json j;
  j["times"] = times;
  nlohmann::json obs = nlohmann::json::object();
  for (std::size_t k = 0; k < observable_names.size(); ++k) {
    std::vector<double> re, im;
    re.reserve(times.size());
    im.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      re.push_back(observables[i][k].real());
      im.push_back(observables[i][k].imag());
    }
    obs[observable_names[k]] = {{"re", re}, {"im", im}};
  }
  j["observables"] = obs;
  j["diagnostics"] = {{"max_trace_drift", diagnostics.max_trace_drift},
                      {"max_hermiticity_defect", diagnostics.max_hermiticity_defect},
                      {"min_eigenvalue", diagnostics.min_eigenvalue},
                      {"top_fock_population", diagnostics.top_fock_population},
                      {"truncation_flagged", diagnostics.truncation_flagged},
                      {"rhs_evaluations", diagnostics.rhs_evaluations},
                      {"steps_taken", diagnostics.steps_taken},
                      {"steps_rejected", diagnostics.steps_rejected}};
  return j.dump(2);
}

}  // namespace phonlat::dynamics
