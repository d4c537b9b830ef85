#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phonlat/operators.hpp"
#include "phonlat/terms.hpp"

namespace phonlat::models {

using ops::Complex;
using ops::CompositeSpace;
using ops::SparseOperator;

struct Dissipator {
  double rate = 0.0;
  SparseOperator op;
  std::string label;
};

// H(t) as a labeled TermSum plus a list of Lindblad channels. The dissipator
// convention is dρ/dt += rate·(AρA† − ½{A†A, ρ}); a damped cavity with
// channel (κ, a) decays as ⟨n⟩(t) = n₀·e^{−κt}.
struct MasterEquationModel {
  explicit MasterEquationModel(CompositeSpace space) : hamiltonian(std::move(space)) {}
  explicit MasterEquationModel(terms::TermSum h) : hamiltonian(std::move(h)) {}

  terms::TermSum hamiltonian;
  std::vector<Dissipator> dissipators;

  const CompositeSpace& space() const { return hamiltonian.space(); }
};

// Structural pairing plus numeric hermiticity of the assembled Hamiltonian at
// a fixed set of sample times.
bool hamiltonian_hermitian(const MasterEquationModel& model, double tol = 1e-10);

// Target lattice: per-node self-Kerr strength and per-edge hopping strength.
struct LatticeNode {
  std::string label;
  double kerr = 0.0;
};
struct LatticeEdge {
  std::string from;
  std::string to;
  double hop = 0.0;
};
struct LatticeGraph {
  std::vector<LatticeNode> nodes;
  std::vector<LatticeEdge> edges;
};

// Unique node labels, edges reference existing distinct nodes, no duplicate
// undirected edges, finite strengths. Throws std::invalid_argument.
void validate_lattice(const LatticeGraph& graph);

// Parameters of the effective interaction channels.
//   g           bare quadratic coupling strength (rad/s)
//   beta        drive-tone displacement amplitude (dimensionless)
//   delta_omega detuning Δω of the displaced coupling from resonance (rad/s)
//   kappa       auxiliary damping rate (rad/s)
//   f           pair coupling strength (rad/s)
//   s           pair mixing rate (rad/s)
//   delta       two-level detuning Δ (rad/s); epsilon() = f/delta
//   alpha       site drive field amplitude (dimensionless)
//   omega_big   fast-mode frequency Ω used in eliminations (rad/s)
//   delta_mod   optional modulation detuning (rad/s)
struct EffectiveParams {
  double g = 0.0;
  Complex beta{0.0, 0.0};
  double delta_omega = 0.0;
  double kappa = 0.0;
  double f = 0.0;
  double s = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double omega_big = 0.0;
  double delta_mod = 0.0;

  // Perturbation parameter f/delta; 0 when f == 0. Throws when f != 0 and
  // delta == 0.
  double epsilon() const;
};

// H = Σ_i kerr_i (a_i†a_i)² + Σ_edges hop_ij (a_i†a_j + a_j†a_i), closed.
// One mechanical mode per node, truncation from `dims` (keyed by node label).
MasterEquationModel build_bose_hubbard(const LatticeGraph& graph,
                                       const std::map<std::string, int>& dims);

// Lab-frame quadratic coupling H = Σ ω_n a†a + Σ Ω_j b†b + Σ_nj g(n,j)·b_j†b_j·(a_n+a_n†).
// Rows of g index the space's mechanical slots in order, columns its
// (non-pair) auxiliary slots in order.
MasterEquationModel build_radiation_pressure(const Eigen::MatrixXd& g,
                                             const CompositeSpace& space);

struct DriveTone {
  std::string target;     // auxiliary mode label
  double frequency = 0.0;  // rad/s
  Complex amplitude{0.0, 0.0};
  std::string label;
};

// Displaced frame of build_radiation_pressure under b_j → b_j + β_j(t),
// β_j(t) = Σ_{tones on j} amplitude·e^{−i·frequency·t}. Every labeled product
// term is kept as its own monomial (no merging): b†b, β b†, β* b, β β'* scalar
// pieces, each times (a + a†).
MasterEquationModel build_displaced_coupling(const Eigen::MatrixXd& g,
                                             const std::vector<DriveTone>& tones,
                                             const CompositeSpace& space);

// Effective beam-splitter pair after eliminating the shared auxiliary:
//   H = λ·i(a₁a₂† − a₂a₁†),  λ  = (g|β|)²Δω/(Δω²+κ²)
//   dissipator (γ′, a₁+a₂),  γ′ = (g|β|)²κ/(Δω²+κ²)
MasterEquationModel build_effective_hop(const EffectiveParams& p, const CompositeSpace& space,
                                        const std::string& mode1, const std::string& mode2);

double hop_rate(const EffectiveParams& p);
double hop_induced_rate(const EffectiveParams& p);

// Mechanical mode + auxiliary pair with internal mixing, photon-number-
// difference coupling:
//   H = ω_a·n_a + Ω(n_c + n_d) + s(c d† + d c†) + f(n_c − n_d)(a + a†)
// Pair members must share a registry frequency Ω.
MasterEquationModel build_pair_with_mixing(const EffectiveParams& p, const CompositeSpace& space,
                                           const std::string& mech, const std::string& member_c,
                                           const std::string& member_d);

// Single-mode self-Kerr target of the driven-dispersive elimination:
//   H = χ(a†a)², dissipator (Γ, a†a)
//   χ = (εfα/4)²Ω/(Ω²+κ²), Γ = (εfα/4)²κ/(Ω²+κ²), ε = f/Δ
MasterEquationModel build_kerr_effective(const EffectiveParams& p, const CompositeSpace& space,
                                         const std::string& mode);

double kerr_rate(const EffectiveParams& p);
double kerr_dephasing_rate(const EffectiveParams& p);

// H = χ_x · n_A ⊗ n_B on two distinct modes.
MasterEquationModel build_cross_kerr(double chi_x, const CompositeSpace& space,
                                     const std::string& mode_a, const std::string& mode_b);

// Three-mode intermediate model (mechanical mode in its rotating frame):
//   H′ = Ω(n_c + n_d) + Δ(n_c − n_d) + f(a d c† + a† d† c)
// with Ω the pair members' shared registry frequency and Δ = p.delta.
MasterEquationModel build_intermediate_qubit_model(const EffectiveParams& p,
                                                   const CompositeSpace& space,
                                                   const std::string& mech,
                                                   const std::string& member_c,
                                                   const std::string& member_d);

}  // namespace phonlat::models
