#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phonlat/models.hpp"
#include "phonlat/operators.hpp"
#include "phonlat/terms.hpp"

namespace phonlat::transforms {

// Outcome of rwa_filter: term counts, detuning margins, and the dropped
// monomials themselves (so callers can assert what was averaged away).
struct ResonanceReport {
  int kept_terms = 0;
  int dropped_terms = 0;
  double min_dropped_detuning = 0.0;  // +inf when nothing was dropped
  double max_kept_detuning = 0.0;     // 0 when nothing was kept
  std::vector<terms::Monomial> dropped;
  std::vector<std::string> warnings;
};

// Rotate the Hamiltonian into the frame of the registry free part Σ_s ω_s n_s.
// Each slot's static single-number coefficient must equal the registry
// frequency (those free terms are removed); every other monomial keeps its
// label and coefficient and acquires
//   rotation' = rotation − Σ_s (create_pow_s − annihilate_pow_s)·ω_s,
// so value(t) of the result equals U₀†(H(t) − H₀)U₀ with U₀ = e^{−iH₀t}.
// Mode-damping dissipators are invariant under this rotation and are left on
// the model. Throws std::invalid_argument when the free part is inconsistent
// with the mode registry.
terms::TermSum to_interaction_picture(const models::MasterEquationModel& model);

// Keep monomials with |rotation| ≤ cutoff (cutoff ≥ 0). A warning is recorded
// when the slowest dropped term rotates less than twice as fast as the fastest
// kept one — the cutoff then cuts through a rotation cluster rather than a gap.
std::pair<terms::TermSum, ResonanceReport> rwa_filter(const terms::TermSum& ts, double cutoff);

// Rewrite a model of a mixed auxiliary pair in terms of the split combinations
// living on the same two slots:  c̃ = (c+d)/√2,  d̃ = (c−d)/√2  (an involution).
// Creation/annihilation parts substitute independently, so normal ordering is
// preserved term by term; a mixing term s(c̃d̃† + d̃c̃†) becomes the splitting
// s(c†c − d†d). Dissipators whose operators are linear in the pair ladder
// operators (or do not touch the pair) transform exactly; anything else throws.
models::MasterEquationModel supermode_transform(const models::MasterEquationModel& model,
                                                const std::string& member_c,
                                                const std::string& member_d);

// Spin-1/2 operators on the single-excitation subspace of a pair:
// P projects onto n_c + n_d = 1, σz = P(n_c − n_d)P, σ₊ = P·c†d·P, σ₋ = σ₊†.
struct SchwingerOps {
  ops::SparseOperator sigma_z;
  ops::SparseOperator sigma_plus;
  ops::SparseOperator sigma_minus;
  ops::SparseOperator projector;
};
SchwingerOps schwinger_qubit_ops(const ops::CompositeSpace& space, const std::string& member_c,
                                 const std::string& member_d);

// Second-order block diagonalization of the exchange model
//   H′ = (Ω+Δ)n_c + (Ω−Δ)n_d + f(a d c† + a†d†c),   ε = f/Δ,
// by U = exp[(ε/2)(a d c† − a†d†c)]. Returns the d-vacuum effective model on
// the reduced (mech, c) space:
//   H″ = (Ω + Δ + εf/2)n_c + (εf/2)n_c n_a
// plus the induced channel (ε²κ_c/4, c·a) when the input damps c at rate κ_c.
// Mechanical and c damping channels are carried over; d channels act on vacuum
// and are dropped. Warns when |ε| > 0.3.
struct PerturbativeResult {
  models::MasterEquationModel model;
  double epsilon = 0.0;
  std::vector<std::string> warnings;
};
PerturbativeResult perturbative_diagonalize(const models::MasterEquationModel& model,
                                            const std::string& mech, const std::string& member_c,
                                            const std::string& member_d);

// Remove a fast damped mode b (frequency `omega`, damping `kappa`) that enters
// the Hamiltonian only as  H = ω n_b + pref·(b†K + K†b)  for a recognized
// coupling operator K on the remaining modes:
//   * K = scalar·n_s          → adds pref²ω/(ω²+κ²)·K² and channel (pref²κ/(ω²+κ²), K)
//   * K = a_{s1} + a_{s2}     → adds the beam-splitter pair iλ(a₁a₂† − a₂a₁†),
//                               λ = pref²ω/(ω²+κ²), and channel (γ′, a₁+a₂)
// (the second form takes ω = Δω, the detuning of the rotated frame). Slow terms
// and dissipators pass through onto the reduced space. Throws on unrecognized
// coupling shapes; warns when pref·‖K‖ is not small against √(ω²+κ²).
struct EliminationResult {
  models::MasterEquationModel model;
  std::vector<std::string> warnings;
};
EliminationResult adiabatic_eliminate(const models::MasterEquationModel& model,
                                      const std::string& fast_mode,
                                      const ops::SparseOperator& coupling, double omega,
                                      double kappa);

}  // namespace phonlat::transforms
