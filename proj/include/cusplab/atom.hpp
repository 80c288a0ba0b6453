#pragma once

namespace cusplab {

/// System parameters for H = -Δ - Σ Z/|x_j| + Σ 1/|x_i - x_j| (no factor ½ on
/// the kinetic term, so hydrogenic energies are -Z²/(4n²)).
struct AtomSpec {
  int n_electrons = 1;
  double charge = 1.0;
  double energy = 0.0;
  /// Ground energy of the (N-1)-electron system at the same Z; 0 for N = 1.
  double prev_ground_energy = 0.0;
  /// prev_ground_energy - energy.
  double ion_gap = 0.0;

  /// Validates and fills ion_gap. Throws ContractViolation on N < 1 or Z <= 0.
  static AtomSpec make(int n_electrons, double charge, double energy,
                       double prev_ground_energy = 0.0);
};

/// E_n = -Z²/(4n²). Throws DomainError for n < 1.
double hydrogenic_energy(int n, double charge);

/// One-electron hydrogenic system in state n; the previous system is empty.
AtomSpec hydrogenic_spec(int n, double charge);

}  // namespace cusplab
