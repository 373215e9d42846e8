// A single photon in an arbitrary polarization passes the detector: the probe
// picks up a phase while the photon's polarization is left intact. The
// polarization-sensitive control Hamiltonian dephases the same photon.

#include "ppqnd/ppqnd.hpp"

#include <cstdio>

int main() {
  using namespace ppqnd;
  const PolarizationQubit q = PolarizationQubit::normalized({0.6, 0.0}, {0.0, 0.8});
  const auto s = stokes_vector(q);
  std::printf("input Stokes vector (%.4f, %.4f, %.4f)\n", s[0], s[1], s[2]);

  const double alpha = 2.0;
  std::printf("%8s %14s %14s %14s\n", "chi t", "F preserving", "F sensitive", "envelope");
  for (double chit : {0.25, 0.5, 1.0, 2.0, 3.14159}) {
    const DephasingResult pp = polarization_dephasing(q, alpha, chit, 1.0);
    const DephasingResult sens = polarization_dephasing(q, alpha, chit, 1.0, true);
    std::printf("%8.3f %14.10f %14.10f %14.10f\n", chit, pp.fidelity, sens.fidelity, sens.analytic_envelope);
  }

  // The same Hamiltonian written in the H/V basis is unchanged.
  const Operator h = ppqnd_hamiltonian(0.5, 3, 3, 3);
  std::printf("max |U H U^dag - H| for L/R -> H/V: %.3g\n", check_invariance(h, lr_to_hv(), {0, 1}));
}
