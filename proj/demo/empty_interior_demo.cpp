// The ordering cone P = {y : y1 >= 0, y2 = 0} has no interior points, so the
// Slater condition cannot hold. The constraint system is nevertheless stable
// under perturbations of b (strong simultaneity), and the saddle solver finds
// a Kuhn-Tucker pair that the certificate checker accepts.
#include "cone_kkt/cone_kkt.hpp"

#include <iostream>

int main() {
  using namespace cone_kkt;
  const ProblemSpec prob = validate(fixtures::p2());

  const RegularityReport reg = probe_regularity(prob);
  std::cout << "P has interior: " << (prob.P.has_interior() ? "yes" : "no") << "\n"
            << "Slater: " << (reg.slater.holds ? "holds" : "fails (" + reg.slater.reason + ")")
            << "\n"
            << "eps_hat: " << reg.eps.eps_hat << " over " << reg.eps.directions_probed
            << " directions\n";

  const SaddleSolution sol = solve_saddle(prob);
  const Verdict v = verify_certificate(prob, sol.certificate);
  std::cout << "x0 = " << sol.certificate.x0.transpose() << "\n"
            << "z0 = " << sol.certificate.z0.transpose() << "\n"
            << "objective = " << prob.objective.value(sol.certificate.x0) << "\n"
            << "certificate " << (v.accepted ? "accepted" : "rejected") << " after "
            << sol.trace.iters << " iterations\n";
  return v.accepted ? 0 : 1;
}
