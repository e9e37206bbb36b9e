// Orthogonalizes one random 4x2 channel with a 4-element FRIS, then finds the
// lowest-power orthogonal target for the same channel.

#include <iostream>

#include "rsorth/channel.hpp"
#include "rsorth/orthogonalizer.hpp"
#include "rsorth/power_opt.hpp"

int main() {
    using namespace rsorth;

    const ChannelSet cs = generate_iid_rayleigh(/*m=*/4, /*k=*/2, /*n=*/4, /*e0=*/1.0, /*seed=*/42);

    const TargetChannel target(2.0, random_semi_unitary(4, 2, 7));
    const RsConfig theta = solve_fris(cs, target);
    const CMatrix h = effective_channel(cs, theta);
    std::cout << "H^H H =\n" << h.adjoint() * h << "\n";
    std::cout << "sum power " << rs_sum_power(theta) << "\n";

    OptimizerConfig cfg;
    cfg.restarts = 4;
    const OptimResult best = minimize_power(cs, SurfaceKind::Fris, cfg);
    std::cout << "minimum sum power " << best.p_min << " at beta " << best.beta_star << "\n";
    return 0;
}
