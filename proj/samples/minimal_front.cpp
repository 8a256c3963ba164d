// Minimal speed of the reference model and the shape of its front.

#include <cstdio>

#include "wavefront/wavefront.hpp"

int main() {
    using namespace wavefront;
    const auto g = reference_birth();
    const double h = 2.0;

    const auto cs = critical_speed(g.k1(), h, Branch::positive_double_root);
    std::printf("minimal speed c* = %.9f (double root mu = %.9f)\n", cs.c, cs.z_double);

    const auto ctx = make_context(g, h, cs.c);
    const auto phi = solve_profile(ctx);
    std::printf("profile: %zu nodes, dt = %.4g, %d sweeps, residual %.2e\n", phi.size(), phi.dt, phi.iterations,
                phi.residual);

    const auto shape = classify(ctx, phi);
    std::printf("shape: %s, %d local max, phi(ch) = %.6f vs kappa = %.2f\n",
                std::string(to_string(shape.classification)).c_str(), shape.local_maxima, phi(ctx.tau), g.kappa());

    // Coarse text rendering of phi on [-10, 20].
    for (double t = -10.0; t <= 20.0; t += 1.0) {
        const int bar = static_cast<int>(60.0 * phi(t));
        std::printf("%6.1f %8.5f %.*s\n", t, phi(t), bar, "############################################################");
    }
    return 0;
}
