// Rotation set of the shear (x, y) -> (x + y^2, y) on a coarse grid.
#include <cstdio>

#include "twistlab/annulus.hpp"
#include "twistlab/families.hpp"

int main()
{
    using namespace twistlab;
    const AnnulusLift f = shear(profile("square"), "shear[square]");
    RotationSetOptions opt;
    opt.n = 20'000;
    opt.bins = 10;
    const auto est = rotation_set(f, 8, 11, opt);
    std::printf("hull [%.6f, %.6f]\n", est.hull_lo, est.hull_hi);
    std::printf("twist interval [%.6f, %.6f]\n", est.twist.rho0.value, est.twist.rho1.value);
    std::printf("contained: %s\n", est.containment.contained ? "yes" : "no");
    for (std::size_t b = 0; b < est.histogram.counts.size(); ++b) {
        std::printf("  bin %2zu: %zu\n", b, est.histogram.counts[b]);
    }
}
