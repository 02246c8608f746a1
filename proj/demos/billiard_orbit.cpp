// A few orbits of the elliptic billiard, printed as (x, y) in the normalized annulus.
#include <cstdio>

#include "twistlab/billiard.hpp"
#include "twistlab/curves.hpp"

int main()
{
    using namespace twistlab;
    const Ellipse table(2.0, 1.0);
    const AnnulusLift f = as_annulus_lift(table);
    std::printf("perimeter %.15f\n", table.perimeter());
    for (double y : {0.1, 0.3, 0.5}) {
        const auto orbit = iterate(f, Point{0.0, y}, 8);
        std::printf("seed y = %.2f:", y);
        for (const auto &p : orbit.points) {
            std::printf(" (%.4f, %.4f)", wrap01(p.x), p.y);
        }
        std::printf("\n");
    }
    const auto ti = twist_interval(f, 1e-6);
    std::printf("twist interval [%.6f, %.6f]\n", ti.rho0.value, ti.rho1.value);
}
