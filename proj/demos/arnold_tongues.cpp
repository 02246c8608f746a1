// Width of the 0/1, 1/2, 1/3 and 2/5 tongues of the standard circle family.
#include <cstdio>

#include "twistlab/circle.hpp"
#include "twistlab/families.hpp"

int main()
{
    using namespace twistlab;
    for (double eps : {0.25, 0.5, 0.9}) {
        const CircleFamily fam = [eps](double t) { return arnold_circle(t, eps); };
        std::printf("eps = %.2f\n", eps);
        const int pq[][2] = {{0, 1}, {1, 2}, {1, 3}, {2, 5}};
        for (const auto &r : pq) {
            const double c = static_cast<double>(r[0]) / r[1];
            const auto li = locking_interval(fam, r[0], r[1], c - 0.2, c + 0.2, 1e-10);
            std::printf("  %d/%d  [%.10f, %.10f]  width %.3e\n", r[0], r[1], li.t_lo, li.t_hi, li.width());
        }
    }
}
