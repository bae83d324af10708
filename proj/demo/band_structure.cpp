// Imaginary-axis band structure as m grows (A = 2), then the bands near the
// origin as A passes through 4 at m = 0.5.

#include <cstdio>

#include "fbzs/spectrum.hpp"

using namespace fbzs;

namespace {

void print_bands(double A, double m, int grid) {
    PotentialSpec s(A, m);
    ScanOptions o;
    o.grid = grid;
    auto rep = classify(s, band_edges_ode(s, o).edges);
    std::printf("A=%-9g m=%-4g bands=%-2d genus=%-2d central gap=%s\n", A, m, rep.band_count, rep.genus,
                rep.central_gap_present ? "yes" : "no ");
    for (const Segment& b : rep.bands)
        std::printf("    band  %s[%.6f, %.6f]i\n", b.symmetric ? "+-" : "  ", b.lo, b.hi);
}

} // namespace

int main() {
    for (double m : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9}) print_bands(2, m, 800);
    std::printf("\n");
    for (double A : {3.99, 3.9985, 3.999249, 3.9996, 4.0, 4.1, 4.2}) print_bands(A, 0.5, 1500);
}
