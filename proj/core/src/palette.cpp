#include "vcadslicer/palette.hpp"

#include <cmath>

#include "vcadslicer/machine.hpp"

namespace vcad {

Palette build_palette(int n, std::vector<std::string> materials) {
    if (n < 1)
        throw Error(errc::invalid_count, "palette needs at least one color");
    Palette p;
    p.n = n;
    p.materials = std::move(materials);
    p.alpha = 1.0 / n;
    for (int k = 1; k < n; ++k)
        p.boundaries.push_back(double(k) / n);
    for (int k = 0; k < n; ++k)
        p.midpoints.push_back((k + 0.5) / n);
    return p;
}

CommandState state_for_fraction(double m, const MachineProfile& profile) {
    CommandState s;
    s.kind = profile.syntax;
    s.fraction = m;
    switch (profile.syntax) {
    case SyntaxClass::mix:
        s.mix_a = 1.0 - m;
        s.mix_b = m;
        break;
    case SyntaxClass::multitool:
        s.tool = int(std::lround(m * (profile.tool_count - 1)));
        break;
    case SyntaxClass::temperature:
        s.temperature = profile.temp_low + m * (profile.temp_high - profile.temp_low);
        break;
    }
    return s;
}

CommandState map_color(const Palette& palette, int color, const MachineProfile& profile) {
    return state_for_fraction(palette.midpoint(color), profile);
}

std::vector<int> traversal_order(const Palette& palette, int layer_index, int components) {
    std::vector<int> order;
    if (components == 2 || palette.n == 1) {
        order.resize(size_t(palette.n));
        for (int i = 0; i < palette.n; ++i)
            order[size_t(i)] = i;
    } else if (components == 3) {
        // Rows of the subdivided barycentric triangle hold 1, 3, 5, ...
        // cells; a palette of m^2 colors has m rows. Row-major serpentine.
        int rows = int(std::lround(std::sqrt(double(palette.n))));
        if (rows * rows != palette.n)
            throw Error(errc::invalid_count,
                        "three-material palettes need a square color count (got " +
                            std::to_string(palette.n) + ")");
        for (int r = 0; r < rows; ++r) {
            int first = r * r;          // cells [r^2, (r+1)^2)
            int count = 2 * r + 1;
            if (r % 2 == 0)
                for (int i = 0; i < count; ++i)
                    order.push_back(first + i);
            else
                for (int i = count - 1; i >= 0; --i)
                    order.push_back(first + i);
        }
    } else {
        throw Error(errc::unsupported,
                    "traversal order supports 2 or 3 base materials, got " +
                        std::to_string(components));
    }
    if (layer_index % 2 == 1)
        std::reverse(order.begin(), order.end());
    return order;
}

ZipperSpec zipper_bands(const Palette& palette, double beta) {
    if (beta < 0.0)
        throw Error(errc::band_overlap, "zipper overlap must be non-negative");
    if (beta >= palette.alpha && palette.n > 1)
        throw Error(errc::band_overlap,
                    "zipper overlap " + std::to_string(beta) + " reaches the interval width " +
                        std::to_string(palette.alpha) + "; bands would touch");
    ZipperSpec spec;
    spec.beta = beta;
    for (double b : palette.boundaries)
        spec.bands.push_back({b - beta / 2, b + beta / 2});
    return spec;
}

} // namespace vcad
