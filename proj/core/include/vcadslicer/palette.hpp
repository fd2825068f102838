#pragma once

#include <string>
#include <vector>

#include "vcadslicer/errors.hpp"

namespace vcad {

// N discrete process-parameter states ("colors") discretizing a continuous
// two-material gradient. Interval k covers [k/N, (k+1)/N) in fraction
// space, the last interval closed; its commanded value is the midpoint.
struct Palette {
    int n = 1;
    std::vector<std::string> materials;
    std::vector<double> boundaries; // k/N for k = 1..N-1, strictly increasing
    std::vector<double> midpoints;  // (k + 0.5)/N
    double alpha = 1.0;             // interval bandwidth, 1/N

    double midpoint(int color) const { return midpoints[size_t(color)]; }

    // Half-open interval binning; boundary values land in the upper
    // interval, fraction 1 in the last.
    int bin(double fraction) const {
        if (fraction <= 0.0)
            return 0;
        int k = int(fraction * n);
        return k >= n ? n - 1 : k;
    }
};

Palette build_palette(int n, std::vector<std::string> materials);

enum class SyntaxClass { mix, multitool, temperature };

struct CommandState {
    SyntaxClass kind = SyntaxClass::mix;
    double mix_a = 1.0, mix_b = 0.0; // mix: fractions, sum 1
    int tool = 0;                    // multitool
    double temperature = 0.0;        // temperature, degC
    // Gradient-space value behind this state (the interval midpoint);
    // simulators and previews key off this.
    double fraction = 0.0;

    bool operator==(const CommandState& o) const {
        return kind == o.kind && mix_a == o.mix_a && mix_b == o.mix_b && tool == o.tool &&
               temperature == o.temperature;
    }
    bool operator!=(const CommandState& o) const { return !(*this == o); }
};

struct MachineProfile; // machine.hpp

// Maps a palette color to the machine command state: mix -> (1-m, m),
// multitool -> round(m * (tools-1)), temperature -> T_lo + m (T_hi - T_lo).
CommandState map_color(const Palette& palette, int color, const MachineProfile& profile);
// Same mapping from a raw gradient fraction.
CommandState state_for_fraction(double m, const MachineProfile& profile);

// Per-layer color visiting order minimizing the mixture jump between
// consecutive regions. Two-material palettes sweep ascending midpoints on
// even layers and descending on odd; three-material palettes serpentine the
// barycentric triangle rows (N must be a perfect square), reversed on odd
// layers.
std::vector<int> traversal_order(const Palette& palette, int layer_index, int components = 2);

struct ZipperSpec {
    double beta = 0.0; // fraction-space overlap bandwidth
    struct Band {
        double lo, hi; // [boundary - beta/2, boundary + beta/2]
    };
    std::vector<Band> bands; // one per interior boundary

    bool enabled() const { return beta > 0.0; }
    // Band index containing the fraction, or -1.
    int band_at(double fraction) const {
        for (size_t i = 0; i < bands.size(); ++i)
            if (fraction >= bands[i].lo && fraction < bands[i].hi)
                return int(i);
        return -1;
    }
};

ZipperSpec zipper_bands(const Palette& palette, double beta);

} // namespace vcad
