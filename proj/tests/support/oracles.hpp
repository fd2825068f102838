#pragma once

#include <functional>
#include <vector>

namespace oracles {

// Independent face-count oracle: rasterize a labelling function on a fine
// pixel grid and flood-fill 4-connected regions of equal label whose label
// is marked countable. Pixels labelled < 0 are boundary/excluded.
inline int count_regions(const std::function<int(double, double)>& label, double x0, double y0,
                         double x1, double y1, int nx, int ny) {
    std::vector<int> img(size_t(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double x = x0 + (x1 - x0) * (i + 0.5) / nx;
            double y = y0 + (y1 - y0) * (j + 0.5) / ny;
            img[size_t(j) * nx + i] = label(x, y);
        }
    std::vector<char> seen(img.size(), 0);
    std::vector<int> stack;
    int regions = 0;
    for (size_t s = 0; s < img.size(); ++s) {
        if (seen[s] || img[s] < 0)
            continue;
        ++regions;
        stack.push_back(int(s));
        seen[s] = 1;
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            int i = p % nx, j = p / nx;
            int nbrs[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (auto& nb : nbrs) {
                if (nb[0] < 0 || nb[0] >= nx || nb[1] < 0 || nb[1] >= ny)
                    continue;
                size_t q = size_t(nb[1]) * nx + nb[0];
                if (!seen[q] && img[q] == img[p]) {
                    seen[q] = 1;
                    stack.push_back(int(q));
                }
            }
        }
    }
    return regions;
}

} // namespace oracles
