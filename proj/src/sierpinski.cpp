#include "specwave/sierpinski.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace specwave {

namespace {

// Integer lattice coordinates at resolution 2^level keep vertex
// identification exact during subdivision.
using Point = std::array<std::int64_t, 2>;

struct Builder {
    std::map<Point, std::size_t> index;
    std::vector<Point> points;

    std::size_t get(const Point& p) {
        auto it = index.find(p);
        if (it != index.end()) return it->second;
        const std::size_t id = points.size();
        index.emplace(p, id);
        points.push_back(p);
        return id;
    }
};

Point midpoint(const Point& a, const Point& b) {
    return Point{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
}

}  // namespace

SierpinskiGraph sierpinski_laplacian(std::size_t level) {
    if (level < 1 || level > 9) {
        throw std::invalid_argument("sierpinski_laplacian: level must be in [1, 9]");
    }
    const std::int64_t res = std::int64_t{1} << level;
    Builder b;
    // Base triangle scaled so all midpoints stay integral: (0,0), (2R,0), (R,R).
    std::vector<std::array<std::size_t, 3>> tris = {
        {b.get({0, 0}), b.get({2 * res, 0}), b.get({res, res})}};
    for (std::size_t l = 0; l < level; ++l) {
        std::vector<std::array<std::size_t, 3>> next;
        next.reserve(tris.size() * 3);
        for (const auto& t : tris) {
            const Point A = b.points[t[0]], B = b.points[t[1]], C = b.points[t[2]];
            const std::size_t ab = b.get(midpoint(A, B));
            const std::size_t bc = b.get(midpoint(B, C));
            const std::size_t ca = b.get(midpoint(C, A));
            next.push_back({t[0], ab, ca});
            next.push_back({ab, t[1], bc});
            next.push_back({ca, bc, t[2]});
        }
        tris = std::move(next);
    }

    const std::size_t n = b.points.size();
    std::vector<std::vector<double>> adj(n, std::vector<double>(n, 0.0));
    std::vector<double> tri_count(n, 0.0);
    for (const auto& t : tris) {
        const std::size_t v[3] = {t[0], t[1], t[2]};
        for (int e = 0; e < 3; ++e) {
            adj[v[e]][v[(e + 1) % 3]] = 1.0;
            adj[v[(e + 1) % 3]][v[e]] = 1.0;
        }
        for (int e = 0; e < 3; ++e) tri_count[v[e]] += 1.0;
    }

    SierpinskiGraph g;
    g.vertex_count = n;
    g.weights.resize(n);
    const double cell = std::pow(3.0, -static_cast<double>(level));
    for (std::size_t i = 0; i < n; ++i) g.weights[i] = tri_count[i] / 3.0 * cell;

    const double renorm = std::pow(5.0, static_cast<double>(level));
    g.laplacian.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += adj[i][j];
        const double inv_rel_w = 3.0 / tri_count[i];  // relative measure within one level
        for (std::size_t j = 0; j < n; ++j) {
            g.laplacian[i][j] = renorm * inv_rel_w * ((i == j ? deg : 0.0) - adj[i][j]);
        }
    }
    g.alpha_hint = std::log2(3.0) / (2.0 * std::log2(5.0));  // D_SG/(2m), d = 2
    return g;
}

BackendPtr build_sierpinski(std::size_t level) {
    const SierpinskiGraph g = sierpinski_laplacian(level);
    return build_matrix_backend(g.laplacian, g.weights, g.alpha_hint);
}

}  // namespace specwave
