#pragma once

#include <cstddef>
#include <vector>

#include "specwave/backend.hpp"

namespace specwave {

/// Level-n prefractal gasket graph in the plane (d = 2): measure-normalized
/// graph Laplacian with the 5^n time renormalization, vertex measures from
/// distributing each small triangle's mass equally to its corners.
struct SierpinskiGraph {
    std::vector<std::vector<double>> laplacian;  // 5^n * W^{-1}(D - Adj), w-self-adjoint
    std::vector<double> weights;                 // vertex measures, sum to 1
    double alpha_hint;                           // log2(3)/(2 log2(5))
    std::size_t vertex_count;
};

SierpinskiGraph sierpinski_laplacian(std::size_t level);

/// Convenience: matrix backend over the level-n prefractal.
BackendPtr build_sierpinski(std::size_t level);

}  // namespace specwave
