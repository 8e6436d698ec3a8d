#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "polybandit/errors.hpp"
#include "polybandit/polytope.hpp"

namespace polybandit {

/// Random bounded polyhedron with M facets around a random center in
/// [-1, 1]^N: unit normals drawn isotropically, offsets uniform in
/// [0.5, 1.5] from the center. Draws are rejected until bounded.
template <typename Scalar = double, typename Rng>
Polyhedron<Scalar> random_polyhedron(Index n, Index m, Rng& rng, int max_attempts = 10000)
{
    if (n < 1 || m < n + 1)
        throw ConfigError("random_polyhedron: need N >= 1 and M >= N + 1 (got N=" + std::to_string(n) +
                          ", M=" + std::to_string(m) + ")");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Vector<Scalar> center(n);
        for (Index k = 0; k < n; ++k)
            center(k) = static_cast<Scalar>(2.0 * unit(rng) - 1.0);
        Matrix<Scalar> A(m, n);
        Vector<Scalar> b(m);
        for (Index i = 0; i < m; ++i) {
            for (Index k = 0; k < n; ++k)
                A(i, k) = static_cast<Scalar>(normal(rng));
            A.row(i).normalize();
            b(i) = A.row(i).dot(center) + static_cast<Scalar>(0.5 + unit(rng));
        }
        if (check_bounded(A, b))
            return Polyhedron<Scalar>(std::move(A), std::move(b));
    }
    throw ConfigError("random_polyhedron: no bounded draw after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace polybandit
