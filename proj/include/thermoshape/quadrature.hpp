#pragma once
// Quadrature tables.  Triangle rules are given in barycentric coordinates
// with weights summing to one (multiply by the cell area); segment rules are
// on [0, 1] with weights summing to one (multiply by the edge length).

#include <array>
#include <cstddef>

namespace thermoshape::quad {

struct TriPoint {
    double l0, l1, l2;  // barycentric coordinates
    double w;
};

struct SegPoint {
    double t;
    double w;
};

// Edge-midpoint rule, exact for polynomials of degree 2.
inline constexpr std::array<TriPoint, 3> tri_midpoint{{
    {0.5, 0.5, 0.0, 1.0 / 3.0},
    {0.0, 0.5, 0.5, 1.0 / 3.0},
    {0.5, 0.0, 0.5, 1.0 / 3.0},
}};

// Radon 7-point rule, exact for polynomials of degree 5.
inline constexpr std::array<TriPoint, 7> tri_degree5{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
}};

// Gauss rules on [0, 1].
inline constexpr std::array<SegPoint, 2> seg_gauss2{{
    {0.5 - 0.28867513459481287, 0.5},
    {0.5 + 0.28867513459481287, 0.5},
}};

inline constexpr std::array<SegPoint, 3> seg_gauss3{{
    {0.5 - 0.3872983346207417, 5.0 / 18.0},
    {0.5, 8.0 / 18.0},
    {0.5 + 0.3872983346207417, 5.0 / 18.0},
}};

}  // namespace thermoshape::quad
