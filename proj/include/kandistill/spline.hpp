#pragma once

#include <span>
#include <vector>

namespace kandistill {

// Uniform B-spline knot layout for one KAN layer. The grid covers
// [domain_lo, domain_hi] with `grid_size` cells and is extended `order`
// knots past each end, which keeps the G+K basis functions a partition of
// unity over the whole domain.
struct SplineGrid {
    double domain_lo = -3.0;
    double domain_hi = 3.0;
    int grid_size = 50; // G, cells inside the domain
    int order = 1;      // K, spline degree
    std::vector<double> knots; // G + 2K + 1 values, uniform spacing

    static SplineGrid make(double domain_lo, double domain_hi, int grid_size, int order);

    int basis_count() const { return grid_size + order; }
    double spacing() const { return (domain_hi - domain_lo) / grid_size; }
};

// Inputs outside the domain are clamped to its boundary before evaluation.
double clamp_to_domain(const SplineGrid& grid, double x);

// All basis values B_i(x), length basis_count(). Entries are >= 0 and sum
// to 1 for x inside the domain.
std::vector<double> basis_values(const SplineGrid& grid, double x);

// All first derivatives dB_i/dx, length basis_count(). Zero everywhere for
// order 0; entries sum to 0 inside the domain otherwise.
std::vector<double> basis_derivatives(const SplineGrid& grid, double x);

// Hot-path kernels: write the order+1 (possibly) nonzero values into `out`
// and return the index of the first one. `out` must hold order+1 doubles.
int basis_nonzero(const SplineGrid& grid, double x, std::span<double> out);
int basis_nonzero_derivatives(const SplineGrid& grid, double x, std::span<double> out);

} // namespace kandistill
