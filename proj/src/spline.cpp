#include "kandistill/spline.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "kandistill/errors.hpp"

namespace kandistill {

SplineGrid SplineGrid::make(double domain_lo, double domain_hi, int grid_size, int order) {
    if (!std::isfinite(domain_lo) || !std::isfinite(domain_hi) || !(domain_lo < domain_hi)) {
        throw InvalidArgument("spline grid requires finite domain_lo < domain_hi");
    }
    if (grid_size < 1) throw InvalidArgument("spline grid_size must be >= 1");
    if (order < 0) throw InvalidArgument("spline order must be >= 0");

    SplineGrid g;
    g.domain_lo = domain_lo;
    g.domain_hi = domain_hi;
    g.grid_size = grid_size;
    g.order = order;
    const double h = (domain_hi - domain_lo) / grid_size;
    g.knots.resize(static_cast<std::size_t>(grid_size + 2 * order + 1));
    for (int i = 0; i < static_cast<int>(g.knots.size()); ++i) {
        g.knots[static_cast<std::size_t>(i)] = domain_lo + (i - order) * h;
    }
    return g;
}

double clamp_to_domain(const SplineGrid& grid, double x) {
    return std::min(std::max(x, grid.domain_lo), grid.domain_hi);
}

namespace {

// Knot-span index m with knots[m] <= x < knots[m+1], restricted to the
// domain cells so x == domain_hi lands in the last cell.
int find_span(const SplineGrid& g, double x) {
    const double h = g.spacing();
    int cell = static_cast<int>((x - g.domain_lo) / h);
    cell = std::clamp(cell, 0, g.grid_size - 1);
    // Guard against float rounding at cell boundaries.
    const int base = g.order;
    if (x < g.knots[static_cast<std::size_t>(base + cell)] && cell > 0) --cell;
    if (cell + 1 < g.grid_size && x >= g.knots[static_cast<std::size_t>(base + cell + 1)]) ++cell;
    return base + cell;
}

// Cox-de Boor triangular scheme: the order+1 nonzero basis values at span m.
void basis_funs(const SplineGrid& g, int m, double x, std::span<double> out) {
    const int k = g.order;
    thread_local std::vector<double> left, right;
    left.assign(static_cast<std::size_t>(k + 1), 0.0);
    right.assign(static_cast<std::size_t>(k + 1), 0.0);

    out[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
        left[static_cast<std::size_t>(j)] = x - g.knots[static_cast<std::size_t>(m + 1 - j)];
        right[static_cast<std::size_t>(j)] = g.knots[static_cast<std::size_t>(m + j)] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            const double temp = out[static_cast<std::size_t>(r)] / denom;
            out[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        out[static_cast<std::size_t>(j)] = saved;
    }
}

void check_input(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("spline input must be finite");
}

} // namespace

int basis_nonzero(const SplineGrid& grid, double x, std::span<double> out) {
    check_input(x);
    assert(out.size() >= static_cast<std::size_t>(grid.order + 1));
    x = clamp_to_domain(grid, x);
    const int m = find_span(grid, x);
    basis_funs(grid, m, x, out);
    return m - grid.order;
}

int basis_nonzero_derivatives(const SplineGrid& grid, double x, std::span<double> out) {
    check_input(x);
    const int k = grid.order;
    assert(out.size() >= static_cast<std::size_t>(k + 1));
    x = clamp_to_domain(grid, x);
    const int m = find_span(grid, x);
    if (k == 0) {
        out[0] = 0.0;
        return m;
    }

    // Degree k-1 values at the same span, then
    // dB_{i,k} = (B_{i,k-1} - B_{i+1,k-1}) / h on a uniform grid.
    thread_local std::vector<double> lower;
    lower.assign(static_cast<std::size_t>(k), 0.0);
    {
        SplineGrid view = grid; // share knots, evaluate one degree down
        view.order = k - 1;
        // Degree k-1 nonzero values at span m are B_{m-k+1..m, k-1}.
        basis_funs(view, m, x, lower);
    }
    const double h = grid.spacing();
    for (int j = 0; j <= k; ++j) {
        const double a = (j >= 1) ? lower[static_cast<std::size_t>(j - 1)] : 0.0;
        const double b = (j < k) ? lower[static_cast<std::size_t>(j)] : 0.0;
        out[static_cast<std::size_t>(j)] = (a - b) / h;
    }
    return m - k;
}

std::vector<double> basis_values(const SplineGrid& grid, double x) {
    std::vector<double> all(static_cast<std::size_t>(grid.basis_count()), 0.0);
    thread_local std::vector<double> local;
    local.assign(static_cast<std::size_t>(grid.order + 1), 0.0);
    const int first = basis_nonzero(grid, x, local);
    for (int j = 0; j <= grid.order; ++j) {
        all[static_cast<std::size_t>(first + j)] = local[static_cast<std::size_t>(j)];
    }
    return all;
}

std::vector<double> basis_derivatives(const SplineGrid& grid, double x) {
    std::vector<double> all(static_cast<std::size_t>(grid.basis_count()), 0.0);
    if (grid.order == 0) {
        check_input(x);
        return all;
    }
    thread_local std::vector<double> local;
    local.assign(static_cast<std::size_t>(grid.order + 1), 0.0);
    const int first = basis_nonzero_derivatives(grid, x, local);
    for (int j = 0; j <= grid.order; ++j) {
        all[static_cast<std::size_t>(first + j)] = local[static_cast<std::size_t>(j)];
    }
    return all;
}

} // namespace kandistill
