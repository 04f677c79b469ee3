#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace prandtl {

using Profile = std::vector<double>;
using CProfile = std::vector<std::complex<double>>;

// Uniform grid on the truncated half-line [0, L].
class Grid {
public:
    Grid(double length, std::size_t size);

    double length() const { return length_; }
    std::size_t size() const { return size_; }
    double spacing() const { return spacing_; }
    double y(std::size_t i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }

    // Index of the node nearest to y, clamped to the grid.
    std::size_t nearest(double y) const;
    // Largest index with node <= y (clamped).
    std::size_t floor_index(double y) const;

    // Smallest node count that supports every stencil in the library.
    static constexpr std::size_t min_size = 5;

private:
    double length_;
    std::size_t size_;
    double spacing_;
    std::vector<double> nodes_;
};

Grid build_grid(double L, std::size_t ny);

// Sample f at every node.
template <class F>
Profile sample(const Grid& g, F&& f) {
    Profile out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.y(i));
    return out;
}

// Second-order central differences, one-sided second order at the ends.
template <class T>
std::vector<T> diff1(const Grid& g, std::span<const T> f);
template <class T>
std::vector<T> diff2(const Grid& g, std::span<const T> f);

// Trapezoidal integral over [a, b] of the piecewise-linear interpolant.
template <class T>
T integrate(const Grid& g, std::span<const T> f, double a, double b);
template <class T>
T integrate(const Grid& g, std::span<const T> f) {
    return integrate(g, f, 0.0, g.length());
}

// F[i] = trapezoidal integral of f over [0, y_i].
template <class T>
std::vector<T> cumulative_integral(const Grid& g, std::span<const T> f);

// Fourth-order stencils. The residual checks use these as a more accurate
// reference operator than the one the stepper discretizes with.
namespace hi {
template <class T>
std::vector<T> diff1(const Grid& g, std::span<const T> f);
template <class T>
std::vector<T> diff2(const Grid& g, std::span<const T> f);
// Trapezoid with the Euler-Maclaurin end correction.
template <class T>
std::vector<T> cumulative_integral(const Grid& g, std::span<const T> f);
}  // namespace hi

// Cubic Lagrange interpolation of nodal data at y, with its y-derivative.
struct InterpValue {
    double value;
    double slope;
};
InterpValue interpolate(const Grid& g, std::span<const double> f, double y);

// Convenience overloads so callers can pass vectors directly.
inline Profile diff1(const Grid& g, const Profile& f) { return diff1<double>(g, f); }
inline CProfile diff1(const Grid& g, const CProfile& f) { return diff1<std::complex<double>>(g, f); }
inline Profile diff2(const Grid& g, const Profile& f) { return diff2<double>(g, f); }
inline CProfile diff2(const Grid& g, const CProfile& f) { return diff2<std::complex<double>>(g, f); }

double l2_norm(const Grid& g, std::span<const std::complex<double>> f);
double l2_norm(const Grid& g, std::span<const double> f);

// Thomas algorithm. sub[0] and sup[n-1] are ignored; rhs is overwritten.
template <class T>
void solve_tridiagonal(std::span<const T> sub, std::span<T> diag, std::span<const T> sup, std::span<T> rhs);

}  // namespace prandtl
