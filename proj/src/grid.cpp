#include "prandtl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "prandtl/error.hpp"

namespace prandtl {

namespace {

template <class T>
void check_size(const Grid& g, std::span<const T> f) {
    if (f.size() != g.size())
        throw std::invalid_argument("profile length " + std::to_string(f.size()) +
                                    " does not match grid size " + std::to_string(g.size()));
}

}  // namespace

Grid::Grid(double length, std::size_t size) : length_(length), size_(size) {
    if (!std::isfinite(length) || length <= 0.0)
        throw ValidationError("grid length must be finite and positive");
    if (size < min_size)
        throw ValidationError("grid needs at least " + std::to_string(min_size) + " nodes, got " +
                              std::to_string(size));
    spacing_ = length / static_cast<double>(size - 1);
    nodes_.resize(size);
    for (std::size_t i = 0; i < size; ++i) nodes_[i] = spacing_ * static_cast<double>(i);
    nodes_.back() = length;
}

std::size_t Grid::nearest(double y) const {
    const double r = std::round(y / spacing_);
    if (r <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(r), size_ - 1);
}

std::size_t Grid::floor_index(double y) const {
    const double r = std::floor(y / spacing_ + 1e-12);
    if (r <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(r), size_ - 1);
}

Grid build_grid(double L, std::size_t ny) { return Grid(L, ny); }

template <class T>
std::vector<T> diff1(const Grid& g, std::span<const T> f) {
    check_size(g, f);
    const std::size_t n = f.size();
    const double h = g.spacing();
    std::vector<T> out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return out;
}

template <class T>
std::vector<T> diff2(const Grid& g, std::span<const T> f) {
    check_size(g, f);
    const std::size_t n = f.size();
    const double h2 = g.spacing() * g.spacing();
    std::vector<T> out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return out;
}

template <class T>
T integrate(const Grid& g, std::span<const T> f, double a, double b) {
    check_size(g, f);
    if (!(a <= b)) throw std::invalid_argument("integrate: lower limit exceeds upper limit");
    const double tol = 1e-12 * g.length();
    if (a < -tol || b > g.length() + tol) throw std::invalid_argument("integrate: limits outside the grid");
    a = std::clamp(a, 0.0, g.length());
    b = std::clamp(b, 0.0, g.length());
    const double h = g.spacing();
    // Linear interpolant value at an arbitrary point.
    auto at = [&](double y) {
        std::size_t i = std::min(g.floor_index(y), g.size() - 2);
        const double s = (y - g.y(i)) / h;
        return (1.0 - s) * f[i] + s * f[i + 1];
    };
    const std::size_t ia = std::min(g.floor_index(a), g.size() - 2);
    const std::size_t ib = std::min(g.floor_index(b), g.size() - 2);
    if (ia == ib) return 0.5 * (at(a) + at(b)) * (b - a);
    // [a, y_{ia+1}] + full cells + [y_ib, b]
    T sum = 0.5 * (at(a) + f[ia + 1]) * (g.y(ia + 1) - a);
    for (std::size_t i = ia + 1; i < ib; ++i) sum += 0.5 * (f[i] + f[i + 1]) * h;
    sum += 0.5 * (f[ib] + at(b)) * (b - g.y(ib));
    return sum;
}

template <class T>
std::vector<T> cumulative_integral(const Grid& g, std::span<const T> f) {
    check_size(g, f);
    const double h = g.spacing();
    std::vector<T> out(f.size());
    out[0] = T{};
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

namespace hi {

template <class T>
std::vector<T> diff1(const Grid& g, std::span<const T> f) {
    check_size(g, f);
    const std::size_t n = f.size();
    const double h = g.spacing();
    std::vector<T> out(n);
    for (std::size_t i = 2; i + 2 < n; ++i)
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
    return out;
}

template <class T>
std::vector<T> diff2(const Grid& g, std::span<const T> f) {
    check_size(g, f);
    const std::size_t n = f.size();
    if (n < 6) return prandtl::diff2<T>(g, f);
    const double h2 = g.spacing() * g.spacing();
    std::vector<T> out(n);
    for (std::size_t i = 2; i + 2 < n; ++i)
        out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2);
    out[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / (12.0 * h2);
    out[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) / (12.0 * h2);
    out[n - 1] = (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5] -
                  10.0 * f[n - 6]) / (12.0 * h2);
    out[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] +
                  f[n - 6]) / (12.0 * h2);
    return out;
}

template <class T>
std::vector<T> cumulative_integral(const Grid& g, std::span<const T> f) {
    std::vector<T> out = prandtl::cumulative_integral<T>(g, f);
    const std::vector<T> df = hi::diff1<T>(g, f);
    const double c = g.spacing() * g.spacing() / 12.0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * (df[i] - df[0]);
    return out;
}

}  // namespace hi

InterpValue interpolate(const Grid& g, std::span<const double> f, double y) {
    check_size(g, f);
    const double h = g.spacing();
    std::size_t i = g.floor_index(y);
    // Four-point stencil i-1..i+2, shifted to stay inside the grid.
    std::size_t s = i == 0 ? 0 : i - 1;
    s = std::min(s, g.size() - 4);
    const double x = (y - g.y(s)) / h;  // local coordinate, nodes at 0,1,2,3
    double value = 0.0, slope = 0.0;
    for (int j = 0; j < 4; ++j) {
        double w = 1.0, dw = 0.0;
        for (int m = 0; m < 4; ++m) {
            if (m == j) continue;
            const double denom = static_cast<double>(j - m);
            double rest = 1.0;
            for (int q = 0; q < 4; ++q) {
                if (q == j || q == m) continue;
                rest *= (x - q) / static_cast<double>(j - q);
            }
            dw += rest / denom;
            w *= (x - m) / denom;
        }
        value += w * f[s + j];
        slope += dw * f[s + j];
    }
    return {value, slope / h};
}

double l2_norm(const Grid& g, std::span<const std::complex<double>> f) {
    Profile sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sq[i] = std::norm(f[i]);
    return std::sqrt(integrate<double>(g, sq));
}

double l2_norm(const Grid& g, std::span<const double> f) {
    Profile sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
    return std::sqrt(integrate<double>(g, sq));
}

template <class T>
void solve_tridiagonal(std::span<const T> sub, std::span<T> diag, std::span<const T> sup, std::span<T> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const T m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

#define PRANDTL_INSTANTIATE(T)                                                                       \
    template std::vector<T> diff1<T>(const Grid&, std::span<const T>);                              \
    template std::vector<T> diff2<T>(const Grid&, std::span<const T>);                              \
    template T integrate<T>(const Grid&, std::span<const T>, double, double);                       \
    template std::vector<T> cumulative_integral<T>(const Grid&, std::span<const T>);                \
    template std::vector<T> hi::diff1<T>(const Grid&, std::span<const T>);                          \
    template std::vector<T> hi::diff2<T>(const Grid&, std::span<const T>);                          \
    template std::vector<T> hi::cumulative_integral<T>(const Grid&, std::span<const T>);            \
    template void solve_tridiagonal<T>(std::span<const T>, std::span<T>, std::span<const T>, std::span<T>);

PRANDTL_INSTANTIATE(double)
PRANDTL_INSTANTIATE(std::complex<double>)

#undef PRANDTL_INSTANTIATE

}  // namespace prandtl
