#include "protogrow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace protogrow::la {

Vector finite_diff(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff: h must be positive");
    Vector g(x.size());
    Vector xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::domain_error("finite_diff: non-finite function value");
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double finite_diff_scalar(const std::function<double(double)>& f, double x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_diff_scalar: h must be positive");
    const double fp = f(x + h), fm = f(x - h);
    if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::domain_error("finite_diff_scalar: non-finite function value");
    return (fp - fm) / (2.0 * h);
}

namespace {

Vector average_ranks(const Vector& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    Vector r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const Vector& xs, const Vector& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("spearman: need at least 2 points");
    for (double v : xs)
        if (std::isnan(v)) throw std::invalid_argument("spearman: NaN input");
    for (double v : ys)
        if (std::isnan(v)) throw std::invalid_argument("spearman: NaN input");

    const Vector rx = average_ranks(xs), ry = average_ranks(ys);
    const std::size_t n = rx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::domain_error("spearman: zero rank variance");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace protogrow::la
