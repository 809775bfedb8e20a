#include "protogrow/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace protogrow::la {

namespace {

void canonicalise_sign(Matrix& v, std::size_t col) {
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const double x = v(i, col);
        if (std::fabs(x) > 1e-12) {
            if (x < 0.0)
                for (std::size_t r = 0; r < v.rows(); ++r) v(r, col) = -v(r, col);
            return;
        }
    }
}

}  // namespace

EigResult sym_eig(const Matrix& input) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw std::invalid_argument("sym_eig: matrix not square");
    const double scale = std::max(max_abs(input), 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(input(i, j) - input(j, i)) > 1e-12 * scale)
                throw std::invalid_argument("sym_eig: matrix not symmetric");

    Matrix a = input;
    Matrix v = Matrix::identity(n);

    // Cyclic Jacobi. Fine for the dense sizes this library handles.
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-14 * scale * n) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double app = a(p, p), aqq = a(q, q);
                const double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
                const double c = std::cos(theta), s = std::sin(theta);

                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a(p, r), aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                a(p, q) = a(q, p) = 0.5 * (a(p, q) + a(q, p));  // symmetrise round-off
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigResult res;
    res.values.resize(n);
    res.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        res.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) res.vectors(r, k) = v(r, order[k]);
        canonicalise_sign(res.vectors, k);
    }
    return res;
}

DominantPlane antisym_dominant_plane(const Matrix& a) {
    const std::size_t d = a.rows();
    if (a.cols() != d) throw std::invalid_argument("antisym_dominant_plane: not square");
    const double scale = std::max(max_abs(a), 1e-300);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (std::fabs(a(i, j) + a(j, i)) > 1e-12 * scale)
                throw std::invalid_argument("antisym_dominant_plane: matrix not antisymmetric");

    DominantPlane out;
    out.plane = Matrix(d, 2);
    if (d < 2) throw std::invalid_argument("antisym_dominant_plane: need d >= 2");

    const Matrix g = matmul(transpose(a), a);  // = -a^2, symmetric PSD
    const EigResult eg = sym_eig(g);
    const double lam = std::max(eg.values[0], 0.0);
    out.sigma1 = std::sqrt(lam);
    if (out.sigma1 <= 1e-13 * scale || out.sigma1 == 0.0) {
        out.sigma1 = 0.0;
        out.plane(0, 0) = 1.0;
        out.plane(1, 1) = 1.0;
        return out;
    }

    // v1 spans a rotation plane of a together with a*v1/sigma1, which is
    // orthogonal to v1 for antisymmetric a.
    Vector v1(d);
    for (std::size_t i = 0; i < d; ++i) v1[i] = eg.vectors(i, 0);
    Vector w = matvec(a, v1);
    for (double& x : w) x /= out.sigma1;
    const double proj = dot(w, v1);
    for (std::size_t i = 0; i < d; ++i) w[i] -= proj * v1[i];
    const double wn = norm(w);
    if (wn <= 1e-12) throw std::domain_error("antisym_dominant_plane: degenerate rotation pair");
    for (double& x : w) x /= wn;

    for (std::size_t i = 0; i < d; ++i) {
        out.plane(i, 0) = v1[i];
        out.plane(i, 1) = w[i];
    }
    canonicalise_sign(out.plane, 0);
    canonicalise_sign(out.plane, 1);
    return out;
}

Matrix gram_schmidt_extend(const Matrix& basis, const Matrix& new_cols) {
    const std::size_t d = basis.rows();
    const std::size_t k = basis.cols();
    if (new_cols.rows() != d)
        throw std::invalid_argument("gram_schmidt_extend: row count mismatch");

    Matrix out(d, k + new_cols.cols());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < k; ++j) out(i, j) = basis(i, j);

    for (std::size_t c = 0; c < new_cols.cols(); ++c) {
        Vector v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = new_cols(i, c);
        const double n0 = norm(v);
        if (n0 <= 0.0) throw std::domain_error("gram_schmidt_extend: zero column");

        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < k + c; ++j) {
                double p = 0.0;
                for (std::size_t i = 0; i < d; ++i) p += out(i, j) * v[i];
                for (std::size_t i = 0; i < d; ++i) v[i] -= p * out(i, j);
            }
        }
        const double n1 = norm(v);
        if (n1 <= 1e-8 * n0)
            throw std::domain_error("gram_schmidt_extend: column numerically in span");
        for (std::size_t i = 0; i < d; ++i) out(i, k + c) = v[i] / n1;
    }
    return out;
}

Matrix gram_schmidt(const Matrix& cols) {
    Matrix first = columns(cols, 0, 1);
    const double n = frobenius_norm(first);
    if (n <= 0.0) throw std::domain_error("gram_schmidt: zero first column");
    for (double& x : first.data()) x /= n;
    if (cols.cols() == 1) return first;
    return gram_schmidt_extend(first, columns(cols, 1, cols.cols() - 1));
}

}  // namespace protogrow::la
