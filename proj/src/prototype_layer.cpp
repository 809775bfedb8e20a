#include "protogrow/prototype_layer.hpp"

#include <cmath>
#include <limits>

namespace protogrow::layer {

namespace {

void check_unit(const Vector& u) {
    if (std::fabs(la::norm(u) - 1.0) > 1e-10)
        throw std::invalid_argument("u_star must be a unit vector");
}

}  // namespace

Matrix squared_distances(const TokenMatrix& z, const PrototypeBank& bank) {
    const std::size_t n = z.count(), k = bank.prototype_count(), d = z.dim();
    if (bank.dim() != d) throw std::invalid_argument("squared_distances: dimension mismatch");
    Matrix d2(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* zi = z.z.row(i);
        for (std::size_t j = 0; j < k; ++j) {
            const double* pj = bank.p.row(j);
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = zi[c] - pj[c];
                s += diff * diff;
            }
            d2(i, j) = s;
        }
    }
    return d2;
}

AssignmentMatrix soft_assign_from_distances(const Matrix& d2, double temperature) {
    if (temperature <= 0.0) throw std::invalid_argument("soft_assign: temperature must be > 0");
    const std::size_t n = d2.rows(), k = d2.cols();
    AssignmentMatrix out;
    out.q = Matrix(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double lo = d2(i, 0);
        for (std::size_t j = 1; j < k; ++j) lo = std::min(lo, d2(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double e = std::exp(-(d2(i, j) - lo) / temperature);
            out.q(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < k; ++j) out.q(i, j) /= sum;
    }
    return out;
}

AssignmentMatrix soft_assign(const TokenMatrix& z, const PrototypeBank& bank) {
    return soft_assign_from_distances(squared_distances(z, bank), bank.temperature);
}

Matrix soft_centroids(const AssignmentMatrix& q, const PrototypeBank& bank) {
    if (q.q.cols() != bank.prototype_count())
        throw std::invalid_argument("soft_centroids: shape mismatch");
    return la::matmul(q.q, bank.p);
}

double loss_lq(const TokenMatrix& z, const PrototypeBank& bank) {
    const Matrix d2 = squared_distances(z, bank);
    const AssignmentMatrix q = soft_assign_from_distances(d2, bank.temperature);
    double s = 0.0;
    for (std::size_t i = 0; i < d2.rows(); ++i)
        for (std::size_t j = 0; j < d2.cols(); ++j) s += q.q(i, j) * d2(i, j);
    return s;
}

LossDecomposition loss_decomposition(const TokenMatrix& z, const PrototypeBank& bank) {
    const Matrix d2 = squared_distances(z, bank);
    const AssignmentMatrix qm = soft_assign_from_distances(d2, bank.temperature);
    const Matrix mu = soft_centroids(qm, bank);
    const std::size_t n = z.count(), k = bank.prototype_count(), d = z.dim();

    LossDecomposition out;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = z.z(i, c) - mu(i, c);
            fit += diff * diff;
        }
        out.l_fit += fit;

        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) best = std::min(best, d2(i, j));
        out.l_ols += best;

        for (std::size_t j = 0; j < k; ++j) {
            double sep = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = bank.p(j, c) - mu(i, c);
                sep += diff * diff;
            }
            out.v_sep += qm.q(i, j) * sep;
        }
    }
    return out;
}

Matrix sigma_q(const AssignmentMatrix& q) {
    const std::size_t n = q.q.rows(), k = q.q.cols();
    Matrix s(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* qi = q.q.row(i);
        for (std::size_t a = 0; a < k; ++a) {
            s(a, a) += qi[a];
            for (std::size_t b = 0; b < k; ++b) s(a, b) -= qi[a] * qi[b];
        }
    }
    return s;
}

Matrix grad_prototypes(const TokenMatrix& z, const PrototypeBank& bank) {
    const Matrix d2 = squared_distances(z, bank);
    const AssignmentMatrix qm = soft_assign_from_distances(d2, bank.temperature);
    const std::size_t n = z.count(), k = bank.prototype_count(), d = z.dim();
    const double T = bank.temperature;

    // dL/dp_j = sum_n 2 q_nj (p_j - z_n) [1 + (Dbar_n - D_nj)/T]
    Matrix g(k, d);
    for (std::size_t i = 0; i < n; ++i) {
        double dbar = 0.0;
        for (std::size_t j = 0; j < k; ++j) dbar += qm.q(i, j) * d2(i, j);
        const double* zi = z.z.row(i);
        for (std::size_t j = 0; j < k; ++j) {
            const double w = 2.0 * qm.q(i, j) * (1.0 + (dbar - d2(i, j)) / T);
            const double* pj = bank.p.row(j);
            double* gj = g.row(j);
            for (std::size_t c = 0; c < d; ++c) gj[c] += w * (pj[c] - zi[c]);
        }
    }
    return g;
}

Matrix grad_v(const PrototypeBank& bank, const Matrix& sq) {
    if (sq.rows() != bank.prototype_count() || sq.cols() != bank.prototype_count())
        throw std::invalid_argument("grad_v: Sigma_q shape mismatch");
    return 2.0 * la::matmul(sq, bank.p);
}

double separation_force_from_assignments(const AssignmentMatrix& q, const PrototypeBank& bank) {
    const Matrix mu = soft_centroids(q, bank);
    const std::size_t n = q.q.rows(), k = q.q.cols(), d = bank.dim();
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        Vector r(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double qij = q.q(i, j);
            const double* pj = bank.p.row(j);
            const double* mi = mu.row(i);
            for (std::size_t c = 0; c < d; ++c) r[c] += qij * (pj[c] - mi[c]);
        }
        total += la::dot(r, r);
    }
    return 4.0 * total;
}

double separation_force(const TokenMatrix& z, const PrototypeBank& bank) {
    return separation_force_from_assignments(soft_assign(z, bank), bank);
}

double prototype_spread(const PrototypeBank& bank) {
    const std::size_t k = bank.prototype_count(), d = bank.dim();
    if (k < 2) throw std::invalid_argument("prototype_spread: need K >= 2");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = bank.p(a, c) - bank.p(b, c);
                s += diff * diff;
            }
            best = std::min(best, s);
        }
    return std::sqrt(best);
}

double effective_scale_from(const AssignmentMatrix& q, const Matrix& d2) {
    const std::size_t n = d2.rows(), k = d2.cols();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double w = q.q(i, j), v = d2(i, j);
            m1 += w * v;
            m2 += w * v * v;
        }
        acc += m2 - m1 * m1;
    }
    return acc / static_cast<double>(n);
}

double effective_scale(const TokenMatrix& z, const PrototypeBank& bank) {
    const Matrix d2 = squared_distances(z, bank);
    return effective_scale_from(soft_assign_from_distances(d2, bank.temperature), d2);
}

double grad_temperature(const TokenMatrix& z, const PrototypeBank& bank) {
    if (bank.temperature <= 0.0) throw std::invalid_argument("grad_temperature: T must be > 0");
    const Matrix d2 = squared_distances(z, bank);
    const AssignmentMatrix q = soft_assign_from_distances(d2, bank.temperature);
    const double n = static_cast<double>(z.count());
    return n * effective_scale_from(q, d2) / (bank.temperature * bank.temperature);
}

namespace {

struct Projections {
    Vector alpha;   // <z_n, u*>
    Vector pstar;   // <p_k, u*>
};

Projections project(const TokenMatrix& z, const PrototypeBank& bank, const Vector& u) {
    Projections pr;
    pr.alpha = la::matvec(z.z, u);
    pr.pstar = la::matvec(bank.p, u);
    return pr;
}

}  // namespace

Matrix assignment_first_variation(const TokenMatrix& z, const PrototypeBank& bank,
                                  const Vector& u_star) {
    check_unit(u_star);
    const AssignmentMatrix qm = soft_assign(z, bank);
    const Projections pr = project(z, bank, u_star);
    const std::size_t n = z.count(), k = bank.prototype_count();
    const double T = bank.temperature;

    Matrix dq(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double pbar = 0.0;
        for (std::size_t j = 0; j < k; ++j) pbar += qm.q(i, j) * pr.pstar[j];
        const double f = 2.0 * pr.alpha[i] / T;
        for (std::size_t j = 0; j < k; ++j)
            dq(i, j) = f * qm.q(i, j) * (pr.pstar[j] - pbar);
    }
    return dq;
}

Matrix assignment_second_variation(const TokenMatrix& z, const PrototypeBank& bank,
                                   const Vector& u_star) {
    check_unit(u_star);
    const AssignmentMatrix qm = soft_assign(z, bank);
    const Projections pr = project(z, bank, u_star);
    const std::size_t n = z.count(), k = bank.prototype_count();
    const double T = bank.temperature;

    Matrix ddq(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double pbar = 0.0, psq = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            pbar += qm.q(i, j) * pr.pstar[j];
            psq += qm.q(i, j) * pr.pstar[j] * pr.pstar[j];
        }
        const double var = psq - pbar * pbar;
        const double f = 4.0 * pr.alpha[i] * pr.alpha[i] / (T * T);
        for (std::size_t j = 0; j < k; ++j) {
            const double dev = pr.pstar[j] - pbar;
            ddq(i, j) = f * qm.q(i, j) * (dev * dev - var);
        }
    }
    return ddq;
}

PhiCurve phi_curve(const TokenMatrix& z, const PrototypeBank& bank, const Vector& u_star,
                   const Vector& epsilons) {
    check_unit(u_star);
    const Matrix d0 = squared_distances(z, bank);
    const Projections pr = project(z, bank, u_star);
    const std::size_t n = z.count(), k = bank.prototype_count();
    const double T = bank.temperature;

    // ||z_n + eps a_n u - p_k||^2 = D0 + 2 eps a_n <z_n - p_k, u> + eps^2 a_n^2
    auto force_at = [&](double eps) {
        Matrix d2(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = pr.alpha[i];
            for (std::size_t j = 0; j < k; ++j)
                d2(i, j) = d0(i, j) + 2.0 * eps * a * (a - pr.pstar[j]) + eps * eps * a * a;
        }
        return separation_force_from_assignments(soft_assign_from_distances(d2, T), bank);
    };

    PhiCurve out;
    out.values.reserve(epsilons.size());
    for (double e : epsilons) out.values.push_back(force_at(e));

    const double h = 1e-4;
    const double f0 = force_at(0.0), fp = force_at(h), fm = force_at(-h);
    out.d1 = (fp - fm) / (2.0 * h);
    out.d2 = (fp - 2.0 * f0 + fm) / (h * h);

    // Lower-bound constants, all measured from the instance itself.
    const AssignmentMatrix qm = soft_assign_from_distances(d0, T);
    const Matrix mu = soft_centroids(qm, bank);
    double var_bar = 0.0, var_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pbar = 0.0, psq = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            pbar += qm.q(i, j) * pr.pstar[j];
            psq += qm.q(i, j) * pr.pstar[j] * pr.pstar[j];
        }
        const double var = psq - pbar * pbar;
        var_bar += var;
        var_max = std::max(var_max, var);
    }
    var_bar /= static_cast<double>(n);

    double dmax_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < z.dim(); ++c) {
                const double diff = bank.p(j, c) - mu(i, c);
                s += diff * diff;
            }
            dmax_sq = std::max(dmax_sq, s);
        }

    double alpha_inf = 0.0, lam = 0.0;
    for (double a : pr.alpha) {
        alpha_inf = std::max(alpha_inf, std::fabs(a));
        lam += a * a;  // ||Z u*||^2
    }
    const double s0 = (k >= 2) ? prototype_spread(bank) : 0.0;
    const double c0 = alpha_inf * alpha_inf * var_max * static_cast<double>(n) * dmax_sq;
    const double kk = static_cast<double>(k);
    out.d2_lower_bound = (32.0 / (T * T)) * (s0 * s0 * lam * var_bar / (kk * kk) - c0);
    return out;
}

Vector residual_covariance_ck(const TokenMatrix& z, const PrototypeBank& bank,
                              const Vector& u_star) {
    check_unit(u_star);
    const AssignmentMatrix qm = soft_assign(z, bank);
    const Projections pr = project(z, bank, u_star);
    const std::size_t n = z.count(), k = bank.prototype_count();

    Vector ck(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double pbar = 0.0;
        for (std::size_t j = 0; j < k; ++j) pbar += qm.q(i, j) * pr.pstar[j];
        for (std::size_t j = 0; j < k; ++j) ck[j] += pr.alpha[i] * (pr.pstar[j] - pbar);
    }
    return ck;
}

}  // namespace protogrow::layer
