#include "protogrow/growth.hpp"

#include <cmath>

#include "protogrow/eig.hpp"

namespace protogrow::growth {

DirectionalSignal make_signal(const layer::TokenMatrix& z, const Matrix& m_a, bool whiten) {
    const std::size_t d = m_a.rows();
    if (m_a.cols() != d) throw std::invalid_argument("make_signal: m_a not square");
    if (z.dim() != d) throw std::invalid_argument("make_signal: token dimension mismatch");
    const double scale = std::max(la::max_abs(m_a), 1e-300);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (std::fabs(m_a(i, j) + m_a(j, i)) > 1e-12 * scale)
                throw std::invalid_argument("make_signal: m_a not antisymmetric");

    DirectionalSignal sig;
    sig.m_a = m_a;
    if (!whiten) {
        sig.c_half = Matrix::identity(d);
        sig.m_tilde = m_a;
        return sig;
    }

    // c_half = (Z^T Z / N)^{1/2} via the eigendecomposition of the second moment.
    Matrix c = la::matmul(la::transpose(z.z), z.z);
    const double inv_n = 1.0 / static_cast<double>(z.count());
    for (double& v : c.data()) v *= inv_n;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double s = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = c(j, i) = s;
        }
    const la::EigResult eg = la::sym_eig(c);
    Matrix half(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        const double root = std::sqrt(std::max(eg.values[a], 0.0));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                half(i, j) += root * eg.vectors(i, a) * eg.vectors(j, a);
    }
    sig.c_half = half;
    Matrix mt = la::matmul(half, la::matmul(m_a, half));
    // exact antisymmetrisation of the conjugation round-off
    for (std::size_t i = 0; i < d; ++i) {
        mt(i, i) = 0.0;
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = 0.5 * (mt(i, j) - mt(j, i));
            mt(i, j) = v;
            mt(j, i) = -v;
        }
    }
    sig.m_tilde = mt;
    return sig;
}

namespace {

Matrix project_out(const Matrix& m, const CapturedSubspace& sub) {
    if (sub.empty()) return m;
    const Matrix& q = sub.q_basis;
    const Matrix qt_m = la::matmul(la::transpose(q), m);      // 2H x d
    const Matrix m_q = la::matmul(m, q);                      // d x 2H
    const Matrix qt_m_q = la::matmul(qt_m, q);                // 2H x 2H
    Matrix out = m - la::matmul(q, qt_m) - la::matmul(m_q, la::transpose(q)) +
                 la::matmul(q, la::matmul(qt_m_q, la::transpose(q)));
    // the compression of an antisymmetric matrix is antisymmetric; pin it
    for (std::size_t i = 0; i < out.rows(); ++i) {
        out(i, i) = 0.0;
        for (std::size_t j = i + 1; j < out.cols(); ++j) {
            const double v = 0.5 * (out(i, j) - out(j, i));
            out(i, j) = v;
            out(j, i) = -v;
        }
    }
    return out;
}

}  // namespace

Matrix residual_projection(const DirectionalSignal& sig, const CapturedSubspace& sub) {
    return project_out(sig.m_tilde, sub);
}

ResidualReport residual_matrix(const DirectionalSignal& sig, const CapturedSubspace& sub) {
    const Matrix a_res = project_out(sig.m_tilde, sub);
    ResidualReport rep;
    rep.frob_sq = la::frobenius_norm_sq(a_res);
    const la::DominantPlane dp = la::antisym_dominant_plane(a_res);
    rep.lambda_max = dp.sigma1;
    rep.plane = dp.plane;
    return rep;
}

bool growth_trigger(const ResidualReport& report, double theta_w) {
    if (theta_w <= 0.0) throw std::invalid_argument("growth_trigger: theta_w must be > 0");
    return report.lambda_max > theta_w;
}

layer::PrototypeBank spawn_head(const ResidualReport& report, const layer::TokenMatrix& z,
                                std::size_t k_protos, double t_init, la::Rng& rng) {
    if (report.lambda_max <= 0.0) throw std::invalid_argument("spawn_head: no residual signal");
    if (k_protos < 2) throw std::invalid_argument("spawn_head: need k_protos >= 2");
    const std::size_t n = z.count(), d = z.dim();

    double ssq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = 0.0, b = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            a += z.z(i, c) * report.plane(c, 0);
            b += z.z(i, c) * report.plane(c, 1);
        }
        ssq += a * a + b * b;
    }
    const double radius = std::sqrt(ssq / (2.0 * static_cast<double>(n)));
    if (radius <= 1e-12)
        throw std::domain_error("spawn_head: zero token variance in plane");

    layer::PrototypeBank bank;
    bank.plane = report.plane;
    bank.temperature = t_init;
    bank.birth_lambda = report.lambda_max;
    bank.p = Matrix(k_protos, d);
    for (std::size_t j = 0; j < k_protos; ++j) {
        const double ang = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(k_protos);
        const double u = radius * std::cos(ang) + 1e-3 * radius * rng.normal();
        const double v = radius * std::sin(ang) + 1e-3 * radius * rng.normal();
        for (std::size_t c = 0; c < d; ++c)
            bank.p(j, c) = u * report.plane(c, 0) + v * report.plane(c, 1);
    }
    return bank;
}

double gamma_h(const layer::PrototypeBank& head, const DirectionalSignal& sig) {
    const double total = la::frobenius_norm(sig.m_tilde);
    if (total <= 0.0) throw std::invalid_argument("gamma_h: zero directional signal");
    // plane^T m_tilde plane is 2x2 antisymmetric; spectral norm = |off-diagonal|
    const Matrix mtp = la::matmul(sig.m_tilde, head.plane);          // d x 2
    const Matrix g2 = la::matmul(la::transpose(head.plane), mtp);    // 2 x 2
    const double c = 0.5 * (g2(0, 1) - g2(1, 0));
    return std::fabs(c) / total;
}

bool prune_check(const layer::PrototypeBank& head, const DirectionalSignal& sig, double phi_g) {
    return gamma_h(head, sig) < phi_g;
}

GateState make_gate(std::size_t dim, la::Rng& rng) {
    GateState g;
    g.u_plus.resize(dim);
    g.u_minus.resize(dim);
    for (auto& x : g.u_plus) x = rng.normal();
    for (auto& x : g.u_minus) x = rng.normal();
    const double np = la::norm(g.u_plus);
    for (auto& x : g.u_plus) x /= np;
    const double pr = la::dot(g.u_minus, g.u_plus);
    for (std::size_t i = 0; i < dim; ++i) g.u_minus[i] -= pr * g.u_plus[i];
    const double nm = la::norm(g.u_minus);
    for (auto& x : g.u_minus) x /= nm;
    return g;
}

GateState gate_update(const GateState& u, const Matrix& report_matrix, double eta_plus) {
    if (eta_plus <= 0.0) throw std::invalid_argument("gate_update: eta_plus must be > 0");
    if (la::norm(u.u_plus) <= 0.0 || la::norm(u.u_minus) <= 0.0)
        throw std::domain_error("gate_update: zero gate vector");

    auto apply_g = [&](const Vector& x) {
        const Vector rx = la::matvec(report_matrix, x);
        return la::matvec_t(report_matrix, rx);  // G x with G = R^T R
    };

    GateState out = u;
    const Vector gp = apply_g(u.u_plus);
    for (std::size_t i = 0; i < out.u_plus.size(); ++i) out.u_plus[i] += eta_plus * gp[i];
    const double np = la::norm(out.u_plus);
    if (np <= 0.0) throw std::domain_error("gate_update: collapsed gate vector");
    for (auto& x : out.u_plus) x /= np;

    const Vector gm = apply_g(u.u_minus);
    for (std::size_t i = 0; i < out.u_minus.size(); ++i) out.u_minus[i] += eta_plus * gm[i];
    const double pr = la::dot(out.u_minus, out.u_plus);
    for (std::size_t i = 0; i < out.u_minus.size(); ++i) out.u_minus[i] -= pr * out.u_plus[i];
    const double nm = la::norm(out.u_minus);
    if (nm <= 1e-300) throw std::domain_error("gate_update: rival direction collapsed");
    for (auto& x : out.u_minus) x /= nm;
    return out;
}

double directional_info_loss(const DirectionalSignal& sig, const CapturedSubspace& sub) {
    const double total = la::frobenius_norm(sig.m_tilde);
    if (total <= 0.0) throw std::invalid_argument("directional_info_loss: zero signal");
    const Matrix a_res = project_out(sig.m_tilde, sub);
    return la::frobenius_norm(a_res) / total;
}

}  // namespace protogrow::growth
