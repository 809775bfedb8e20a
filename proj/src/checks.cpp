#include "protogrow/checks.hpp"

#include <cmath>

#include "protogrow/eig.hpp"
#include "protogrow/numerics.hpp"
#include "protogrow/dynamics.hpp"

namespace protogrow::checks {

using la::Matrix;
using la::Rng;
using la::Vector;

layer::TokenMatrix random_tokens(std::size_t n, std::size_t d, Rng& rng, double scale) {
    layer::TokenMatrix z;
    z.z = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) z.z(i, j) = scale * rng.normal();
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += z.z(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) z.z(i, j) -= mean;
    }
    return z;
}

layer::PrototypeBank random_bank(std::size_t k, std::size_t d, double temperature, Rng& rng,
                                 double scale) {
    layer::PrototypeBank b;
    b.temperature = temperature;
    b.p = Matrix(k, d);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < d; ++j) b.p(i, j) = scale * rng.normal();
    b.plane = Matrix(d, 2);
    b.plane(0, 0) = 1.0;
    b.plane(1, 1) = 1.0;
    return b;
}

Matrix random_antisymmetric(std::size_t d, Rng& rng) {
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = rng.normal();
            a(i, j) = v;
            a(j, i) = -v;
        }
    return a;
}

Matrix random_symmetric(std::size_t d, Rng& rng) {
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        a(i, i) = rng.normal();
        for (std::size_t j = i + 1; j < d; ++j) {
            const double v = rng.normal();
            a(i, j) = a(j, i) = v;
        }
    }
    return a;
}

PropertyResult check_sym_eig_reconstruction(std::size_t trials, Rng& rng) {
    PropertyResult r{"sym_eig reconstruction", true, 0.0, 1e-9, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t d = 2 + rng.below(63);
        const Matrix a = random_symmetric(d, rng);
        const la::EigResult eg = la::sym_eig(a);
        Matrix rec(d, d);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    rec(i, j) += eg.values[k] * eg.vectors(i, k) * eg.vectors(j, k);
        const double err = la::frobenius_norm(rec - a) / std::max(la::frobenius_norm(a), 1e-300);
        r.worst = std::max(r.worst, err);
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_antisym_sigma_oracle(std::size_t trials, Rng& rng) {
    PropertyResult r{"antisym sigma1 = sqrt(lambda_max(a^T a))", true, 0.0, 1e-9, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t d = 2 + rng.below(31);
        const Matrix a = random_antisymmetric(d, rng);
        const la::DominantPlane dp = la::antisym_dominant_plane(a);
        const la::EigResult eg = la::sym_eig(la::matmul(la::transpose(a), a));
        const double ref = std::max(eg.values[0], 0.0);
        const double err = std::fabs(dp.sigma1 * dp.sigma1 - ref) / std::max(ref, 1e-300);
        r.worst = std::max(r.worst, err);
        // plane orthonormality
        const Matrix g = la::matmul(la::transpose(dp.plane), dp.plane);
        r.worst = std::max(r.worst, la::frobenius_norm(g - Matrix::identity(2)));
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_rng_repeatability() {
    PropertyResult r{"rng determinism over 1e6 draws", true, 0.0, 0.0, ""};
    Rng a(123456789), b(123456789);
    for (int i = 0; i < 1000000; ++i) {
        if (a.next_u64() != b.next_u64()) {
            r.pass = false;
            r.worst = 1.0;
            return r;
        }
    }
    Rng c(3), dghost(3);
    for (int i = 0; i < 1000; ++i)
        if (c.normal() != dghost.normal()) {
            r.pass = false;
            r.worst = 1.0;
            return r;
        }
    return r;
}

PropertyResult check_gram_schmidt(Rng& rng) {
    PropertyResult r{"gram_schmidt_extend orthonormality", true, 0.0, 1e-10, ""};
    for (int t = 0; t < 20; ++t) {
        const std::size_t d = 8, k = 3, extra = 2;
        Matrix cols(d, k);
        for (auto& v : cols.data()) v = rng.normal();
        const Matrix basis = la::gram_schmidt(cols);
        Matrix more(d, extra);
        for (auto& v : more.data()) v = rng.normal();
        const Matrix q = la::gram_schmidt_extend(basis, more);
        const Matrix g = la::matmul(la::transpose(q), q);
        r.worst = std::max(r.worst, la::frobenius_norm(g - Matrix::identity(k + extra)));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < k; ++j)
                r.worst = std::max(r.worst, std::fabs(q(i, j) - basis(i, j)));
    }
    r.pass = r.worst < r.threshold;
    return r;
}

namespace {

struct Instance {
    layer::TokenMatrix z;
    layer::PrototypeBank bank;
};

Instance random_instance(Rng& rng, std::size_t max_n = 50, std::size_t max_k = 8,
                         std::size_t max_d = 16) {
    const std::size_t n = 2 + rng.below(max_n - 1);
    const std::size_t k = 2 + rng.below(max_k - 1);
    const std::size_t d = 2 + rng.below(max_d - 1);
    Instance inst;
    inst.z = random_tokens(n, d, rng);
    inst.bank = random_bank(k, d, 0.3 + 2.0 * rng.uniform01(), rng);
    return inst;
}

}  // namespace

PropertyResult check_loss_decomposition(std::size_t trials, Rng& rng) {
    PropertyResult r{"loss = l_fit + v_sep identity", true, 0.0, 1e-10, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = random_instance(rng);
        const double lq = layer::loss_lq(inst.z, inst.bank);
        const layer::LossDecomposition dec = layer::loss_decomposition(inst.z, inst.bank);
        if (dec.v_sep < -1e-15) r.worst = std::max(r.worst, -dec.v_sep);
        const double err = std::fabs(lq - dec.l_fit - dec.v_sep) / std::max(lq, 1e-300);
        r.worst = std::max(r.worst, err);
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_sigma_q_properties(std::size_t trials, Rng& rng) {
    PropertyResult r{"Sigma_q PSD with Gini trace", true, 0.0, 1e-12, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = random_instance(rng, 20, 5, 8);
        const layer::AssignmentMatrix q = layer::soft_assign(inst.z, inst.bank);
        for (std::size_t i = 0; i < q.q.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < q.q.cols(); ++j) s += q.q(i, j);
            r.worst = std::max(r.worst, std::fabs(s - 1.0));
        }
        const Matrix sq = layer::sigma_q(q);
        const la::EigResult eg = la::sym_eig(sq);
        r.worst = std::max(r.worst, std::max(0.0, -eg.values.back()));
        double trace = 0.0, gini = 0.0;
        for (std::size_t j = 0; j < sq.rows(); ++j) trace += sq(j, j);
        for (std::size_t i = 0; i < q.q.rows(); ++i)
            for (std::size_t j = 0; j < q.q.cols(); ++j)
                gini += q.q(i, j) * (1.0 - q.q(i, j));
        r.worst = std::max(r.worst, std::fabs(trace - gini) / std::max(gini, 1e-300));
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_grad_v_identity(std::size_t trials, Rng& rng) {
    PropertyResult r{"grad_v rows equal 2 r_k", true, 0.0, 1e-12, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = random_instance(rng);
        const layer::AssignmentMatrix q = layer::soft_assign(inst.z, inst.bank);
        const Matrix gv = layer::grad_v(inst.bank, layer::sigma_q(q));
        const Matrix mu = layer::soft_centroids(q, inst.bank);
        double scale = std::max(la::frobenius_norm(gv), 1e-300);
        for (std::size_t j = 0; j < inst.bank.prototype_count(); ++j) {
            Vector rk(inst.z.dim(), 0.0);
            for (std::size_t i = 0; i < inst.z.count(); ++i)
                for (std::size_t c = 0; c < inst.z.dim(); ++c)
                    rk[c] += q.q(i, j) * (inst.bank.p(j, c) - mu(i, c));
            for (std::size_t c = 0; c < inst.z.dim(); ++c)
                r.worst = std::max(r.worst, std::fabs(gv(j, c) - 2.0 * rk[c]) / scale);
        }
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_separation_force_identity(std::size_t trials, Rng& rng) {
    PropertyResult r{"F_sep equals ||2 P Sigma_q||_F^2", true, 0.0, 1e-10, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = random_instance(rng);
        const layer::AssignmentMatrix q = layer::soft_assign(inst.z, inst.bank);
        const double f = layer::separation_force(inst.z, inst.bank);
        const Matrix gv = layer::grad_v(inst.bank, layer::sigma_q(q));
        const double ref = la::frobenius_norm_sq(gv);
        r.worst = std::max(r.worst, std::fabs(f - ref) / std::max(ref, 1e-300));
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_grad_prototypes_fd(std::size_t trials, Rng& rng) {
    PropertyResult r{"grad_prototypes vs finite differences", true, 0.0, 1e-5, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        Instance inst = random_instance(rng);
        const Matrix g = layer::grad_prototypes(inst.z, inst.bank);
        const std::size_t k = inst.bank.prototype_count(), d = inst.z.dim();
        Vector flat(k * d);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < d; ++j) flat[i * d + j] = inst.bank.p(i, j);
        auto f = [&](const Vector& x) {
            layer::PrototypeBank b = inst.bank;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < d; ++j) b.p(i, j) = x[i * d + j];
            return layer::loss_lq(inst.z, b);
        };
        const Vector fd = la::finite_diff(f, flat, 1e-5);
        double gnorm = 0.0;
        for (double v : fd) gnorm += v * v;
        gnorm = std::sqrt(std::max(gnorm, 1e-300));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < d; ++j)
                r.worst = std::max(r.worst, std::fabs(g(i, j) - fd[i * d + j]) / gnorm);
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_grad_temperature_fd(std::size_t trials, Rng& rng) {
    PropertyResult r{"grad_temperature vs finite differences", true, 0.0, 1e-5, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = random_instance(rng);
        const double g = layer::grad_temperature(inst.z, inst.bank);
        auto f = [&](double temp) {
            layer::PrototypeBank b = inst.bank;
            b.temperature = temp;
            return layer::loss_lq(inst.z, b);
        };
        const double fd =
            la::finite_diff_scalar(f, inst.bank.temperature, 1e-5 * inst.bank.temperature);
        r.worst = std::max(r.worst, std::fabs(g - fd) / std::max(std::fabs(fd), 1e-12));
        if (g < -1e-12) r.worst = std::max(r.worst, -g);
    }
    r.pass = r.worst < r.threshold;
    return r;
}

namespace {

Vector random_unit(std::size_t d, Rng& rng) {
    Vector u(d);
    for (auto& v : u) v = rng.normal();
    const double n = la::norm(u);
    for (auto& v : u) v /= n;
    return u;
}

}  // namespace

PropertyResult check_first_variation_fd(std::size_t trials, Rng& rng) {
    PropertyResult r{"assignment first variation vs FD", true, 0.0, 1e-5, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = random_instance(rng, 20, 5, 8);
        const Vector u = random_unit(inst.z.dim(), rng);
        const Matrix dq = layer::assignment_first_variation(inst.z, inst.bank, u);
        // row sums vanish
        for (std::size_t i = 0; i < dq.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < dq.cols(); ++j) s += dq(i, j);
            r.worst = std::max(r.worst, std::fabs(s));
        }
        const Vector alpha = la::matvec(inst.z.z, u);
        const double h = 1e-5;
        auto q_at = [&](double eps) {
            layer::TokenMatrix ze = inst.z;
            for (std::size_t i = 0; i < ze.count(); ++i)
                for (std::size_t c = 0; c < ze.dim(); ++c)
                    ze.z(i, c) += eps * alpha[i] * u[c];
            return layer::soft_assign(ze, inst.bank);
        };
        const layer::AssignmentMatrix qp = q_at(h), qm = q_at(-h);
        double scale = std::max(la::max_abs(dq), 1e-12);
        for (std::size_t i = 0; i < dq.rows(); ++i)
            for (std::size_t j = 0; j < dq.cols(); ++j) {
                const double fd = (qp.q(i, j) - qm.q(i, j)) / (2.0 * h);
                r.worst = std::max(r.worst, std::fabs(dq(i, j) - fd) / scale);
            }
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_second_variation_fd(std::size_t trials, Rng& rng) {
    PropertyResult r{"assignment second variation vs FD", true, 0.0, 1e-4, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = random_instance(rng, 20, 5, 8);
        const Vector u = random_unit(inst.z.dim(), rng);
        const Matrix ddq = layer::assignment_second_variation(inst.z, inst.bank, u);
        for (std::size_t i = 0; i < ddq.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < ddq.cols(); ++j) s += ddq(i, j);
            r.worst = std::max(r.worst, std::fabs(s));
        }
        const Vector alpha = la::matvec(inst.z.z, u);
        const double h = 1e-3;
        auto q_at = [&](double eps) {
            layer::TokenMatrix ze = inst.z;
            for (std::size_t i = 0; i < ze.count(); ++i)
                for (std::size_t c = 0; c < ze.dim(); ++c)
                    ze.z(i, c) += eps * alpha[i] * u[c];
            return layer::soft_assign(ze, inst.bank);
        };
        const layer::AssignmentMatrix qp = q_at(h), q0 = q_at(0.0), qm = q_at(-h);
        double scale = std::max(la::max_abs(ddq), 1e-9);
        for (std::size_t i = 0; i < ddq.rows(); ++i)
            for (std::size_t j = 0; j < ddq.cols(); ++j) {
                const double fd = (qp.q(i, j) - 2.0 * q0.q(i, j) + qm.q(i, j)) / (h * h);
                r.worst = std::max(r.worst, std::fabs(ddq(i, j) - fd) / scale);
            }
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_soft_to_hard_limit(Rng& rng) {
    PropertyResult r{"soft-to-hard limit at T = 1e-3", true, 0.0, 1e-6, ""};
    for (int t = 0; t < 20; ++t) {
        // well-separated prototypes, tokens hugging them
        const std::size_t k = 3, d = 4;
        layer::PrototypeBank bank = random_bank(k, d, 1e-3, rng, 3.0);
        layer::TokenMatrix z;
        z.z = Matrix(30, d);
        for (std::size_t i = 0; i < 30; ++i) {
            const std::size_t j = i % k;
            for (std::size_t c = 0; c < d; ++c) z.z(i, c) = bank.p(j, c) + 0.05 * rng.normal();
        }
        const layer::LossDecomposition dec = layer::loss_decomposition(z, bank);
        const double gap = std::fabs(dec.l_fit - dec.l_ols) / std::max(dec.l_ols, 1e-300);
        r.worst = std::max(r.worst, gap);
        // max row entropy should be ~0
        const layer::AssignmentMatrix q = layer::soft_assign(z, bank);
        for (std::size_t i = 0; i < q.q.rows(); ++i) {
            double ent = 0.0;
            for (std::size_t j = 0; j < q.q.cols(); ++j)
                if (q.q(i, j) > 0.0) ent -= q.q(i, j) * std::log(q.q(i, j));
            r.worst = std::max(r.worst, ent);
        }
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_residual_idempotence(std::size_t trials, Rng& rng) {
    PropertyResult r{"residual projection idempotent and antisymmetric", true, 0.0, 1e-10, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t d = 8;
        growth::DirectionalSignal sig;
        sig.m_a = random_antisymmetric(d, rng);
        sig.c_half = Matrix::identity(d);
        sig.m_tilde = sig.m_a;
        Matrix cols(d, 2);
        for (auto& v : cols.data()) v = rng.normal();
        growth::CapturedSubspace sub;
        sub.q_basis = la::gram_schmidt(cols);
        const Matrix a1 = growth::residual_projection(sig, sub);
        growth::DirectionalSignal sig2 = sig;
        sig2.m_tilde = a1;
        const Matrix a2 = growth::residual_projection(sig2, sub);
        r.worst = std::max(r.worst, la::max_abs(a1 - a2));
        r.worst = std::max(r.worst, la::max_abs(a1 + la::transpose(a1)));
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_interlacing(std::size_t trials, Rng& rng) {
    PropertyResult r{"lambda_max non-increasing under plane capture", true, 0.0, 1e-12, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t d = 6 + 2 * rng.below(6);
        growth::DirectionalSignal sig;
        sig.m_a = random_antisymmetric(d, rng);
        sig.c_half = Matrix::identity(d);
        sig.m_tilde = sig.m_a;
        const growth::CapturedSubspace empty;
        const growth::ResidualReport before = growth::residual_matrix(sig, empty);
        Matrix cols(d, 2);
        for (auto& v : cols.data()) v = rng.normal();
        growth::CapturedSubspace sub;
        sub.q_basis = la::gram_schmidt(cols);
        const growth::ResidualReport after = growth::residual_matrix(sig, sub);
        r.worst = std::max(r.worst, after.lambda_max - before.lambda_max);
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_block_telescoping(Rng& rng) {
    PropertyResult r{"frob_sq drops by exactly 2 lambda^2 per captured plane", true, 0.0, 1e-9, ""};
    const std::size_t d = 12, blocks = 4;
    Matrix raw(d, d);
    for (auto& v : raw.data()) v = rng.normal();
    const Matrix q = la::gram_schmidt(raw);
    growth::DirectionalSignal sig;
    sig.m_a = Matrix(d, d);
    Vector mags = {2.0, 1.3, 0.8, 0.4};
    for (std::size_t k = 0; k < blocks; ++k)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                sig.m_a(i, j) += mags[k] * (q(i, 2 * k) * q(j, 2 * k + 1) -
                                            q(i, 2 * k + 1) * q(j, 2 * k));
    sig.c_half = Matrix::identity(d);
    sig.m_tilde = sig.m_a;

    growth::CapturedSubspace sub;
    double prev = la::frobenius_norm_sq(sig.m_tilde);
    for (std::size_t k = 0; k < blocks; ++k) {
        const growth::ResidualReport rep = growth::residual_matrix(sig, sub);
        sub.q_basis = sub.empty() ? la::gram_schmidt(rep.plane)
                                  : la::gram_schmidt_extend(sub.q_basis, rep.plane);
        const growth::ResidualReport next = growth::residual_matrix(sig, sub);
        const double drop = prev - next.frob_sq;
        r.worst = std::max(r.worst,
                           std::fabs(drop - 2.0 * rep.lambda_max * rep.lambda_max) /
                               std::max(2.0 * rep.lambda_max * rep.lambda_max, 1e-300));
        prev = next.frob_sq;
    }
    r.worst = std::max(r.worst, prev);  // everything captured
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_info_loss_monotone(std::size_t trials, Rng& rng) {
    PropertyResult r{"info loss non-increasing as planes are added", true, 0.0, 1e-12, ""};
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t d = 10;
        growth::DirectionalSignal sig;
        sig.m_a = random_antisymmetric(d, rng);
        sig.c_half = Matrix::identity(d);
        sig.m_tilde = sig.m_a;
        growth::CapturedSubspace sub;
        double prev = growth::directional_info_loss(sig, sub);
        for (int k = 0; k < 5; ++k) {
            const growth::ResidualReport rep = growth::residual_matrix(sig, sub);
            if (rep.lambda_max <= 1e-12) break;
            sub.q_basis = sub.empty() ? la::gram_schmidt(rep.plane)
                                      : la::gram_schmidt_extend(sub.q_basis, rep.plane);
            const double cur = growth::directional_info_loss(sig, sub);
            r.worst = std::max(r.worst, cur - prev);
            prev = cur;
        }
        r.worst = std::max(r.worst, prev);  // d/2 = 5 planes capture everything
    }
    r.pass = r.worst < r.threshold;
    return r;
}

PropertyResult check_gate_alignment(std::size_t trials, Rng& rng) {
    PropertyResult r{"gate reaches 0.999 alignment with v1", true, 1.0, 0.999, ""};
    double worst_align = 1.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t d = 8;
        // generic matrix with a distinct top singular value
        Matrix m = random_symmetric(d, rng);
        const la::EigResult ref = la::sym_eig(la::matmul(la::transpose(m), m));
        if (ref.values[0] - ref.values[1] < 0.01 * ref.values[0]) {
            --t;  // resample; the claim needs a spectral gap
            continue;
        }
        growth::GateState g = growth::make_gate(d, rng);
        for (int it = 0; it < 500; ++it) g = growth::gate_update(g, m, 0.1);
        double align = 0.0;
        for (std::size_t i = 0; i < d; ++i) align += g.u_plus[i] * ref.vectors(i, 0);
        worst_align = std::min(worst_align, std::fabs(align));
    }
    r.worst = worst_align;
    r.pass = worst_align > r.threshold;
    return r;
}

PropertyResult check_dominance(const growth::DirectionalSignal& sig, const layer::TokenMatrix& z,
                               std::size_t seeds) {
    PropertyResult r{"adaptive capture dominates the random basis", false, 0.0, 0.0, ""};
    const baseline::DominanceReport rep = baseline::compare_info_loss(sig, z, seeds, 2);
    if (rep.degenerate) {
        r.note = "degenerate zero signal";
        return r;
    }
    const bool wins = rep.wins_random >= seeds - seeds / 100 && rep.wins_best >= seeds - seeds / 100;
    r.worst = -rep.min_gain_margin;
    r.threshold = 1e-9;
    r.pass = wins && rep.min_gain_margin >= -1e-9;
    r.note = "wins_random=" + std::to_string(rep.wins_random) +
             " wins_best=" + std::to_string(rep.wins_best) + "/" + std::to_string(seeds);
    return r;
}

PropertyResult check_mlp_alignment_scaling(Rng& rng) {
    PropertyResult r{"mlp max alignment decreases with d", true, 0.0, 0.0, ""};
    double prev_mean = 1.0;
    for (const std::size_t d : {16u, 64u, 256u}) {
        double mean = 0.0;
        const int reps = 60;
        for (int i = 0; i < reps; ++i) {
            const baseline::RandomMlpBasis b = baseline::make_mlp_basis(d, 4 * d, 1.0, rng);
            Vector v(d, 0.0);
            for (auto& x : v) x = rng.normal();
            const double n = la::norm(v);
            for (auto& x : v) x /= n;
            mean += baseline::mlp_alignment(b, v);
        }
        mean /= reps;
        if (mean > prev_mean) {
            r.pass = false;
            r.worst = mean - prev_mean;
        }
        prev_mean = mean;
    }
    return r;
}

PropertyResult check_e5_violation_flagged() {
    PropertyResult r{"equal eta_t and eta_p rejected / flagged", false, 0.0, 0.0, ""};
    try {
        dyn::StepSizes bad(0.01, 0.01, 1.0, 10, 0.1, 1.0);
        (void)bad;
        r.note = "constructor accepted equal rates";
        return r;
    } catch (const std::invalid_argument&) {
        r.pass = true;
        return r;
    }
}

PropertyResult check_corrupted_assignment_detected(Rng& rng) {
    PropertyResult r{"corrupted assignment rows are caught", false, 0.0, 0.0, ""};
    const Instance inst = random_instance(rng, 10, 4, 6);
    layer::AssignmentMatrix q = layer::soft_assign(inst.z, inst.bank);
    q.q(0, 0) += 0.25;  // break the row sum
    double worst = 0.0;
    for (std::size_t i = 0; i < q.q.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.q.cols(); ++j) s += q.q(i, j);
        worst = std::max(worst, std::fabs(s - 1.0));
    }
    r.worst = worst;
    r.pass = worst > 1e-12;  // the invariant check must notice
    return r;
}

std::vector<PropertyResult> run_all_checks(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PropertyResult> out;
    out.push_back(check_sym_eig_reconstruction(100, rng));
    out.push_back(check_antisym_sigma_oracle(100, rng));
    out.push_back(check_rng_repeatability());
    out.push_back(check_gram_schmidt(rng));
    out.push_back(check_loss_decomposition(1000, rng));
    out.push_back(check_sigma_q_properties(200, rng));
    out.push_back(check_grad_v_identity(200, rng));
    out.push_back(check_separation_force_identity(200, rng));
    out.push_back(check_grad_prototypes_fd(100, rng));
    out.push_back(check_grad_temperature_fd(100, rng));
    out.push_back(check_first_variation_fd(100, rng));
    out.push_back(check_second_variation_fd(100, rng));
    out.push_back(check_soft_to_hard_limit(rng));
    out.push_back(check_residual_idempotence(100, rng));
    out.push_back(check_interlacing(100, rng));
    out.push_back(check_block_telescoping(rng));
    out.push_back(check_info_loss_monotone(50, rng));
    out.push_back(check_gate_alignment(100, rng));
    out.push_back(check_mlp_alignment_scaling(rng));
    out.push_back(check_e5_violation_flagged());
    out.push_back(check_corrupted_assignment_detected(rng));
    return out;
}

}  // namespace protogrow::checks
