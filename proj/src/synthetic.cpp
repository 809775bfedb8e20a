#include "protogrow/synthetic.hpp"

#include <cmath>

#include "protogrow/eig.hpp"

namespace protogrow::harness {

SyntheticInstance gen_synthetic(const RunConfig& cfg, la::Rng& rng) {
    cfg.validate();
    const std::size_t n = cfg.n_tokens, d = cfg.dim;

    // random orthonormal basis
    la::Matrix raw(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) raw(i, j) = rng.normal();
    const la::Matrix q = la::gram_schmidt(raw);

    la::Vector scales(d, cfg.token_scale);
    for (std::size_t k = 0; k < cfg.n_blocks; ++k) {
        const double s = cfg.token_scale * std::sqrt(std::pow(cfg.rho_scale, static_cast<double>(k)));
        scales[2 * k] = s;
        scales[2 * k + 1] = s;
    }

    SyntheticInstance out;
    out.tokens.z = la::Matrix(n, d);
    {
        la::Matrix x(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) x(i, j) = scales[j] * rng.normal();
        // z = x * q^T : coordinates expressed in the random basis
        out.tokens.z = la::matmul(x, la::transpose(q));
    }
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += out.tokens.z(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) out.tokens.z(i, j) -= mean;
    }

    la::Matrix m_a(d, d);
    out.block_magnitudes.resize(cfg.n_blocks);
    for (std::size_t k = 0; k < cfg.n_blocks; ++k) {
        const double target = cfg.lambda1 * std::pow(cfg.rho, static_cast<double>(k));
        out.block_magnitudes[k] = target;
        const double in_plane_var = scales[2 * k] * scales[2 * k];
        const double raw_mag = cfg.whiten ? target / in_plane_var : target;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                m_a(i, j) += raw_mag * (q(i, 2 * k) * q(j, 2 * k + 1) -
                                        q(i, 2 * k + 1) * q(j, 2 * k));
    }

    out.signal = growth::make_signal(out.tokens, m_a, cfg.whiten);
    return out;
}

}  // namespace protogrow::harness
