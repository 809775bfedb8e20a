#pragma once

#include "protogrow/growth.hpp"

namespace protogrow::baseline {

using la::Matrix;
using la::Vector;

/// Random feedforward first-layer weights, rows ~ N(0, sigma_sq / d).
struct RandomMlpBasis {
    Matrix w1;  // d_ff x d
    std::size_t d_ff = 0;
    double sigma_sq = 1.0;
};

RandomMlpBasis make_mlp_basis(std::size_t d, std::size_t d_ff, double sigma_sq, la::Rng& rng);

/// max over rows of <v, w_i/||w_i||>^2, in [0, 1].
double mlp_alignment(const RandomMlpBasis& basis, const Vector& v);

/// The random basis captured at rank r: orthonormalisation of the first r
/// rows. Throws std::domain_error on rank deficiency.
growth::CapturedSubspace mlp_captured_subspace(const RandomMlpBasis& basis, std::size_t r);

/// Stronger baseline: the r rows best aligned with the given direction,
/// orthonormalised.
growth::CapturedSubspace mlp_captured_subspace_best(const RandomMlpBasis& basis, std::size_t r,
                                                    const Vector& v1);

struct DominanceTrial {
    double i_ddcl = 0.0;
    double i_mlp = 0.0;       // random-basis capture at matched rank
    double i_mlp_best = 0.0;  // best-aligned-rows capture at matched rank
    double max_alignment = 0.0;
    double gain = 0.0;        // i_mlp - i_ddcl
    double gain_bound = 0.0;  // lambda^2/||m_tilde||_F^2 * (1 - max_alignment)
};

struct DominanceReport {
    std::vector<DominanceTrial> trials;
    std::size_t wins_random = 0;      // i_ddcl < i_mlp
    std::size_t wins_best = 0;        // i_ddcl < i_mlp_best
    double min_gain_margin = 0.0;     // min over trials of gain - gain_bound
    double i_ddcl = 0.0;
    bool degenerate = false;          // zero signal
};

/// Greedy plane capture for the adaptive layer vs the random basis at the
/// same rank, over `seeds` fresh bases. The gain bound is evaluated per
/// trial with the trial's measured max alignment.
DominanceReport compare_info_loss(const growth::DirectionalSignal& sig,
                                  const layer::TokenMatrix& z, std::size_t seeds,
                                  std::size_t rank, std::uint64_t base_seed = 1000);

}  // namespace protogrow::baseline
