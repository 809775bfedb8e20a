#pragma once

#include <string>
#include <vector>

#include "protogrow/growth.hpp"
#include "protogrow/mlp_baseline.hpp"

namespace protogrow::checks {

struct PropertyResult {
    std::string name;
    bool pass = false;
    double worst = 0.0;      // worst observed deviation (metric depends on the check)
    double threshold = 0.0;
    std::string note;
};

/// Random-instance generators shared by the suites and the tests.
layer::TokenMatrix random_tokens(std::size_t n, std::size_t d, la::Rng& rng, double scale = 1.0);
layer::PrototypeBank random_bank(std::size_t k, std::size_t d, double temperature, la::Rng& rng,
                                 double scale = 1.0);
la::Matrix random_antisymmetric(std::size_t d, la::Rng& rng);
la::Matrix random_symmetric(std::size_t d, la::Rng& rng);

// eigen/linalg checks
PropertyResult check_sym_eig_reconstruction(std::size_t trials, la::Rng& rng);
PropertyResult check_antisym_sigma_oracle(std::size_t trials, la::Rng& rng);
PropertyResult check_rng_repeatability();
PropertyResult check_gram_schmidt(la::Rng& rng);

// prototype-layer checks
PropertyResult check_loss_decomposition(std::size_t trials, la::Rng& rng);
PropertyResult check_sigma_q_properties(std::size_t trials, la::Rng& rng);
PropertyResult check_grad_v_identity(std::size_t trials, la::Rng& rng);
PropertyResult check_separation_force_identity(std::size_t trials, la::Rng& rng);
PropertyResult check_grad_prototypes_fd(std::size_t trials, la::Rng& rng);
PropertyResult check_grad_temperature_fd(std::size_t trials, la::Rng& rng);
PropertyResult check_first_variation_fd(std::size_t trials, la::Rng& rng);
PropertyResult check_second_variation_fd(std::size_t trials, la::Rng& rng);
PropertyResult check_soft_to_hard_limit(la::Rng& rng);

// growth checks
PropertyResult check_residual_idempotence(std::size_t trials, la::Rng& rng);
PropertyResult check_interlacing(std::size_t trials, la::Rng& rng);
PropertyResult check_block_telescoping(la::Rng& rng);
PropertyResult check_info_loss_monotone(std::size_t trials, la::Rng& rng);
PropertyResult check_gate_alignment(std::size_t trials, la::Rng& rng);

// baseline
PropertyResult check_dominance(const growth::DirectionalSignal& sig,
                               const layer::TokenMatrix& z, std::size_t seeds);
PropertyResult check_mlp_alignment_scaling(la::Rng& rng);

// negative controls
PropertyResult check_e5_violation_flagged();
PropertyResult check_corrupted_assignment_detected(la::Rng& rng);

std::vector<PropertyResult> run_all_checks(std::uint64_t seed);

}  // namespace protogrow::checks
