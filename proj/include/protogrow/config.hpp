#pragma once

#include <cstdint>
#include <string>

#include "protogrow/dynamics.hpp"

namespace protogrow::harness {

/// Everything one run needs. Loadable from flat `key = value` text; unknown
/// keys are errors so typos cannot silently fall back to defaults.
struct RunConfig {
    std::size_t n_tokens = 500;
    std::size_t dim = 64;
    double rho = 0.7;
    double lambda1 = 2.0;
    std::size_t n_blocks = 8;
    double theta_w = 0.05;
    double phi_g = 0.01;
    std::size_t k_protos = 4;
    double t_init = 1.0;
    double t_min = 0.1;
    double eta_t = 0.01;
    double eta_p = 0.1;
    double eta_plus = 1.0;
    std::size_t n_min = 80;
    double lambda_barrier = 1.25;
    std::size_t max_heads = 16;
    std::size_t max_steps = 3000;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    // generator shaping: a global token scale and a per-block in-plane
    // scale ratio (1.0 = isotropic tokens); the antisymmetric core is
    // compensated so the whitened block strengths still follow
    // lambda1 * rho^k. whiten=false skips the second-moment conjugation.
    double token_scale = 1.0;
    double rho_scale = 1.0;
    bool whiten = true;

    dyn::StepSizes step_sizes() const {
        return dyn::StepSizes(eta_t, eta_p, eta_plus, n_min, t_min, t_init);
    }
    dyn::RunParams run_params() const;

    /// Throws std::invalid_argument when any invariant fails.
    void validate() const;
};

/// Parse `key = value` lines ('#' comments allowed) over the given base.
RunConfig parse_config_text(const std::string& text, RunConfig base);
RunConfig load_config_file(const std::string& path, RunConfig base);

std::string config_to_text(const RunConfig& cfg);

}  // namespace protogrow::harness
