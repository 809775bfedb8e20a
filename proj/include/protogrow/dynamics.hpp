#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "protogrow/growth.hpp"
#include "protogrow/prototype_layer.hpp"

namespace protogrow::dyn {

using la::Matrix;
using la::Vector;

/// The three learning rates plus the discrete-event bookkeeping constants.
/// Construction enforces eta_t < eta_p < eta_plus; the ratio bands are
/// checked (warn-level) by validate_step_sizes.
struct StepSizes {
    double eta_t;
    double eta_p;
    double eta_plus;
    std::size_t n_min;   // dwell steps between architectural events
    double t_min;
    double t_init;

    StepSizes(double eta_t_, double eta_p_, double eta_plus_, std::size_t n_min_,
              double t_min_, double t_init_);
};

/// One head plus its cached in-plane token view. All per-step arithmetic
/// runs in the 2-D plane coordinates (exactly equivalent to the full-d
/// plane-projected view since prototypes never leave their plane).
struct HeadState {
    std::size_t id = 0;
    layer::PrototypeBank bank;    // full-d mirror, p = plane * p2
    layer::PrototypeBank bank2;   // K x 2 coordinates, plane = I_2
    layer::TokenMatrix view2;     // N x 2 projected tokens, fixed at birth
    std::size_t birth_step = 0;
    double birth_lambda = 0.0;
    long long t_min_first_step = -1;  // -1 = never reached

    double temperature() const { return bank2.temperature; }
};

struct ArchitectureState {
    std::vector<HeadState> heads;
    growth::CapturedSubspace subspace;
    std::size_t step = 0;
    std::size_t last_event_step = 0;
    double lambda_barrier = 0.0;
    growth::GateState gate;
    growth::ResidualReport residual;  // current A_res summary
    Matrix a_res;                     // current residual matrix (gate input)
    std::size_t next_head_id = 0;
};

enum class EventKind { growth, prune };

struct EventRecord {
    std::size_t step = 0;
    EventKind kind = EventKind::growth;
    std::size_t head_id = 0;
    double lambda_at_event = 0.0;
    double free_energy_before = 0.0;
    double free_energy_after = 0.0;  // growth: surviving/common terms only
    double coverage_after = 0.0;
    double head_terms = 0.0;         // the spawned or removed head's own terms
};

struct HeadSeries {
    std::size_t head_id = 0;
    std::size_t birth_step = 0;
    double birth_lambda = 0.0;
    std::vector<double> temperature;
    std::vector<double> sigma;
    std::vector<double> f_sep;
    std::vector<double> loss;
};

/// Expansion curve measured at a growth trigger for one head.
struct PhiAtGrowth {
    std::size_t step = 0;
    std::size_t head_id = 0;
    bool newborn = false;  // diagnostic entry for the freshly spawned head
    double phi0 = 0.0;
    double phi1 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d2_lower_bound = 0.0;
};

struct RunTrace {
    std::vector<EventRecord> events;
    std::vector<std::size_t> steps;
    std::vector<double> loss_total;
    std::vector<double> lambda_max;
    std::vector<double> free_energy;           // post-event W at each step
    std::vector<double> free_energy_pre_event; // post-train-step, pre-event W
    std::vector<double> info_loss;
    std::vector<HeadSeries> head_series;       // indexed by head id
    std::vector<PhiAtGrowth> phi_at_growth;
    std::vector<double> final_temperatures;    // by head id, surviving heads
    std::vector<long long> t_min_first_step;   // by head id, -1 = never
    std::vector<std::size_t> surviving_head_ids;
    double m_tilde_frob_sq = 0.0;
    std::size_t total_steps = 0;
    bool converged = false;
};

struct RunParams {
    StepSizes sizes;
    double theta_w;
    double phi_g;
    std::size_t k_protos;
    double lambda_barrier;
    std::size_t max_heads;
    std::size_t max_steps;
    std::uint64_t seed;
    bool prune_during_run = true;
    bool record_phi = false;  // expansion curves at every growth trigger
};

struct ConditionReport {
    std::string id;
    std::string status;  // "pass" | "warn" | "info"
    double measured = 0.0;
    double bound = 0.0;
    std::string note;
};

struct StepSizeReport {
    std::vector<ConditionReport> conditions;
    double sigma_max = 0.0;
    double sigma0 = 0.0;
    double lipschitz = 0.0;
    std::size_t n_gate = 0;
    std::size_t s_star = 0;
    bool all_pass = false;
};

/// Measures the discrete-step conditions on the given instance. Report
/// only; nothing throws for violated conditions.
StepSizeReport validate_step_sizes(const StepSizes& s, const layer::TokenMatrix& z,
                                   const growth::DirectionalSignal& sig,
                                   std::size_t k_protos, la::Rng& rng);

/// Barrier (lam/2) sum_{k != k'} ||p_k - p_k'||^-2 over one bank's ordered
/// pairs, and its gradient. Throws std::domain_error on coincident
/// prototypes (the collapse the barrier exists to rule out).
double pair_barrier(const Matrix& p, double lambda_barrier);
Matrix pair_barrier_grad(const Matrix& p, double lambda_barrier);

struct FreeEnergyParts {
    double loss = 0.0;
    double barrier = 0.0;
    double temp_potential = 0.0;
    double total() const { return loss + barrier + temp_potential; }
};

FreeEnergyParts head_free_energy(const HeadState& h, double lambda_barrier, const StepSizes& s);
double architecture_free_energy(const ArchitectureState& arch, const StepSizes& s);

/// One coupled step: per head, prototype descent on the token-mean gradient
/// of (L_q + barrier) re-projected onto the plane, then the temperature step
/// T <- max(T - eta_t sigma / T^2, t_min), then one gate update. Throws
/// std::domain_error on non-finite gradients.
void train_step(ArchitectureState& arch, const growth::DirectionalSignal& sig,
                const StepSizes& s);

/// Spawns a head from the current residual if the trigger fires and the
/// dwell has elapsed (caller enforces the dwell). Returns the event, or
/// nullopt when lambda_max <= theta_w.
std::optional<EventRecord> growth_event(ArchitectureState& arch, const layer::TokenMatrix& z,
                                        const growth::DirectionalSignal& sig, const StepSizes& s,
                                        double theta_w, std::size_t k_protos, la::Rng& rng);

/// Removes every head whose directional share is below phi_g, weakest
/// first, one record per removal. Refuses to remove the last head.
std::vector<EventRecord> pruning_event(ArchitectureState& arch,
                                       const growth::DirectionalSignal& sig, const StepSizes& s,
                                       double phi_g);

/// Full training loop; deterministic for a fixed (params, z, sig).
RunTrace run(const layer::TokenMatrix& z, const growth::DirectionalSignal& sig,
             const RunParams& params, StepSizeReport* validation = nullptr,
             ArchitectureState* final_state = nullptr);

struct HeadClassification {
    std::vector<std::size_t> local_ids;   // final T within 1e-9 of t_min
    std::vector<std::size_t> global_ids;
    std::vector<long long> first_step_to_t_min;  // by surviving head order, -1 = never
};

HeadClassification classify_heads(const RunTrace& trace, double t_min);

}  // namespace protogrow::dyn
