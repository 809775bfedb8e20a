#pragma once

#include "protogrow/dynamics.hpp"

namespace protogrow::energy {

using dyn::ArchitectureState;
using dyn::RunTrace;
using dyn::StepSizes;

struct FreeEnergyBreakdown {
    double loss_total = 0.0;
    double barrier = 0.0;
    double temp_potential = 0.0;
    double total = 0.0;
    double lambda_barrier = 0.0;
};

/// Phi(T) = (t_init^3 - T^3) / (3 eta_t); zero at t_init, grows as the
/// temperature anneals. Requires t <= t_init.
double temperature_potential(double t, double t_init, double eta_t);

/// Free energy of the whole architecture: per-head losses on their own
/// plane views, the inverse-square pair barrier, and the temperature
/// potentials. Throws std::domain_error on coincident prototypes.
FreeEnergyBreakdown free_energy(const ArchitectureState& arch, double lambda_barrier,
                                const StepSizes& s);

struct MonotoneAudit {
    bool f1_holds = false;          // lambda_barrier > 2 eta_p C(k_max, 2)
    double f1_bound = 0.0;
    double max_dwell_increase = 0.0;     // over per-step changes between events
    double max_growth_jump = 0.0;        // on the pre-existing heads' terms
    double max_prune_jump = 0.0;
    double max_prune_decomposition_err = 0.0;  // |jump + removed terms| relative
    double drift = 0.0;             // audited W(end) - W(0), newborn terms excluded
    double w0 = 0.0;
    double tolerance = 0.0;         // 1e-8 * max |W| seen
    bool pass = false;
    double max_newborn_cost = 0.0;  // recorded for inspection
};

/// Checks that the free energy never increases: per step on dwell
/// intervals, at growth events on the surviving terms, and at pruning
/// events outright. Newborn heads enter the books at their own birth value,
/// so the audited trajectory is comparable across architecture changes.
MonotoneAudit audit_monotone(const RunTrace& trace, double lambda_barrier, const StepSizes& s,
                             std::size_t k_max);

}  // namespace protogrow::energy
