#include "protogrow/free_energy.hpp"

#include <cmath>

namespace protogrow::energy {

double temperature_potential(double t, double t_init, double eta_t) {
    if (eta_t <= 0.0) throw std::invalid_argument("temperature_potential: eta_t must be > 0");
    if (t > t_init + 1e-15) throw std::invalid_argument("temperature_potential: t exceeds t_init");
    return (t_init * t_init * t_init - t * t * t) / (3.0 * eta_t);
}

FreeEnergyBreakdown free_energy(const ArchitectureState& arch, double lambda_barrier,
                                const StepSizes& s) {
    FreeEnergyBreakdown out;
    out.lambda_barrier = lambda_barrier;
    for (const auto& h : arch.heads) {
        const dyn::FreeEnergyParts fe = dyn::head_free_energy(h, lambda_barrier, s);
        out.loss_total += fe.loss;
        out.barrier += fe.barrier;
        out.temp_potential += fe.temp_potential;
    }
    out.total = out.loss_total + out.barrier + out.temp_potential;
    return out;
}

MonotoneAudit audit_monotone(const RunTrace& trace, double lambda_barrier, const StepSizes& s,
                             std::size_t k_max) {
    MonotoneAudit audit;
    const double pairs = 0.5 * static_cast<double>(k_max) * static_cast<double>(k_max - 1);
    audit.f1_bound = 2.0 * s.eta_p * pairs;
    audit.f1_holds = lambda_barrier > audit.f1_bound;

    double w_abs_max = 0.0;
    for (double w : trace.free_energy) w_abs_max = std::max(w_abs_max, std::fabs(w));
    audit.tolerance = 1e-8 * std::max(w_abs_max, 1.0);

    double drift = 0.0;
    audit.w0 = trace.free_energy.empty() ? 0.0 : trace.free_energy.front();

    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        const double inc = trace.free_energy_pre_event[i] - trace.free_energy[i - 1];
        audit.max_dwell_increase = std::max(audit.max_dwell_increase, inc);
        drift += inc;
    }
    for (const auto& ev : trace.events) {
        const double jump = ev.free_energy_after - ev.free_energy_before;
        if (ev.kind == dyn::EventKind::growth) {
            audit.max_growth_jump = std::max(audit.max_growth_jump, jump);
            audit.max_newborn_cost = std::max(audit.max_newborn_cost, ev.head_terms);
        } else {
            audit.max_prune_jump = std::max(audit.max_prune_jump, jump);
            const double err = std::fabs(jump + ev.head_terms);
            audit.max_prune_decomposition_err =
                std::max(audit.max_prune_decomposition_err,
                         err / std::max(std::fabs(ev.head_terms), 1e-300));
        }
        drift += jump;
    }
    audit.drift = drift;
    audit.pass = audit.f1_holds && audit.max_dwell_increase <= audit.tolerance &&
                 audit.max_growth_jump <= audit.tolerance &&
                 audit.max_prune_jump <= audit.tolerance && audit.drift <= audit.tolerance;
    return audit;
}

}  // namespace protogrow::energy
