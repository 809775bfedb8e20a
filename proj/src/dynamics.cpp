#include "protogrow/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "protogrow/eig.hpp"

namespace protogrow::dyn {

StepSizes::StepSizes(double eta_t_, double eta_p_, double eta_plus_, std::size_t n_min_,
                     double t_min_, double t_init_)
    : eta_t(eta_t_), eta_p(eta_p_), eta_plus(eta_plus_), n_min(n_min_), t_min(t_min_),
      t_init(t_init_) {
    if (eta_t <= 0.0 || eta_p <= 0.0 || eta_plus <= 0.0)
        throw std::invalid_argument("StepSizes: rates must be positive");
    if (!(eta_t < eta_p && eta_p < eta_plus))
        throw std::invalid_argument("StepSizes: need eta_t < eta_p < eta_plus");
    if (t_min <= 0.0 || t_init < t_min)
        throw std::invalid_argument("StepSizes: need 0 < t_min <= t_init");
}

double pair_barrier(const Matrix& p, double lambda_barrier) {
    const std::size_t k = p.rows(), d = p.cols();
    double acc = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = p(a, c) - p(b, c);
                s += diff * diff;
            }
            if (s <= 0.0)
                throw std::domain_error("pair_barrier: coincident prototypes (collapse)");
            acc += 1.0 / s;
        }
    return 0.5 * lambda_barrier * acc;
}

Matrix pair_barrier_grad(const Matrix& p, double lambda_barrier) {
    const std::size_t k = p.rows(), d = p.cols();
    Matrix g(k, d);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = p(a, c) - p(b, c);
                s += diff * diff;
            }
            if (s <= 0.0)
                throw std::domain_error("pair_barrier_grad: coincident prototypes");
            const double w = -2.0 * lambda_barrier / (s * s);
            for (std::size_t c = 0; c < d; ++c) g(a, c) += w * (p(a, c) - p(b, c));
        }
    return g;
}

FreeEnergyParts head_free_energy(const HeadState& h, double lambda_barrier, const StepSizes& s) {
    FreeEnergyParts fe;
    fe.loss = layer::loss_lq(h.view2, h.bank2);
    fe.barrier = pair_barrier(h.bank2.p, lambda_barrier);
    const double t = h.temperature();
    fe.temp_potential = (s.t_init * s.t_init * s.t_init - t * t * t) / (3.0 * s.eta_t);
    return fe;
}

double architecture_free_energy(const ArchitectureState& arch, const StepSizes& s) {
    double total = 0.0;
    for (const auto& h : arch.heads) total += head_free_energy(h, arch.lambda_barrier, s).total();
    return total;
}

namespace {

/// Mirror 2-D prototype coordinates into the bank's full-d rows.
void sync_full_bank(HeadState& h) {
    const std::size_t k = h.bank2.p.rows(), d = h.bank.p.cols();
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t c = 0; c < d; ++c)
            h.bank.p(j, c) = h.bank2.p(j, 0) * h.bank.plane(c, 0) +
                             h.bank2.p(j, 1) * h.bank.plane(c, 1);
    h.bank.temperature = h.bank2.temperature;
}

HeadState make_head(const growth::ResidualReport& report, const layer::TokenMatrix& z,
                    std::size_t k_protos, const StepSizes& s, la::Rng& rng,
                    std::size_t id, std::size_t step) {
    HeadState h;
    h.id = id;
    h.birth_step = step;
    h.birth_lambda = report.lambda_max;

    const std::size_t n = z.count(), d = z.dim();
    double ssq = 0.0;
    layer::TokenMatrix view;
    view.z = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        double a = 0.0, b = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            a += z.z(i, c) * report.plane(c, 0);
            b += z.z(i, c) * report.plane(c, 1);
        }
        view.z(i, 0) = a;
        view.z(i, 1) = b;
        ssq += a * a + b * b;
    }
    const double radius = std::sqrt(ssq / (2.0 * static_cast<double>(n)));
    if (radius <= 1e-12) throw std::domain_error("make_head: zero token variance in plane");

    h.bank2.p = Matrix(k_protos, 2);
    for (std::size_t j = 0; j < k_protos; ++j) {
        const double ang = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(k_protos);
        h.bank2.p(j, 0) = radius * std::cos(ang) + 1e-3 * radius * rng.normal();
        h.bank2.p(j, 1) = radius * std::sin(ang) + 1e-3 * radius * rng.normal();
    }
    h.bank2.plane = Matrix::identity(2);
    h.bank2.temperature = s.t_init;
    h.bank2.birth_lambda = report.lambda_max;
    h.bank2.birth_step = step;

    h.bank.plane = report.plane;
    h.bank.temperature = s.t_init;
    h.bank.birth_lambda = report.lambda_max;
    h.bank.birth_step = step;
    h.bank.p = Matrix(k_protos, d);
    h.view2 = std::move(view);
    sync_full_bank(h);
    return h;
}

void refresh_residual(ArchitectureState& arch, const growth::DirectionalSignal& sig) {
    arch.residual = growth::residual_matrix(sig, arch.subspace);
    arch.a_res = growth::residual_projection(sig, arch.subspace);
}

void rebuild_subspace(ArchitectureState& arch) {
    if (arch.heads.empty()) {
        arch.subspace.q_basis = Matrix();
        return;
    }
    const std::size_t d = arch.heads[0].bank.plane.rows();
    Matrix q(d, 2 * arch.heads.size());
    for (std::size_t h = 0; h < arch.heads.size(); ++h)
        for (std::size_t c = 0; c < d; ++c) {
            q(c, 2 * h) = arch.heads[h].bank.plane(c, 0);
            q(c, 2 * h + 1) = arch.heads[h].bank.plane(c, 1);
        }
    arch.subspace.q_basis = std::move(q);
}

double coverage_from(const ArchitectureState& arch, const growth::DirectionalSignal& sig) {
    const double total = la::frobenius_norm_sq(sig.m_tilde);
    if (total <= 0.0) return 0.0;
    return 1.0 - arch.residual.frob_sq / total;
}

}  // namespace

void train_step(ArchitectureState& arch, const growth::DirectionalSignal& sig,
                const StepSizes& s) {
    for (auto& h : arch.heads) {
        const double inv_n = 1.0 / static_cast<double>(h.view2.count());
        const Matrix grad = layer::grad_prototypes(h.view2, h.bank2);
        const Matrix bgrad = pair_barrier_grad(h.bank2.p, arch.lambda_barrier);
        for (std::size_t j = 0; j < h.bank2.p.rows(); ++j)
            for (std::size_t c = 0; c < 2; ++c) {
                const double step = s.eta_p * inv_n * (grad(j, c) + bgrad(j, c));
                if (!std::isfinite(step))
                    throw std::domain_error("train_step: non-finite prototype gradient");
                h.bank2.p(j, c) -= step;
            }

        if (h.bank2.temperature > s.t_min) {
            const double sigma = layer::effective_scale(h.view2, h.bank2);
            if (!std::isfinite(sigma))
                throw std::domain_error("train_step: non-finite temperature gradient");
            const double t = h.bank2.temperature;
            h.bank2.temperature = std::max(t - s.eta_t * sigma / (t * t), s.t_min);
            if (h.bank2.temperature <= s.t_min && h.t_min_first_step < 0)
                h.t_min_first_step = static_cast<long long>(arch.step);
        }
        sync_full_bank(h);
    }
    if (!arch.heads.empty() && arch.residual.lambda_max > 0.0)
        arch.gate = growth::gate_update(arch.gate, arch.a_res, s.eta_plus);
}

std::optional<EventRecord> growth_event(ArchitectureState& arch, const layer::TokenMatrix& z,
                                        const growth::DirectionalSignal& sig, const StepSizes& s,
                                        double theta_w, std::size_t k_protos, la::Rng& rng) {
    if (!growth::growth_trigger(arch.residual, theta_w)) return std::nullopt;

    const double w_before = architecture_free_energy(arch, s);

    growth::ResidualReport report = arch.residual;
    // polish the plane against the captured basis so head planes stay
    // mutually orthonormal to working precision
    Matrix polished;
    if (arch.subspace.empty()) {
        polished = la::gram_schmidt(report.plane);
    } else {
        const Matrix ext = la::gram_schmidt_extend(arch.subspace.q_basis, report.plane);
        polished = la::columns(ext, ext.cols() - 2, 2);
    }
    report.plane = polished;

    HeadState h = make_head(report, z, k_protos, s, rng, arch.next_head_id++, arch.step);
    const double newborn = head_free_energy(h, arch.lambda_barrier, s).total();
    arch.heads.push_back(std::move(h));
    rebuild_subspace(arch);
    refresh_residual(arch, sig);
    arch.gate = growth::make_gate(sig.dim(), rng);
    arch.last_event_step = arch.step;

    EventRecord ev;
    ev.step = arch.step;
    ev.kind = EventKind::growth;
    ev.head_id = arch.heads.back().id;
    ev.lambda_at_event = report.lambda_max;
    ev.free_energy_before = w_before;
    // the pre-existing heads are untouched by a growth event; the newborn's
    // own initial terms are reported separately
    double common = 0.0;
    for (std::size_t i = 0; i + 1 < arch.heads.size(); ++i)
        common += head_free_energy(arch.heads[i], arch.lambda_barrier, s).total();
    ev.free_energy_after = common;
    ev.head_terms = newborn;
    ev.coverage_after = coverage_from(arch, sig);
    return ev;
}

std::vector<EventRecord> pruning_event(ArchitectureState& arch,
                                       const growth::DirectionalSignal& sig, const StepSizes& s,
                                       double phi_g) {
    std::vector<EventRecord> out;
    if (arch.heads.size() < 2) return out;

    for (;;) {
        std::size_t weakest = arch.heads.size();
        double weakest_gamma = 0.0;
        for (std::size_t i = 0; i < arch.heads.size(); ++i) {
            const double g = growth::gamma_h(arch.heads[i].bank, sig);
            if (g < phi_g && (weakest == arch.heads.size() || g < weakest_gamma)) {
                weakest = i;
                weakest_gamma = g;
            }
        }
        if (weakest == arch.heads.size()) break;
        if (arch.heads.size() == 1)
            throw std::domain_error("pruning_event: refusing to remove the last head");

        const double w_before = architecture_free_energy(arch, s);
        EventRecord ev;
        ev.step = arch.step;
        ev.kind = EventKind::prune;
        ev.head_id = arch.heads[weakest].id;
        ev.lambda_at_event = weakest_gamma;
        ev.free_energy_before = w_before;
        ev.head_terms = head_free_energy(arch.heads[weakest], arch.lambda_barrier, s).total();
        arch.heads.erase(arch.heads.begin() + static_cast<std::ptrdiff_t>(weakest));
        rebuild_subspace(arch);
        refresh_residual(arch, sig);
        ev.free_energy_after = architecture_free_energy(arch, s);
        ev.coverage_after = coverage_from(arch, sig);
        arch.last_event_step = arch.step;
        out.push_back(ev);
        if (arch.heads.size() == 1) break;
    }
    return out;
}

RunTrace run(const layer::TokenMatrix& z, const growth::DirectionalSignal& sig,
             const RunParams& params, StepSizeReport* validation, ArchitectureState* final_state) {
    la::Rng rng(params.seed);
    la::Rng vrng(params.seed ^ 0x56414C4944415445ULL);

    if (validation)
        *validation = validate_step_sizes(params.sizes, z, sig, params.k_protos, vrng);

    ArchitectureState arch;
    arch.lambda_barrier = params.lambda_barrier;
    arch.gate = growth::make_gate(sig.dim(), rng);
    refresh_residual(arch, sig);

    RunTrace trace;
    trace.m_tilde_frob_sq = la::frobenius_norm_sq(sig.m_tilde);

    // the architecture always starts with one head on the dominant plane
    {
        growth::ResidualReport rep = arch.residual;
        const bool fires = rep.lambda_max > params.theta_w;
        Matrix polished = la::gram_schmidt(rep.plane);
        rep.plane = polished;
        HeadState h = make_head(rep, z, params.k_protos, params.sizes, rng,
                                arch.next_head_id++, 0);
        const double newborn = head_free_energy(h, params.lambda_barrier, params.sizes).total();
        arch.heads.push_back(std::move(h));
        rebuild_subspace(arch);
        refresh_residual(arch, sig);
        arch.gate = growth::make_gate(sig.dim(), rng);
        if (fires) {
            EventRecord ev;
            ev.step = 0;
            ev.kind = EventKind::growth;
            ev.head_id = arch.heads.back().id;
            ev.lambda_at_event = rep.lambda_max;
            ev.free_energy_before = 0.0;
            ev.free_energy_after = 0.0;
            ev.head_terms = newborn;
            ev.coverage_after = coverage_from(arch, sig);
            trace.events.push_back(ev);
        }
    }

    auto series_row = [&](std::size_t step) {
        double loss_sum = 0.0;
        double w = 0.0;
        for (auto& h : arch.heads) {
            const Matrix d2 = layer::squared_distances(h.view2, h.bank2);
            const layer::AssignmentMatrix q =
                layer::soft_assign_from_distances(d2, h.bank2.temperature);
            double loss = 0.0;
            for (std::size_t i = 0; i < d2.rows(); ++i)
                for (std::size_t j = 0; j < d2.cols(); ++j) loss += q.q(i, j) * d2(i, j);
            const double sigma = layer::effective_scale_from(q, d2);
            const double fsep = layer::separation_force_from_assignments(q, h.bank2);
            const double t = h.temperature();
            const double barrier = pair_barrier(h.bank2.p, arch.lambda_barrier);
            const double phi =
                (params.sizes.t_init * params.sizes.t_init * params.sizes.t_init - t * t * t) /
                (3.0 * params.sizes.eta_t);
            w += loss + barrier + phi;
            loss_sum += loss;

            while (trace.head_series.size() <= h.id) trace.head_series.emplace_back();
            HeadSeries& hs = trace.head_series[h.id];
            if (hs.temperature.empty()) {
                hs.head_id = h.id;
                hs.birth_step = h.birth_step;
                hs.birth_lambda = h.birth_lambda;
            }
            hs.temperature.push_back(t);
            hs.sigma.push_back(sigma);
            hs.f_sep.push_back(fsep);
            hs.loss.push_back(loss);
        }
        trace.steps.push_back(step);
        trace.loss_total.push_back(loss_sum);
        trace.lambda_max.push_back(arch.residual.lambda_max);
        trace.info_loss.push_back(trace.m_tilde_frob_sq > 0.0
                                      ? std::sqrt(arch.residual.frob_sq / trace.m_tilde_frob_sq)
                                      : 0.0);
        return w;
    };

    // step-0 row
    {
        const double w0 = series_row(0);
        trace.free_energy.push_back(w0);
        trace.free_energy_pre_event.push_back(w0);
    }

    for (std::size_t t = 1; t <= params.max_steps; ++t) {
        arch.step = t;
        train_step(arch, sig, params.sizes);
        const double w_pre = architecture_free_energy(arch, params.sizes);

        bool event_happened = false;
        if (t - arch.last_event_step >= params.sizes.n_min) {
            if (arch.heads.size() < params.max_heads) {
                const bool will_fire = arch.residual.lambda_max > params.theta_w;
                if (will_fire && params.record_phi) {
                    Vector u(sig.dim());
                    for (std::size_t c = 0; c < sig.dim(); ++c) u[c] = arch.residual.plane(c, 0);
                    for (const auto& h : arch.heads) {
                        const layer::PhiCurve pc = layer::phi_curve(z, h.bank, u, {0.0, 1.0});
                        trace.phi_at_growth.push_back({t, h.id, false, pc.values[0], pc.values[1],
                                                       pc.d1, pc.d2, pc.d2_lower_bound});
                    }
                }
                const auto ev = growth_event(arch, z, sig, params.sizes, params.theta_w,
                                             params.k_protos, rng);
                if (ev) {
                    if (params.record_phi) {
                        const HeadState& nb = arch.heads.back();
                        Vector u(sig.dim());
                        for (std::size_t c = 0; c < sig.dim(); ++c) u[c] = nb.bank.plane(c, 0);
                        const layer::PhiCurve pc = layer::phi_curve(z, nb.bank, u, {0.0, 1.0});
                        trace.phi_at_growth.push_back({t, nb.id, true, pc.values[0], pc.values[1],
                                                       pc.d1, pc.d2, pc.d2_lower_bound});
                    }
                    trace.events.push_back(*ev);
                    event_happened = true;
                }
            }
            if (!event_happened && params.prune_during_run && arch.heads.size() >= 2) {
                const auto evs = pruning_event(arch, sig, params.sizes, params.phi_g);
                for (const auto& e : evs) trace.events.push_back(e);
                event_happened = !evs.empty();
            }
        }

        const double w_full = series_row(t);
        trace.free_energy_pre_event.push_back(w_pre);
        trace.free_energy.push_back(w_full);

        // convergence: quiet architecture, exhausted residual, flat losses
        if (arch.residual.lambda_max <= params.theta_w &&
            t - arch.last_event_step >= 4 * params.sizes.n_min) {
            bool flat = true;
            for (const auto& h : arch.heads) {
                const auto& ls = trace.head_series[h.id].loss;
                if (ls.size() < 51) {
                    flat = false;
                    break;
                }
                if (std::fabs(ls.back() - ls[ls.size() - 51]) >= 1e-8) {
                    flat = false;
                    break;
                }
            }
            if (flat) {
                trace.converged = true;
                trace.total_steps = t;
                break;
            }
        }
        trace.total_steps = t;
    }

    for (const auto& h : arch.heads) {
        trace.surviving_head_ids.push_back(h.id);
        trace.final_temperatures.push_back(h.temperature());
        trace.t_min_first_step.push_back(h.t_min_first_step);
    }
    if (final_state) *final_state = std::move(arch);
    return trace;
}

HeadClassification classify_heads(const RunTrace& trace, double t_min) {
    HeadClassification out;
    for (std::size_t i = 0; i < trace.surviving_head_ids.size(); ++i) {
        const std::size_t id = trace.surviving_head_ids[i];
        if (std::fabs(trace.final_temperatures[i] - t_min) <= 1e-9)
            out.local_ids.push_back(id);
        else
            out.global_ids.push_back(id);
        out.first_step_to_t_min.push_back(trace.t_min_first_step[i]);
    }
    return out;
}

StepSizeReport validate_step_sizes(const StepSizes& s, const layer::TokenMatrix& z,
                                   const growth::DirectionalSignal& sig,
                                   std::size_t k_protos, la::Rng& rng) {
    StepSizeReport rep;
    growth::CapturedSubspace empty;
    const growth::ResidualReport first = growth::residual_matrix(sig, empty);

    // token view on the dominant plane
    const std::size_t n = z.count(), d = z.dim();
    layer::TokenMatrix view;
    view.z = Matrix(n, 2);
    double ssq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = 0.0, b = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            a += z.z(i, c) * first.plane(c, 0);
            b += z.z(i, c) * first.plane(c, 1);
        }
        view.z(i, 0) = a;
        view.z(i, 1) = b;
        ssq += a * a + b * b;
    }
    const double radius = std::sqrt(ssq / (2.0 * static_cast<double>(n)));

    auto random_bank = [&](double spread) {
        layer::PrototypeBank b;
        b.plane = Matrix::identity(2);
        b.temperature = s.t_init;
        b.p = Matrix(k_protos, 2);
        for (std::size_t j = 0; j < k_protos; ++j) {
            b.p(j, 0) = spread * rng.normal();
            b.p(j, 1) = spread * rng.normal();
        }
        return b;
    };

    // sigma_max over 32 random initialisations
    for (int i = 0; i < 32; ++i) {
        const layer::PrototypeBank b = random_bank(radius);
        rep.sigma_max = std::max(rep.sigma_max, layer::effective_scale(view, b));
    }

    // sigma0: the spawn geometry itself (equal angles on the radius circle)
    {
        layer::PrototypeBank b;
        b.plane = Matrix::identity(2);
        b.temperature = s.t_init;
        b.p = Matrix(k_protos, 2);
        for (std::size_t j = 0; j < k_protos; ++j) {
            const double ang = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(k_protos);
            b.p(j, 0) = radius * std::cos(ang) + 1e-3 * radius * rng.normal();
            b.p(j, 1) = radius * std::sin(ang) + 1e-3 * radius * rng.normal();
        }
        rep.sigma0 = layer::effective_scale(view, b);
    }

    // gradient Lipschitz ratio over 64 random prototype pairs (token-mean gradient)
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int i = 0; i < 64; ++i) {
        layer::PrototypeBank b1 = random_bank(radius);
        layer::PrototypeBank b2 = b1;
        for (std::size_t j = 0; j < k_protos; ++j) {
            b2.p(j, 0) += 0.1 * radius * rng.normal();
            b2.p(j, 1) += 0.1 * radius * rng.normal();
        }
        const Matrix g1 = inv_n * layer::grad_prototypes(view, b1);
        const Matrix g2 = inv_n * layer::grad_prototypes(view, b2);
        const double dg = la::frobenius_norm(g1 - g2);
        const double dp = la::frobenius_norm(b1.p - b2.p);
        if (dp > 0.0) rep.lipschitz = std::max(rep.lipschitz, dg / dp);
    }

    // gate steps to 0.99 plane alignment on the full signal
    if (first.lambda_max > 0.0) {
        growth::GateState g = growth::make_gate(d, rng);
        const std::size_t cap = 200000;
        for (std::size_t it = 1; it <= cap; ++it) {
            g = growth::gate_update(g, sig.m_tilde, s.eta_plus);
            double a = 0.0, b = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                a += first.plane(c, 0) * g.u_plus[c];
                b += first.plane(c, 1) * g.u_plus[c];
            }
            if (std::sqrt(a * a + b * b) >= 0.99) {
                rep.n_gate = it;
                break;
            }
        }
    }

    rep.s_star = rep.sigma0 > 0.0
                     ? static_cast<std::size_t>(std::ceil(
                           (s.t_init * s.t_init * s.t_init - s.t_min * s.t_min * s.t_min) /
                           (3.0 * s.eta_t * rep.sigma0))) + 1
                     : 0;

    auto cond = [&](std::string id, bool pass, double measured, double bound, std::string note) {
        rep.conditions.push_back({std::move(id), pass ? "pass" : "warn", measured, bound,
                                  std::move(note)});
    };

    const double e1_bound = (s.t_min * s.t_min * s.t_min) / (3.0 * std::max(rep.sigma_max, 1e-300));
    cond("E1", s.eta_t < e1_bound, s.eta_t, e1_bound,
         "temperature step below T_min^3/(3 sigma_max); the clip enforces the floor regardless");
    const double e2_bound = 2.0 / std::max(rep.lipschitz, 1e-300);
    cond("E2", s.eta_p < e2_bound, s.eta_p, e2_bound,
         "prototype step below 2/L for the token-mean gradient");
    rep.conditions.push_back({"E3", "info", 0.0, 0.0,
                              "second-order step bound; the growth audit records phi''(0) instead"});
    rep.conditions.push_back({"E4", "info", s.eta_plus, 0.0,
                              "constant gate step on a finite run (documented relaxation)"});
    const double r1 = s.eta_t / s.eta_p, r2 = s.eta_p / s.eta_plus;
    const bool e5 = r1 >= 0.01 && r1 <= 0.1 && r2 >= 0.01 && r2 <= 0.1;
    cond("E5", e5, r1, r2, "timescale ratios eta_t/eta_p and eta_p/eta_plus within [0.01, 0.1]");
    const std::size_t e6_bound = std::max(rep.n_gate, rep.s_star);
    cond("E6", s.n_min > e6_bound, static_cast<double>(s.n_min),
         static_cast<double>(e6_bound), "dwell exceeds both gate settling and s*");

    rep.all_pass = true;
    for (const auto& c : rep.conditions)
        if (c.status == "warn") rep.all_pass = false;
    return rep;
}

}  // namespace protogrow::dyn
