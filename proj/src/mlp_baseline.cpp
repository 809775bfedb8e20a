#include "protogrow/mlp_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "protogrow/eig.hpp"

namespace protogrow::baseline {

RandomMlpBasis make_mlp_basis(std::size_t d, std::size_t d_ff, double sigma_sq, la::Rng& rng) {
    if (d_ff == 0) throw std::invalid_argument("make_mlp_basis: d_ff must be >= 1");
    if (sigma_sq <= 0.0) throw std::invalid_argument("make_mlp_basis: sigma_sq must be > 0");
    RandomMlpBasis b;
    b.d_ff = d_ff;
    b.sigma_sq = sigma_sq;
    b.w1 = Matrix(d_ff, d);
    const double sd = std::sqrt(sigma_sq / static_cast<double>(d));
    for (std::size_t i = 0; i < d_ff; ++i)
        for (std::size_t j = 0; j < d; ++j) b.w1(i, j) = sd * rng.normal();
    return b;
}

double mlp_alignment(const RandomMlpBasis& basis, const Vector& v) {
    if (std::fabs(la::norm(v) - 1.0) > 1e-10)
        throw std::invalid_argument("mlp_alignment: v must be a unit vector");
    double best = 0.0;
    for (std::size_t i = 0; i < basis.w1.rows(); ++i) {
        double dot = 0.0, nn = 0.0;
        const double* r = basis.w1.row(i);
        for (std::size_t j = 0; j < basis.w1.cols(); ++j) {
            dot += r[j] * v[j];
            nn += r[j] * r[j];
        }
        if (nn > 0.0) best = std::max(best, dot * dot / nn);
    }
    return best;
}

namespace {

growth::CapturedSubspace orthonormalise_rows(const RandomMlpBasis& basis,
                                             const std::vector<std::size_t>& rows) {
    const std::size_t d = basis.w1.cols();
    Matrix cols(d, rows.size());
    for (std::size_t c = 0; c < rows.size(); ++c)
        for (std::size_t j = 0; j < d; ++j) cols(j, c) = basis.w1(rows[c], j);
    growth::CapturedSubspace sub;
    sub.q_basis = la::gram_schmidt(cols);  // throws on rank deficiency
    return sub;
}

}  // namespace

growth::CapturedSubspace mlp_captured_subspace(const RandomMlpBasis& basis, std::size_t r) {
    if (r == 0) return growth::CapturedSubspace{};
    if (r > std::min(basis.w1.rows(), basis.w1.cols()))
        throw std::invalid_argument("mlp_captured_subspace: rank too large");
    std::vector<std::size_t> rows(r);
    std::iota(rows.begin(), rows.end(), 0);
    return orthonormalise_rows(basis, rows);
}

growth::CapturedSubspace mlp_captured_subspace_best(const RandomMlpBasis& basis, std::size_t r,
                                                    const Vector& v1) {
    if (r == 0) return growth::CapturedSubspace{};
    if (r > std::min(basis.w1.rows(), basis.w1.cols()))
        throw std::invalid_argument("mlp_captured_subspace_best: rank too large");
    std::vector<double> score(basis.w1.rows(), 0.0);
    for (std::size_t i = 0; i < basis.w1.rows(); ++i) {
        double dot = 0.0, nn = 0.0;
        const double* row = basis.w1.row(i);
        for (std::size_t j = 0; j < basis.w1.cols(); ++j) {
            dot += row[j] * v1[j];
            nn += row[j] * row[j];
        }
        score[i] = nn > 0.0 ? dot * dot / nn : 0.0;
    }
    std::vector<std::size_t> idx(basis.w1.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    idx.resize(r);
    return orthonormalise_rows(basis, idx);
}

DominanceReport compare_info_loss(const growth::DirectionalSignal& sig,
                                  const layer::TokenMatrix& z, std::size_t seeds,
                                  std::size_t rank, std::uint64_t base_seed) {
    (void)z;
    DominanceReport rep;
    const double total = la::frobenius_norm(sig.m_tilde);
    if (total <= 0.0) {
        rep.degenerate = true;
        return rep;
    }
    const std::size_t d = sig.dim();
    if (rank % 2 != 0) throw std::invalid_argument("compare_info_loss: rank must be even");

    // greedy plane capture to the requested rank
    growth::CapturedSubspace captured;
    double lambda_top = 0.0;
    for (std::size_t taken = 0; taken < rank; taken += 2) {
        const growth::ResidualReport rep_r = growth::residual_matrix(sig, captured);
        if (taken == 0) lambda_top = rep_r.lambda_max;
        if (rep_r.lambda_max <= 0.0) break;
        captured.q_basis = captured.empty()
                               ? la::gram_schmidt(rep_r.plane)
                               : la::gram_schmidt_extend(captured.q_basis, rep_r.plane);
    }
    rep.i_ddcl = growth::directional_info_loss(sig, captured);

    Vector v1(d);
    {
        const growth::ResidualReport top = growth::residual_matrix(sig, growth::CapturedSubspace{});
        for (std::size_t i = 0; i < d; ++i) v1[i] = top.plane(i, 0);
    }

    rep.min_gain_margin = std::numeric_limits<double>::infinity();
    for (std::size_t sidx = 0; sidx < seeds; ++sidx) {
        la::Rng rng(base_seed + sidx);
        const RandomMlpBasis basis = make_mlp_basis(d, 4 * d, 1.0, rng);

        DominanceTrial tr;
        tr.i_ddcl = rep.i_ddcl;
        tr.max_alignment = mlp_alignment(basis, v1);
        tr.i_mlp = growth::directional_info_loss(sig, mlp_captured_subspace(basis, rank));
        tr.i_mlp_best =
            growth::directional_info_loss(sig, mlp_captured_subspace_best(basis, rank, v1));
        tr.gain = tr.i_mlp - tr.i_ddcl;
        tr.gain_bound = (lambda_top * lambda_top / (total * total)) * (1.0 - tr.max_alignment);
        rep.wins_random += tr.i_ddcl < tr.i_mlp ? 1 : 0;
        rep.wins_best += tr.i_ddcl < tr.i_mlp_best ? 1 : 0;
        rep.min_gain_margin = std::min(rep.min_gain_margin, tr.gain - tr.gain_bound);
        rep.trials.push_back(tr);
    }
    return rep;
}

}  // namespace protogrow::baseline
