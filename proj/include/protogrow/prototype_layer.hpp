#pragma once

#include "protogrow/matrix.hpp"

namespace protogrow::layer {

using la::Matrix;
using la::Vector;

/// Frozen token embeddings, one row per token.
struct TokenMatrix {
    Matrix z;  // N x d

    std::size_t count() const { return z.rows(); }
    std::size_t dim() const { return z.cols(); }
};

/// One head's prototype bank. Prototypes live inside the head's 2-D plane;
/// the temperature controls assignment sharpness.
struct PrototypeBank {
    Matrix p;             // K x d, every row in span(plane)
    double temperature = 1.0;
    Matrix plane;         // d x 2 orthonormal
    double birth_lambda = 0.0;
    std::size_t birth_step = 0;

    std::size_t prototype_count() const { return p.rows(); }
    std::size_t dim() const { return p.cols(); }
};

struct AssignmentMatrix {
    Matrix q;  // N x K, rows are probability vectors
};

/// Squared distances ||z_n - p_k||^2, N x K.
Matrix squared_distances(const TokenMatrix& z, const PrototypeBank& bank);

/// Row-wise softmax of -D/T with per-row max subtraction.
AssignmentMatrix soft_assign(const TokenMatrix& z, const PrototypeBank& bank);
AssignmentMatrix soft_assign_from_distances(const Matrix& d2, double temperature);

/// mu_n = sum_k q_nk p_k, N x d.
Matrix soft_centroids(const AssignmentMatrix& q, const PrototypeBank& bank);

/// L_q = sum_nk q_nk ||z_n - p_k||^2.
double loss_lq(const TokenMatrix& z, const PrototypeBank& bank);

struct LossDecomposition {
    double l_fit = 0.0;  // sum_n ||z_n - mu_n||^2
    double v_sep = 0.0;  // sum_nk q_nk ||p_k - mu_n||^2
    double l_ols = 0.0;  // sum_n min_k ||z_n - p_k||^2
};

/// Splits L_q into fit + separation; l_fit + v_sep equals loss_lq exactly,
/// l_ols coincides with l_fit only in the hard-assignment limit and is
/// reported for comparison.
LossDecomposition loss_decomposition(const TokenMatrix& z, const PrototypeBank& bank);

/// Sigma_q = sum_n (diag(q_n) - q_n q_n^T), K x K PSD.
Matrix sigma_q(const AssignmentMatrix& q);

/// Full analytic gradient of loss_lq w.r.t. prototype coordinates,
/// including the softmax dependence of q on P. K x d.
Matrix grad_prototypes(const TokenMatrix& z, const PrototypeBank& bank);

/// grad of the separation term: 2 * Sigma_q * P (row k equals 2 r_k).
Matrix grad_v(const PrototypeBank& bank, const Matrix& sq);

/// F_sep = 4 sum_k || sum_n q_nk (p_k - mu_n) ||^2 = ||grad_v||_F^2.
double separation_force(const TokenMatrix& z, const PrototypeBank& bank);
double separation_force_from_assignments(const AssignmentMatrix& q, const PrototypeBank& bank);

/// S(P): minimum pairwise prototype distance. Needs K >= 2.
double prototype_spread(const PrototypeBank& bank);

/// sigma = (1/N) sum_n Var_{q_n}[ ||z_n - p_k||^2 over k ].
double effective_scale(const TokenMatrix& z, const PrototypeBank& bank);
double effective_scale_from(const AssignmentMatrix& q, const Matrix& d2);

/// dL_q/dT = (1/T^2) sum_n Var_{q_n}[||z_n - P||^2]  (>= 0).
double grad_temperature(const TokenMatrix& z, const PrototypeBank& bank);

/// dq_nk/deps at eps=0 for the expansion z_n -> z_n + eps alpha_n u*:
/// (2 alpha_n / T) q_nk (p_k* - pbar_n*). Rows sum to zero.
Matrix assignment_first_variation(const TokenMatrix& z, const PrototypeBank& bank,
                                  const Vector& u_star);

/// Second derivative: (4 alpha_n^2 / T^2) q_nk [(p_k* - pbar_n*)^2 - Var_{q_n}[p*]].
Matrix assignment_second_variation(const TokenMatrix& z, const PrototypeBank& bank,
                                   const Vector& u_star);

struct PhiCurve {
    Vector values;               // F_sep on Z(eps) for each requested eps
    double d1 = 0.0;             // central difference of phi at 0, step 1e-4
    double d2 = 0.0;             // second central difference at 0
    double d2_lower_bound = 0.0; // (32/T^2) [ s0^2 lam Var_bar / K^2 - C0 ]
};

/// phi(eps) = F_sep(P, Z + eps diag(alpha) u*^T) with alpha_n = <z_n, u*>.
/// Distances are expanded incrementally (D0 + 2 eps alpha <z-p,u*> + eps^2
/// alpha^2) so that directions orthogonal to the bank's plane perturb every
/// prototype distance by the same row shift and leave q bit-stable.
PhiCurve phi_curve(const TokenMatrix& z, const PrototypeBank& bank, const Vector& u_star,
                   const Vector& epsilons);

/// C_k = sum_n alpha_n (p_k* - pbar_n*).
Vector residual_covariance_ck(const TokenMatrix& z, const PrototypeBank& bank,
                              const Vector& u_star);

}  // namespace protogrow::layer
