#pragma once

#include "protogrow/matrix.hpp"
#include "protogrow/prototype_layer.hpp"
#include "protogrow/rng.hpp"

namespace protogrow::growth {

using la::Matrix;
using la::Vector;

/// The directed part of the attention product, conjugated by the token
/// second-moment square root: m_tilde = c_half * m_a * c_half.
struct DirectionalSignal {
    Matrix m_a;      // d x d antisymmetric
    Matrix c_half;   // d x d symmetric PSD
    Matrix m_tilde;  // d x d antisymmetric

    std::size_t dim() const { return m_a.rows(); }
};

/// Builds the signal from tokens and an antisymmetric core. With
/// whiten=false the conjugation is skipped (m_tilde = m_a).
DirectionalSignal make_signal(const layer::TokenMatrix& z, const Matrix& m_a, bool whiten = true);

/// Orthonormal basis of everything the grown heads own, two columns per head.
struct CapturedSubspace {
    Matrix q_basis;  // d x 2H, H = 0 encoded as cols()==0 via empty flag

    bool empty() const { return q_basis.rows() == 0 || q_basis.cols() == 0; }
    std::size_t head_count() const { return empty() ? 0 : q_basis.cols() / 2; }
};

struct ResidualReport {
    double lambda_max = 0.0;
    Matrix plane;       // d x 2 orthonormal
    double frob_sq = 0.0;
};

/// A_res = P_perp m_tilde P_perp with P_perp = I - QQ^T; reports its
/// spectral norm, dominant rotation plane, and squared Frobenius norm.
ResidualReport residual_matrix(const DirectionalSignal& sig, const CapturedSubspace& sub);

/// The residual matrix itself (antisymmetric d x d).
Matrix residual_projection(const DirectionalSignal& sig, const CapturedSubspace& sub);

/// True iff lambda_max strictly exceeds the growth threshold.
bool growth_trigger(const ResidualReport& report, double theta_w);

/// New head on the reported plane: k prototypes at equal angles on a circle
/// whose radius is the rms per-axis deviation of token projections, plus
/// in-plane jitter of 1e-3 radius. Throws std::domain_error when the tokens
/// carry no variance in the plane.
layer::PrototypeBank spawn_head(const ResidualReport& report, const layer::TokenMatrix& z,
                                std::size_t k_protos, double t_init, la::Rng& rng);

/// Head's share of directional energy: ||plane^T m_tilde plane||_2 / ||m_tilde||_F.
double gamma_h(const layer::PrototypeBank& head, const DirectionalSignal& sig);

/// True iff gamma_h < phi_g.
bool prune_check(const layer::PrototypeBank& head, const DirectionalSignal& sig, double phi_g);

/// Power-iteration gate tracking the dominant direction of G = R^T R.
/// u_minus follows the second direction, kept orthogonal to u_plus.
struct GateState {
    Vector u_plus;
    Vector u_minus;
};

GateState make_gate(std::size_t dim, la::Rng& rng);

/// One step u <- normalize(u + eta_plus * G u), G = report_matrix^T report_matrix.
GateState gate_update(const GateState& u, const Matrix& report_matrix, double eta_plus);

/// ||P_perp m_tilde P_perp||_F / ||m_tilde||_F, in [0, 1].
double directional_info_loss(const DirectionalSignal& sig, const CapturedSubspace& sub);

}  // namespace protogrow::growth
