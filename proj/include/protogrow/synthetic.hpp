#pragma once

#include "protogrow/config.hpp"
#include "protogrow/growth.hpp"

namespace protogrow::harness {

struct SyntheticInstance {
    layer::TokenMatrix tokens;
    growth::DirectionalSignal signal;
    la::Vector block_magnitudes;  // intended whitened strengths, descending
};

/// Tokens: i.i.d. normal columns scaled per coordinate of a random
/// orthonormal basis (token_scale globally, sqrt(rho_scale^k) extra on
/// block k's plane), then column-centred. The antisymmetric core places
/// one rotation block per plane with its magnitude compensated so the
/// whitened signal strengths follow lambda1 * rho^k.
SyntheticInstance gen_synthetic(const RunConfig& cfg, la::Rng& rng);

}  // namespace protogrow::harness
