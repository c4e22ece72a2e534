#pragma once

#include <cstddef>
#include <string>

#include "lossyosc/structure.hpp"
#include "lossyosc/system_params.hpp"

namespace lossyosc {

/// Mode eigenvalues, the 4N Liouvillian multiset, ep_condition and every
/// exponent alpha.lambda + beta.conj(lambda) with |alpha|, |beta| <= max_total,
/// sorted by descending real part.
std::string spectrum_json(const SystemParams& params, std::size_t max_total);

/// dims {total, nilpotent, abelian, sl_left, sl_right} plus residuals and
/// Killing ranks.
std::string structure_json(const DecompositionReport& report);

}  // namespace lossyosc
