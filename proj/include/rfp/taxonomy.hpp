#pragma once

#include "rfp/model.hpp"

namespace rfp {

/// Camouflage: entropy ~0 and raw size under the padding limit.
/// Malicious: entropy strictly above the threshold. Standard otherwise.
/// Flags are not consulted.
SectionLabel classify(const SectionRecord& section, const EvaluationConfig& cfg);
SectionLabel classify(double entropy, std::uint64_t raw_size, const EvaluationConfig& cfg);

}  // namespace rfp
