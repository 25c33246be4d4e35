#include "rfp/taxonomy.hpp"

namespace rfp {

SectionLabel classify(double entropy, std::uint64_t raw_size, const EvaluationConfig& cfg) {
  if (entropy <= cfg.camouflage_entropy_eps && raw_size < cfg.camouflage_max_raw) {
    return SectionLabel::Camouflage;
  }
  if (entropy > cfg.entropy_malicious) return SectionLabel::Malicious;
  return SectionLabel::Standard;
}

SectionLabel classify(const SectionRecord& section, const EvaluationConfig& cfg) {
  return classify(section.entropy, section.raw_size, cfg);
}

}  // namespace rfp
