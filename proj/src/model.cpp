#include "rfp/model.hpp"

#include <algorithm>
#include <cctype>

namespace rfp {

std::string_view to_string(FileType type) {
  switch (type) {
    case FileType::Win32EXE: return "Win32 EXE";
    case FileType::Win32DLL: return "Win32 DLL";
    case FileType::Win64EXE: return "Win64 EXE";
    case FileType::Win64DLL: return "Win64 DLL";
    case FileType::Other: break;
  }
  return "Other";
}

FileType parse_file_type(std::string_view text) {
  std::string squashed;
  squashed.reserve(text.size());
  for (char c : text) {
    if (c != ' ') squashed.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (squashed == "win32exe") return FileType::Win32EXE;
  if (squashed == "win32dll") return FileType::Win32DLL;
  if (squashed == "win64exe") return FileType::Win64EXE;
  if (squashed == "win64dll") return FileType::Win64DLL;
  return FileType::Other;
}

std::string to_string(SectionFlags flags) {
  std::string out;
  if (flags.read) out.push_back('r');
  if (flags.write) out.push_back('w');
  if (flags.execute) out.push_back('x');
  return out;
}

std::optional<SectionFlags> parse_section_flags(std::string_view text) {
  SectionFlags flags;
  for (char c : text) {
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'r': flags.read = true; break;
      case 'w': flags.write = true; break;
      case 'x': flags.execute = true; break;
      case '-': break;  // "r-x" style
      default: return std::nullopt;
    }
  }
  return flags;
}

std::string_view to_string(SectionLabel label) {
  switch (label) {
    case SectionLabel::Malicious: return "Malicious";
    case SectionLabel::Standard: return "Standard";
    case SectionLabel::Camouflage: return "Camouflage";
  }
  return "Standard";
}

std::vector<std::string> EvaluationConfig::violations() const {
  std::vector<std::string> out;
  if (vendor_threshold < 1) out.emplace_back("vendor_threshold must be >= 1");
  if (vendor_threshold > kVendorCount) out.emplace_back("vendor_threshold exceeds vendor count");
  if (min_cluster_size < 1) out.emplace_back("min_cluster_size must be >= 1");
  if (top_sections < 1) out.emplace_back("top_sections must be >= 1");
  if (!(entropy_malicious >= 0.0 && entropy_malicious <= 8.0))
    out.emplace_back("entropy_malicious must lie in [0, 8]");
  if (!(camouflage_entropy_eps >= 0.0)) out.emplace_back("camouflage_entropy_eps must be >= 0");
  return out;
}

bool is_lower_hex(std::string_view text, std::size_t length) {
  if (text.size() != length) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace rfp
