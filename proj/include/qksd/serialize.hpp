#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qksd/experiment.hpp"

namespace qksd {

inline constexpr const char* kLibraryVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);
/// FNV-1a of a file's bytes as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

Json to_json(const FragmentSet& fs);
FragmentSet fragment_set_from_json(const Json& j);

Json to_json(const ShiftParams& sp);
Json to_json(const VarianceTable& vt);
Json to_json(const ShotAllocation& a);
Json to_json(const SplitSolution& s);
Json to_json(const KrylovEnsemble& e);
Json to_json(const GevpResult& g);

}  // namespace qksd
