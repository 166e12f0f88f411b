#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "imply/device.hpp"

namespace imply {

/// Identifies one device parameter of the gate pair, e.g. R_offP or v_onQ.
enum class ParamId {
  kRonP, kRoffP, kRonQ, kRoffQ,
  kVonP, kVoffP, kVonQ, kVoffQ,
  kKonP, kKoffP, kKonQ, kKoffQ,
};

inline constexpr std::array<ParamId, 12> kAllParams{
    ParamId::kRonP, ParamId::kRoffP, ParamId::kRonQ, ParamId::kRoffQ,
    ParamId::kVonP, ParamId::kVoffP, ParamId::kVonQ, ParamId::kVoffQ,
    ParamId::kKonP, ParamId::kKoffP, ParamId::kKonQ, ParamId::kKoffQ};

enum class Family { kResistances, kVoltages, kSpeeds };

std::string_view param_name(ParamId id);
/// Accepts "R_offP", "v_onQ", "k_onP", ... Throws ConfigError on unknown names.
ParamId parse_param(std::string_view name);
std::string_view param_unit(ParamId id);  // "ohm", "V", "nm/s"
bool is_p_param(ParamId id);

double get_param(const MemristorParams& p, const MemristorParams& q, ParamId id);
void set_param(MemristorParams& p, MemristorParams& q, ParamId id, double value);

/// The four parameters of a family in display order (P pair then Q pair).
std::array<ParamId, 4> family_params(Family family);
std::string_view family_name(Family family);  // "r", "v", "k"
Family parse_family(std::string_view name);

}  // namespace imply
