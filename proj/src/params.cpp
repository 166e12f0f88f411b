#include "imply/params.hpp"

#include "imply/error.hpp"

namespace imply {
namespace {

struct ParamInfo {
  ParamId id;
  std::string_view name;
  std::string_view unit;
  bool p_side;
  double MemristorParams::*field;
};

constexpr std::array<ParamInfo, 12> kInfo{{
    {ParamId::kRonP, "R_onP", "ohm", true, &MemristorParams::R_on},
    {ParamId::kRoffP, "R_offP", "ohm", true, &MemristorParams::R_off},
    {ParamId::kRonQ, "R_onQ", "ohm", false, &MemristorParams::R_on},
    {ParamId::kRoffQ, "R_offQ", "ohm", false, &MemristorParams::R_off},
    {ParamId::kVonP, "v_onP", "V", true, &MemristorParams::v_on},
    {ParamId::kVoffP, "v_offP", "V", true, &MemristorParams::v_off},
    {ParamId::kVonQ, "v_onQ", "V", false, &MemristorParams::v_on},
    {ParamId::kVoffQ, "v_offQ", "V", false, &MemristorParams::v_off},
    {ParamId::kKonP, "k_onP", "nm/s", true, &MemristorParams::k_on},
    {ParamId::kKoffP, "k_offP", "nm/s", true, &MemristorParams::k_off},
    {ParamId::kKonQ, "k_onQ", "nm/s", false, &MemristorParams::k_on},
    {ParamId::kKoffQ, "k_offQ", "nm/s", false, &MemristorParams::k_off},
}};

const ParamInfo& info(ParamId id) { return kInfo[static_cast<std::size_t>(id)]; }

}  // namespace

std::string_view param_name(ParamId id) { return info(id).name; }
std::string_view param_unit(ParamId id) { return info(id).unit; }
bool is_p_param(ParamId id) { return info(id).p_side; }

ParamId parse_param(std::string_view name) {
  for (const ParamInfo& i : kInfo)
    if (i.name == name) return i.id;
  throw ConfigError("unknown parameter id '" + std::string(name) + "'");
}

double get_param(const MemristorParams& p, const MemristorParams& q, ParamId id) {
  const ParamInfo& i = info(id);
  const MemristorParams& dev = i.p_side ? p : q;
  return dev.*i.field;
}

void set_param(MemristorParams& p, MemristorParams& q, ParamId id, double value) {
  const ParamInfo& i = info(id);
  MemristorParams& dev = i.p_side ? p : q;
  dev.*i.field = value;
}

std::array<ParamId, 4> family_params(Family family) {
  switch (family) {
    case Family::kResistances: return {ParamId::kRonP, ParamId::kRoffP, ParamId::kRonQ, ParamId::kRoffQ};
    case Family::kVoltages: return {ParamId::kVonP, ParamId::kVoffP, ParamId::kVonQ, ParamId::kVoffQ};
    case Family::kSpeeds: return {ParamId::kKonP, ParamId::kKoffP, ParamId::kKonQ, ParamId::kKoffQ};
  }
  return {};
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kResistances: return "r";
    case Family::kVoltages: return "v";
    case Family::kSpeeds: return "k";
  }
  return "r";
}

Family parse_family(std::string_view name) {
  if (name == "r" || name == "R" || name == "resistances") return Family::kResistances;
  if (name == "v" || name == "voltages" || name == "threshold voltages") return Family::kVoltages;
  if (name == "k" || name == "speeds" || name == "switching speeds") return Family::kSpeeds;
  throw ConfigError("unknown parameter family '" + std::string(name) + "' (expected r, v, k)");
}

}  // namespace imply
