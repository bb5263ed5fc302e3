#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "tphase/lti.hpp"
#include "tphase/tensor.hpp"

namespace tphase::io {

/// ".ttj": {"m":int,"n":int,"p":int,"data":[slice][row][col] = [re, im]}.
Tensor3 tensor_from_json(const nlohmann::json& j);
Tensor3 parse_ttj(const std::string& text);
/// Writes doubles with 17 significant digits.
std::string format_ttj(const Tensor3& t);
Tensor3 read_ttj(const std::filesystem::path& path);
void write_ttj(const Tensor3& t, const std::filesystem::path& path);

/// ".tlj": {"kind":"ss","A":ttj,"B":ttj,"C":ttj,"D":ttj} or
/// {"kind":"rational","slices":[slice][row][col] = {"num":[...],"den":[...]}}.
LtiSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const LtiSystem& sys);
LtiSystem read_tlj(const std::filesystem::path& path);
void write_tlj(const LtiSystem& sys, const std::filesystem::path& path);

/// Writes through a temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// %.17g formatting.
std::string format_double(double v);

}  // namespace tphase::io
