#pragma once

#include <nlohmann/json.hpp>
#include <string>

namespace collarkit {

/// Shortest decimal that round-trips; infinities print as "inf" / "-inf".
std::string format_double(double x);

/// JSON number, or the string "inf" / "-inf" / "nan" for non-finite values.
nlohmann::json json_number(double x);

/// Inverse of json_number.
double number_from_json(const nlohmann::json& j);

}  // namespace collarkit
