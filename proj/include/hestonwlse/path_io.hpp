#pragma once

#include <iosfwd>
#include <string>

#include "hestonwlse/model.hpp"

namespace hestonwlse {

// CSV layout: header `t,x,y`, one row per grid point, 17 significant digits.
void write_path_csv(std::ostream& out, const PathGrid& path);
PathGrid read_path_csv(std::istream& in);

// JSON layout: {"dt":..., "t_end":..., "x":[...], "y":[...]}.
std::string path_to_json(const PathGrid& path);
PathGrid path_from_json(const std::string& text);

// Dispatches on the extension (.json, anything else is CSV).
void save_path(const std::string& filename, const PathGrid& path);
PathGrid load_path(const std::string& filename);

}  // namespace hestonwlse
