#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "momentlab/matrix.hpp"

namespace momentlab {

/// {"rows": n, "cols": m, "re": [...], "im": [...]}, row-major.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

/// Complex scalar literal: "1", "-2.5", "3i", "-i", "1+2i", "0.5-1e-3i", "-i/2".
Complex parse_complex(std::string_view text);

/// Matrix literal accepted on the command line:
///   diag(1,-1,2i)      diagonal matrix
///   [[0,1],[1,0]]      bracketed rows of complex literals
///   {"rows":...}       inline JSON object
/// Throws ParseError.
CMatrix parse_matrix_literal(std::string_view text);

/// Literal text when it parses, otherwise the contents of the file it names.
CMatrix load_matrix(const std::string& literal_or_path);

}  // namespace momentlab
