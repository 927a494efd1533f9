#pragma once

// Repo-wide JSON encodings.
//
//   matrix: {"rows": r, "cols": c, "data": [[[re, im], ...], ...]}
//   vector: {"dim": d, "data": [[re, im], ...]}
//
// Parsing is strict: shapes must agree with the declared sizes and every
// scalar must be a finite number pair. Violations throw InputError.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "conecert/matrices.hpp"

namespace conecert {

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json real_matrix_to_json(const RealMatrix& m);

Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_json_file_atomic(const std::filesystem::path& path, const Json& j);

}  // namespace conecert
