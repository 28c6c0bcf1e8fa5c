#pragma once

#include <string_view>

#include "json.hpp"

#include "demeasure/ir.hpp"

namespace demeasure::ir {

/// Insertion-ordered JSON keeps serialized documents byte-stable and
/// readable in key order.
using Json = nlohmann::ordered_json;

/// Matrices are arrays of rows; each entry is a [re, im] pair.
Json matrix_to_json(const ComplexMatrix& m);
/// `path` is the JSON pointer used in error messages.
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);

Json protocol_to_json(const Protocol& p);
Protocol protocol_from_json(const Json& j);

/// Parses text into JSON, converting syntax errors to ParseError with a
/// 1-based line and column.
Json parse_json_text(std::string_view text);

/// Two-space indented dump with a trailing newline; matrix rows and
/// index lists are kept on one line.
std::string dump_json(const Json& j);

}  // namespace demeasure::ir
