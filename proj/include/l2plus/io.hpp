#pragma once

#include <string>

#include "l2plus/state_space.hpp"

namespace l2plus {

/// System from JSON {"name"?, "A", "B", "C", "D"} with matrices as arrays of
/// rows; empty arrays encode n = 0. Throws ParseError for malformed text or
/// inconsistent shapes, NonFiniteEntry for non-finite numbers.
StateSpace parse_system(const std::string& text);

/// parse_system on the contents of a file. Throws ParseError when the file
/// cannot be read.
StateSpace read_system(const std::string& path);

/// Inverse of parse_system.
std::string system_to_json(const StateSpace& sys);

/// Real matrix from a JSON array of rows such as "[[1, -1]]".
Matrix parse_matrix(const std::string& text);

}  // namespace l2plus
