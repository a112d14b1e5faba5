#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qdb/types.hpp"

namespace qdb {

/// Parses one instance document. Throws Error(malformed_input) on schema errors.
RequestInstance parse_instance(const std::string& json_text);
std::string serialize_instance(const RequestInstance& instance);

/// JSON-lines reader; blank lines are skipped and errors carry "line N:".
/// `line_numbers`, when given, receives the 1-based source line of each instance.
std::vector<RequestInstance> read_instances(std::istream& in, std::vector<std::size_t>* line_numbers = nullptr);
std::vector<RequestInstance> load_instances(const std::string& path, std::vector<std::size_t>* line_numbers = nullptr);

void write_instances(std::ostream& out, const std::vector<RequestInstance>& instances);

}  // namespace qdb
