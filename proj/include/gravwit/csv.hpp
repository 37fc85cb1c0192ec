#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace gravwit::csv {

/// Shortest decimal that round-trips to the same double.
std::string number(double v);

void write_row(std::ostream& out, const std::vector<std::string>& fields);
void write_header(std::ostream& out, std::initializer_list<std::string_view> columns);

}  // namespace gravwit::csv
