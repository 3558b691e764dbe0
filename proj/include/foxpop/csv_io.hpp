/*! @file csv_io.hpp
    @brief Minimal CSV reading/writing with byte-stable number formatting.
*/
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foxpop {

//! A file could not be read or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Shortest decimal string that round-trips to @p x.
std::string format_real(double x);
//! Empty string when absent.
std::string format_real(const std::optional<double>& x);

//! Comma-separated fields, no quoting. Blank lines are skipped; a trailing
//! '\r' is stripped.
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

std::string join_csv(const std::vector<std::string>& fields);

//! Writes @p content to @p path in binary mode. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

double parse_real(const std::string& field);
std::optional<double> parse_optional_real(const std::string& field);

}  // namespace foxpop
