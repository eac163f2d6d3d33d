#pragma once

#include <iosfwd>
#include <string>

#include "mdiqrng/decoy.hpp"

namespace mdiqrng::io {

// Counts table format: header "probe,intensity,trials,clicks", probe in
// {Z0,Z1,Xplus,Yplus}, intensity in {signal,decoy}, exactly 8 data rows.
// Parse errors name the offending line.
decoy::CountsTable read_counts_csv(std::istream& in);
decoy::CountsTable read_counts_csv_file(const std::string& path);

std::string counts_to_csv(const decoy::CountsTable& t);

// All file outputs go through write-to-temp-then-rename so a failed run
// never leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Round-trippable decimal formatting (17 significant digits) used by the
// CSV emitters.
std::string format_double(double v);

}  // namespace mdiqrng::io
