#pragma once

#include <string>

#include "mdiqrng/entropy.hpp"
#include "mdiqrng/extract.hpp"

namespace mdiqrng::report {

// CertReport as a JSON document with stable field names and key order.
std::string cert_report_json(const entropy::CertReport& rep);

std::string intensity_search_json(const entropy::IntensitySearchResult& res);

std::string selftest_json(const extract::SelfTestReport& rep, std::size_t input_bits,
                          std::size_t output_bits, bool test_only_seed);

}  // namespace mdiqrng::report
