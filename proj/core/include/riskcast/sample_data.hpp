#pragma once

#include "riskcast/date.hpp"
#include "riskcast/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace riskcast {

/// Options for the bundled demo dataset: a statistically calibrated stand-in
/// for the public S&P 500 history (1981-2020) plus 41 predictor series, with
/// documented market-event days injected at their historical values. Swap in
/// real vendor data through the same manifest for production studies.
struct SampleDataOptions {
    std::string out_dir;
    std::uint64_t seed = 20200214;
};

struct SampleDataSummary {
    int n_days = 0;
    Date first_date, last_date;
    Date first_out_of_sample; // first day with two full staging windows behind it
    int out_of_sample_days = 0;
    SampleStats oos_stats; // daily log-return moments over the out-of-sample span
    std::string manifest_path;
};

/// Writes one CSV per variable plus manifest.json into out_dir and returns
/// the headline numbers. Deterministic for a given seed.
SampleDataSummary generate_sample_dataset(const SampleDataOptions& options);

/// NYSE-style trading calendar (weekday minus holiday rules and the one-off
/// closures in the covered era).
std::vector<Date> trading_calendar(Date from, Date to);

} // namespace riskcast
