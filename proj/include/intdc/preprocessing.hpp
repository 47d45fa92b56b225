#pragma once

#include "intdc/timeseries.hpp"

#include <cstdint>
#include <vector>

namespace intdc {

enum class MovingAverageAlign { centered, trailing };
enum class NormalizeMode { zscore, unit_second_moment };

NormalizeMode parse_normalize_mode(const std::string& name);
MovingAverageAlign parse_ma_align(const std::string& name);

// Mean over the window ending (trailing) or centred at each t, truncated
// where the window runs past either end of the series.
Vector moving_average(const Vector& v, int window, MovingAverageAlign align = MovingAverageAlign::centered);

// Ratio of a short to a long moving average. The series is first shifted to
// a zero minimum when it has negative values.
TimeSeries detrend_moving_average(const TimeSeries& s, int short_window, int long_window,
                                  MovingAverageAlign align = MovingAverageAlign::centered);

TimeSeries normalize(const TimeSeries& s, NormalizeMode mode);

// Phase p holds values[p], values[p + factor], ...
std::vector<TimeSeries> decimate(const TimeSeries& s, int factor);
TimeSeries interleave(const std::vector<TimeSeries>& phases);

// Contiguous equal-length pieces; the tail remainder is dropped.
std::vector<TimeSeries> segment(const TimeSeries& s, int parts);

TimeSeries jitter(const TimeSeries& s, double sigma, std::uint64_t seed);

// Dataset-wide versions. decimate/segment return one Dataset per phase or
// piece; ground truth is carried over to each.
std::vector<Dataset> decimate(const Dataset& d, int factor);
std::vector<Dataset> segment(const Dataset& d, int parts);

}  // namespace intdc
