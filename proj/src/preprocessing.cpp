#include "intdc/preprocessing.hpp"

#include "intdc/random.hpp"

#include <cmath>
#include <string>

namespace intdc {

NormalizeMode parse_normalize_mode(const std::string& name) {
    if (name == "zscore") return NormalizeMode::zscore;
    if (name == "unit_second_moment" || name == "usm") return NormalizeMode::unit_second_moment;
    throw UsageError("unknown normalize mode '" + name + "' (expected zscore or unit_second_moment)");
}

MovingAverageAlign parse_ma_align(const std::string& name) {
    if (name == "centered") return MovingAverageAlign::centered;
    if (name == "trailing") return MovingAverageAlign::trailing;
    throw UsageError("unknown moving-average alignment '" + name + "' (expected centered or trailing)");
}

Vector moving_average(const Vector& v, int window, MovingAverageAlign align) {
    if (window < 1) throw UsageError("moving-average window must be >= 1");
    const Eigen::Index n = v.size();
    // Prefix sums keep this O(n) for the long (e.g. 401-point) windows.
    Vector prefix(n + 1);
    prefix[0] = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + v[t];

    const Eigen::Index w = window;
    const Eigen::Index left = align == MovingAverageAlign::centered ? (w - 1) / 2 : w - 1;
    const Eigen::Index right = align == MovingAverageAlign::centered ? w - 1 - left : 0;
    Vector out(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, t - left);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, t + right);
        out[t] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

TimeSeries detrend_moving_average(const TimeSeries& s, int short_window, int long_window,
                                  MovingAverageAlign align) {
    if (short_window < 1 || long_window <= short_window)
        throw UsageError("detrend needs long_window > short_window >= 1");
    if (s.size() < long_window)
        throw UsageError("series '" + s.id + "' has length " + std::to_string(s.size()) +
                         ", shorter than the long window " + std::to_string(long_window));
    Vector v = s.values;
    const double lo = v.minCoeff();
    if (lo < 0.0) v.array() -= lo;

    const Vector num = moving_average(v, short_window, align);
    const Vector den = moving_average(v, long_window, align);
    Vector out(v.size());
    for (Eigen::Index t = 0; t < v.size(); ++t) {
        if (den[t] == 0.0)
            throw DegenerateError("series '" + s.id + "': long moving average is zero at index " +
                                  std::to_string(t));
        out[t] = num[t] / den[t];
    }
    return {s.id, std::move(out), s.sample_period};
}

TimeSeries normalize(const TimeSeries& s, NormalizeMode mode) {
    const auto n = static_cast<double>(s.size());
    if (s.size() == 0) throw DataError("series '" + s.id + "' is empty");
    Vector v = s.values;
    if (mode == NormalizeMode::zscore) {
        const double mean = v.mean();
        v.array() -= mean;
        const double var = v.squaredNorm() / n;
        if (!(var > 0.0)) throw DegenerateError("series '" + s.id + "' is constant; cannot z-score");
        v /= std::sqrt(var);
    } else {
        const double m2 = v.squaredNorm() / n;
        if (!(m2 > 0.0)) throw DegenerateError("series '" + s.id + "' has zero second moment");
        v /= std::sqrt(m2);
    }
    return {s.id, std::move(v), s.sample_period};
}

std::vector<TimeSeries> decimate(const TimeSeries& s, int factor) {
    if (factor < 1) throw UsageError("decimation factor must be >= 1");
    if (s.size() < factor) throw UsageError("series '" + s.id + "' is shorter than the decimation factor");
    std::vector<TimeSeries> out;
    out.reserve(static_cast<std::size_t>(factor));
    for (int p = 0; p < factor; ++p) {
        const Eigen::Index len = (s.size() - p + factor - 1) / factor;
        Vector v(len);
        for (Eigen::Index i = 0; i < len; ++i) v[i] = s.values[p + i * factor];
        std::optional<double> period;
        if (s.sample_period) period = *s.sample_period * factor;
        out.emplace_back(factor == 1 ? s.id : s.id + "#" + std::to_string(p), std::move(v), period);
    }
    return out;
}

TimeSeries interleave(const std::vector<TimeSeries>& phases) {
    if (phases.empty()) throw UsageError("interleave needs at least one phase");
    const auto factor = static_cast<Eigen::Index>(phases.size());
    Eigen::Index total = 0;
    for (const auto& p : phases) total += p.size();
    Vector v(total);
    for (Eigen::Index p = 0; p < factor; ++p) {
        const auto& src = phases[static_cast<std::size_t>(p)].values;
        for (Eigen::Index i = 0; i < src.size(); ++i) {
            const Eigen::Index t = p + i * factor;
            if (t >= total) throw UsageError("phase lengths are not consistent with interleaving");
            v[t] = src[i];
        }
    }
    std::string id = phases.front().id;
    if (const auto hash = id.rfind('#'); hash != std::string::npos) id.erase(hash);
    return {id, std::move(v), std::nullopt};
}

std::vector<TimeSeries> segment(const TimeSeries& s, int parts) {
    if (parts < 1) throw UsageError("segment count must be >= 1");
    if (parts == 1) return {s};
    const Eigen::Index len = s.size() / parts;
    if (len == 0) throw UsageError("series '" + s.id + "' is shorter than the segment count");
    std::vector<TimeSeries> out;
    for (int p = 0; p < parts; ++p)
        out.emplace_back(s.id + "@" + std::to_string(p), s.values.segment(p * len, len), s.sample_period);
    return out;
}

TimeSeries jitter(const TimeSeries& s, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0)) throw UsageError("jitter sigma must be > 0");
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    Vector v = s.values;
    for (Eigen::Index t = 0; t < v.size(); ++t) v[t] += noise(rng);
    return {s.id, std::move(v), s.sample_period};
}

namespace {

template <class Split>
std::vector<Dataset> split_dataset(const Dataset& d, int count, Split split) {
    std::vector<Dataset> out(static_cast<std::size_t>(count));
    for (auto& part : out) part.ground_truth = d.ground_truth;
    for (const auto& s : d.series) {
        auto pieces = split(s);
        for (std::size_t p = 0; p < pieces.size(); ++p) {
            pieces[p].id = s.id;
            out[p].series.push_back(std::move(pieces[p]));
        }
    }
    return out;
}

}  // namespace

std::vector<Dataset> decimate(const Dataset& d, int factor) {
    if (factor < 1) throw UsageError("decimation factor must be >= 1");
    // Unequal phase lengths would break the equal-length invariant; trim to
    // a multiple of the factor first.
    Dataset trimmed = d;
    const Eigen::Index keep = d.length() - d.length() % factor;
    for (auto& s : trimmed.series) s.values.conservativeResize(keep);
    return split_dataset(trimmed, factor, [factor](const TimeSeries& s) { return decimate(s, factor); });
}

std::vector<Dataset> segment(const Dataset& d, int parts) {
    return split_dataset(d, parts, [parts](const TimeSeries& s) { return segment(s, parts); });
}

}  // namespace intdc
