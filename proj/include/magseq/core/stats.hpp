#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

namespace magseq {

// Index window of the interior of a record, t in [0.2 T, 0.8 T] with
// t_k = k tau and T = (n-1) tau. Returned as inclusive [first, last].
inline std::pair<std::size_t, std::size_t> mid_interval_indices(std::size_t n_steps) {
    const double last = static_cast<double>(n_steps - 1);
    auto first = static_cast<std::size_t>(std::ceil(0.2 * last - 1e-12));
    auto final = static_cast<std::size_t>(std::floor(0.8 * last + 1e-12));
    if (final < first) final = first;
    return {first, final};
}

inline double mean_over(std::span<const double> v, std::size_t first, std::size_t last) {
    double s = 0.0;
    for (std::size_t i = first; i <= last; ++i) s += v[i];
    return s / static_cast<double>(last - first + 1);
}

inline double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    return mean_over(v, 0, v.size() - 1);
}

inline double variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace magseq
