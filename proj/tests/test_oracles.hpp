// Independent reference implementations used only by tests. These stay
// deliberately naive (exhaustive enumeration, bisection) so they share no
// code path with the library.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct Sample {
    double value;
    std::string label;
};

// Best achievable accuracy over every subset of the midpoint boundary
// candidates and every assignment of distinct labels to the resulting
// segments (one interval per label). Candidates sit between adjacent
// distinct values unless both carry exactly the same single label.
inline double best_segmentation_accuracy(std::vector<Sample> samples) {
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.label < b.label;
    });
    std::vector<double> values;
    std::vector<std::vector<std::string>> labels_at;
    for (const Sample& s : samples) {
        if (values.empty() || values.back() != s.value) {
            values.push_back(s.value);
            labels_at.emplace_back();
        }
        labels_at.back().push_back(s.label);
    }
    std::vector<std::string> labels;
    for (const Sample& s : samples)
        if (std::find(labels.begin(), labels.end(), s.label) == labels.end())
            labels.push_back(s.label);

    std::vector<double> candidates;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const auto& a = labels_at[i - 1];
        const auto& b = labels_at[i];
        bool pure_same = a.size() >= 1 && b.size() >= 1 &&
                         std::all_of(a.begin(), a.end(), [&](const std::string& l) { return l == a[0]; }) &&
                         std::all_of(b.begin(), b.end(), [&](const std::string& l) { return l == a[0]; });
        if (!pure_same) candidates.push_back((values[i - 1] + values[i]) / 2.0);
    }

    int best = -1;
    const std::size_t n_cand = candidates.size();
    for (std::size_t mask = 0; mask < (1u << n_cand); ++mask) {
        std::vector<double> bounds;
        for (std::size_t c = 0; c < n_cand; ++c)
            if (mask & (1u << c)) bounds.push_back(candidates[c]);
        const std::size_t segments = bounds.size() + 1;
        if (segments > labels.size()) continue;  // not enough distinct labels
        auto segment_of = [&](double v) {
            std::size_t s = 0;
            for (double b : bounds)
                if (v > b) ++s;
            return s;
        };
        // enumerate every assignment of labels to segments, skipping reuses
        std::vector<std::size_t> assign(segments, 0);
        while (true) {
            bool injective = true;
            for (std::size_t a = 0; a < segments && injective; ++a)
                for (std::size_t b = a + 1; b < segments; ++b)
                    if (assign[a] == assign[b]) {
                        injective = false;
                        break;
                    }
            if (injective) {
                int correct = 0;
                for (const Sample& s : samples)
                    if (labels[assign[segment_of(s.value)]] == s.label) ++correct;
                if (correct > best) best = correct;
            }
            std::size_t pos = 0;
            while (pos < segments && ++assign[pos] == labels.size()) assign[pos++] = 0;
            if (pos == segments) break;
        }
    }
    return static_cast<double>(best) / static_cast<double>(samples.size());
}

// Wilson bounds recomputed by bisecting (p_hat - p)^2 = z^2 p(1-p)/n instead
// of using the closed form.
inline long double wilson_root(long double p_hat, long double n, long double z, long double lo,
                               long double hi) {
    auto g = [&](long double p) {
        return (p_hat - p) * (p_hat - p) - z * z * p * (1.0L - p) / n;
    };
    for (int i = 0; i < 200; ++i) {
        long double mid = (lo + hi) / 2.0L;
        if ((g(lo) <= 0) == (g(mid) <= 0))
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2.0L;
}

inline double wilson_lower_bisect(int k, int n, double z) {
    if (n == 0) return 0.0;
    long double p_hat = static_cast<long double>(k) / n;
    if (k == 0) return 0.0;
    return static_cast<double>(wilson_root(p_hat, n, z, 0.0L, p_hat == 1.0L ? 1.0L - 1e-15L : p_hat));
}

inline double wilson_upper_bisect(int k, int n, double z) {
    if (n == 0) return 1.0;
    long double p_hat = static_cast<long double>(k) / n;
    if (k == n) return 1.0;
    return static_cast<double>(
        wilson_root(p_hat, n, z, p_hat == 0.0L ? 1e-15L : p_hat, 1.0L));
}

// Exact binomial tails by direct summation (long double), for cross-checks
// on the worked verification examples.
inline long double binom_tail_ge(int k, int n, long double p) {
    long double total = 0.0L;
    for (int i = k; i <= n; ++i) {
        long double term = 0.0L;
        // log-free product to keep dependencies out; n <= 60 keeps this exact enough
        long double c = 1.0L;
        for (int j = 1; j <= i; ++j) c = c * (n - i + j) / j;
        term = c * std::pow(p, i) * std::pow(1.0L - p, n - i);
        total += term;
    }
    return total;
}

}  // namespace oracle
