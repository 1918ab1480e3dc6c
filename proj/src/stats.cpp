#include "enhvi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace enhvi::stats {

std::vector<std::optional<double>> spatial_percentile(
    std::span<const std::optional<double>> values) {
    std::vector<std::optional<double>> out(values.size());

    std::vector<std::size_t> idx;
    idx.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i]) idx.push_back(i);

    const std::size_t n = idx.size();
    if (n == 0) return out;
    if (n == 1) {
        out[idx[0]] = 0.5;
        return out;
    }

    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return *values[a] < *values[b]; });

    // Average ranks over tie runs, then (rank-1)/(n-1).
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && *values[idx[j + 1]] == *values[idx[i]]) ++j;
        const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        const double pct = (avg_rank - 1.0) / static_cast<double>(n - 1);
        for (std::size_t k = i; k <= j; ++k) out[idx[k]] = pct;
        i = j + 1;
    }
    return out;
}

double empirical_percentile(std::span<const double> sorted_sample, double x) {
    if (sorted_sample.empty())
        throw std::invalid_argument("empirical_percentile: empty sample");
    const auto lo = std::lower_bound(sorted_sample.begin(), sorted_sample.end(), x);
    const auto hi = std::upper_bound(lo, sorted_sample.end(), x);
    const double below = static_cast<double>(lo - sorted_sample.begin());
    const double equal = static_cast<double>(hi - lo);
    return (below + 0.5 * equal) / static_cast<double>(sorted_sample.size());
}

namespace {

// Inversion count by merge sort; strict inversions only.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& tmp,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(v, tmp, lo, mid) + count_inversions(v, tmp, mid, hi);
    std::size_t a = lo, b = mid, k = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            inv += mid - a;
            tmp[k++] = v[b++];
        } else {
            tmp[k++] = v[a++];
        }
    }
    while (a < mid) tmp[k++] = v[a++];
    while (b < hi) tmp[k++] = v[b++];
    std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
    return inv;
}

std::uint64_t pairs(std::uint64_t t) { return t * (t - 1) / 2; }

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw UndefinedCorrelation("kendall_tau: fewer than 2 complete pairs");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Tie counts: within x, within y, and joint (x,y).
    std::uint64_t tie_x = 0, tie_xy = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
            tie_x += pairs(j - i + 1);
            std::size_t a = i;
            while (a <= j) {
                std::size_t b = a;
                while (b + 1 <= j && y[order[b + 1]] == y[order[a]]) ++b;
                tie_xy += pairs(b - a + 1);
                a = b + 1;
            }
            i = j + 1;
        }
    }
    std::uint64_t tie_y = 0;
    {
        std::vector<double> ys(y.begin(), y.end());
        std::sort(ys.begin(), ys.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && ys[j + 1] == ys[i]) ++j;
            tie_y += pairs(j - i + 1);
            i = j + 1;
        }
    }

    const std::uint64_t n0 = pairs(n);
    if (tie_x == n0 || tie_y == n0)
        throw UndefinedCorrelation("kendall_tau: constant vector");

    std::vector<double> y_by_x(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) y_by_x[i] = y[order[i]];
    const std::uint64_t swaps = count_inversions(y_by_x, tmp, 0, n);

    const double con_minus_dis = static_cast<double>(n0) - static_cast<double>(tie_x) -
                                 static_cast<double>(tie_y) + static_cast<double>(tie_xy) -
                                 2.0 * static_cast<double>(swaps);
    const double denom = std::sqrt(static_cast<double>(n0 - tie_x)) *
                         std::sqrt(static_cast<double>(n0 - tie_y));
    return con_minus_dis / denom;
}

double kendall_tau(std::span<const std::optional<double>> x,
                   std::span<const std::optional<double>> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("kendall_tau: length mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i]) {
            xs.push_back(*x[i]);
            ys.push_back(*y[i]);
        }
    }
    return kendall_tau(std::span<const double>(xs), std::span<const double>(ys));
}

} // namespace enhvi::stats
