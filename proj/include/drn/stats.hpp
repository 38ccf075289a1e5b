#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace drn {

/// Raised when a test's statistical preconditions are not met (too few
/// samples, constant data). The CLI maps this to its own exit code.
struct StatPreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Special functions. Regularized incomplete gamma / beta via series and
// Lentz continued fractions; absolute error well under 1e-10 in the
// argument ranges these tests produce.
// ---------------------------------------------------------------------------

namespace detail {

inline double gamma_p_series(double a, double x) {
    // P(a,x) by power series, x < a+1
    double sum = 1.0 / a, term = sum, ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    // Q(a,x) by modified Lentz continued fraction, x >= a+1
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: a > 0, x >= 0 required");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double inc_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("inc_beta: x in [0,1] required");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double lnfront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log(1.0 - x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(lnfront) * detail::betacf(a, b, x) / a;
    return 1.0 - std::exp(lnfront) * detail::betacf(b, a, 1.0 - x) / b;
}

/// Chi-square survival function: P(X >= x) with `df` degrees of freedom.
inline double chi_square_sf(double x, int df) {
    if (x < 0.0) throw std::invalid_argument("chi_square_sf: x must be nonnegative");
    if (df < 1) throw std::invalid_argument("chi_square_sf: df must be positive");
    return gamma_q(df / 2.0, x / 2.0);
}

/// One-tailed Student-t survival function P(T >= t).
inline double student_t_sf(double t, int df) {
    if (df < 1) throw std::invalid_argument("student_t_sf: df must be positive");
    if (t == 0.0) return 0.5;
    double x = df / (df + t * t);
    double tail = 0.5 * inc_beta(df / 2.0, 0.5, x);
    return t > 0.0 ? tail : 1.0 - tail;
}

/// Two-tailed t p-value for the observed |t|.
inline double student_t_two_tailed(double t, int df) {
    return 2.0 * student_t_sf(std::fabs(t), df);
}

/// Table-note star convention: ** below 0.01, * below 0.05, two-tailed.
inline std::string significance_stars(double p) {
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

struct RankedSample {
    std::vector<double> values;
    std::vector<double> ranks;       // midranks, parallel to values
    std::vector<int> tie_groups;     // multiplicity of each tie group, in value order
};

/// Midranks: tied values receive the mean of the rank positions they span.
inline RankedSample midranks(const std::vector<double>& values) {
    if (values.empty()) throw StatPreconditionError("midranks: empty input");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    RankedSample out;
    out.values = values;
    out.ranks.assign(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = midrank;
        out.tie_groups.push_back(static_cast<int>(j - i + 1));
        i = j + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Kruskal-Wallis
// ---------------------------------------------------------------------------

struct KWResult {
    double h = 0.0;            // uncorrected statistic
    double h_corrected = 0.0;  // tie-corrected, basis of the p-value
    int df = 0;
    double p = 1.0;
    std::vector<double> mean_ranks;  // per group, input order
    std::vector<std::size_t> group_sizes;
    std::size_t n = 0;
};

/// Rank-based k-sample comparison on pooled midranks with tie correction.
inline KWResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw StatPreconditionError("kruskal_wallis: need >= 2 groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw StatPreconditionError("kruskal_wallis: empty group");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const std::size_t n = pooled.size();
    RankedSample rs = midranks(pooled);

    KWResult out;
    out.n = n;
    out.df = static_cast<int>(groups.size()) - 1;

    double stat = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += rs.ranks[offset + i];
        offset += g.size();
        out.mean_ranks.push_back(rank_sum / static_cast<double>(g.size()));
        out.group_sizes.push_back(g.size());
        stat += rank_sum * rank_sum / static_cast<double>(g.size());
    }
    const double nd = static_cast<double>(n);
    out.h = 12.0 / (nd * (nd + 1.0)) * stat - 3.0 * (nd + 1.0);

    double tie_sum = 0.0;
    for (int t : rs.tie_groups) {
        double td = t;
        tie_sum += td * td * td - td;
    }
    double correction = 1.0 - tie_sum / (nd * nd * nd - nd);
    if (correction <= 0.0)
        throw StatPreconditionError("kruskal_wallis: all pooled values identical");
    out.h_corrected = out.h / correction;
    out.p = chi_square_sf(out.h_corrected, out.df);
    return out;
}

// ---------------------------------------------------------------------------
// Spearman rank correlation
// ---------------------------------------------------------------------------

struct SpearmanResult {
    double rho = 0.0;
    std::size_t n = 0;
    double p = 1.0;  // two-tailed, t approximation
    std::string stars;
};

/// Tie-robust Spearman: product-moment correlation of midranks, two-tailed
/// significance from the t approximation at df = n - 2.
inline SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw StatPreconditionError("spearman: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw StatPreconditionError("spearman: need n >= 3");
    std::vector<double> rx = midranks(x).ranks;
    std::vector<double> ry = midranks(y).ranks;

    const double nd = static_cast<double>(n);
    double mean = (nd + 1.0) / 2.0;  // both rank vectors sum to n(n+1)/2
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = rx[i] - mean, dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw StatPreconditionError("spearman: constant variable");

    SpearmanResult out;
    out.n = n;
    out.rho = sxy / std::sqrt(sxx * syy);
    out.rho = std::clamp(out.rho, -1.0, 1.0);
    if (std::fabs(out.rho) >= 1.0) {
        out.p = 0.0;
    } else {
        double t = out.rho * std::sqrt((nd - 2.0) / (1.0 - out.rho * out.rho));
        out.p = student_t_two_tailed(t, static_cast<int>(n) - 2);
    }
    out.stars = significance_stars(out.p);
    return out;
}

/// Exact two-tailed permutation p-value for Spearman's rho, feasible for
/// n <= 10. Counts permutations of y whose |rho| reaches the observed one.
inline double spearman_exact_p(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw StatPreconditionError("spearman_exact_p: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw StatPreconditionError("spearman_exact_p: need n >= 3");
    if (n > 10) throw StatPreconditionError("spearman_exact_p: n must be <= 10");

    std::vector<double> rx = midranks(x).ranks;
    std::vector<double> ry = midranks(y).ranks;
    const double nd = static_cast<double>(n);
    double mean = (nd + 1.0) / 2.0;
    double sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw StatPreconditionError("spearman_exact_p: constant variable");
    double denom = std::sqrt(sxx * syy);

    auto rho_of = [&](const std::vector<double>& perm_ry) {
        double sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) sxy += (rx[i] - mean) * (perm_ry[i] - mean);
        return sxy / denom;
    };

    double observed = std::fabs(rho_of(ry));
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    std::uint64_t hits = 0, total = 0;
    do {
        ++total;
        if (std::fabs(rho_of(perm)) >= observed - 1e-12) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace drn
