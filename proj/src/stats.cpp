#include "gm/stats.hpp"

#include "gm/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gm::stats {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Continued fraction for the incomplete beta (Lentz's algorithm).
double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-30;
    constexpr double eps = 1e-14;
    constexpr int max_iter = 500;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

double sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw NumericError("incomplete_beta: a,b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x));
    // symmetry keeps the continued fraction in its fast-convergence region
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw NumericError("gamma_q: a must be positive");
    if (x <= 0.0) return 1.0;

    if (x < a + 1.0) {
        // lower series
        double ap = a;
        double term = 1.0 / a;
        double total = term;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            total += term;
            if (std::abs(term) < std::abs(total) * 1e-15) {
                double p = total * std::exp(-x + a * std::log(x) - std::lgamma(a));
                return 1.0 - p;
            }
        }
        throw NumericError("gamma_q series did not converge");
    }
    // upper continued fraction (Lentz)
    constexpr double tiny = 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) {
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NumericError("gamma_q continued fraction did not converge");
}

MeanSd mean_sd(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("mean_sd: need at least 2 values");
    double n = static_cast<double>(x.size());
    double mean = sum(x) / n;
    double ss = 0.0;
    for (double v : x) {
        double d = v - mean;
        ss += d * d;
    }
    return MeanSd{mean, std::sqrt(ss / (n - 1.0))};
}

double p_value_t(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("p_value_t: df must be positive");
    if (t == 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    double x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult student_t_summary(double m1, double s1, int n1, double m2, double s2, int n2) {
    if (n1 < 2 || n2 < 2) throw std::invalid_argument("student_t: need n >= 2 per group");
    double df = static_cast<double>(n1 + n2 - 2);
    double pooled_var =
        ((n1 - 1) * s1 * s1 + (n2 - 1) * s2 * s2) / df;
    if (pooled_var <= 0.0) {
        if (m1 == m2) return TTestResult{0.0, df, 1.0, TTestMethod::Student};
        throw std::invalid_argument("student_t: zero pooled variance with unequal means");
    }
    double se = std::sqrt(pooled_var * (1.0 / n1 + 1.0 / n2));
    double t = (m1 - m2) / se;
    return TTestResult{t, df, p_value_t(t, df), TTestMethod::Student};
}

TTestResult student_t(std::span<const double> a, std::span<const double> b) {
    auto ma = mean_sd(a);
    auto mb = mean_sd(b);
    return student_t_summary(ma.mean, ma.sd, static_cast<int>(a.size()), mb.mean, mb.sd,
                             static_cast<int>(b.size()));
}

TTestResult welch_t(std::span<const double> a, std::span<const double> b) {
    auto ma = mean_sd(a);
    auto mb = mean_sd(b);
    double n1 = static_cast<double>(a.size());
    double n2 = static_cast<double>(b.size());
    double va = ma.sd * ma.sd / n1;
    double vb = mb.sd * mb.sd / n2;
    if (va + vb <= 0.0) {
        if (ma.mean == mb.mean) {
            return TTestResult{0.0, n1 + n2 - 2.0, 1.0, TTestMethod::Welch};
        }
        throw std::invalid_argument("welch_t: zero variance with unequal means");
    }
    double t = (ma.mean - mb.mean) / std::sqrt(va + vb);
    double df = (va + vb) * (va + vb) / (va * va / (n1 - 1.0) + vb * vb / (n2 - 1.0));
    return TTestResult{t, df, p_value_t(t, df), TTestMethod::Welch};
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: size mismatch");
    std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("pearson: need at least 3 pairs");

    double mx = sum(x) / static_cast<double>(n);
    double my = sum(y) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw std::invalid_argument("pearson: zero variance");
    }

    CorrelationResult res;
    // single sqrt of the product: bitwise-equal inputs then yield r == 1.0
    res.r = sxy / std::sqrt(sxx * syy);
    res.r = std::clamp(res.r, -1.0, 1.0);
    res.df_den = static_cast<int>(n) - 2;
    res.slope = sxy / sxx;
    res.intercept = my - res.slope * mx;

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (res.intercept + res.slope * x[i]);
        sse += e * e;
    }
    res.rmse = std::sqrt(sse / static_cast<double>(n));

    double r2 = res.r * res.r;
    if (r2 >= 1.0) {
        res.f_stat = std::numeric_limits<double>::infinity();
        res.p = 0.0;
    } else {
        double t = res.r * std::sqrt(static_cast<double>(res.df_den) / (1.0 - r2));
        res.f_stat = t * t;
        res.p = p_value_t(t, static_cast<double>(res.df_den));
    }
    return res;
}

EffectSize hedges_g(double m1, double s1, int n1, double m2, double s2, int n2) {
    if (n1 < 2 || n2 < 2) throw std::invalid_argument("hedges_g: need n >= 2 per group");
    double df = static_cast<double>(n1 + n2 - 2);
    double pooled_sd = std::sqrt(((n1 - 1) * s1 * s1 + (n2 - 1) * s2 * s2) / df);
    if (pooled_sd <= 0.0) {
        if (m1 == m2) return EffectSize{0.0};
        throw std::invalid_argument("hedges_g: zero pooled sd");
    }
    double d = (m1 - m2) / pooled_sd;
    double correction = 1.0 - 3.0 / (4.0 * df - 1.0);
    return EffectSize{d * correction};
}

ChiSquareResult chi_square_2x2(const std::array<std::array<double, 2>, 2>& counts) {
    double row[2] = {counts[0][0] + counts[0][1], counts[1][0] + counts[1][1]};
    double col[2] = {counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]};
    double total = row[0] + row[1];
    if (row[0] <= 0.0 || row[1] <= 0.0 || col[0] <= 0.0 || col[1] <= 0.0) {
        throw std::invalid_argument("chi_square_2x2: zero marginal");
    }
    double chi2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double expected = row[i] * col[j] / total;
            double d = counts[i][j] - expected;
            chi2 += d * d / expected;
        }
    }
    return ChiSquareResult{chi2, 1, gamma_q(0.5, chi2 / 2.0)};
}

std::vector<double> zscore(std::span<const double> x) {
    auto ms = mean_sd(x);
    if (ms.sd <= 0.0) throw std::invalid_argument("zscore: zero standard deviation");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - ms.mean) / ms.sd;
    return out;
}

double silverman_bandwidth(std::span<const double> x) {
    auto ms = mean_sd(x);
    double n = static_cast<double>(x.size());
    return 1.06 * ms.sd * std::pow(n, -0.2);
}

std::vector<double> kde_gaussian(std::span<const double> x, std::span<const double> grid,
                                 std::optional<double> bandwidth) {
    if (x.size() < 2) throw std::invalid_argument("kde_gaussian: need at least 2 samples");
    double h = bandwidth ? *bandwidth : silverman_bandwidth(x);
    if (!(h > 0.0)) throw std::invalid_argument("kde_gaussian: bandwidth must be positive");

    double norm = 1.0 / (static_cast<double>(x.size()) * h * std::sqrt(2.0 * kPi));
    std::vector<double> density(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (double xi : x) {
            double z = (grid[g] - xi) / h;
            acc += std::exp(-0.5 * z * z);
        }
        density[g] = acc * norm;
    }
    return density;
}

}  // namespace gm::stats
