#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace gm::stats {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // sample (n-1) standard deviation
};

MeanSd mean_sd(std::span<const double> x);

enum class TTestMethod { Student, Welch };

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
    TTestMethod method = TTestMethod::Student;
};

// Pooled-variance t, df = n1 + n2 - 2, oriented as mean(a) - mean(b).
TTestResult student_t(std::span<const double> a, std::span<const double> b);

// Same test from summary statistics (mean, sample sd, n) per group.
TTestResult student_t_summary(double m1, double s1, int n1, double m2, double s2, int n2);

// Unequal-variance t with Welch-Satterthwaite df.
TTestResult welch_t(std::span<const double> a, std::span<const double> b);

// Two-sided p for a t statistic via the regularized incomplete beta.
double p_value_t(double t, double df);

struct CorrelationResult {
    double r = 0.0;
    double f_stat = 0.0;  // equals t^2 with t from r at df = n-2
    int df_den = 0;       // regression F dfs are (1, n-2)
    double p = 1.0;
    // least-squares fit y = intercept + slope * x; rmse = sqrt(SSE / n)
    double slope = 0.0;
    double intercept = 0.0;
    double rmse = 0.0;
};

CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

struct EffectSize {
    double hedges_g = 0.0;
};

// Pooled-SD standardized mean difference (m1 - m2) with the small-sample
// correction J = 1 - 3/(4(n1+n2-2)-1); shares student_t's sign.
EffectSize hedges_g(double m1, double s1, int n1, double m2, double s2, int n2);

struct ChiSquareResult {
    double chi2 = 0.0;
    int df = 1;
    double p = 1.0;
};

// Uncorrected Pearson chi-square on a 2x2 contingency table, rows x cols.
ChiSquareResult chi_square_2x2(const std::array<std::array<double, 2>, 2>& counts);

// (x_i - mean) / sample_sd
std::vector<double> zscore(std::span<const double> x);

double silverman_bandwidth(std::span<const double> x);

// Gaussian kernel density on the given grid; bandwidth defaults to
// Silverman's rule 1.06 * sd * n^(-1/5).
std::vector<double> kde_gaussian(std::span<const double> x, std::span<const double> grid,
                                 std::optional<double> bandwidth = std::nullopt);

// Regularized incomplete beta I_x(a, b), accurate to ~1e-10.
double incomplete_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a, x) = P(chi2_{2a} >= 2x).
double gamma_q(double a, double x);

}  // namespace gm::stats
