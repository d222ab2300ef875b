#include "gm/common.hpp"
#include "gm/predict.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace gm::predict {

int FeatureMatrix::column(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if (feature_names[j] == name) return static_cast<int>(j);
    }
    return -1;
}

FeatureMatrix FeatureMatrix::select(std::span<const std::string> names) const {
    FeatureMatrix out;
    out.targets = targets;
    out.row_ids = row_ids;
    std::vector<int> cols;
    for (const auto& name : names) {
        int c = column(name);
        if (c < 0) throw ValidationError("unknown feature '" + name + "'");
        cols.push_back(c);
        out.feature_names.push_back(name);
    }
    out.rows.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<double> selected;
        selected.reserve(cols.size());
        for (int c : cols) selected.push_back(row[static_cast<std::size_t>(c)]);
        out.rows.push_back(std::move(selected));
    }
    return out;
}

ImputationResult impute_duration(const FeatureMatrix& data) {
    ImputationResult result;
    result.imputed_rows.assign(data.n_rows(), 0);

    std::vector<std::uint8_t> keep(data.n_features(), 1);
    std::vector<double> fill(data.n_features(), 0.0);
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        double sum = 0.0;
        std::size_t present = 0;
        for (const auto& row : data.rows) {
            if (!std::isnan(row[j])) {
                sum += row[j];
                ++present;
            }
        }
        if (present == data.n_rows()) continue;
        if (present == 0) {
            keep[j] = 0;
            result.dropped_features.push_back(data.feature_names[j]);
            std::cerr << "warning: feature '" << data.feature_names[j]
                      << "' missing in every row, dropped\n";
            continue;
        }
        fill[j] = sum / static_cast<double>(present);
    }

    for (std::size_t j = 0; j < data.n_features(); ++j) {
        if (keep[j]) result.data.feature_names.push_back(data.feature_names[j]);
    }
    result.data.targets = data.targets;
    result.data.row_ids = data.row_ids;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        std::vector<double> row;
        for (std::size_t j = 0; j < data.n_features(); ++j) {
            if (!keep[j]) continue;
            double v = data.rows[i][j];
            if (std::isnan(v)) {
                v = fill[j];
                result.imputed_rows[i] = 1;
            }
            row.push_back(v);
        }
        result.data.rows.push_back(std::move(row));
    }
    return result;
}

FeatureMatrix normalize_features(const FeatureMatrix& data) {
    FeatureMatrix out = data;
    std::size_t n = data.n_rows();
    if (n < 2) throw ValidationError("normalize_features: need at least 2 rows");
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        double mean = 0.0;
        for (const auto& row : data.rows) {
            if (std::isnan(row[j])) {
                throw ValidationError("normalize_features: missing cell in '" +
                                      data.feature_names[j] + "' (impute first)");
            }
            mean += row[j];
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const auto& row : data.rows) {
            double d = row[j] - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / static_cast<double>(n - 1));
        for (auto& row : out.rows) {
            row[j] = sd > 0.0 ? (row[j] - mean) / sd : 0.0;
        }
    }
    return out;
}

namespace {

double clip_prediction(double v) { return std::clamp(v, 1.0, 4.0); }

}  // namespace

EvalReport bootstrap_evaluate(const ModelSpec& spec, const FeatureMatrix& data, int B,
                              std::uint64_t seed) {
    if (B < 1) throw std::invalid_argument("bootstrap_evaluate: B must be >= 1");
    if (data.n_rows() < 5) {
        throw std::invalid_argument("bootstrap_evaluate: need at least 5 rows");
    }
    std::size_t n = data.n_rows();
    for (const auto& row : data.rows) {
        for (double v : row) {
            if (std::isnan(v)) {
                throw ValidationError("bootstrap_evaluate: missing feature cell");
            }
        }
    }

    EvalReport report;
    report.model_name = to_string(spec.kind);
    report.n_bootstrap = B;
    report.seed = seed;

    std::vector<double> pooled_pred;
    std::vector<double> pooled_actual;

    for (int b = 0; b < B; ++b) {
        rng::Rng rng(rng::derive(seed, static_cast<std::uint64_t>(2 * b)));
        std::uint64_t fit_seed = rng::derive(seed, static_cast<std::uint64_t>(2 * b + 1));

        std::vector<std::uint8_t> in_bag(n, 0);
        Matrix train_x;
        std::vector<double> train_y;
        train_x.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = rng.uniform_index(n);
            in_bag[j] = 1;
            train_x.push_back(data.rows[j]);
            train_y.push_back(data.targets[j]);
        }
        bool has_oob = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_bag[i]) {
                has_oob = true;
                break;
            }
        }
        if (!has_oob) {
            ++report.skipped_replicates;
            continue;
        }

        auto model = fit(spec, train_x, train_y, fit_seed);
        for (std::size_t i = 0; i < n; ++i) {
            if (in_bag[i]) continue;
            double pred = clip_prediction(model->predict_row(data.rows[i]));
            if (!std::isfinite(pred)) throw NumericError("non-finite prediction");
            pooled_pred.push_back(pred);
            pooled_actual.push_back(data.targets[i]);
        }
    }

    if (pooled_pred.empty()) {
        throw NumericError("bootstrap_evaluate: every replicate had an empty OOB set");
    }

    double m = static_cast<double>(pooled_pred.size());
    double abs_sum = 0.0, sq_sum = 0.0, actual_sum = 0.0;
    for (std::size_t i = 0; i < pooled_pred.size(); ++i) {
        double e = pooled_pred[i] - pooled_actual[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        actual_sum += pooled_actual[i];
    }
    report.mae = abs_sum / m;
    report.rmse = std::sqrt(sq_sum / m);

    double actual_mean = actual_sum / m;
    double sst = 0.0;
    for (double a : pooled_actual) {
        double d = a - actual_mean;
        sst += d * d;
    }
    if (sst > 0.0) {
        report.r2 = 1.0 - sq_sum / sst;
    } else {
        report.r2 = sq_sum == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    }
    return report;
}

std::vector<EvalReport> ablation(const FeatureMatrix& data, int B, std::uint64_t seed,
                                 const Hyperparameters& params) {
    auto imputed = impute_duration(data);
    int imputed_count = 0;
    for (auto flag : imputed.imputed_rows) imputed_count += flag;
    if (imputed_count > 0) {
        std::cerr << "note: mean-imputed missing duration for " << imputed_count
                  << " row(s)\n";
    }
    auto normalized = normalize_features(imputed.data);

    const std::vector<std::string> profile_features = {"level_of_functioning",
                                                       "ados_social_affect"};
    for (const auto& f : profile_features) {
        if (normalized.column(f) < 0) {
            throw ValidationError("ablation: required profile feature '" + f + "' missing");
        }
    }

    std::vector<EvalReport> reports;
    const ModelKind kinds[] = {ModelKind::RF, ModelKind::Lasso, ModelKind::SVR, ModelKind::GBT,
                               ModelKind::MLP};
    for (ModelKind kind : kinds) {
        for (PredictionSetting setting :
             {PredictionSetting::WithGaze, PredictionSetting::ProfileOnly}) {
            const FeatureMatrix* matrix = &normalized;
            FeatureMatrix masked;
            if (setting == PredictionSetting::ProfileOnly) {
                masked = normalized.select(profile_features);
                matrix = &masked;
            }
            auto report = bootstrap_evaluate(ModelSpec{kind, params}, *matrix, B, seed);
            report.setting = setting;
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

}  // namespace gm::predict
