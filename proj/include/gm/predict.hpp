#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gm::predict {

using Matrix = std::vector<std::vector<double>>;  // row-major

// Observation rows with named feature columns and svb targets. Missing
// cells (absent durations) are NaN until imputation.
struct FeatureMatrix {
    std::vector<std::string> feature_names;
    Matrix rows;
    std::vector<double> targets;
    std::vector<std::string> row_ids;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_features() const { return feature_names.size(); }
    int column(const std::string& name) const;
    FeatureMatrix select(std::span<const std::string> names) const;
};

enum class ModelKind { RF, Lasso, SVR, GBT, MLP };
enum class PredictionSetting { WithGaze, ProfileOnly };

std::string to_string(ModelKind kind);
std::string to_string(PredictionSetting setting);
ModelKind model_kind_from_string(const std::string& s);

struct RFParams {
    int n_trees = 200;
    int max_depth = 4;
    int min_leaf = 2;
    // features tried per split; 0 = round(sqrt(p))
    int mtry = 0;
};

struct LassoParams {
    // fixed penalty; unset selects from a log grid by inner OOB error
    std::optional<double> lambda;
    int grid_points = 20;
    double lambda_min_ratio = 1e-3;
    int inner_replicates = 20;
    int max_sweeps = 5000;
    double tol = 1e-12;
};

struct SVRParams {
    double epsilon = 0.1;
    double c = 1.0;
    int steps = 2000;
    double learning_rate = 0.01;
};

struct GBTParams {
    int n_trees = 100;
    int max_depth = 2;
    int min_leaf = 1;
    double learning_rate = 0.1;
};

struct MLPParams {
    int hidden_units = 16;
    double learning_rate = 0.01;
    int epochs = 2000;
};

struct Hyperparameters {
    RFParams rf;
    LassoParams lasso;
    SVRParams svr;
    GBTParams gbt;
    MLPParams mlp;
};

struct ModelSpec {
    ModelKind kind = ModelKind::RF;
    Hyperparameters params;
};

class Model {
public:
    virtual ~Model() = default;
    virtual double predict_row(std::span<const double> features) const = 0;
    virtual std::size_t n_features() const = 0;
    std::vector<double> predict(const Matrix& X) const;
};

// Deterministic in (spec, X, y, seed). Degenerate designs fall back to
// constant predictions rather than failing.
std::unique_ptr<Model> fit(const ModelSpec& spec, const Matrix& X, std::span<const double> y,
                           std::uint64_t seed);

struct EvalReport {
    std::string model_name;
    PredictionSetting setting = PredictionSetting::WithGaze;
    double mae = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;
    int n_bootstrap = 0;
    std::uint64_t seed = 0;
    int skipped_replicates = 0;  // replicates whose OOB set was empty
};

// B bootstrap replicates; fits on each resample, predicts its out-of-bag
// rows (clipped to the 1..4 score range), pools OOB predictions across
// replicates for MAE/RMSE/R2. Replicate RNG derives from (seed, b).
EvalReport bootstrap_evaluate(const ModelSpec& spec, const FeatureMatrix& data, int B,
                              std::uint64_t seed);

// 5 models x {WithGaze, ProfileOnly}; the pipeline imputes missing
// durations, z-normalizes, then evaluates each with the same seed so all
// ten reports share resamples.
std::vector<EvalReport> ablation(const FeatureMatrix& data, int B, std::uint64_t seed,
                                 const Hyperparameters& params = {});

struct ImputationResult {
    FeatureMatrix data;
    std::vector<std::uint8_t> imputed_rows;       // duration was filled in
    std::vector<std::string> dropped_features;    // all-missing columns
};

// Missing cells replaced by that feature's mean over present rows;
// a feature missing everywhere is dropped.
ImputationResult impute_duration(const FeatureMatrix& data);

// z-scores every feature column (constant columns become all zero).
FeatureMatrix normalize_features(const FeatureMatrix& data);

// --- internals exposed for oracle tests -------------------------------------

struct LassoFit {
    std::vector<double> coef;
    double intercept = 0.0;
    double lambda = 0.0;
    // objective (1/2n)*RSS + lambda*|coef|_1 after each full sweep
    std::vector<double> objective_per_sweep;
};

LassoFit lasso_fit(const Matrix& X, std::span<const double> y, double lambda,
                   int max_sweeps = 5000, double tol = 1e-12);

// smallest penalty that zeroes every coefficient: max_j |x_j . (y - mean)| / n
double lasso_lambda_max(const Matrix& X, std::span<const double> y);

class MlpRegressor : public Model {
public:
    MlpRegressor(int n_inputs, int hidden_units, std::uint64_t seed);

    double predict_row(std::span<const double> features) const override;
    std::size_t n_features() const override { return static_cast<std::size_t>(n_inputs_); }

    // half mean squared error over the batch
    double loss(const Matrix& X, std::span<const double> y) const;
    // analytic full-batch gradient, same layout as parameters()
    std::vector<double> gradient(const Matrix& X, std::span<const double> y) const;
    void train(const Matrix& X, std::span<const double> y, int epochs, double learning_rate,
               std::vector<double>* loss_history = nullptr);

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }

private:
    int n_inputs_;
    int hidden_;
    std::vector<double> params_;  // [W1 (hidden x in), b1, w2, b2]
};

}  // namespace gm::predict
