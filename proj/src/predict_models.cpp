#include "gm/common.hpp"
#include "gm/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

// The five regressors. All randomness flows through gm::rng so fits are
// bit-reproducible for a fixed seed.

namespace gm::predict {

std::vector<double> Model::predict(const Matrix& X) const {
    std::vector<double> out;
    out.reserve(X.size());
    for (const auto& row : X) {
        if (row.size() != n_features()) {
            throw std::invalid_argument("predict: feature schema mismatch");
        }
        out.push_back(predict_row(row));
    }
    return out;
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::RF: return "RF";
        case ModelKind::Lasso: return "Lasso";
        case ModelKind::SVR: return "SVR";
        case ModelKind::GBT: return "GBT";
        case ModelKind::MLP: return "MLP";
    }
    return "?";
}

std::string to_string(PredictionSetting setting) {
    return setting == PredictionSetting::WithGaze ? "WithGaze" : "ProfileOnly";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "RF") return ModelKind::RF;
    if (s == "Lasso") return ModelKind::Lasso;
    if (s == "SVR") return ModelKind::SVR;
    if (s == "GBT") return ModelKind::GBT;
    if (s == "MLP") return ModelKind::MLP;
    throw ValidationError("unknown model kind '" + s + "'");
}

namespace {

double mean_of(std::span<const double> y) {
    double s = 0.0;
    for (double v : y) s += v;
    return y.empty() ? 0.0 : s / static_cast<double>(y.size());
}

// ---------------------------------------------------------------------------
// regression tree (shared by RF and GBT)
// ---------------------------------------------------------------------------

struct TreeNode {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

class RegressionTree : public Model {
public:
    // sample_idx may contain repeats (bootstrap). rng used only for mtry
    // feature subsampling; pass nullptr to consider every feature.
    void fit(const Matrix& X, std::span<const double> y, std::vector<int> sample_idx,
             int max_depth, int min_leaf, int mtry, rng::Rng* rng) {
        n_features_ = X.empty() ? 0 : X.front().size();
        nodes_.clear();
        build(X, y, std::move(sample_idx), 0, max_depth, min_leaf, mtry, rng);
    }

    double predict_row(std::span<const double> f) const override {
        int node = 0;
        while (nodes_[node].feature >= 0) {
            node = f[static_cast<std::size_t>(nodes_[node].feature)] <= nodes_[node].threshold
                       ? nodes_[node].left
                       : nodes_[node].right;
        }
        return nodes_[node].value;
    }

    std::size_t n_features() const override { return n_features_; }

private:
    int build(const Matrix& X, std::span<const double> y, std::vector<int> idx, int depth,
              int max_depth, int min_leaf, int mtry, rng::Rng* rng) {
        double mean = 0.0;
        for (int i : idx) mean += y[static_cast<std::size_t>(i)];
        mean /= static_cast<double>(idx.size());

        int node_id = static_cast<int>(nodes_.size());
        nodes_.push_back(TreeNode{});
        nodes_[node_id].value = mean;

        if (depth >= max_depth || idx.size() < 2 * static_cast<std::size_t>(min_leaf)) {
            return node_id;
        }

        double parent_ss = 0.0;
        for (int i : idx) {
            double d = y[static_cast<std::size_t>(i)] - mean;
            parent_ss += d * d;
        }
        if (parent_ss <= 0.0) return node_id;

        int p = static_cast<int>(n_features_);
        std::vector<int> features(static_cast<std::size_t>(p));
        std::iota(features.begin(), features.end(), 0);
        int tried = p;
        if (rng && mtry > 0 && mtry < p) {
            // partial Fisher-Yates; the first mtry entries form the sample
            for (int k = 0; k < mtry; ++k) {
                int j = k + static_cast<int>(rng->uniform_index(
                                static_cast<std::uint64_t>(p - k)));
                std::swap(features[static_cast<std::size_t>(k)],
                          features[static_cast<std::size_t>(j)]);
            }
            tried = mtry;
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 0.0;
        std::vector<std::pair<double, double>> pts;  // (x, y), sorted by x

        for (int fi = 0; fi < tried; ++fi) {
            int f = features[static_cast<std::size_t>(fi)];
            pts.clear();
            for (int i : idx) {
                pts.emplace_back(X[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)],
                                 y[static_cast<std::size_t>(i)]);
            }
            std::sort(pts.begin(), pts.end());

            double left_sum = 0.0, left_sq = 0.0;
            double total_sum = 0.0, total_sq = 0.0;
            for (const auto& [xv, yv] : pts) {
                total_sum += yv;
                total_sq += yv * yv;
            }
            std::size_t n = pts.size();
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_sum += pts[k].second;
                left_sq += pts[k].second * pts[k].second;
                if (pts[k].first == pts[k + 1].first) continue;  // no cut between equals
                std::size_t nl = k + 1, nr = n - nl;
                if (nl < static_cast<std::size_t>(min_leaf) ||
                    nr < static_cast<std::size_t>(min_leaf)) {
                    continue;
                }
                double right_sum = total_sum - left_sum;
                double right_sq = total_sq - left_sq;
                double ss_left = left_sq - left_sum * left_sum / static_cast<double>(nl);
                double ss_right = right_sq - right_sum * right_sum / static_cast<double>(nr);
                double gain = parent_ss - ss_left - ss_right;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (pts[k].first + pts[k + 1].first);
                }
            }
        }

        if (best_feature < 0) return node_id;

        std::vector<int> left_idx, right_idx;
        for (int i : idx) {
            if (X[static_cast<std::size_t>(i)][static_cast<std::size_t>(best_feature)] <=
                best_threshold) {
                left_idx.push_back(i);
            } else {
                right_idx.push_back(i);
            }
        }
        if (left_idx.empty() || right_idx.empty()) return node_id;

        nodes_[node_id].feature = best_feature;
        nodes_[node_id].threshold = best_threshold;
        int left = build(X, y, std::move(left_idx), depth + 1, max_depth, min_leaf, mtry, rng);
        nodes_[node_id].left = left;
        int right = build(X, y, std::move(right_idx), depth + 1, max_depth, min_leaf, mtry, rng);
        nodes_[node_id].right = right;
        return node_id;
    }

    std::vector<TreeNode> nodes_;
    std::size_t n_features_ = 0;
};

// ---------------------------------------------------------------------------
// random forest
// ---------------------------------------------------------------------------

class RandomForest : public Model {
public:
    RandomForest(const RFParams& params, const Matrix& X, std::span<const double> y,
                 std::uint64_t seed) {
        n_features_ = X.empty() ? 0 : X.front().size();
        int n = static_cast<int>(X.size());
        int p = static_cast<int>(n_features_);
        int mtry = params.mtry > 0
                       ? params.mtry
                       : std::max(1, static_cast<int>(std::lround(std::sqrt(p))));
        trees_.resize(static_cast<std::size_t>(params.n_trees));
        for (int t = 0; t < params.n_trees; ++t) {
            rng::Rng rng(rng::derive(seed, static_cast<std::uint64_t>(t)));
            std::vector<int> bag(static_cast<std::size_t>(n));
            for (auto& i : bag) {
                i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            }
            trees_[static_cast<std::size_t>(t)].fit(X, y, std::move(bag), params.max_depth,
                                                    params.min_leaf, mtry, &rng);
        }
    }

    double predict_row(std::span<const double> f) const override {
        double s = 0.0;
        for (const auto& tree : trees_) s += tree.predict_row(f);
        return s / static_cast<double>(trees_.size());
    }

    std::size_t n_features() const override { return n_features_; }

private:
    std::vector<RegressionTree> trees_;
    std::size_t n_features_ = 0;
};

// ---------------------------------------------------------------------------
// gradient boosted trees (least squares)
// ---------------------------------------------------------------------------

class GradientBoostedTrees : public Model {
public:
    GradientBoostedTrees(const GBTParams& params, const Matrix& X, std::span<const double> y)
        : learning_rate_(params.learning_rate) {
        n_features_ = X.empty() ? 0 : X.front().size();
        base_ = mean_of(y);
        int n = static_cast<int>(X.size());
        std::vector<double> residual(y.begin(), y.end());
        for (auto& r : residual) r -= base_;
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        for (int t = 0; t < params.n_trees; ++t) {
            RegressionTree tree;
            tree.fit(X, residual, all, params.max_depth, params.min_leaf, 0, nullptr);
            for (int i = 0; i < n; ++i) {
                residual[static_cast<std::size_t>(i)] -=
                    learning_rate_ * tree.predict_row(X[static_cast<std::size_t>(i)]);
            }
            trees_.push_back(std::move(tree));
        }
    }

    double predict_row(std::span<const double> f) const override {
        double s = base_;
        for (const auto& tree : trees_) s += learning_rate_ * tree.predict_row(f);
        return s;
    }

    std::size_t n_features() const override { return n_features_; }

private:
    std::vector<RegressionTree> trees_;
    double base_ = 0.0;
    double learning_rate_ = 0.1;
    std::size_t n_features_ = 0;
};

// ---------------------------------------------------------------------------
// lasso (coordinate descent with soft thresholding)
// ---------------------------------------------------------------------------

class LinearModel : public Model {
public:
    LinearModel(std::vector<double> coef, double intercept)
        : coef_(std::move(coef)), intercept_(intercept) {}

    double predict_row(std::span<const double> f) const override {
        double s = intercept_;
        for (std::size_t j = 0; j < coef_.size(); ++j) s += coef_[j] * f[j];
        return s;
    }

    std::size_t n_features() const override { return coef_.size(); }

private:
    std::vector<double> coef_;
    double intercept_;
};

double soft_threshold(double v, double lambda) {
    if (v > lambda) return v - lambda;
    if (v < -lambda) return v + lambda;
    return 0.0;
}

// picks lambda on a descending log grid by inner bootstrap OOB error
double select_lasso_lambda(const LassoParams& params, const Matrix& X,
                           std::span<const double> y, std::uint64_t seed) {
    double lambda_max = lasso_lambda_max(X, y);
    if (lambda_max <= 0.0) return 0.0;

    std::vector<double> grid;
    double log_hi = std::log(lambda_max);
    double log_lo = std::log(lambda_max * params.lambda_min_ratio);
    for (int g = 0; g < params.grid_points; ++g) {
        double f = params.grid_points == 1
                       ? 0.0
                       : static_cast<double>(g) / static_cast<double>(params.grid_points - 1);
        grid.push_back(std::exp(log_hi + f * (log_lo - log_hi)));
    }

    int n = static_cast<int>(X.size());
    std::vector<double> sse(grid.size(), 0.0);
    std::vector<int> counts(grid.size(), 0);
    for (int b = 0; b < params.inner_replicates; ++b) {
        rng::Rng rng(rng::derive(seed, 0x4C415353ULL + static_cast<std::uint64_t>(b)));
        std::vector<std::uint8_t> in_bag(static_cast<std::size_t>(n), 0);
        Matrix xb;
        std::vector<double> yb;
        for (int i = 0; i < n; ++i) {
            int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            in_bag[static_cast<std::size_t>(j)] = 1;
            xb.push_back(X[static_cast<std::size_t>(j)]);
            yb.push_back(y[static_cast<std::size_t>(j)]);
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            auto fit = lasso_fit(xb, yb, grid[g], params.max_sweeps, params.tol);
            for (int i = 0; i < n; ++i) {
                if (in_bag[static_cast<std::size_t>(i)]) continue;
                double pred = fit.intercept;
                for (std::size_t j = 0; j < fit.coef.size(); ++j) {
                    pred += fit.coef[j] * X[static_cast<std::size_t>(i)][j];
                }
                double e = pred - y[static_cast<std::size_t>(i)];
                sse[g] += e * e;
                counts[g] += 1;
            }
        }
    }

    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (counts[g] == 0) continue;
        double err = sse[g] / static_cast<double>(counts[g]);
        if (err < best_err) {  // ties keep the larger (earlier) lambda
            best_err = err;
            best = g;
        }
    }
    return grid[best];
}

// ---------------------------------------------------------------------------
// linear epsilon-insensitive SVR (full-batch subgradient, best iterate kept)
// ---------------------------------------------------------------------------

class SvrModel : public Model {
public:
    SvrModel(const SVRParams& params, const Matrix& X, std::span<const double> y) {
        std::size_t p = X.empty() ? 0 : X.front().size();
        std::size_t n = X.size();
        w_.assign(p, 0.0);
        b_ = mean_of(y);

        std::vector<double> w = w_;
        double b = b_;
        auto objective = [&](const std::vector<double>& wv, double bv) {
            double obj = 0.0;
            for (double v : wv) obj += 0.5 * v * v;
            for (std::size_t i = 0; i < n; ++i) {
                double r = y[i] - bv;
                for (std::size_t j = 0; j < p; ++j) r -= wv[j] * X[i][j];
                obj += params.c * std::max(0.0, std::abs(r) - params.epsilon);
            }
            return obj;
        };

        double best = objective(w, b);
        std::vector<double> grad(p);
        for (int t = 0; t < params.steps; ++t) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double r = y[i] - b;
                for (std::size_t j = 0; j < p; ++j) r -= w[j] * X[i][j];
                if (std::abs(r) <= params.epsilon) continue;
                double sign = r > 0.0 ? 1.0 : -1.0;
                for (std::size_t j = 0; j < p; ++j) grad[j] -= params.c * sign * X[i][j];
                grad_b -= params.c * sign;
            }
            for (std::size_t j = 0; j < p; ++j) grad[j] += w[j];

            double lr = params.learning_rate / std::sqrt(1.0 + static_cast<double>(t));
            for (std::size_t j = 0; j < p; ++j) w[j] -= lr * grad[j];
            b -= lr * grad_b;

            double obj = objective(w, b);
            if (obj < best) {  // subgradient steps are not monotone
                best = obj;
                w_ = w;
                b_ = b;
            }
        }
    }

    double predict_row(std::span<const double> f) const override {
        double s = b_;
        for (std::size_t j = 0; j < w_.size(); ++j) s += w_[j] * f[j];
        return s;
    }

    std::size_t n_features() const override { return w_.size(); }

private:
    std::vector<double> w_;
    double b_ = 0.0;
};

}  // namespace

// ---------------------------------------------------------------------------
// lasso internals (public for oracle tests)
// ---------------------------------------------------------------------------

double lasso_lambda_max(const Matrix& X, std::span<const double> y) {
    std::size_t n = X.size();
    std::size_t p = X.empty() ? 0 : X.front().size();
    double ybar = mean_of(y);
    double lambda_max = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += X[i][j] * (y[i] - ybar);
        lambda_max = std::max(lambda_max, std::abs(dot) / static_cast<double>(n));
    }
    return lambda_max;
}

LassoFit lasso_fit(const Matrix& X, std::span<const double> y, double lambda, int max_sweeps,
                   double tol) {
    std::size_t n = X.size();
    std::size_t p = X.empty() ? 0 : X.front().size();
    if (n == 0) throw std::invalid_argument("lasso_fit: empty data");

    LassoFit fit;
    fit.lambda = lambda;
    fit.coef.assign(p, 0.0);
    fit.intercept = mean_of(y);

    std::vector<double> col_sq(p, 0.0);  // (1/n) sum x_ij^2
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) col_sq[j] += X[i][j] * X[i][j];
        col_sq[j] /= static_cast<double>(n);
    }

    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fit.intercept;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (col_sq[j] <= 0.0) continue;  // constant-zero column
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                rho += X[i][j] * (residual[i] + X[i][j] * fit.coef[j]);
            }
            rho /= static_cast<double>(n);
            double updated = soft_threshold(rho, lambda) / col_sq[j];
            double delta = updated - fit.coef[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) residual[i] -= delta * X[i][j];
                fit.coef[j] = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        double mean_res = 0.0;
        for (double r : residual) mean_res += r;
        mean_res /= static_cast<double>(n);
        if (mean_res != 0.0) {
            fit.intercept += mean_res;
            for (auto& r : residual) r -= mean_res;
            max_delta = std::max(max_delta, std::abs(mean_res));
        }

        double rss = 0.0;
        for (double r : residual) rss += r * r;
        double l1 = 0.0;
        for (double c : fit.coef) l1 += std::abs(c);
        fit.objective_per_sweep.push_back(rss / (2.0 * static_cast<double>(n)) + lambda * l1);

        if (max_delta < tol) break;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// MLP (one tanh hidden layer, linear output)
// ---------------------------------------------------------------------------

MlpRegressor::MlpRegressor(int n_inputs, int hidden_units, std::uint64_t seed)
    : n_inputs_(n_inputs), hidden_(hidden_units) {
    params_.assign(static_cast<std::size_t>(hidden_ * n_inputs_ + hidden_ + hidden_ + 1), 0.0);
    rng::Rng rng(rng::derive(seed, 0x4D4C50ULL));
    double in_scale = 1.0 / std::sqrt(std::max(1, n_inputs_));
    double hid_scale = 1.0 / std::sqrt(std::max(1, hidden_));
    std::size_t k = 0;
    for (int h = 0; h < hidden_ * n_inputs_; ++h) params_[k++] = rng.normal() * in_scale;
    k += static_cast<std::size_t>(hidden_);  // b1 stays zero
    for (int h = 0; h < hidden_; ++h) params_[k++] = rng.normal() * hid_scale;
    // b2 stays zero
}

double MlpRegressor::predict_row(std::span<const double> f) const {
    const double* w1 = params_.data();
    const double* b1 = w1 + hidden_ * n_inputs_;
    const double* w2 = b1 + hidden_;
    const double b2 = *(w2 + hidden_);
    double out = b2;
    for (int h = 0; h < hidden_; ++h) {
        double a = b1[h];
        for (int j = 0; j < n_inputs_; ++j) a += w1[h * n_inputs_ + j] * f[static_cast<std::size_t>(j)];
        out += w2[h] * std::tanh(a);
    }
    return out;
}

double MlpRegressor::loss(const Matrix& X, std::span<const double> y) const {
    double sse = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double e = predict_row(X[i]) - y[i];
        sse += e * e;
    }
    return sse / (2.0 * static_cast<double>(X.size()));
}

std::vector<double> MlpRegressor::gradient(const Matrix& X, std::span<const double> y) const {
    std::vector<double> grad(params_.size(), 0.0);
    const double* w1 = params_.data();
    const double* b1 = w1 + hidden_ * n_inputs_;
    const double* w2 = b1 + hidden_;
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + hidden_ * n_inputs_;
    double* g_w2 = g_b1 + hidden_;
    double* g_b2 = g_w2 + hidden_;

    std::vector<double> act(static_cast<std::size_t>(hidden_));
    double inv_n = 1.0 / static_cast<double>(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto& row = X[i];
        double out = params_.back();
        for (int h = 0; h < hidden_; ++h) {
            double a = b1[h];
            for (int j = 0; j < n_inputs_; ++j) a += w1[h * n_inputs_ + j] * row[static_cast<std::size_t>(j)];
            act[static_cast<std::size_t>(h)] = std::tanh(a);
            out += w2[h] * act[static_cast<std::size_t>(h)];
        }
        double d_out = (out - y[i]) * inv_n;
        *g_b2 += d_out;
        for (int h = 0; h < hidden_; ++h) {
            double ah = act[static_cast<std::size_t>(h)];
            g_w2[h] += d_out * ah;
            double d_h = d_out * w2[h] * (1.0 - ah * ah);
            g_b1[h] += d_h;
            for (int j = 0; j < n_inputs_; ++j) {
                g_w1[h * n_inputs_ + j] += d_h * row[static_cast<std::size_t>(j)];
            }
        }
    }
    return grad;
}

void MlpRegressor::train(const Matrix& X, std::span<const double> y, int epochs,
                         double learning_rate, std::vector<double>* loss_history) {
    for (int e = 0; e < epochs; ++e) {
        if (loss_history) loss_history->push_back(loss(X, y));
        auto grad = gradient(X, y);
        for (std::size_t k = 0; k < params_.size(); ++k) {
            params_[k] -= learning_rate * grad[k];
        }
    }
    if (loss_history) loss_history->push_back(loss(X, y));
}

// ---------------------------------------------------------------------------
// dispatcher
// ---------------------------------------------------------------------------

std::unique_ptr<Model> fit(const ModelSpec& spec, const Matrix& X, std::span<const double> y,
                           std::uint64_t seed) {
    if (X.size() < 2) throw std::invalid_argument("fit: need at least 2 rows");
    if (X.size() != y.size()) throw std::invalid_argument("fit: X/y size mismatch");

    switch (spec.kind) {
        case ModelKind::RF:
            return std::make_unique<RandomForest>(spec.params.rf, X, y, seed);
        case ModelKind::GBT:
            return std::make_unique<GradientBoostedTrees>(spec.params.gbt, X, y);
        case ModelKind::Lasso: {
            const auto& lp = spec.params.lasso;
            double lambda = lp.lambda ? *lp.lambda : select_lasso_lambda(lp, X, y, seed);
            auto f = lasso_fit(X, y, lambda, lp.max_sweeps, lp.tol);
            return std::make_unique<LinearModel>(std::move(f.coef), f.intercept);
        }
        case ModelKind::SVR:
            return std::make_unique<SvrModel>(spec.params.svr, X, y);
        case ModelKind::MLP: {
            auto mlp = std::make_unique<MlpRegressor>(static_cast<int>(X.front().size()),
                                                      spec.params.mlp.hidden_units, seed);
            mlp->train(X, y, spec.params.mlp.epochs, spec.params.mlp.learning_rate);
            return mlp;
        }
    }
    throw std::invalid_argument("fit: unknown model kind");
}

}  // namespace gm::predict
