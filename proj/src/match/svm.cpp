#include <cmath>
#include <memory>

#include "facebench/core/error.hpp"
#include "model_types.hpp"

namespace facebench::match::detail {

std::vector<double> LinearOneVsAll::class_scores(const std::vector<double>& probe) const {
    if (probe.size() != dim) {
        throw ContractViolation("classifier probe has dimension " +
                                      std::to_string(probe.size()) + ", model expects " +
                                      std::to_string(dim));
    }
    std::vector<double> out(weights.size(), 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const std::vector<double>& w = weights[k];
        double margin = w[dim]; // bias term on the augmented constant feature
        for (std::size_t d = 0; d < dim; ++d) margin += w[d] * probe[d];
        out[k] = margin;
    }
    return out;
}

namespace {

// Dual coordinate descent for the L1-loss linear SVM
//   min_w  0.5 ||w||^2 + C * sum_i max(0, 1 - y_i w.x_i)
// over augmented features (constant 1 appended, so the bias is regularized).
// Coordinates are visited cyclically, which keeps the result independent of any
// RNG; at the feature counts used here this converges well within the pass cap.
std::vector<double> train_binary_hinge(const std::vector<std::vector<double>>& x,
                                       const std::vector<double>& y, double c, int passes) {
    const std::size_t n = x.size();
    const std::size_t dim_aug = x[0].size() + 1;
    std::vector<double> w(dim_aug, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> q_diag(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double q = 1.0; // augmented constant feature
        for (double v : x[i]) q += v * v;
        q_diag[i] = q;
    }
    const double tol = 1e-10;
    for (int pass = 0; pass < passes; ++pass) {
        double worst_violation = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double wx = w[dim_aug - 1];
            for (std::size_t d = 0; d + 1 < dim_aug; ++d) wx += w[d] * x[i][d];
            const double grad = y[i] * wx - 1.0;
            double projected = grad;
            if (alpha[i] <= 0.0) {
                projected = std::min(grad, 0.0);
            } else if (alpha[i] >= c) {
                projected = std::max(grad, 0.0);
            }
            worst_violation = std::max(worst_violation, std::fabs(projected));
            if (std::fabs(projected) <= tol) continue;
            const double updated = std::min(std::max(alpha[i] - grad / q_diag[i], 0.0), c);
            const double step = (updated - alpha[i]) * y[i];
            if (step == 0.0) continue;
            alpha[i] = updated;
            for (std::size_t d = 0; d + 1 < dim_aug; ++d) w[d] += step * x[i][d];
            w[dim_aug - 1] += step;
        }
        if (worst_violation <= tol) break;
    }
    return w;
}

} // namespace

std::unique_ptr<Classifier> train_one_vs_all(const std::vector<std::vector<double>>& features,
                                             const std::vector<int>& class_ids,
                                             const std::vector<std::string>& label_names,
                                             const ClassifierHyper& hyper,
                                             std::uint64_t /*seed*/) {
    auto model = std::make_unique<LinearOneVsAll>();
    model->dim = features[0].size();
    model->label_names = label_names;
    model->weights.reserve(label_names.size());
    std::vector<double> y(features.size(), 0.0);
    for (std::size_t k = 0; k < label_names.size(); ++k) {
        for (std::size_t i = 0; i < features.size(); ++i) {
            y[i] = class_ids[i] == static_cast<int>(k) ? 1.0 : -1.0;
        }
        model->weights.push_back(
            train_binary_hinge(features, y, hyper.margin_c, hyper.margin_passes));
    }
    return model;
}

} // namespace facebench::match::detail
