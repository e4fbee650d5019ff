#include <cmath>
#include <limits>
#include <vector>

#include "gaze/learners.hpp"
#include "gaze/parallel.hpp"

namespace gaze {

namespace {

inline double dot5(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += a[i] * b[i];
    return s;
}

// Violation extrema of the dual gradient: m over the "up" set, M over the
// "low" set. Optimality is m - M <= epsilon; any bias in [M, m] is
// KKT-consistent, the midpoint is used.
struct Violation {
    double m = -std::numeric_limits<double>::infinity();
    double big_m = std::numeric_limits<double>::infinity();
    int i_up = -1;
    int i_low = -1;
};

Violation scan_violation(const std::vector<double>& grad, const std::vector<int>& y,
                         const std::vector<double>& alpha, double c) {
    Violation v;
    const std::size_t n = y.size();
    for (std::size_t t = 0; t < n; ++t) {
        const double score = -static_cast<double>(y[t]) * grad[t];
        const bool in_up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0.0);
        const bool in_low = (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < c);
        if (in_up && score > v.m) {
            v.m = score;
            v.i_up = static_cast<int>(t);
        }
        if (in_low && score < v.big_m) {
            v.big_m = score;
            v.i_low = static_cast<int>(t);
        }
    }
    return v;
}

}  // namespace

SvmBinary svm_train_binary(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                           const SvmConfig& cfg) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::calibration,
            "binary problem needs at least two labeled patterns");
    bool has_pos = false, has_neg = false;
    for (int l : y) {
        require(l == 1 || l == -1, ErrorKind::usage, "binary labels must be +-1");
        (l == 1 ? has_pos : has_neg) = true;
    }
    require(has_pos && has_neg, ErrorKind::calibration, "binary problem needs both classes");

    const std::size_t n = x.size();
    const double c = cfg.c;
    std::vector<double> kernel(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            kernel[i * n + j] = kernel[j * n + i] = dot5(x[i], x[j]);

    // Minimize 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij, grad G = Qa - e.
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);
    SvmBinary out;
    out.converged = false;
    double final_m = 0.0, final_big_m = 0.0;
    for (long iter = 0; iter < cfg.max_iters; ++iter) {
        const Violation v = scan_violation(grad, y, alpha, c);
        final_m = v.m;
        final_big_m = v.big_m;
        if (v.i_up < 0 || v.i_low < 0 || v.m - v.big_m < cfg.epsilon) {
            out.converged = true;
            break;
        }
        const std::size_t i = static_cast<std::size_t>(v.i_up);
        const std::size_t j = static_cast<std::size_t>(v.i_low);
        double curvature = kernel[i * n + i] + kernel[j * n + j] - 2.0 * kernel[i * n + j];
        if (curvature <= 0.0) curvature = 1e-12;
        // Step along the feasible direction u_i = y_i, u_j = -y_j.
        double step = (v.m - v.big_m) / curvature;
        const double room_i = y[i] > 0 ? c - alpha[i] : alpha[i];
        const double room_j = y[j] > 0 ? alpha[j] : c - alpha[j];
        step = std::min(step, std::min(room_i, room_j));
        alpha[i] += static_cast<double>(y[i]) * step;
        alpha[j] -= static_cast<double>(y[j]) * step;
        // Snap to the box to keep the up/low set membership exact.
        for (std::size_t t : {i, j}) {
            if (alpha[t] < 1e-12) alpha[t] = 0.0;
            if (alpha[t] > c - 1e-12) alpha[t] = c;
        }
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += step * static_cast<double>(y[t]) * (kernel[t * n + i] - kernel[t * n + j]);
    }

    for (std::size_t i = 0; i < 5; ++i) out.w[i] = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] == 0.0) continue;
        const double coeff = alpha[t] * static_cast<double>(y[t]);
        for (std::size_t i = 0; i < 5; ++i) out.w[i] += coeff * x[t][i];
        out.alpha.push_back(alpha[t]);
        out.sv_index.push_back(static_cast<int>(t));
    }
    out.b = 0.5 * (final_m + final_big_m);
    if (!std::isfinite(out.b)) out.b = 0.0;
    return out;
}

double svm_decision(const SvmBinary& bin, const FeatureVector& v) {
    double s = bin.b;
    for (std::size_t i = 0; i < 5; ++i) s += bin.w[i] * v[i];
    return s;
}

double svm_kkt_violation(const SvmBinary& bin, const std::vector<FeatureVector>& x,
                         const std::vector<int>& y, double c) {
    const std::size_t n = x.size();
    std::vector<double> alpha(n, 0.0);
    for (std::size_t k = 0; k < bin.sv_index.size(); ++k)
        alpha[static_cast<std::size_t>(bin.sv_index[k])] = bin.alpha[k];
    std::vector<double> grad(n, -1.0);
    for (std::size_t t = 0; t < n; ++t) {
        double f = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            if (alpha[s] == 0.0) continue;
            f += alpha[s] * static_cast<double>(y[s]) * dot5(x[t], x[s]);
        }
        grad[t] = static_cast<double>(y[t]) * f - 1.0;
    }
    const Violation v = scan_violation(grad, y, alpha, c);
    if (v.i_up < 0 || v.i_low < 0) return 0.0;
    return std::max(0.0, v.m - v.big_m);
}

SvmModel svm_train(const TrainingSet& set, const TrainConfig& cfg, const TrainOptions& options) {
    require(!set.set.patterns.empty(), ErrorKind::calibration, "empty training set");
    require(cfg.svm.max_iters > 0 && cfg.svm.epsilon > 0.0 && cfg.svm.c > 0.0, ErrorKind::usage,
            "svm training parameters must be positive");
    std::vector<FeatureVector> inputs;
    inputs.reserve(set.set.patterns.size());
    for (const FeatureVector& v : set.set.patterns)
        inputs.push_back(model_input(set.normalizer, options.feature_subset,
                                     options.standardize, v));

    struct Pair {
        int lo, hi;
    };
    std::vector<Pair> pairs;
    for (int lo = 1; lo <= kRegionCount; ++lo)
        for (int hi = lo + 1; hi <= kRegionCount; ++hi) pairs.push_back({lo, hi});

    SvmModel model;
    model.pairs.resize(pairs.size());
    std::exception_ptr failure;
    par::parallel_for(pairs.size(), [&](std::size_t p) {
        try {
            std::vector<FeatureVector> px;
            std::vector<int> py;
            for (std::size_t i = 0; i < inputs.size(); ++i) {
                const int id = set.set.labels[i].id();
                if (id == pairs[p].lo) {
                    px.push_back(inputs[i]);
                    py.push_back(1);
                } else if (id == pairs[p].hi) {
                    px.push_back(inputs[i]);
                    py.push_back(-1);
                }
            }
            SvmBinary bin = svm_train_binary(px, py, cfg.svm);
            bin.lo = pairs[p].lo;
            bin.hi = pairs[p].hi;
            model.pairs[p] = std::move(bin);
        } catch (...) {
            failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    for (const SvmBinary& bin : model.pairs)
        if (!bin.converged) model.converged = false;
    return model;
}

Region svm_predict(const SvmModel& model, const FeatureVector& v) {
    std::array<int, kRegionCount> votes{};
    for (const SvmBinary& bin : model.pairs) {
        const int winner = svm_decision(bin, v) > 0.0 ? bin.lo : bin.hi;
        ++votes[static_cast<std::size_t>(winner - 1)];
    }
    int best = 0;
    for (int r = 1; r < kRegionCount; ++r)
        if (votes[static_cast<std::size_t>(r)] > votes[static_cast<std::size_t>(best)]) best = r;
    return Region(best + 1);
}

}  // namespace gaze
