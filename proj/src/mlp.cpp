#include <cmath>
#include <string>
#include <vector>

#include "gaze/learners.hpp"
#include "gaze/parallel.hpp"
#include "gaze/rng.hpp"

namespace gaze {

namespace {

constexpr std::size_t kIn = 5;
constexpr std::size_t kHidden = 14;

struct Forward {
    std::array<double, kHidden> hidden{};
    double output = 0.0;
};

inline double act(double x, double alpha, double beta) { return beta * std::tanh(alpha * x); }

// Derivative of the symmetric sigmoid expressed through its own value:
// d/dx beta*tanh(alpha*x) = alpha*(beta^2 - y^2)/beta.
inline double act_deriv(double y, double alpha, double beta) {
    return alpha * (beta * beta - y * y) / beta;
}

Forward forward(const MlpNetwork& net, const FeatureVector& x, double alpha, double beta) {
    Forward f;
    for (std::size_t j = 0; j < kHidden; ++j) {
        double pre = net.b1[j];
        for (std::size_t i = 0; i < kIn; ++i) pre += net.w1[j * kIn + i] * x[i];
        f.hidden[j] = act(pre, alpha, beta);
    }
    double pre = net.b2;
    for (std::size_t j = 0; j < kHidden; ++j) pre += net.w2[j] * f.hidden[j];
    f.output = act(pre, alpha, beta);
    return f;
}

void add_into(MlpNetwork& dst, const MlpNetwork& src) {
    for (std::size_t i = 0; i < dst.w1.size(); ++i) dst.w1[i] += src.w1[i];
    for (std::size_t i = 0; i < dst.b1.size(); ++i) dst.b1[i] += src.b1[i];
    for (std::size_t i = 0; i < dst.w2.size(); ++i) dst.w2[i] += src.w2[i];
    dst.b2 += src.b2;
}

// Gradient and loss contribution of patterns [begin, end). Loss terms are
// squared errors, not yet divided by the pattern count.
void accumulate(const MlpNetwork& net, double alpha, double beta,
                const std::vector<FeatureVector>& inputs, const std::vector<double>& targets,
                std::size_t begin, std::size_t end, MlpNetwork& grad, double& loss) {
    for (std::size_t p = begin; p < end; ++p) {
        const FeatureVector& x = inputs[p];
        const Forward f = forward(net, x, alpha, beta);
        const double err = f.output - targets[p];
        loss += err * err;
        const double go = 2.0 * err * act_deriv(f.output, alpha, beta);
        for (std::size_t j = 0; j < kHidden; ++j) {
            grad.w2[j] += go * f.hidden[j];
            const double gh = go * net.w2[j] * act_deriv(f.hidden[j], alpha, beta);
            grad.b1[j] += gh;
            for (std::size_t i = 0; i < kIn; ++i) grad.w1[j * kIn + i] += gh * x[i];
        }
        grad.b2 += go;
    }
}

MlpNetwork init_network(Rng& rng) {
    MlpNetwork net;
    const double a1 = 1.0 / std::sqrt(static_cast<double>(kIn));
    const double a2 = 1.0 / std::sqrt(static_cast<double>(kHidden));
    for (double& w : net.w1) w = rng.uniform(-a1, a1);
    for (double& b : net.b1) b = rng.uniform(-a1, a1);
    for (double& w : net.w2) w = rng.uniform(-a2, a2);
    net.b2 = rng.uniform(-a2, a2);
    return net;
}

MlpNetwork train_one(const std::vector<FeatureVector>& inputs,
                     const std::vector<double>& targets, const MlpConfig& cfg, double alpha,
                     double beta, std::uint64_t seed, int net_index) {
    Rng rng(seed);
    MlpNetwork net = init_network(rng);
    MlpNetwork velocity{};
    double prev_loss = 0.0;
    bool have_prev = false;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        double loss = 0.0;
        const MlpNetwork grad = mlp_epoch_gradient(net, alpha, beta, inputs, targets, &loss);
        require(std::isfinite(loss), ErrorKind::calibration,
                "network " + std::to_string(net_index + 1) + " diverged (non-finite loss)");
        if (have_prev && std::abs(prev_loss - loss) < cfg.epsilon) break;
        prev_loss = loss;
        have_prev = true;
        const double lr = cfg.gradient_strength;
        const double mu = cfg.weight_momentum;
        for (std::size_t i = 0; i < net.w1.size(); ++i) {
            velocity.w1[i] = mu * velocity.w1[i] - lr * grad.w1[i];
            net.w1[i] += velocity.w1[i];
        }
        for (std::size_t i = 0; i < net.b1.size(); ++i) {
            velocity.b1[i] = mu * velocity.b1[i] - lr * grad.b1[i];
            net.b1[i] += velocity.b1[i];
        }
        for (std::size_t i = 0; i < net.w2.size(); ++i) {
            velocity.w2[i] = mu * velocity.w2[i] - lr * grad.w2[i];
            net.w2[i] += velocity.w2[i];
        }
        velocity.b2 = mu * velocity.b2 - lr * grad.b2;
        net.b2 += velocity.b2;
    }
    return net;
}

}  // namespace

double mlp_epoch_loss(const MlpNetwork& net, double alpha, double beta,
                      const std::vector<FeatureVector>& inputs,
                      const std::vector<double>& targets) {
    double loss = 0.0;
    mlp_epoch_gradient(net, alpha, beta, inputs, targets, &loss);
    return loss;
}

MlpNetwork mlp_epoch_gradient(const MlpNetwork& net, double alpha, double beta,
                              const std::vector<FeatureVector>& inputs,
                              const std::vector<double>& targets, double* loss_out) {
    require(inputs.size() == targets.size() && !inputs.empty(), ErrorKind::usage,
            "inputs and targets must be non-empty and aligned");
    const std::size_t n = inputs.size();
    const std::size_t blocks = par::block_count(n);
    std::vector<MlpNetwork> partial(blocks);
    std::vector<double> partial_loss(blocks, 0.0);
    par::for_each_block(n, [&](std::size_t b, std::size_t begin, std::size_t end) {
        accumulate(net, alpha, beta, inputs, targets, begin, end, partial[b], partial_loss[b]);
    });
    MlpNetwork grad{};
    double loss = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        add_into(grad, partial[b]);
        loss += partial_loss[b];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& v : grad.w1) v *= inv_n;
    for (double& v : grad.b1) v *= inv_n;
    for (double& v : grad.w2) v *= inv_n;
    grad.b2 *= inv_n;
    if (loss_out) *loss_out = loss * inv_n;
    return grad;
}

MlpModel mlp_train(const TrainingSet& set, const TrainConfig& cfg, const TrainOptions& options) {
    require(!set.set.patterns.empty(), ErrorKind::calibration, "empty training set");
    require(cfg.mlp.max_iters > 0 && cfg.mlp.epsilon > 0.0 && cfg.mlp.gradient_strength > 0.0 &&
                cfg.mlp.weight_momentum >= 0.0,
            ErrorKind::usage, "mlp training parameters must be positive");
    std::vector<FeatureVector> inputs;
    inputs.reserve(set.set.patterns.size());
    for (const FeatureVector& v : set.set.patterns)
        inputs.push_back(model_input(set.normalizer, options.feature_subset,
                                     options.standardize, v));

    MlpModel model;
    std::exception_ptr failure;
    par::parallel_for(kRegionCount, [&](std::size_t r) {
        try {
            std::vector<double> targets;
            targets.reserve(inputs.size());
            for (const Region& label : set.set.labels)
                targets.push_back(label.index() == static_cast<int>(r) ? 1.0 : -1.0);
            const std::uint64_t seed = derive_seed(cfg.rng_seed, 0x6d6c7000u + r);
            model.nets[r] = train_one(inputs, targets, cfg.mlp, model.alpha, model.beta, seed,
                                      static_cast<int>(r));
        } catch (...) {
            failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return model;
}

std::array<double, kRegionCount> mlp_outputs(const MlpModel& model, const FeatureVector& v) {
    std::array<double, kRegionCount> out{};
    for (int r = 0; r < kRegionCount; ++r)
        out[static_cast<std::size_t>(r)] =
            forward(model.nets[static_cast<std::size_t>(r)], v, model.alpha, model.beta).output;
    return out;
}

Region mlp_predict(const MlpModel& model, const FeatureVector& v) {
    const std::array<double, kRegionCount> out = mlp_outputs(model, v);
    int best = 0;
    for (int r = 1; r < kRegionCount; ++r)
        if (out[static_cast<std::size_t>(r)] > out[static_cast<std::size_t>(best)]) best = r;
    return Region(best + 1);
}

}  // namespace gaze
