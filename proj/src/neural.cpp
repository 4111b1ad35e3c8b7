#include "renewcast/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "parallel.hpp"
#include "renewcast/errors.hpp"

namespace renewcast {
namespace {

double log_softplus(double x) {
    if (x < -20.0) return x - 0.5 * std::exp(x);
    return std::log(softplus(x));
}

/// sigmoid(x) / softplus(x), finite for very negative x.
double sigmoid_over_softplus(double x) {
    if (x < -20.0) return 1.0 - 0.5 * std::exp(x);
    return sigmoid(x) / softplus(x);
}

double log_rising(double r, double n) {
    if (n <= 0.0) return 0.0;
    if (n <= 64.0) {
        double acc = 0.0;
        for (int j = 0; j < static_cast<int>(n); ++j) acc += std::log(r + j);
        return acc;
    }
    return boost::math::lgamma(r + n) - boost::math::lgamma(r);
}

/// digamma(r + n) - digamma(r)
double digamma_diff(double r, double n) {
    if (n <= 0.0) return 0.0;
    if (n <= 64.0) {
        double acc = 0.0;
        for (int j = 0; j < static_cast<int>(n); ++j) acc += 1.0 / (r + j);
        return acc;
    }
    return boost::math::digamma(r + n) - boost::math::digamma(r);
}

struct HeadTerm {
    double loglik = 0.0;
    double d_pre = 0.0;   ///< d loglik / d pre-activation
    double d_disp = 0.0;  ///< d loglik / d free dispersion parameter
};

HeadTerm negbin_term(double pre, double disp, double k) {
    const double log_lambda = log_softplus(pre);
    const double kappa = softplus(disp);
    const double log_kappa = log_softplus(disp);
    const double log1p_kappa = std::log1p(kappa);
    const double r = std::exp(log_lambda - log_kappa);
    const double n = k - 1.0;

    HeadTerm t;
    t.loglik = log_rising(r, n) - boost::math::lgamma(k) - r * log1p_kappa +
               n * (log_kappa - log1p_kappa);
    const double d_r = digamma_diff(r, n) - log1p_kappa;
    const double d_lambda = d_r / kappa;
    const double d_kappa = -d_r * r / kappa - r / (1.0 + kappa) + n / (kappa * (1.0 + kappa));
    t.d_pre = sigmoid(pre) * d_lambda;
    t.d_disp = sigmoid(disp) * d_kappa;
    return t;
}

HeadTerm geometric_term(double pre, double k) {
    const double lambda = softplus(pre);
    const double log_lambda = log_softplus(pre);
    const double log1p_lambda = std::log1p(lambda);
    const double n = k - 1.0;
    HeadTerm t;
    t.loglik = -log1p_lambda + n * (log_lambda - log1p_lambda);
    t.d_pre = (-sigmoid(pre) + n * sigmoid_over_softplus(pre)) / (1.0 + lambda);
    return t;
}

HeadTerm poisson_term(double pre, double k) {
    const double lambda = softplus(pre);
    const double n = k - 1.0;
    HeadTerm t;
    t.loglik = n * log_softplus(pre) - lambda - boost::math::lgamma(k);
    t.d_pre = n * sigmoid_over_softplus(pre) - sigmoid(pre);
    return t;
}

HeadTerm exponential_term(double pre, double x) {
    const double mu = softplus(pre);
    HeadTerm t;
    t.loglik = -log_softplus(pre) - x / mu;
    t.d_pre = sigmoid_over_softplus(pre) * (x / mu - 1.0);
    return t;
}

HeadTerm interval_term(IntervalHead kind, double pre, double disp, double q) {
    switch (kind) {
        case IntervalHead::geometric: return geometric_term(pre, q);
        case IntervalHead::negbin: return negbin_term(pre, disp, q);
        case IntervalHead::exponential: return exponential_term(pre, q);
    }
    return {};
}

HeadTerm size_term(SizeHead kind, double pre, double disp, double m) {
    switch (kind) {
        case SizeHead::poisson: return poisson_term(pre, m);
        case SizeHead::negbin: return negbin_term(pre, disp, m);
    }
    return {};
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
    return acc;
}

/// Activations of one layer at one step.
struct LayerCache {
    std::vector<double> x, h_prev, c_prev, i, f, g, o, c, tc, h;
};

void layer_forward(const RnnParams& p, int layer, std::span<const double> x,
                   std::span<const double> h_prev, std::span<const double> c_prev,
                   LayerCache& out) {
    const int hw = p.hidden_width();
    const int d = p.layer_input_dim(layer);
    const auto values = p.values();
    const double* w_in = values.data() + p.input_weights_offset(layer);
    const double* w_rec = values.data() + p.recurrent_weights_offset(layer);
    const double* bias = values.data() + p.bias_offset(layer);

    out.x.assign(x.begin(), x.end());
    out.h_prev.assign(h_prev.begin(), h_prev.end());
    out.c_prev.assign(c_prev.begin(), c_prev.end());
    out.i.resize(hw);
    out.f.resize(hw);
    out.g.resize(hw);
    out.o.resize(hw);
    out.c.resize(hw);
    out.tc.resize(hw);
    out.h.resize(hw);

    std::vector<double> z(4 * static_cast<std::size_t>(hw));
    for (int row = 0; row < 4 * hw; ++row) {
        double acc = bias[row];
        const double* wi = w_in + static_cast<std::size_t>(row) * d;
        for (int col = 0; col < d; ++col) acc += wi[col] * x[col];
        const double* wr = w_rec + static_cast<std::size_t>(row) * hw;
        for (int col = 0; col < hw; ++col) acc += wr[col] * h_prev[col];
        z[row] = acc;
    }
    for (int j = 0; j < hw; ++j) {
        out.i[j] = sigmoid(z[j]);
        out.f[j] = sigmoid(z[hw + j]);
        out.g[j] = std::tanh(z[2 * hw + j]);
        out.o[j] = sigmoid(z[3 * hw + j]);
        out.c[j] = out.f[j] * c_prev[j] + out.i[j] * out.g[j];
        out.tc[j] = std::tanh(out.c[j]);
        out.h[j] = out.o[j] * out.tc[j];
    }
}

/// Backpropagates through one layer step. `dh`/`dc` are gradients w.r.t. the
/// layer's output hidden and cell; on return `dh_prev`/`dc_prev` hold the
/// gradients for the previous step and `dx` the gradient w.r.t. the input.
void layer_backward(const RnnParams& p, int layer, const LayerCache& cache,
                    std::span<const double> dh, std::span<const double> dc_in,
                    std::span<double> grad, std::vector<double>& dh_prev,
                    std::vector<double>& dc_prev, std::vector<double>& dx) {
    const int hw = p.hidden_width();
    const int d = p.layer_input_dim(layer);
    const auto values = p.values();
    const double* w_in = values.data() + p.input_weights_offset(layer);
    const double* w_rec = values.data() + p.recurrent_weights_offset(layer);
    double* g_in = grad.data() + p.input_weights_offset(layer);
    double* g_rec = grad.data() + p.recurrent_weights_offset(layer);
    double* g_bias = grad.data() + p.bias_offset(layer);

    std::vector<double> dz(4 * static_cast<std::size_t>(hw));
    dc_prev.assign(hw, 0.0);
    for (int j = 0; j < hw; ++j) {
        const double dc = dc_in[j] + dh[j] * cache.o[j] * (1.0 - cache.tc[j] * cache.tc[j]);
        const double d_o = dh[j] * cache.tc[j];
        const double d_i = dc * cache.g[j];
        const double d_g = dc * cache.i[j];
        const double d_f = dc * cache.c_prev[j];
        dc_prev[j] = dc * cache.f[j];
        dz[j] = d_i * cache.i[j] * (1.0 - cache.i[j]);
        dz[hw + j] = d_f * cache.f[j] * (1.0 - cache.f[j]);
        dz[2 * hw + j] = d_g * (1.0 - cache.g[j] * cache.g[j]);
        dz[3 * hw + j] = d_o * cache.o[j] * (1.0 - cache.o[j]);
    }
    dh_prev.assign(hw, 0.0);
    dx.assign(d, 0.0);
    for (int row = 0; row < 4 * hw; ++row) {
        const double dzr = dz[row];
        g_bias[row] += dzr;
        const std::size_t in_base = static_cast<std::size_t>(row) * d;
        for (int col = 0; col < d; ++col) {
            g_in[in_base + col] += dzr * cache.x[col];
            dx[col] += w_in[in_base + col] * dzr;
        }
        const std::size_t rec_base = static_cast<std::size_t>(row) * hw;
        for (int col = 0; col < hw; ++col) {
            g_rec[rec_base + col] += dzr * cache.h_prev[col];
            dh_prev[col] += w_rec[rec_base + col] * dzr;
        }
    }
}

void require_finite_state(const RnnState& s) {
    for (const auto& v : s.hidden)
        for (double x : v)
            if (!std::isfinite(x)) throw ModelError("LSTM produced a non-finite hidden state");
    for (const auto& v : s.cell)
        for (double x : v)
            if (!std::isfinite(x)) throw ModelError("LSTM produced a non-finite cell state");
}

double batch_nll_indexed(const RnnParams& params, const HeadKinds& heads,
                         std::span<const IssueSequence> data,
                         std::span<const std::size_t> indices, std::span<double> gradient,
                         Execution exec) {
    const std::size_t n = indices.size();
    std::vector<double> losses(n, 0.0);
    if (gradient.empty()) {
        detail::parallel_for(n, exec, [&](std::size_t k) {
            losses[k] = sequence_nll(params, heads, data[indices[k]]);
        });
        double total = 0.0;
        for (double l : losses) total += l;
        return total;
    }

    // Blocks bound the memory of per-sequence gradient buffers.
    constexpr std::size_t kBlock = 256;
    const std::size_t width = params.size();
    std::vector<std::vector<double>> buffers(std::min(n, kBlock), std::vector<double>(width));
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += kBlock) {
        const std::size_t count = std::min(kBlock, n - start);
        detail::parallel_for(count, exec, [&](std::size_t k) {
            auto& buf = buffers[k];
            std::fill(buf.begin(), buf.end(), 0.0);
            losses[start + k] = sequence_nll(params, heads, data[indices[start + k]], buf);
        });
        for (std::size_t k = 0; k < count; ++k) {
            total += losses[start + k];
            const auto& buf = buffers[k];
            for (std::size_t j = 0; j < width; ++j) gradient[j] += buf[j];
        }
    }
    return total;
}

}  // namespace

std::string to_string(IntervalHead head) {
    switch (head) {
        case IntervalHead::geometric: return "geometric";
        case IntervalHead::negbin: return "negbin";
        case IntervalHead::exponential: return "exponential";
    }
    return "unknown";
}

std::string to_string(SizeHead head) {
    return head == SizeHead::poisson ? "poisson" : "negbin";
}

IssueSequence to_sequence(const SizeIntervalSeries& si) {
    IssueSequence seq;
    seq.intervals.assign(si.intervals.begin(), si.intervals.end());
    seq.sizes.assign(si.sizes.begin(), si.sizes.end());
    return seq;
}

std::array<double, 2> rnn_input(double interval, double size) {
    return {std::log1p(interval), std::log1p(size)};
}

double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

RnnParams::RnnParams(int hidden_width, int layers, int input_dim)
    : hidden_(hidden_width), layers_(layers), input_dim_(input_dim) {
    if (hidden_width < 1) throw ConfigError("hidden width must be >= 1");
    if (layers < 1) throw ConfigError("at least one LSTM layer is required");
    if (input_dim < 1) throw ConfigError("input dimension must be >= 1");
    std::size_t offset = 0;
    const auto h = static_cast<std::size_t>(hidden_width);
    for (int l = 0; l < layers; ++l) {
        layer_offsets_.push_back(offset);
        const auto d = static_cast<std::size_t>(layer_input_dim(l));
        offset += 4 * h * d + 4 * h * h + 4 * h;
    }
    head_offset_ = offset;
    offset += 2 * (h + 1) + 2;
    values_.assign(offset, 0.0);
}

RnnParams RnnParams::zeros(int hidden_width, int layers, int input_dim) {
    return RnnParams(hidden_width, layers, input_dim);
}

RnnParams RnnParams::initialize(int hidden_width, int layers, std::uint64_t seed, int input_dim) {
    RnnParams p(hidden_width, layers, input_dim);
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden_width));
    auto fill = [&](std::size_t offset, std::size_t n) {
        for (std::size_t j = 0; j < n; ++j) p.values_[offset + j] = scale * (2.0 * rng.uniform() - 1.0);
    };
    const auto h = static_cast<std::size_t>(hidden_width);
    for (int l = 0; l < layers; ++l) {
        fill(p.input_weights_offset(l), 4 * h * static_cast<std::size_t>(p.layer_input_dim(l)));
        fill(p.recurrent_weights_offset(l), 4 * h * h);
    }
    fill(p.interval_w_offset(), h);
    fill(p.size_w_offset(), h);
    return p;
}

std::size_t RnnParams::input_weights_offset(int layer) const {
    return layer_offsets_.at(static_cast<std::size_t>(layer));
}

std::size_t RnnParams::recurrent_weights_offset(int layer) const {
    return input_weights_offset(layer) +
           4 * static_cast<std::size_t>(hidden_) * static_cast<std::size_t>(layer_input_dim(layer));
}

std::size_t RnnParams::bias_offset(int layer) const {
    const auto h = static_cast<std::size_t>(hidden_);
    return recurrent_weights_offset(layer) + 4 * h * h;
}

bool RnnParams::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

RnnState RnnState::zeros(const RnnParams& params) {
    const auto h = static_cast<std::size_t>(params.hidden_width());
    const auto l = static_cast<std::size_t>(params.layers());
    return {std::vector<std::vector<double>>(l, std::vector<double>(h, 0.0)),
            std::vector<std::vector<double>>(l, std::vector<double>(h, 0.0))};
}

RnnState lstm_step(const RnnParams& params, const RnnState& state, std::span<const double> input) {
    if (input.size() != static_cast<std::size_t>(params.input_dim())) {
        throw ValidationError("LSTM input has the wrong width");
    }
    RnnState next = state;
    LayerCache cache;
    std::span<const double> x = input;
    for (int l = 0; l < params.layers(); ++l) {
        const auto li = static_cast<std::size_t>(l);
        layer_forward(params, l, x, state.hidden[li], state.cell[li], cache);
        next.hidden[li] = cache.h;
        next.cell[li] = cache.c;
        x = next.hidden[li];
    }
    require_finite_state(next);
    return next;
}

double project_mean(std::span<const double> w, double w0, std::span<const double> hidden) {
    return 1.0 + softplus(dot(w, hidden) + w0);
}

HeadOutput evaluate_heads(const RnnParams& params, const HeadKinds& heads,
                          std::span<const double> hidden) {
    HeadOutput out;
    const double a = dot(params.interval_w(), hidden) + params.interval_w0();
    out.interval_mean = heads.interval == IntervalHead::exponential ? softplus(a) : 1.0 + softplus(a);
    if (heads.interval == IntervalHead::negbin) out.interval_nu = 1.0 + softplus(params.dispersion_q());
    out.size_mean = project_mean(params.size_w(), params.size_w0(), hidden);
    if (heads.size == SizeHead::negbin) out.size_nu = 1.0 + softplus(params.dispersion_m());
    return out;
}

double sequence_nll(const RnnParams& params, const HeadKinds& heads, const IssueSequence& seq,
                    std::span<double> gradient) {
    if (seq.intervals.size() != seq.sizes.size()) {
        throw ValidationError("sequence intervals and sizes differ in length");
    }
    const std::size_t n = seq.size();
    if (n < 2) return 0.0;
    const std::size_t steps = n - 1;
    const int layers = params.layers();
    const auto hw = static_cast<std::size_t>(params.hidden_width());
    const bool backprop = !gradient.empty();
    const auto w_q = params.interval_w();
    const auto w_m = params.size_w();
    const double disp_q = params.dispersion_q();
    const double disp_m = params.dispersion_m();

    std::vector<LayerCache> caches(backprop ? steps * static_cast<std::size_t>(layers) : 0);
    std::vector<std::vector<double>> dh_head(backprop ? steps : 0);
    LayerCache scratch;

    RnnState state = RnnState::zeros(params);
    double nll = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const auto input = rnn_input(seq.intervals[t], seq.sizes[t]);
        std::span<const double> x = input;
        for (int l = 0; l < layers; ++l) {
            const auto li = static_cast<std::size_t>(l);
            LayerCache& cache = backprop ? caches[t * static_cast<std::size_t>(layers) + li] : scratch;
            layer_forward(params, l, x, state.hidden[li], state.cell[li], cache);
            state.hidden[li] = cache.h;
            state.cell[li] = cache.c;
            x = state.hidden[li];
        }
        const auto& h = state.top();
        const double a = dot(w_q, h) + params.interval_w0();
        const double b = dot(w_m, h) + params.size_w0();
        const HeadTerm tq = interval_term(heads.interval, a, disp_q, seq.intervals[t + 1]);
        const HeadTerm tm = size_term(heads.size, b, disp_m, seq.sizes[t + 1]);
        nll -= tq.loglik + tm.loglik;

        if (backprop) {
            auto& dh = dh_head[t];
            dh.resize(hw);
            for (std::size_t j = 0; j < hw; ++j) {
                dh[j] = -(tq.d_pre * w_q[j] + tm.d_pre * w_m[j]);
                gradient[params.interval_w_offset() + j] -= tq.d_pre * h[j];
                gradient[params.size_w_offset() + j] -= tm.d_pre * h[j];
            }
            gradient[params.interval_w0_offset()] -= tq.d_pre;
            gradient[params.size_w0_offset()] -= tm.d_pre;
            gradient[params.dispersion_q_offset()] -= tq.d_disp;
            gradient[params.dispersion_m_offset()] -= tm.d_disp;
        }
    }
    if (!backprop) return nll;

    std::vector<std::vector<double>> dh_next(static_cast<std::size_t>(layers), std::vector<double>(hw, 0.0));
    std::vector<std::vector<double>> dc_next(static_cast<std::size_t>(layers), std::vector<double>(hw, 0.0));
    std::vector<double> dh(hw), dh_prev, dc_prev, dx, dx_above;
    for (std::size_t t = steps; t-- > 0;) {
        for (int l = layers - 1; l >= 0; --l) {
            const auto li = static_cast<std::size_t>(l);
            for (std::size_t j = 0; j < hw; ++j) {
                dh[j] = dh_next[li][j] + (l == layers - 1 ? dh_head[t][j] : dx_above[j]);
            }
            layer_backward(params, l, caches[t * static_cast<std::size_t>(layers) + li], dh,
                           dc_next[li], gradient, dh_prev, dc_prev, dx);
            dh_next[li] = dh_prev;
            dc_next[li] = dc_prev;
            dx_above = dx;
        }
    }
    return nll;
}

double batch_nll(const RnnParams& params, const HeadKinds& heads,
                 std::span<const IssueSequence> batch, std::span<double> gradient, Execution exec) {
    if (!gradient.empty() && gradient.size() != params.size()) {
        throw ValidationError("gradient buffer does not match the parameter count");
    }
    std::vector<std::size_t> indices(batch.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    return batch_nll_indexed(params, heads, batch, indices, gradient, exec);
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
    if (!(weight_decay >= 0.0 && weight_decay < 1.0)) throw ConfigError("weight decay must lie in [0, 1)");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(adam_epsilon > 0.0)) throw ConfigError("Adam epsilon must be > 0");
    if (batch_size < 0) throw ConfigError("batch size must be >= 0");
}

TrainResult train_global(RnnParams params, std::span<const IssueSequence> dataset,
                         const HeadKinds& heads, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw ValidationError("cannot train on an empty dataset");
    for (const auto& seq : dataset) {
        if (seq.size() < 2) throw ValidationError("every training sequence needs >= 2 issue points");
    }
    std::vector<IssueSequence> data(dataset.begin(), dataset.end());
    std::sort(data.begin(), data.end());

    const std::size_t width = params.size();
    std::vector<double> m(width, 0.0), v(width, 0.0), grad(width);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = cfg.batch_size == 0 ? data.size() : static_cast<std::size_t>(cfg.batch_size);
    Rng rng(cfg.seed);

    TrainResult result;
    result.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));
    long step = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.batch_size > 0) {
            for (std::size_t i = order.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
                std::swap(order[i - 1], order[std::min(j, i - 1)]);
            }
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t count = std::min(batch, order.size() - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            double loss = 0.0;
            try {
                loss = batch_nll_indexed(params, heads, data,
                                         std::span<const std::size_t>(order).subspan(start, count), grad,
                                         cfg.exec);
            } catch (const TrainingDivergence&) {
                throw;
            } catch (const ModelError& e) {
                throw TrainingDivergence(std::string(e.what()) + " in epoch " + std::to_string(epoch), epoch);
            }
            if (!std::isfinite(loss) ||
                !std::all_of(grad.begin(), grad.end(), [](double g) { return std::isfinite(g); })) {
                throw TrainingDivergence("non-finite loss or gradient in epoch " + std::to_string(epoch),
                                         epoch);
            }
            epoch_loss += loss;
            ++step;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
            auto theta = params.values();
            for (std::size_t j = 0; j < width; ++j) {
                m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * grad[j];
                v[j] = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * grad[j] * grad[j];
                const double direction = (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg.adam_epsilon);
                theta[j] = (1.0 - cfg.weight_decay) * theta[j] - cfg.learning_rate * direction;
            }
        }
        result.loss_trace.push_back(epoch_loss);
        if (!params.all_finite()) {
            throw TrainingDivergence("non-finite parameters after epoch " + std::to_string(epoch), epoch);
        }
    }
    result.params = std::move(params);
    return result;
}

TrainResult train_global(RnnParams params, std::span<const SizeIntervalSeries> dataset,
                         const HeadKinds& heads, const TrainConfig& cfg) {
    std::vector<IssueSequence> seqs;
    seqs.reserve(dataset.size());
    for (const auto& si : dataset) seqs.push_back(to_sequence(si));
    return train_global(std::move(params), std::span<const IssueSequence>(seqs), heads, cfg);
}

GradientCheckReport gradient_check(const RnnParams& params, const HeadKinds& heads,
                                   std::span<const IssueSequence> batch, double epsilon,
                                   std::optional<std::pair<std::size_t, double>> corruption) {
    if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) throw ConfigError("gradient check epsilon must lie in [1e-6, 1e-3]");
    GradientCheckReport report;
    const std::size_t width = params.size();
    report.analytic.assign(width, 0.0);
    batch_nll(params, heads, batch, report.analytic, Execution::serial);
    if (corruption) report.analytic.at(corruption->first) += corruption->second;

    report.numeric.assign(width, 0.0);
    RnnParams probe = params;
    for (std::size_t j = 0; j < width; ++j) {
        const double original = probe.values()[j];
        probe.values()[j] = original + epsilon;
        const double up = batch_nll(probe, heads, batch, {}, Execution::serial);
        probe.values()[j] = original - epsilon;
        const double down = batch_nll(probe, heads, batch, {}, Execution::serial);
        probe.values()[j] = original;
        report.numeric[j] = (up - down) / (2.0 * epsilon);

        const double a = report.analytic[j];
        const double n = report.numeric[j];
        const double denom = std::max({std::abs(a), std::abs(n), kGradientCheckFloor});
        const double rel = std::abs(a - n) / denom;
        if (rel > report.max_relative_error) {
            report.max_relative_error = rel;
            report.worst_coordinate = j;
        }
    }
    return report;
}

namespace {

struct TensorEntry {
    std::string name;
    std::size_t offset;
    std::size_t rows;
    std::size_t cols;
};

std::vector<TensorEntry> tensor_table(const RnnParams& p) {
    std::vector<TensorEntry> table;
    const auto h = static_cast<std::size_t>(p.hidden_width());
    for (int l = 0; l < p.layers(); ++l) {
        const std::string prefix = "lstm." + std::to_string(l) + ".";
        table.push_back({prefix + "input", p.input_weights_offset(l), 4 * h,
                         static_cast<std::size_t>(p.layer_input_dim(l))});
        table.push_back({prefix + "recurrent", p.recurrent_weights_offset(l), 4 * h, h});
        table.push_back({prefix + "bias", p.bias_offset(l), 4 * h, 1});
    }
    table.push_back({"head.interval.w", p.interval_w_offset(), h, 1});
    table.push_back({"head.interval.w0", p.interval_w0_offset(), 1, 1});
    table.push_back({"head.size.w", p.size_w_offset(), h, 1});
    table.push_back({"head.size.w0", p.size_w0_offset(), 1, 1});
    table.push_back({"head.dispersion_q", p.dispersion_q_offset(), 1, 1});
    table.push_back({"head.dispersion_m", p.dispersion_m_offset(), 1, 1});
    return table;
}

constexpr const char* kCheckpointMagic = "renewcast-rnn-checkpoint";
constexpr int kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const RnnParams& params, std::ostream& out) {
    out << kCheckpointMagic << " v" << kCheckpointVersion << "\n"
        << "input_dim " << params.input_dim() << "\n"
        << "hidden " << params.hidden_width() << "\n"
        << "layers " << params.layers() << "\n";
    const auto values = params.values();
    out << std::hexfloat;
    for (const auto& t : tensor_table(params)) {
        out << "tensor " << t.name << " " << t.rows << " " << t.cols << "\n";
        for (std::size_t r = 0; r < t.rows; ++r) {
            for (std::size_t c = 0; c < t.cols; ++c) {
                out << (c ? " " : "") << values[t.offset + r * t.cols + c];
            }
            out << "\n";
        }
    }
    out << std::defaultfloat << "end\n";
}

RnnParams load_checkpoint(std::istream& in) {
    auto fail = [](const std::string& why) -> void { throw ValidationError("bad checkpoint: " + why); };
    std::string magic, version;
    in >> magic >> version;
    if (magic != kCheckpointMagic) fail("missing header");
    if (version != "v" + std::to_string(kCheckpointVersion)) fail("unsupported version " + version);
    auto read_field = [&](const char* name) {
        std::string key;
        int value = 0;
        if (!(in >> key >> value) || key != name) fail(std::string("expected ") + name);
        return value;
    };
    const int input_dim = read_field("input_dim");
    const int hidden = read_field("hidden");
    const int layers = read_field("layers");
    RnnParams params = RnnParams::zeros(hidden, layers, input_dim);
    auto values = params.values();
    for (const auto& t : tensor_table(params)) {
        std::string keyword, name;
        std::size_t rows = 0, cols = 0;
        if (!(in >> keyword >> name >> rows >> cols) || keyword != "tensor") fail("expected tensor");
        if (name != t.name || rows != t.rows || cols != t.cols) fail("unexpected tensor " + name);
        for (std::size_t j = 0; j < rows * cols; ++j) {
            std::string token;
            if (!(in >> token)) fail("truncated tensor " + name);
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0') fail("unparseable value '" + token + "'");
            values[t.offset + j] = v;
        }
    }
    std::string tail;
    if (!(in >> tail) || tail != "end") fail("missing end marker");
    return params;
}

void save_checkpoint(const RnnParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    save_checkpoint(params, out);
}

RnnParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open checkpoint " + path);
    return load_checkpoint(in);
}

}  // namespace renewcast
