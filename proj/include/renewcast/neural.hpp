#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renewcast/rng.hpp"
#include "renewcast/series.hpp"

namespace renewcast {

enum class IntervalHead { geometric, negbin, exponential };
enum class SizeHead { poisson, negbin };

struct HeadKinds {
    IntervalHead interval = IntervalHead::negbin;
    SizeHead size = SizeHead::negbin;
};

std::string to_string(IntervalHead head);
std::string to_string(SizeHead head);

/// (interval, size) pairs of one item, as fed to the recurrent model.
/// Intervals may be real-valued for continuous-time models.
struct IssueSequence {
    std::vector<double> intervals;
    std::vector<double> sizes;

    std::size_t size() const noexcept { return sizes.size(); }
    friend auto operator<=>(const IssueSequence&, const IssueSequence&) = default;
};

IssueSequence to_sequence(const SizeIntervalSeries& si);

/// LSTM input transform for one issue point.
std::array<double, 2> rnn_input(double interval, double size);

double softplus(double x);
double sigmoid(double x);

/// All trainable weights, stored in one flat vector.
///
/// Per layer l (input width d_l, d_0 = input_dim, d_l = H above):
///   input weights 4H x d_l, recurrent weights 4H x H, bias 4H,
/// with gate rows ordered (input, forget, candidate, output). Then the
/// interval head (w, w0), the size head (w, w0) and two free dispersion
/// parameters mapped to nu = 1 + softplus(.).
class RnnParams {
public:
    RnnParams() = default;

    static RnnParams zeros(int hidden_width, int layers = 1, int input_dim = 2);
    /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero biases and head offsets.
    static RnnParams initialize(int hidden_width, int layers, std::uint64_t seed,
                                int input_dim = 2);

    int hidden_width() const noexcept { return hidden_; }
    int layers() const noexcept { return layers_; }
    int input_dim() const noexcept { return input_dim_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    int layer_input_dim(int layer) const noexcept { return layer == 0 ? input_dim_ : hidden_; }
    std::size_t input_weights_offset(int layer) const;
    std::size_t recurrent_weights_offset(int layer) const;
    std::size_t bias_offset(int layer) const;
    std::size_t interval_w_offset() const noexcept { return head_offset_; }
    std::size_t interval_w0_offset() const noexcept { return head_offset_ + hidden_; }
    std::size_t size_w_offset() const noexcept { return head_offset_ + hidden_ + 1; }
    std::size_t size_w0_offset() const noexcept { return head_offset_ + 2 * hidden_ + 1; }
    std::size_t dispersion_q_offset() const noexcept { return head_offset_ + 2 * hidden_ + 2; }
    std::size_t dispersion_m_offset() const noexcept { return head_offset_ + 2 * hidden_ + 3; }

    std::span<const double> interval_w() const { return view(interval_w_offset(), hidden_); }
    std::span<const double> size_w() const { return view(size_w_offset(), hidden_); }
    double interval_w0() const { return values_[interval_w0_offset()]; }
    double size_w0() const { return values_[size_w0_offset()]; }
    double& interval_w0() { return values_[interval_w0_offset()]; }
    double& size_w0() { return values_[size_w0_offset()]; }
    double& dispersion_q() { return values_[dispersion_q_offset()]; }
    double& dispersion_m() { return values_[dispersion_m_offset()]; }
    double dispersion_q() const { return values_[dispersion_q_offset()]; }
    double dispersion_m() const { return values_[dispersion_m_offset()]; }

    bool all_finite() const;

    friend bool operator==(const RnnParams&, const RnnParams&) = default;

private:
    RnnParams(int hidden_width, int layers, int input_dim);
    std::span<const double> view(std::size_t offset, std::size_t n) const {
        return std::span<const double>(values_).subspan(offset, n);
    }

    int hidden_ = 0;
    int layers_ = 0;
    int input_dim_ = 2;
    std::vector<std::size_t> layer_offsets_;
    std::size_t head_offset_ = 0;
    std::vector<double> values_;
};

/// Hidden and cell vectors per layer.
struct RnnState {
    std::vector<std::vector<double>> hidden;
    std::vector<std::vector<double>> cell;

    static RnnState zeros(const RnnParams& params);
    const std::vector<double>& top() const { return hidden.back(); }

    friend bool operator==(const RnnState&, const RnnState&) = default;
};

/// One step of the stacked LSTM. Throws ModelError on non-finite output.
RnnState lstm_step(const RnnParams& params, const RnnState& state, std::span<const double> input);

/// 1 + softplus(w . h + w0): a conditional mean in (1, inf).
double project_mean(std::span<const double> w, double w0, std::span<const double> hidden);

/// Conditional laws produced by the heads at one hidden state.
struct HeadOutput {
    double interval_mean = 1.0;
    double interval_nu = 0.0;  ///< set for the negbin interval head
    double size_mean = 1.0;
    double size_nu = 0.0;      ///< set for the negbin size head
};

HeadOutput evaluate_heads(const RnnParams& params, const HeadKinds& heads,
                          std::span<const double> hidden);

/// Negative log-likelihood of every one-step conditional (Q_i, M_i | h_{i-1})
/// for i >= 2 of one sequence. When `gradient` is non-empty the parameter
/// gradient is added into it.
double sequence_nll(const RnnParams& params, const HeadKinds& heads, const IssueSequence& seq,
                    std::span<double> gradient = {});

/// Summed NLL over a batch. Per-sequence gradients are reduced in batch
/// order, so serial and parallel execution agree bit-for-bit.
double batch_nll(const RnnParams& params, const HeadKinds& heads,
                 std::span<const IssueSequence> batch, std::span<double> gradient = {},
                 Execution exec = Execution::parallel);

struct TrainConfig {
    double learning_rate = 0.1;
    double weight_decay = 0.01;
    int epochs = 100;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;
    /// 0 means full batch. Otherwise minibatches are drawn from a seeded
    /// shuffle each epoch.
    int batch_size = 0;
    Execution exec = Execution::parallel;

    void validate() const;
};

struct TrainResult {
    RnnParams params;
    std::vector<double> loss_trace;  ///< summed NLL per epoch
};

/// Adam on the summed NLL with decoupled weight decay:
///   theta <- (1 - weight_decay) * theta - lr * adam_direction.
/// Sequences are put in a canonical order first, which makes the result
/// independent of input order.
TrainResult train_global(RnnParams params, std::span<const IssueSequence> dataset,
                         const HeadKinds& heads, const TrainConfig& cfg);
TrainResult train_global(RnnParams params, std::span<const SizeIntervalSeries> dataset,
                         const HeadKinds& heads, const TrainConfig& cfg);

struct GradientCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_coordinate = 0;
    std::vector<double> analytic;
    std::vector<double> numeric;

    bool passed(double tolerance = 1e-4) const { return max_relative_error < tolerance; }
};

/// Relative error |a - n| / max(|a|, |n|, floor), coordinate-wise.
inline constexpr double kGradientCheckFloor = 1e-6;

/// Compares the backpropagated gradient with central differences.
/// `corruption` adds a value to one analytic coordinate (negative control).
GradientCheckReport gradient_check(const RnnParams& params, const HeadKinds& heads,
                                   std::span<const IssueSequence> batch, double epsilon,
                                   std::optional<std::pair<std::size_t, double>> corruption = {});

/// Structured-text checkpoint with shape headers; values are written as
/// hexadecimal floats and round-trip bit-exactly.
void save_checkpoint(const RnnParams& params, std::ostream& out);
RnnParams load_checkpoint(std::istream& in);
void save_checkpoint(const RnnParams& params, const std::string& path);
RnnParams load_checkpoint(const std::string& path);

}  // namespace renewcast
